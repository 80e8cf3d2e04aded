#include "eccc/types.hpp"

#include <cmath>
#include <sstream>

namespace eccc {

const Tolerances& tol() {
  static const Tolerances t;
  return t;
}

double max_entry_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_entry_distance: shape mismatch");
  }
  return (a - b).cwiseAbs().maxCoeff();
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 1) throw std::invalid_argument("pure state: dimension must be >= 1");
  const double n = amps_.norm();
  if (std::abs(n - 1.0) > tol().unit_norm) {
    throw std::invalid_argument("pure state: norm " + fmt(n) + " is not 1 within tolerance");
  }
}

PureState PureState::basis_state(Index dim, Index k) {
  if (dim < 1 || k < 0 || k >= dim) throw std::invalid_argument("basis_state: bad index");
  Vector v = Vector::Zero(dim);
  v[k] = 1.0;
  return PureState(std::move(v));
}

Complex PureState::inner(const PureState& other) const {
  if (dim() != other.dim()) throw std::invalid_argument("inner: dimension mismatch");
  return amps_.dot(other.amps_);
}

Matrix PureState::projector() const { return amps_ * amps_.adjoint(); }

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw std::invalid_argument("density matrix: must be square with dim >= 1");
  }
  const double herm = max_entry_distance(m_, m_.adjoint());
  if (herm > tol().hermiticity) {
    throw std::invalid_argument("density matrix: not Hermitian (max deviation " + fmt(herm) + ")");
  }
  const double tr_err = std::abs(m_.trace() - Complex(1.0, 0.0));
  if (tr_err > tol().unit_trace) {
    throw std::invalid_argument("density matrix: trace deviates from 1 by " + fmt(tr_err));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("density matrix: eigendecomposition failed");
  }
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -tol().psd) {
    throw std::invalid_argument("density matrix: not positive semidefinite (eigenvalue " +
                                fmt(lo) + ")");
  }
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
  return DensityMatrix(psi.projector(), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  if (dim < 1) throw std::invalid_argument("maximally_mixed: dim must be >= 1");
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim), Unchecked{});
}

// ---------------------------------------------------------------------------
// OrthonormalBasis

OrthonormalBasis::OrthonormalBasis(Matrix columns) : cols_(std::move(columns)) {
  if (cols_.rows() != cols_.cols() || cols_.rows() < 1) {
    throw std::invalid_argument("basis: need d vectors of dimension d");
  }
  const Matrix gram = cols_.adjoint() * cols_;
  const double dev = max_entry_distance(gram, Matrix::Identity(cols_.rows(), cols_.rows()));
  if (dev > tol().orthonormality) {
    throw std::invalid_argument("basis: Gram matrix deviates from identity by " + fmt(dev));
  }
}

OrthonormalBasis OrthonormalBasis::computational(Index dim) {
  return OrthonormalBasis(Matrix::Identity(dim, dim));
}

PureState OrthonormalBasis::vector(Index j) const {
  if (j < 0 || j >= dim()) throw std::invalid_argument("basis vector index out of range");
  Vector v = cols_.col(j);
  v /= v.norm();  // columns are unit up to tolerance; make the PureState exact
  return PureState(std::move(v));
}

// ---------------------------------------------------------------------------
// BlochVector

BlochVector::BlochVector(const Eigen::Vector3d& r) : r_(r) {
  if (r_.norm() > 1.0 + tol().bloch_norm) {
    throw std::invalid_argument("Bloch vector: |r| = " + fmt(r_.norm()) + " exceeds 1");
  }
}

// ---------------------------------------------------------------------------
// Fidelity and decompositions

namespace {

// F(|psi><psi|, sigma) = <psi|sigma|psi> where psi is the principal
// eigenvector of a (numerically) pure state.
double pure_overlap(const DensityMatrix& pure_state, const DensityMatrix& other) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(pure_state.entries());
  if (es.info() != Eigen::Success) throw std::runtime_error("fidelity: eigendecomposition failed");
  const Vector psi = es.eigenvectors().col(pure_state.dim() - 1);
  const double v = (psi.adjoint() * other.entries() * psi)(0, 0).real();
  return std::max(0.0, v);
}

}  // namespace

Matrix matrix_sqrt_psd(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  if (es.info() != Eigen::Success) throw std::runtime_error("matrix_sqrt_psd: eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues();
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -tol().psd) {
      throw std::runtime_error("matrix_sqrt_psd: eigenvalue " + fmt(lam[i]) +
                               " below PSD tolerance");
    }
    // Null modes of rank-deficient states come back as +/-1e-16 noise; the
    // square root would amplify that to 1e-8 and make the result depend on
    // the frame. They are floored to exact zeros instead.
    if (lam[i] < 1e-13) lam[i] = 0.0;
  }
  return es.eigenvectors() * lam.cwiseSqrt().cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  if (rho.is_pure()) return pure_overlap(rho, sigma);
  if (sigma.is_pure()) return pure_overlap(sigma, rho);
  // (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 equals the squared trace norm of
  // sqrt(sigma) sqrt(rho); the singular values are the square roots directly,
  // which avoids the precision loss of rooting near-zero eigenvalues.
  const Matrix a = matrix_sqrt_psd(sigma.entries()) * matrix_sqrt_psd(rho.entries());
  const Eigen::JacobiSVD<Matrix> svd(a);
  const double acc = svd.singularValues().sum();
  return acc * acc;
}

double fidelity_qubit_bloch(const BlochVector& r, const BlochVector& rp) {
  // 1 - |r|^2 = 4 det(rho); below the pure-rank threshold the state counts
  // as pure (matching the general path) and the term is dropped, which also
  // cuts off the cancellation noise of exactly-pure inputs.
  const auto mixedness = [](const BlochVector& v) {
    const double gap = std::max(0.0, 1.0 - v.r().squaredNorm());
    return gap <= 4.0 * tol().pure_rank ? 0.0 : gap;
  };
  const double dot = r.r().dot(rp.r());
  return 0.5 * (1.0 + dot + std::sqrt(mixedness(r) * mixedness(rp)));
}

BlochVector to_bloch(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw std::invalid_argument("to_bloch: dimension must be 2");
  const Matrix& m = rho.entries();
  return BlochVector(2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real());
}

DensityMatrix from_bloch(const BlochVector& r) {
  Matrix m(2, 2);
  const Eigen::Vector3d& v = r.r();
  m(0, 0) = Complex(0.5 * (1.0 + v.z()), 0.0);
  m(1, 1) = Complex(0.5 * (1.0 - v.z()), 0.0);
  m(0, 1) = Complex(0.5 * v.x(), -0.5 * v.y());
  m(1, 0) = Complex(0.5 * v.x(), 0.5 * v.y());
  return DensityMatrix(std::move(m));
}

SpectralDecomposition spectral(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries());
  if (es.info() != Eigen::Success) throw std::runtime_error("spectral: eigendecomposition failed");
  // Eigen returns ascending order; flip to descending.
  Eigen::VectorXd lam = es.eigenvalues().reverse();
  Matrix vecs = es.eigenvectors().rowwise().reverse();
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -tol().psd || lam[i] > 1.0 + tol().psd) {
      throw std::runtime_error("spectral: eigenvalue " + fmt(lam[i]) + " outside [0, 1]");
    }
    lam[i] = std::clamp(lam[i], 0.0, 1.0);
  }
  return SpectralDecomposition{std::move(lam), OrthonormalBasis(std::move(vecs))};
}

bool is_unitary(const Matrix& u) {
  if (u.rows() != u.cols() || u.rows() < 1) return false;
  const Matrix gram = u.adjoint() * u;
  return max_entry_distance(gram, Matrix::Identity(u.rows(), u.rows())) <= tol().unitarity;
}

}  // namespace eccc
