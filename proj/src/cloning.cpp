#include "eccc/cloning.hpp"

#include <cmath>

namespace eccc {

namespace {

// F(rho, diag(rho)) in the frame where the cloning basis is computational:
// the squared trace norm of sqrt(rho) D^{1/2} with D = diag(rho_jj). The
// singular values are the square roots directly, which keeps full precision
// even when Born weights or eigenvalues are tiny.
double diagonal_fidelity_frame(const Matrix& rho_frame) {
  const Eigen::VectorXd sq = rho_frame.diagonal().real().cwiseMax(0.0).cwiseSqrt();
  const Matrix a = matrix_sqrt_psd(rho_frame) * sq.cast<Complex>().asDiagonal();
  const Eigen::JacobiSVD<Matrix> svd(a);
  const double acc = svd.singularValues().sum();
  return acc * acc;
}

}  // namespace

ClonedOutput dephase(const DensityMatrix& rho, const OrthonormalBasis& basis) {
  if (rho.dim() != basis.dim()) throw std::invalid_argument("dephase: dimension mismatch");
  const Matrix& b = basis.columns();
  const Matrix frame = b.adjoint() * rho.entries() * b;
  Eigen::VectorXd p = frame.diagonal().real();
  for (Index j = 0; j < p.size(); ++j) {
    if (p[j] < -tol().psd) {
      throw std::runtime_error("dephase: Born weight " + std::to_string(p[j]) + " below zero");
    }
    p[j] = std::max(0.0, p[j]);
  }
  Matrix out = b * p.cast<Complex>().asDiagonal() * b.adjoint();
  out = (out + Matrix(out.adjoint())) / 2.0;
  return ClonedOutput{basis, std::move(p), DensityMatrix(std::move(out))};
}

double cloning_fidelity(const DensityMatrix& rho, const OrthonormalBasis& basis) {
  if (rho.dim() != basis.dim()) throw std::invalid_argument("cloning_fidelity: dimension mismatch");
  const Matrix& b = basis.columns();
  if (rho.is_pure()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries());
    const Vector y = b.adjoint() * es.eigenvectors().col(rho.dim() - 1);
    double acc = 0.0;
    for (Index j = 0; j < y.size(); ++j) {
      const double pj = std::norm(y[j]);
      acc += pj * pj;
    }
    return acc;
  }
  return diagonal_fidelity_frame(b.adjoint() * rho.entries() * b);
}

double average_cloning_fidelity(const Ensemble& e, const OrthonormalBasis& basis) {
  if (e.dim() != basis.dim()) {
    throw std::invalid_argument("average_cloning_fidelity: dimension mismatch");
  }
  double acc = 0.0;
  for (const auto& it : e.items()) acc += it.weight * cloning_fidelity(it.state, basis);
  const double floor = 1.0 / static_cast<double>(e.dim());
  if (!(acc >= floor - 1e-12)) {
    throw std::runtime_error("average_cloning_fidelity: value " + std::to_string(acc) +
                             " fell below the 1/d floor");
  }
  return acc;
}

double eigen_ensemble_fidelity(const DensityMatrix& rho, const OrthonormalBasis& basis) {
  if (rho.dim() != 2 || basis.dim() != 2) {
    throw std::invalid_argument("eigen_ensemble_fidelity: defined for qubits only");
  }
  const SpectralDecomposition sd = spectral(rho);
  const Matrix y = basis.columns().adjoint() * sd.eigenvectors.columns();
  double acc = 0.0;
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      const double p = std::norm(y(j, i));
      acc += sd.eigenvalues[i] * p * p;
    }
  }
  return acc;
}

}  // namespace eccc
