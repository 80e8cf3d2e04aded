// Core quantum state types: density matrices, pure states, orthonormal
// bases, Bloch vectors, spectral decompositions, and fidelity.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace eccc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Validation and comparison tolerances. A single shared instance (tol())
/// is used everywhere so the property suites have one knob.
struct Tolerances {
  double hermiticity = 1e-10;
  double unit_trace = 1e-10;
  double psd = 1e-10;  ///< eigenvalues in [-psd, 0) clamp to 0; below -psd is an error
  double orthonormality = 1e-10;
  double unit_norm = 1e-10;
  double bloch_norm = 1e-10;
  double unitarity = 1e-10;
  double weight_sum = 1e-10;
  double reconstruction = 1e-9;
  double pure_rank = 1e-9;  ///< eigenvalue threshold separating pure from mixed
  double matrix_equality = 1e-8;
};

const Tolerances& tol();

/// Largest absolute entrywise difference between two equally sized matrices.
double max_entry_distance(const Matrix& a, const Matrix& b);

/// Unit-norm complex amplitude vector.
class PureState {
 public:
  explicit PureState(Vector amplitudes);
  static PureState basis_state(Index dim, Index k);

  Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  /// <this|other>
  Complex inner(const PureState& other) const;
  /// |psi><psi|
  Matrix projector() const;

 private:
  Vector amps_;
};

/// Hermitian, positive semidefinite, unit-trace complex matrix.
class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positive semidefiniteness.
  explicit DensityMatrix(Matrix entries);
  static DensityMatrix pure(const PureState& psi);
  static DensityMatrix maximally_mixed(Index dim);

  Index dim() const { return m_.rows(); }
  const Matrix& entries() const { return m_; }
  /// tr(rho^2); 1 for pure states.
  double purity() const { return m_.squaredNorm(); }
  bool is_pure() const { return purity() >= 1.0 - 2.0 * tol().pure_rank; }

 private:
  struct Unchecked {};
  DensityMatrix(Matrix entries, Unchecked) : m_(std::move(entries)) {}
  Matrix m_;
};

/// Ordered set of d orthonormal vectors, stored as the columns of a unitary.
class OrthonormalBasis {
 public:
  OrthonormalBasis() : cols_(Matrix::Identity(1, 1)) {}
  /// Validates that the Gram matrix of the columns is the identity.
  explicit OrthonormalBasis(Matrix columns);
  static OrthonormalBasis computational(Index dim);

  Index dim() const { return cols_.rows(); }
  const Matrix& columns() const { return cols_; }
  PureState vector(Index j) const;

 private:
  Matrix cols_;
};

/// Real 3-vector r with |r| <= 1; represents a qubit state (I + r.sigma)/2.
class BlochVector {
 public:
  explicit BlochVector(const Eigen::Vector3d& r);
  BlochVector(double x, double y, double z) : BlochVector(Eigen::Vector3d(x, y, z)) {}

  const Eigen::Vector3d& r() const { return r_; }
  double norm() const { return r_.norm(); }

 private:
  Eigen::Vector3d r_;
};

/// Eigenvalues (descending, clamped into [0,1]) and eigenvectors of a state.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  OrthonormalBasis eigenvectors;
};

/// Fidelity F(rho, sigma) = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 in [0, 1].
/// Uses the shortcut F = <psi|sigma|psi> when either argument is pure.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Qubit fidelity from Bloch vectors:
/// (1 + r.r' + sqrt((1 - r.r)(1 - r'.r'))) / 2.
double fidelity_qubit_bloch(const BlochVector& r, const BlochVector& rp);

BlochVector to_bloch(const DensityMatrix& rho);
DensityMatrix from_bloch(const BlochVector& r);

SpectralDecomposition spectral(const DensityMatrix& rho);

/// Matrix square root of a Hermitian PSD matrix via eigendecomposition.
/// Eigenvalues in [-tol().psd, 0) clamp to zero; below that is an error.
Matrix matrix_sqrt_psd(const Matrix& hermitian);

/// True when u is unitary within tol().unitarity.
bool is_unitary(const Matrix& u);

}  // namespace eccc
