#include "eccc/random.hpp"

#include <random>

namespace eccc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Vector gaussian_vector(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v[i] = Complex(re, im);
  }
  return v;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ substream);
}

PureState random_pure_state(Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_pure_state: dim must be >= 1");
  std::mt19937_64 rng(seed);
  Vector v = gaussian_vector(dim, rng);
  double n = v.norm();
  while (n < 1e-12) {  // essentially impossible, but keeps the draw well defined
    v = gaussian_vector(dim, rng);
    n = v.norm();
  }
  return PureState(v / n);
}

Matrix random_unitary(Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_unitary: dim must be >= 1");
  std::mt19937_64 rng(seed);
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j) g.col(j) = gaussian_vector(dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the column phases so the distribution is Haar rather than QR-biased.
  for (Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= (std::abs(d) > 0.0) ? d / std::abs(d) : Complex(1.0, 0.0);
  }
  return q;
}

OrthonormalBasis random_basis(Index dim, std::uint64_t seed) {
  return OrthonormalBasis(random_unitary(dim, seed));
}

DensityMatrix random_density(Index dim, std::uint64_t seed, Index rank) {
  if (dim < 1) throw std::invalid_argument("random_density: dim must be >= 1");
  if (rank < 0 || rank > dim) throw std::invalid_argument("random_density: bad rank");
  if (rank == 0) rank = dim;
  std::mt19937_64 rng(seed);
  Matrix g(dim, rank);
  for (Index j = 0; j < rank; ++j) g.col(j) = gaussian_vector(dim, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  m = (m + Matrix(m.adjoint())) / 2.0;
  return DensityMatrix(std::move(m));
}

}  // namespace eccc
