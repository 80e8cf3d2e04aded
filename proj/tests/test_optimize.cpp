#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "eccc/cloning.hpp"
#include "eccc/optimize.hpp"
#include "eccc/random.hpp"

using namespace eccc;

namespace {

Ensemble common_eigenbasis_ensemble(Index d, Index n, std::uint64_t seed) {
  const Matrix u = random_unitary(d, seed);
  std::mt19937_64 rng(derive_seed(seed, 0xD1A6));
  std::uniform_real_distribution<double> uw(0.1, 1.0);
  std::vector<Ensemble::Item> items;
  for (Index i = 0; i < n; ++i) {
    Eigen::VectorXd lam(d);
    double s = 0.0;
    for (Index j = 0; j < d; ++j) {
      lam[j] = uw(rng);
      s += lam[j];
    }
    lam /= s;
    items.push_back({1.0 / static_cast<double>(n),
                     DensityMatrix(Matrix(u * lam.cast<Complex>().asDiagonal() * u.adjoint()))});
  }
  return Ensemble(d, std::move(items));
}

}  // namespace

TEST_SUITE("optimize") {

TEST_CASE("worked classicality values") {
  const Ensemble commuting(2, {{0.5, DensityMatrix::pure(PureState::basis_state(2, 0))},
                               {0.5, DensityMatrix::pure(PureState::basis_state(2, 1))}});
  CHECK(classicality(commuting).j == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(classicality(make_bb84_weighted(0.5)).j == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(classicality(make_bb84_weighted(0.9)).j == doctest::Approx(0.95).epsilon(1e-9));
  CHECK(classicality(make_six_state()).j == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  const Ensemble single(3, {{1.0, random_density(3, 99)}});
  const EcccResult r = classicality(single);
  CHECK(r.j == 1.0);
  CHECK(r.q == 0.0);
  CHECK(r.converged);
}

TEST_CASE("result stores q as 1 - j exactly") {
  for (int k = 0; k < 5; ++k) {
    const EcccResult r = classicality(random_ensemble(2, 3, false, 40 + k));
    CHECK(r.q == 1.0 - r.j);
    CHECK(r.j <= 1.0 + 1e-9);
    CHECK(r.j > 0.5);  // strict d = 2 floor
  }
}

TEST_CASE("qubit grid oracle") {
  CHECK(classicality_qubit_grid(make_bb84_weighted(0.5), 256).j ==
        doctest::Approx(0.75).epsilon(1e-4));

  const Ensemble one(2, {{1.0, DensityMatrix::pure(random_pure_state(2, 3))}});
  CHECK(classicality_qubit_grid(one, 64).j == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(classicality_qubit_grid(make_bb84_weighted(0.5), 8), std::invalid_argument);
  const Ensemble d3(3, {{1.0, DensityMatrix::maximally_mixed(3)}});
  CHECK_THROWS_AS(classicality_qubit_grid(d3, 64), std::invalid_argument);
}

TEST_CASE("grid and multistart routes agree on random qubit ensembles") {
  EcccOptions general;
  general.qubit_grid = false;  // force the Givens/simplex route
  for (int k = 0; k < 30; ++k) {
    const Ensemble e = random_ensemble(2, 1 + k % 5, k % 3 == 0, 1000 + k);
    const double via_grid = classicality_qubit_grid(e, 128).j;
    const double via_simplex = classicality(e, general).j;
    CHECK(std::abs(via_grid - via_simplex) <= 1e-6);
  }
}

TEST_CASE("analytic lower bounds") {
  const Ensemble single(2, {{1.0, DensityMatrix::maximally_mixed(2)}});
  CHECK(j_bounds(single).lower_weight == doctest::Approx(1.0).epsilon(1e-12));

  const JBounds b = j_bounds(make_bb84_weighted(0.5));
  CHECK(b.lower_weight == doctest::Approx(5.0 / 8.0).epsilon(1e-12));
  CHECK(b.lower_size == doctest::Approx(5.0 / 8.0).epsilon(1e-12));
  CHECK(b.upper == 1.0);

  CHECK(j_attainable_lower_bound(make_six_state()) == doctest::Approx(2.0 / 3.0));
  const Ensemble pure3 = random_ensemble(3, 4, true, 77);
  CHECK(j_attainable_lower_bound(pure3) == doctest::Approx(0.5));
  const Ensemble mixed2 = random_ensemble(2, 3, false, 78);
  CHECK(j_attainable_lower_bound(mixed2) == doctest::Approx(2.0 / 3.0));
  const Ensemble mixed3(3, {{1.0, DensityMatrix::maximally_mixed(3)}});
  CHECK_THROWS_AS(j_attainable_lower_bound(mixed3), std::invalid_argument);
}

TEST_CASE("bounds hold on a random suite") {
  for (int k = 0; k < 40; ++k) {
    const Index d = 2 + k % 3;
    const Ensemble e = random_ensemble(d, 1 + k % 6, k % 2 == 0, 2000 + k);
    const EcccResult r = classicality(e);
    const JBounds b = j_bounds(e);
    CHECK(r.j >= b.lower_weight - 1e-9);
    CHECK(r.j >= b.lower_size - 1e-9);
    CHECK(r.j > 1.0 / static_cast<double>(d));
    CHECK(r.j <= 1.0 + 1e-9);
  }
}

TEST_CASE("argmax transport under unitary conjugation is exact") {
  for (int k = 0; k < 10; ++k) {
    const Index d = 2 + k % 3;
    const Ensemble e = random_ensemble(d, 2 + k % 3, k % 2 == 0, 3000 + k);
    const EcccResult r = classicality(e);
    const Matrix u = random_unitary(d, 3100 + k);
    const Ensemble ue = unitary_conjugate(e, u);
    const OrthonormalBasis moved(Matrix(u * r.basis.columns()));
    CHECK(std::abs(average_cloning_fidelity(ue, moved) - r.j) <= 1e-12);
  }
}

TEST_CASE("classicality is invariant under unitary conjugation") {
  for (int k = 0; k < 8; ++k) {
    const Index d = 2 + k % 2;
    const Ensemble e = random_ensemble(d, 2 + k % 3, false, 3300 + k);
    const Matrix u = random_unitary(d, 3400 + k);
    const double j1 = classicality(e).j;
    const double j2 = classicality(unitary_conjugate(e, u)).j;
    CHECK(std::abs(j1 - j2) <= 2.0 * default_eps_opt(d));
  }
  const Ensemble e = make_bb84_weighted(0.5);
  CHECK(max_entry_distance(unitary_conjugate(e, Matrix::Identity(2, 2)).item(0).state.entries(),
                           e.item(0).state.entries()) == 0.0);
  Matrix not_unitary = Matrix::Identity(2, 2) * 2.0;
  CHECK_THROWS_AS(unitary_conjugate(e, not_unitary), std::invalid_argument);
}

TEST_CASE("common-eigenbasis ensembles are detected as classical") {
  for (int k = 0; k < 10; ++k) {
    const Index d = 2 + k % 3;
    const Ensemble e = common_eigenbasis_ensemble(d, 2 + k % 3, 3600 + k);
    CHECK(classicality(e).j >= 1.0 - 1e-9);
  }
}

TEST_CASE("fewer restarts never report a larger J") {
  EcccOptions base;
  base.qubit_grid = false;
  const Ensemble e = random_ensemble(3, 4, false, 4000);
  double prev = 0.0;
  for (const int r : {1, 2, 8, 32}) {
    EcccOptions o = base;
    o.restarts = r;
    const double j = classicality(e, o).j;
    CHECK(j >= prev - 1e-15);
    prev = j;
  }
  EcccOptions bad;
  bad.restarts = 0;
  CHECK_THROWS_AS(classicality(e, bad), std::invalid_argument);
}

TEST_CASE("product inequality") {
  const Ensemble sa(2, {{1.0, random_density(2, 5000)}});
  const Ensemble sb(2, {{1.0, random_density(2, 5001)}});
  const ProductCheckReport trivial = check_product_inequality(sa, sb);
  CHECK(trivial.ab.j == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(trivial.gap) <= 1e-9);
  CHECK(trivial.inequality_ok);

  const ProductCheckReport bb =
      check_product_inequality(make_bb84_weighted(0.5), make_bb84_weighted(0.5));
  CHECK(bb.ab.j >= 0.5625 - bb.eps_opt);
  CHECK(bb.inequality_ok);

  // commuting (x) arbitrary: J(AB) >= J(B) since J(commuting) = 1
  const Ensemble commuting(2, {{0.5, DensityMatrix::pure(PureState::basis_state(2, 0))},
                               {0.5, DensityMatrix::pure(PureState::basis_state(2, 1))}});
  const Ensemble arbitrary = random_ensemble(2, 3, false, 5002);
  const ProductCheckReport mixed = check_product_inequality(commuting, arbitrary);
  CHECK(mixed.a.j == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mixed.ab.j >= mixed.b.j - mixed.eps_opt);
  CHECK(mixed.inequality_ok);
}

TEST_CASE("basis parametrization round trip") {
  for (const Index d : {2, 3, 4, 5}) {
    for (int k = 0; k < 10; ++k) {
      const OrthonormalBasis b = random_basis(d, 6000 + 10 * d + k);
      const BasisParameters p = parameters_from_basis(b);
      CHECK(static_cast<Index>(p.coords.size()) == d * (d - 1));
      const OrthonormalBasis back = basis_from_parameters(p);
      // columns must match up to a per-column phase
      for (Index c = 0; c < d; ++c) {
        const double overlap = std::abs(b.columns().col(c).dot(back.columns().col(c)));
        CHECK(std::abs(overlap - 1.0) <= 1e-10);
      }
    }
  }
  BasisParameters bad;
  bad.dim = 3;
  bad.coords = {0.0, 0.0};
  CHECK_THROWS_AS(basis_from_parameters(bad), std::invalid_argument);
}

TEST_CASE("support restriction and full-space search agree") {
  // embed qubit ensembles into d = 4 with two dead directions
  for (int k = 0; k < 6; ++k) {
    const Ensemble small = random_ensemble(2, 2 + k % 2, k % 2 == 0, 7000 + k);
    std::vector<Ensemble::Item> items;
    for (const auto& it : small.items()) {
      Matrix big = Matrix::Zero(4, 4);
      big.topLeftCorner(2, 2) = it.state.entries();
      items.push_back({it.weight, DensityMatrix(std::move(big))});
    }
    const Ensemble embedded(4, std::move(items));
    const EcccResult restricted = classicality(embedded);
    EcccOptions full;
    full.restrict_support = false;
    const EcccResult unrestricted = classicality(embedded, full);
    const double reference = classicality(small).j;
    CHECK(std::abs(restricted.j - reference) <= 1e-6);
    CHECK(unrestricted.j <= restricted.j + 1e-6);
    CHECK(restricted.basis.dim() == 4);
  }
}

TEST_CASE("warm start dimension mismatch is rejected") {
  EcccOptions o;
  o.warm_starts.push_back(OrthonormalBasis::computational(3));
  CHECK_THROWS_AS(classicality(make_bb84_weighted(0.5), o), std::invalid_argument);
}

}  // TEST_SUITE
