#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "eccc/qkd.hpp"
#include "eccc/random.hpp"

using namespace eccc;

namespace {

double binom_sigma(double r, std::int64_t n) {
  return std::sqrt(std::max(r * (1.0 - r), 1e-12) / static_cast<double>(n));
}

Ensemble commuting_pair() {
  return Ensemble(2, {{0.5, DensityMatrix::pure(PureState::basis_state(2, 0))},
                      {0.5, DensityMatrix::pure(PureState::basis_state(2, 1))}});
}

}  // namespace

TEST_SUITE("qkd") {

TEST_CASE("protocol specifications") {
  const ProtocolSpec bb = ProtocolSpec::bb84();
  CHECK(bb.bases.size() == 2);
  const Ensemble eb = bb.ensemble();
  CHECK(eb.size() == 4);
  for (const auto& it : eb.items()) CHECK(it.weight == doctest::Approx(0.25));

  const ProtocolSpec six = ProtocolSpec::six_state();
  CHECK(six.bases.size() == 3);
  CHECK(six.ensemble().size() == 6);
  CHECK(max_entry_distance(six.ensemble().mixture().entries(),
                           Matrix::Identity(2, 2) / 2.0) <= 1e-12);

  CHECK_THROWS_AS(ProtocolSpec(2, {OrthonormalBasis::computational(2)}, {0.5}),
                  std::invalid_argument);
}

TEST_CASE("exact error rates") {
  CHECK(error_rate_exact(commuting_pair(), OrthonormalBasis::computational(2)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(error_rate_exact(ProtocolSpec::bb84().ensemble(), OrthonormalBasis::computational(2)) ==
        doctest::Approx(0.25).epsilon(1e-12));
  const ProtocolSpec six = ProtocolSpec::six_state();
  for (const OrthonormalBasis& mub : six.bases) {
    CHECK(error_rate_exact(six.ensemble(), mub) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  const Ensemble with_mixed(2, {{0.5, DensityMatrix::maximally_mixed(2)},
                                {0.5, DensityMatrix::pure(PureState::basis_state(2, 0))}});
  CHECK_THROWS_AS(error_rate_exact(with_mixed, OrthonormalBasis::computational(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(min_error_rate(with_mixed), std::invalid_argument);
}

TEST_CASE("minimum error rate equals the quantumness") {
  const ErrorRateReport bb = min_error_rate(ProtocolSpec::bb84().ensemble());
  CHECK(bb.q_reference == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(bb.exact_r == bb.q_reference);  // shared optimizer, exact wiring

  const ErrorRateReport six = min_error_rate(ProtocolSpec::six_state().ensemble());
  CHECK(six.q_reference == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  const ErrorRateReport comm = min_error_rate(commuting_pair());
  CHECK(comm.q_reference == doctest::Approx(0.0).epsilon(1e-12));

  // the reported basis attains the bound through the public evaluation path
  CHECK(std::abs(error_rate_exact(ProtocolSpec::bb84().ensemble(), bb.eve_basis) - bb.exact_r) <=
        default_eps_opt(2));
}

TEST_CASE("simulation reproduces the exact rate") {
  SimulationOptions so;
  so.rounds = 200000;
  const ErrorRateReport sim =
      simulate_protocol(ProtocolSpec::bb84(), OrthonormalBasis::computational(2), so, 0.25);
  CHECK(sim.exact_r == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(sim.empirical_r - sim.exact_r) <= 4.0 * binom_sigma(sim.exact_r, sim.sifted));
  // fair two-basis sifting keeps about half of the rounds
  const double sift_frac = static_cast<double>(sim.sifted) / static_cast<double>(sim.rounds);
  CHECK(std::abs(sift_frac - 0.5) <= 4.0 * binom_sigma(0.5, sim.rounds));

  const ErrorRateReport six =
      simulate_protocol(ProtocolSpec::six_state(), OrthonormalBasis::computational(2), so);
  CHECK(six.exact_r == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(six.empirical_r - six.exact_r) <= 4.0 * binom_sigma(six.exact_r, six.sifted));
}

TEST_CASE("pass-through channel has zero error exactly") {
  SimulationOptions so;
  so.rounds = 50000;
  so.eavesdrop = false;
  const ErrorRateReport rep =
      simulate_protocol(ProtocolSpec::bb84(), OrthonormalBasis::computational(2), so);
  CHECK(rep.exact_r == 0.0);
  CHECK(rep.empirical_r == 0.0);
  CHECK(rep.sifted > 0);
}

TEST_CASE("partial interception scales the rate linearly") {
  SimulationOptions so;
  so.rounds = 400000;
  so.intercept_fraction = 0.5;
  const ErrorRateReport rep =
      simulate_protocol(ProtocolSpec::bb84(), OrthonormalBasis::computational(2), so);
  CHECK(rep.exact_r == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(std::abs(rep.empirical_r - rep.exact_r) <= 4.0 * binom_sigma(rep.exact_r, rep.sifted));
}

TEST_CASE("simulation is deterministic and worker-count independent") {
  SimulationOptions a;
  a.rounds = 300000;
  a.seed = 99;
  a.workers = 1;
  SimulationOptions b = a;
  b.workers = 2;
  const ErrorRateReport ra =
      simulate_protocol(ProtocolSpec::six_state(), OrthonormalBasis::computational(2), a);
  const ErrorRateReport rb =
      simulate_protocol(ProtocolSpec::six_state(), OrthonormalBasis::computational(2), b);
  CHECK(ra.empirical_r == rb.empirical_r);
  CHECK(ra.sifted == rb.sifted);
}

TEST_CASE("simulation matches the exact rate on conjugated protocols") {
  for (int k = 0; k < 20; ++k) {
    const ProtocolSpec base = (k % 2 == 0) ? ProtocolSpec::bb84() : ProtocolSpec::six_state();
    const Matrix u = random_unitary(2, 7000 + k);
    std::vector<OrthonormalBasis> rotated;
    for (const OrthonormalBasis& bas : base.bases) {
      rotated.emplace_back(Matrix(u * bas.columns()));
    }
    const ProtocolSpec spec(2, std::move(rotated), base.basis_probs);
    const OrthonormalBasis eve = random_basis(2, 7100 + k);
    SimulationOptions so;
    so.rounds = 100000;
    so.seed = 7200 + k;
    const ErrorRateReport rep = simulate_protocol(spec, eve, so);
    CHECK(std::abs(rep.empirical_r - rep.exact_r) <=
          4.0 * binom_sigma(std::max(rep.exact_r, 1e-3), rep.sifted));
  }
}

TEST_CASE("protocol file loading") {
  const auto path = std::filesystem::temp_directory_path() / "eccc_test_protocol.json";
  {
    const double s = 1.0 / std::sqrt(2.0);
    const double h = 0.5;
    std::ofstream out(path);
    out << R"({"dim": 2, "items": [
      {"weight": 0.25, "basis": 0, "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]},
      {"weight": 0.25, "basis": 0, "matrix": [[[0,0],[0,0]],[[0,0],[1,0]]]},
      {"weight": 0.25, "basis": 1, "matrix": [[[)" << h << R"(,0],[)" << h << R"(,0]],[[)" << h
        << R"(,0],[)" << h << R"(,0]]]},
      {"weight": 0.25, "basis": 1, "matrix": [[[)" << h << R"(,0],[)" << -h << R"(,0]],[[)" << -h
        << R"(,0],[)" << h << R"(,0]]]}]})";
    (void)s;
  }
  const ProtocolSpec spec = ProtocolSpec::load(path.string());
  CHECK(spec.bases.size() == 2);
  CHECK(spec.basis_probs[0] == doctest::Approx(0.5));
  const ErrorRateReport rep = min_error_rate(spec.ensemble());
  CHECK(rep.q_reference == doctest::Approx(0.25).epsilon(1e-9));
  std::filesystem::remove(path);

  const auto bad = std::filesystem::temp_directory_path() / "eccc_test_protocol_bad.json";
  {
    std::ofstream out(bad);
    // group 0 states are not orthogonal
    out << R"({"dim": 2, "items": [
      {"weight": 0.5, "basis": 0, "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]},
      {"weight": 0.5, "basis": 0, "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]}]})";
  }
  CHECK_THROWS_WITH_AS(ProtocolSpec::load(bad.string()), doctest::Contains("orthonormal"),
                       std::runtime_error);
  std::filesystem::remove(bad);
}

TEST_CASE("simulation input validation") {
  SimulationOptions so;
  so.rounds = 0;
  CHECK_THROWS_AS(
      simulate_protocol(ProtocolSpec::bb84(), OrthonormalBasis::computational(2), so),
      std::invalid_argument);
  so.rounds = 10;
  CHECK_THROWS_AS(
      simulate_protocol(ProtocolSpec::bb84(), OrthonormalBasis::computational(3), so),
      std::invalid_argument);
  so.rounds = 10;
  so.intercept_fraction = 1.5;
  CHECK_THROWS_AS(
      simulate_protocol(ProtocolSpec::bb84(), OrthonormalBasis::computational(2), so),
      std::invalid_argument);
}

}  // TEST_SUITE
