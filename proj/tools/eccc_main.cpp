// eccc: classicality (J) and quantumness (Q) of quantum ensembles.
//
// Subcommands: eccc, fig1, qkd, explore, validate. All randomized commands
// print the seed they used; the same configuration and seed produce
// byte-identical output files.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include <CLI11.hpp>
#include <json.hpp>

#include "eccc/cloning.hpp"
#include "eccc/ensemble.hpp"
#include "eccc/infinite.hpp"
#include "eccc/optimize.hpp"
#include "eccc/qkd.hpp"
#include "eccc/random.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

using namespace eccc;

// Floats are emitted with 12 significant digits: below the analytic
// tolerances, above the Monte Carlo noise.
std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string seed_line(std::uint64_t seed) {
  std::ostringstream os;
  os << "seed: " << seed << " (0x" << std::hex << seed << std::dec << ")";
  return os.str();
}

struct CommonOpts {
  int restarts = 32;
  int max_iters = 0;
  double ftol = 1e-12;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  bool full_space = false;
  int resolution = 128;
};

void add_common(CLI::App* cmd, CommonOpts* c) {
  cmd->add_option("--restarts", c->restarts, "Optimizer restarts")->capture_default_str();
  cmd->add_option("--max-iters", c->max_iters, "Iteration cap per restart (0 = automatic)")
      ->capture_default_str();
  cmd->add_option("--tol", c->ftol, "Optimizer convergence tolerance")->capture_default_str();
  cmd->add_option("--seed", c->seed, "Random seed (default 0xECCC)")->capture_default_str();
  cmd->add_option("--workers", c->workers, "Max worker threads")->capture_default_str();
  cmd->add_flag("--full-space", c->full_space,
                "Optimize over bases of the full space instead of the mixture support");
  cmd->add_option("--resolution", c->resolution, "Qubit grid resolution")->capture_default_str();
}

EcccOptions to_options(const CommonOpts& c) {
  EcccOptions o;
  o.restarts = c.restarts;
  o.max_iterations = c.max_iters;
  o.ftol = c.ftol;
  o.seed = c.seed;
  o.restrict_support = !c.full_space;
  o.qubit_grid_resolution = c.resolution;
  return o;
}

// Writes to the output path, or stdout when the path is empty.
void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
}

nlohmann::json basis_to_json(const OrthonormalBasis& b) {
  nlohmann::json vecs = nlohmann::json::array();
  for (Index j = 0; j < b.dim(); ++j) {
    nlohmann::json v = nlohmann::json::array();
    for (Index r = 0; r < b.dim(); ++r) {
      v.push_back({b.columns()(r, j).real(), b.columns()(r, j).imag()});
    }
    vecs.push_back(std::move(v));
  }
  return vecs;
}

std::string basis_to_text(const OrthonormalBasis& b) {
  std::ostringstream os;
  for (Index j = 0; j < b.dim(); ++j) {
    os << "  e" << j << " = [";
    for (Index r = 0; r < b.dim(); ++r) {
      const Complex z = b.columns()(r, j);
      os << (r ? ", " : "") << fmt12(z.real()) << (z.imag() < 0 ? " - " : " + ")
         << fmt12(std::abs(z.imag())) << "i";
    }
    os << "]\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// eccc subcommand

struct EcccCmd {
  CommonOpts common;
  std::string family;
  std::string p_spec = "0.5";
  double p_step = 0.05;
  double theta = kPi / 2.0;
  Index phi_points = 720;
  Index samples = 10000;
  std::string input;
  std::string output;
  std::string format = "text";
};

std::optional<std::pair<double, double>> parse_range(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos) return std::nullopt;
  return std::make_pair(std::stod(s.substr(0, pos)), std::stod(s.substr(pos + 2)));
}

std::string describe_result(const std::string& name, const Ensemble& e, const EcccResult& r,
                            const std::string& format, std::uint64_t seed) {
  const JBounds b = j_bounds(e);
  std::optional<double> attainable;
  try {
    attainable = j_attainable_lower_bound(e);
  } catch (const std::invalid_argument&) {
  }
  if (format == "csv") {
    std::ostringstream os;
    os << "ensemble,dim,states,j,q,bound_max_weight,bound_size\n";
    os << name << "," << e.dim() << "," << e.size() << "," << fmt12(r.j) << "," << fmt12(r.q)
       << "," << fmt12(b.lower_weight) << "," << fmt12(b.lower_size) << "\n";
    return os.str();
  }
  if (format == "json") {
    nlohmann::json j;
    j["ensemble"] = name;
    j["dim"] = e.dim();
    j["states"] = e.size();
    j["j"] = r.j;
    j["q"] = r.q;
    j["bounds"] = {{"max_weight", b.lower_weight},
                   {"ensemble_size", b.lower_size},
                   {"upper", b.upper}};
    if (attainable) j["bounds"]["attainable"] = *attainable;
    j["basis"] = basis_to_json(r.basis);
    j["diagnostics"] = {{"restarts_used", r.restarts_used},
                        {"best_gap", r.best_gap},
                        {"converged", r.converged},
                        {"error_bound", r.error_bound}};
    j["seed"] = seed;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << seed_line(seed) << "\n";
  os << "ensemble: " << name << " (dim " << e.dim() << ", " << e.size() << " states)\n";
  if (e.dropped_zero_weight() > 0) {
    os << "notice: dropped " << e.dropped_zero_weight() << " zero-weight item(s)\n";
  }
  os << "J = " << fmt12(r.j) << "\n";
  os << "Q = " << fmt12(r.q) << "\n";
  os << "lower bounds: max-weight " << fmt12(b.lower_weight) << ", ensemble-size "
     << fmt12(b.lower_size);
  if (attainable) os << ", attainable " << fmt12(*attainable);
  os << "\nupper bound: 1\n";
  os << "best basis:\n" << basis_to_text(r.basis);
  os << "converged: " << (r.converged ? "yes" : "no") << " (restarts " << r.restarts_used
     << ", gap " << fmt12(r.best_gap) << ", error bound " << fmt12(r.error_bound) << ")\n";
  return os.str();
}

int run_eccc(const EcccCmd& cmd) {
  const EcccOptions opts = to_options(cmd.common);

  if (!cmd.input.empty()) {
    const Ensemble e = load_ensemble(cmd.input);
    emit(cmd.output, describe_result(cmd.input, e, classicality(e, opts), cmd.format,
                                     cmd.common.seed));
    return 0;
  }

  if (cmd.family == "bb84") {
    if (const auto range = parse_range(cmd.p_spec)) {
      std::ostringstream os;
      os << "p,j,q\n";
      for (double p = range->first; p <= range->second + 1e-12; p += cmd.p_step) {
        const double pc = std::min(1.0, std::max(0.0, p));
        const EcccResult r = classicality(make_bb84_weighted(pc), opts);
        os << fmt12(pc) << "," << fmt12(r.j) << "," << fmt12(r.q) << "\n";
      }
      std::cerr << seed_line(cmd.common.seed) << "\n";
      emit(cmd.output, os.str());
      return 0;
    }
    const double p = std::stod(cmd.p_spec);
    const Ensemble e = make_bb84_weighted(p);
    emit(cmd.output, describe_result("bb84(p=" + fmt12(p) + ")", e, classicality(e, opts),
                                     cmd.format, cmd.common.seed));
    return 0;
  }
  if (cmd.family == "six-state") {
    const Ensemble e = make_six_state();
    emit(cmd.output,
         describe_result("six-state", e, classicality(e, opts), cmd.format, cmd.common.seed));
    return 0;
  }
  if (cmd.family == "double-circle") {
    const Ensemble e = make_double_circle_discretized(cmd.theta, cmd.phi_points);
    std::ostringstream os;
    os << describe_result("double-circle(theta=" + fmt12(cmd.theta) + ", " +
                              std::to_string(cmd.phi_points) + " phases/circle)",
                          e, classicality(e, opts), cmd.format, cmd.common.seed);
    if (cmd.format != "json") {
      os << "closed form J(theta) = " << fmt12(j_double_circle_closed(cmd.theta)) << "\n";
    }
    emit(cmd.output, os.str());
    return 0;
  }
  if (cmd.family == "bloch-uniform") {
    const InfiniteEstimate est =
        estimate_j_infinite(make_bloch_uniform(), cmd.samples, opts, cmd.common.seed);
    std::ostringstream os;
    os << seed_line(cmd.common.seed) << "\n";
    os << "ensemble: bloch-uniform (" << cmd.samples << " samples)\n";
    os << "J = " << fmt12(est.result.j) << " +/- " << fmt12(est.stderr_val) << "\n";
    os << "Q = " << fmt12(est.result.q) << "\n";
    os << "known J = " << fmt12(2.0 / 3.0) << "\n";
    emit(cmd.output, os.str());
    return 0;
  }
  throw std::runtime_error(
      "eccc: pass --input FILE or --family {bb84|six-state|double-circle|bloch-uniform}");
}

// ---------------------------------------------------------------------------
// fig1 subcommand

struct Fig1Cmd {
  CommonOpts common;
  Index samples = 10000;
  Index theta_steps = 181;
  std::string output;
};

int run_fig1(const Fig1Cmd& cmd) {
  if (cmd.theta_steps < 2) throw std::runtime_error("fig1: need at least 2 theta steps");
  std::vector<double> thetas;
  for (Index i = 0; i < cmd.theta_steps; ++i) {
    thetas.push_back(kPi * static_cast<double>(i) / static_cast<double>(cmd.theta_steps - 1));
  }
  const EcccOptions opts = to_options(cmd.common);
  const std::vector<SweepPoint> points =
      double_circle_sweep(thetas, cmd.samples, opts, cmd.common.seed, cmd.common.workers);
  std::ostringstream os;
  os << "theta_rad,j_closed,j_mc,stderr,n_samples,j_bloch_ref,uc_ref\n";
  for (const SweepPoint& pt : points) {
    os << fmt12(pt.theta) << "," << fmt12(pt.j_closed) << "," << fmt12(pt.j_mc) << ","
       << fmt12(pt.stderr_val) << "," << pt.samples << "," << fmt12(2.0 / 3.0) << ","
       << fmt12(5.0 / 6.0) << "\n";
  }
  std::cerr << seed_line(cmd.common.seed) << "\n";
  emit(cmd.output, os.str());
  return 0;
}

// ---------------------------------------------------------------------------
// qkd subcommand

struct QkdCmd {
  CommonOpts common;
  std::string protocol = "bb84";
  std::string input;
  std::int64_t rounds = 1000000;
  bool no_eavesdrop = false;
  double intercept_fraction = 1.0;
  std::string output;
};

int run_qkd(const QkdCmd& cmd) {
  const ProtocolSpec spec = [&] {
    if (!cmd.input.empty()) return ProtocolSpec::load(cmd.input);
    if (cmd.protocol == "bb84") return ProtocolSpec::bb84();
    if (cmd.protocol == "six-state") return ProtocolSpec::six_state();
    throw std::runtime_error("qkd: unknown protocol \"" + cmd.protocol +
                             "\" (use bb84, six-state or --input FILE)");
  }();

  const EcccOptions opts = to_options(cmd.common);
  const ErrorRateReport bound = min_error_rate(spec.ensemble(), opts);
  if (bound.q_reference < 1e-6) {
    std::cerr << "warning: quantumness ~ 0; this ensemble is unsuitable for QKD\n";
  }

  SimulationOptions so;
  so.rounds = cmd.rounds;
  so.seed = cmd.common.seed;
  so.eavesdrop = !cmd.no_eavesdrop;
  so.intercept_fraction = cmd.intercept_fraction;
  so.workers = cmd.common.workers;
  const ErrorRateReport sim = simulate_protocol(spec, bound.eve_basis, so, bound.q_reference);

  nlohmann::json j;
  j["exact_r"] = sim.exact_r;
  j["empirical_r"] = sim.empirical_r;
  j["rounds"] = sim.rounds;
  j["sifted"] = sim.sifted;
  j["q_reference"] = sim.q_reference;
  j["eve_basis"] = basis_to_json(sim.eve_basis);
  j["seed"] = cmd.common.seed;
  std::cerr << seed_line(cmd.common.seed) << "\n";
  emit(cmd.output, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// explore subcommand

struct ExploreCmd {
  CommonOpts common;
  int trials = 100;
  std::string output;
};

int run_explore(const ExploreCmd& cmd) {
  const EcccOptions opts = to_options(cmd.common);
  const double eps = default_eps_opt(4);

  double max_product_gap = -1.0;
  std::uint64_t max_product_seed = 0;
  double min_product_gap = 1.0;
  int product_violations = 0;

  double min_padding_gap = 1.0;
  std::uint64_t min_padding_seed = 0;
  int padding_violations = 0;

  const Matrix blank = PureState::basis_state(2, 0).projector();

  for (int t = 0; t < cmd.trials; ++t) {
    const std::uint64_t st = derive_seed(cmd.common.seed, 0xE0, static_cast<std::uint64_t>(t));
    std::mt19937_64 rng(st);
    const auto n_of = [&rng] { return 1 + static_cast<Index>(rng() % 3); };

    // Product inequality J(AB) >= J(A) J(B).
    const Ensemble a = random_ensemble(2, n_of(), (rng() & 1ULL) == 0, derive_seed(st, 1));
    const Ensemble b = random_ensemble(2, n_of(), (rng() & 1ULL) == 0, derive_seed(st, 2));
    const ProductCheckReport rep = check_product_inequality(a, b, opts);
    if (rep.gap > max_product_gap) {
      max_product_gap = rep.gap;
      max_product_seed = st;
    }
    min_product_gap = std::min(min_product_gap, rep.gap);
    if (rep.gap < -3.0 * eps) ++product_violations;

    // Padding comparison J({q, rho x |0><0|}) vs J({q, rho x rho}).
    const Ensemble e = random_ensemble(2, n_of(), (rng() & 1ULL) == 0, derive_seed(st, 3));
    std::vector<Ensemble::Item> padded;
    std::vector<Ensemble::Item> squared;
    for (const auto& it : e.items()) {
      padded.push_back(
          {it.weight, DensityMatrix(Matrix(Eigen::kroneckerProduct(it.state.entries(), blank)))});
      squared.push_back({it.weight, DensityMatrix(Matrix(Eigen::kroneckerProduct(
                                        it.state.entries(), it.state.entries())))});
    }
    const double j_pad = classicality(Ensemble(4, std::move(padded)), opts).j;
    const double j_sq = classicality(Ensemble(4, std::move(squared)), opts).j;
    const double pad_gap = j_pad - j_sq;
    if (pad_gap < min_padding_gap) {
      min_padding_gap = pad_gap;
      min_padding_seed = st;
    }
    if (pad_gap < -3.0 * eps) ++padding_violations;
  }

  std::ostringstream os;
  os << seed_line(cmd.common.seed) << "\n";
  os << "trials: " << cmd.trials << "\n";
  os << "product inequality J(AB) >= J(A)J(B):\n";
  os << "  max gap " << fmt12(max_product_gap) << " (trial seed " << max_product_seed << ")\n";
  os << "  min gap " << fmt12(min_product_gap) << "\n";
  os << "  apparent violations beyond 3*eps: " << product_violations << "\n";
  os << "padding comparison J(rho x |0><0|) vs J(rho x rho):\n";
  os << "  min gap " << fmt12(min_padding_gap) << " (trial seed " << min_padding_seed << ")\n";
  os << "  apparent violations beyond 3*eps: " << padding_violations << "\n";
  if (product_violations + padding_violations > 0) {
    os << "note: apparent counterexamples are flagged, never asserted; re-run the\n"
          "      printed trial seed with more restarts before believing them.\n";
  }
  emit(cmd.output, os.str());
  return 0;
}

// ---------------------------------------------------------------------------
// validate subcommand

int run_validate(const std::string& input) {
  const Ensemble e = load_ensemble(input);
  std::cout << input << ": ok (dim " << e.dim() << ", " << e.size() << " states";
  if (e.dropped_zero_weight() > 0) {
    std::cout << ", dropped " << e.dropped_zero_weight() << " zero-weight item(s)";
  }
  std::cout << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classicality (J) and quantumness (Q) of quantum ensembles"};
  app.require_subcommand(1);

  EcccCmd ec;
  CLI::App* c_eccc = app.add_subcommand("eccc", "Compute J and Q for an ensemble");
  add_common(c_eccc, &ec.common);
  c_eccc->add_option("--family", ec.family, "bb84 | six-state | double-circle | bloch-uniform");
  c_eccc->add_option("--p", ec.p_spec, "BB84 weight p, or a sweep range like 0..1")
      ->capture_default_str();
  c_eccc->add_option("--p-step", ec.p_step, "Sweep step for --p ranges")->capture_default_str();
  c_eccc->add_option("--theta", ec.theta, "Double-circle polar angle (radians)")
      ->capture_default_str();
  c_eccc->add_option("--phi-points", ec.phi_points, "Phases per circle for double-circle")
      ->capture_default_str();
  c_eccc->add_option("--samples", ec.samples, "Samples for bloch-uniform estimation")
      ->capture_default_str();
  c_eccc->add_option("--input", ec.input, "Ensemble JSON file");
  c_eccc->add_option("--output", ec.output, "Output path (default stdout)");
  c_eccc->add_option("--format", ec.format, "text | json | csv")->capture_default_str();

  Fig1Cmd fc;
  CLI::App* c_fig1 = app.add_subcommand("fig1", "Double-circle theta sweep CSV");
  add_common(c_fig1, &fc.common);
  c_fig1->add_option("--samples", fc.samples, "Monte Carlo samples per point")
      ->capture_default_str();
  c_fig1->add_option("--theta-steps", fc.theta_steps, "Points on [0, pi]")->capture_default_str();
  c_fig1->add_option("--output", fc.output, "Output CSV path (default stdout)");

  QkdCmd qc;
  CLI::App* c_qkd = app.add_subcommand("qkd", "Intercept-resend error-rate analysis");
  add_common(c_qkd, &qc.common);
  c_qkd->add_option("--protocol", qc.protocol, "bb84 | six-state")->capture_default_str();
  c_qkd->add_option("--input", qc.input, "Protocol JSON file (ensemble with basis groups)");
  c_qkd->add_option("--rounds", qc.rounds, "Simulation rounds")->capture_default_str();
  c_qkd->add_flag("--no-eavesdrop", qc.no_eavesdrop, "Pass-through channel (R = 0)");
  c_qkd->add_option("--intercept-fraction", qc.intercept_fraction,
                    "Fraction of rounds Eve intercepts")
      ->capture_default_str();
  c_qkd->add_option("--output", qc.output, "Output path (default stdout)");

  ExploreCmd xc;
  CLI::App* c_explore = app.add_subcommand("explore", "Randomized product-classicality sweeps");
  add_common(c_explore, &xc.common);
  c_explore->add_option("--trials", xc.trials, "Random trials")->capture_default_str();
  c_explore->add_option("--output", xc.output, "Output path (default stdout)");

  std::string validate_input;
  CLI::App* c_validate = app.add_subcommand("validate", "Check an ensemble file");
  c_validate->add_option("--input", validate_input, "Ensemble JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_eccc->parsed()) return run_eccc(ec);
    if (c_fig1->parsed()) return run_fig1(fc);
    if (c_qkd->parsed()) return run_qkd(qc);
    if (c_explore->parsed()) return run_explore(xc);
    if (c_validate->parsed()) return run_validate(validate_input);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
