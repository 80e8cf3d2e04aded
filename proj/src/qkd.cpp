#include "eccc/qkd.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include <json.hpp>

#include "eccc/cloning.hpp"
#include "eccc/parallel.hpp"

namespace eccc {

// ---------------------------------------------------------------------------
// ProtocolSpec

ProtocolSpec::ProtocolSpec(Index d, std::vector<OrthonormalBasis> b, std::vector<double> probs)
    : dim(d), bases(std::move(b)), basis_probs(std::move(probs)) {
  if (dim < 1) throw std::invalid_argument("protocol: dimension must be >= 1");
  if (bases.empty()) throw std::invalid_argument("protocol: need at least one basis");
  if (bases.size() != basis_probs.size()) {
    throw std::invalid_argument("protocol: one probability per basis required");
  }
  double sum = 0.0;
  for (const double p : basis_probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("protocol: negative basis probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol().weight_sum) {
    throw std::invalid_argument("protocol: basis probabilities sum to " + std::to_string(sum));
  }
  for (const OrthonormalBasis& basis : bases) {
    if (basis.dim() != dim) throw std::invalid_argument("protocol: basis dimension mismatch");
  }
}

ProtocolSpec ProtocolSpec::bb84() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix x(2, 2);
  x << s, s, s, -s;
  return ProtocolSpec(2, {OrthonormalBasis::computational(2), OrthonormalBasis(std::move(x))},
                      {0.5, 0.5});
}

ProtocolSpec ProtocolSpec::six_state() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix x(2, 2);
  x << s, s, s, -s;
  Matrix y(2, 2);
  y << Complex(s, 0), Complex(s, 0), Complex(0, s), Complex(0, -s);
  return ProtocolSpec(
      2,
      {OrthonormalBasis::computational(2), OrthonormalBasis(std::move(x)),
       OrthonormalBasis(std::move(y))},
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
}

ProtocolSpec ProtocolSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open protocol file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw std::runtime_error("malformed JSON in " + path + ": " + ex.what());
  }
  if (!j.contains("dim") || !j["dim"].is_number_integer()) {
    throw std::runtime_error(path + ": missing integer field \"dim\"");
  }
  const Index dim = j["dim"].get<Index>();
  if (!j.contains("items") || !j["items"].is_array()) {
    throw std::runtime_error(path + ": missing array field \"items\"");
  }

  std::map<Index, std::vector<std::pair<double, Vector>>> groups;
  Index idx = 0;
  for (const auto& ji : j["items"]) {
    const std::string where = path + ": item " + std::to_string(idx);
    if (!ji.contains("basis") || !ji["basis"].is_number_integer()) {
      throw std::runtime_error(where + ": missing integer field \"basis\" (group annotation)");
    }
    if (!ji.contains("weight") || !ji["weight"].is_number()) {
      throw std::runtime_error(where + ": missing numeric field \"weight\"");
    }
    if (!ji.contains("matrix") || !ji["matrix"].is_array() ||
        static_cast<Index>(ji["matrix"].size()) != dim) {
      throw std::runtime_error(where + ": matrix must have " + std::to_string(dim) + " rows");
    }
    Matrix m(dim, dim);
    for (Index r = 0; r < dim; ++r) {
      const auto& row = ji["matrix"][static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
        throw std::runtime_error(where + ": row " + std::to_string(r) + " malformed");
      }
      for (Index c = 0; c < dim; ++c) {
        const auto& entry = row[static_cast<std::size_t>(c)];
        if (!entry.is_array() || entry.size() != 2) {
          throw std::runtime_error(where + ": entries must be [re, im]");
        }
        m(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
      }
    }
    DensityMatrix state = [&] {
      try {
        return DensityMatrix(std::move(m));
      } catch (const std::exception& ex) {
        throw std::runtime_error(where + ": " + ex.what());
      }
    }();
    if (!state.is_pure()) throw std::runtime_error(where + ": protocol states must be pure");
    Eigen::SelfAdjointEigenSolver<Matrix> es(state.entries());
    groups[ji["basis"].get<Index>()].emplace_back(ji["weight"].get<double>(),
                                                  es.eigenvectors().col(dim - 1));
    ++idx;
  }

  std::vector<OrthonormalBasis> bases;
  std::vector<double> probs;
  Index expected = 0;
  for (const auto& [gid, members] : groups) {
    const std::string where = path + ": basis group " + std::to_string(gid);
    if (gid != expected++) throw std::runtime_error(where + ": group indices must be 0,1,2,...");
    if (static_cast<Index>(members.size()) != dim) {
      throw std::runtime_error(where + ": needs exactly " + std::to_string(dim) + " states");
    }
    double total = 0.0;
    Matrix cols(dim, dim);
    for (Index s = 0; s < dim; ++s) {
      const auto& [w, vec] = members[static_cast<std::size_t>(s)];
      if (std::abs(w - members.front().first) > 1e-12) {
        throw std::runtime_error(where + ": symbol weights must be uniform within a group");
      }
      total += w;
      cols.col(s) = vec;
    }
    try {
      bases.emplace_back(std::move(cols));
    } catch (const std::exception& ex) {
      throw std::runtime_error(where + ": states do not form an orthonormal basis: " + ex.what());
    }
    probs.push_back(total);
  }
  try {
    return ProtocolSpec(dim, std::move(bases), std::move(probs));
  } catch (const std::exception& ex) {
    throw std::runtime_error(path + ": " + ex.what());
  }
}

Ensemble ProtocolSpec::ensemble() const {
  std::vector<Ensemble::Item> items;
  for (std::size_t b = 0; b < bases.size(); ++b) {
    for (Index s = 0; s < dim; ++s) {
      items.push_back({basis_probs[b] / static_cast<double>(dim),
                       DensityMatrix::pure(bases[b].vector(s))});
    }
  }
  return Ensemble(dim, std::move(items));
}

// ---------------------------------------------------------------------------
// Error rates

double error_rate_exact(const Ensemble& e, const OrthonormalBasis& eve_basis) {
  if (!e.all_pure()) {
    throw std::invalid_argument("error_rate_exact: ensemble contains a mixed state");
  }
  return 1.0 - average_cloning_fidelity(e, eve_basis);
}

ErrorRateReport min_error_rate(const Ensemble& e, const EcccOptions& opts) {
  if (!e.all_pure()) {
    throw std::invalid_argument("min_error_rate: ensemble contains a mixed state");
  }
  const EcccResult r = classicality(e, opts);
  ErrorRateReport rep;
  rep.exact_r = r.q;  // min R = 1 - J by construction
  rep.empirical_r = std::numeric_limits<double>::quiet_NaN();
  rep.rounds = 0;
  rep.sifted = 0;
  rep.eve_basis = r.basis;
  rep.q_reference = r.q;
  return rep;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

// Cumulative Born probabilities for measuring `state` in `basis` columns.
Eigen::VectorXd cumulative_born(const Matrix& basis_cols, const Vector& state) {
  Eigen::VectorXd cum(basis_cols.cols());
  double acc = 0.0;
  for (Index j = 0; j < basis_cols.cols(); ++j) {
    acc += std::norm(basis_cols.col(j).dot(state));
    cum[j] = acc;
  }
  // Normalize so the last bin is exactly 1.
  cum /= acc;
  return cum;
}

Index pick(const Eigen::VectorXd& cum, double u) {
  for (Index i = 0; i < cum.size(); ++i) {
    if (u < cum[i]) return i;
  }
  return cum.size() - 1;
}

}  // namespace

ErrorRateReport simulate_protocol(const ProtocolSpec& spec, const OrthonormalBasis& eve_basis,
                                  const SimulationOptions& opts, double q_reference) {
  if (opts.rounds < 1) throw std::invalid_argument("simulate_protocol: rounds must be >= 1");
  if (eve_basis.dim() != spec.dim) {
    throw std::invalid_argument("simulate_protocol: eavesdropper basis dimension mismatch");
  }
  if (!(opts.intercept_fraction >= 0.0 && opts.intercept_fraction <= 1.0)) {
    throw std::invalid_argument("simulate_protocol: intercept fraction must be in [0, 1]");
  }

  const Index d = spec.dim;
  const std::size_t nb = spec.bases.size();

  Eigen::VectorXd basis_cum(static_cast<Index>(nb));
  {
    double acc = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      acc += spec.basis_probs[b];
      basis_cum[static_cast<Index>(b)] = acc;
    }
    basis_cum /= acc;
  }

  // eve_cum[b](s-th row): outcome distribution when Eve measures |psi_{b,s}>.
  // bob_cum[b](j-th row): outcome distribution when the resent |e_j> is
  // measured in basis b.
  std::vector<std::vector<Eigen::VectorXd>> eve_cum(nb), bob_cum(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    eve_cum[b].resize(static_cast<std::size_t>(d));
    bob_cum[b].resize(static_cast<std::size_t>(d));
    for (Index s = 0; s < d; ++s) {
      eve_cum[b][static_cast<std::size_t>(s)] =
          cumulative_born(eve_basis.columns(), spec.bases[b].columns().col(s));
    }
    for (Index j = 0; j < d; ++j) {
      bob_cum[b][static_cast<std::size_t>(j)] =
          cumulative_born(spec.bases[b].columns(), eve_basis.columns().col(j));
    }
  }

  const bool intercepting = opts.eavesdrop && opts.intercept_fraction > 0.0;
  const bool partial = intercepting && opts.intercept_fraction < 1.0;

  // Fixed-size chunks with per-chunk derived seeds keep the tallies
  // independent of the worker count.
  constexpr std::int64_t kChunk = 1 << 16;
  const Index n_chunks = static_cast<Index>((opts.rounds + kChunk - 1) / kChunk);
  std::vector<std::int64_t> sifted_by_chunk(static_cast<std::size_t>(n_chunks), 0);
  std::vector<std::int64_t> wrong_by_chunk(static_cast<std::size_t>(n_chunks), 0);

  parallel_for(n_chunks, opts.workers, [&](Index chunk) {
    std::mt19937_64 rng(derive_seed(opts.seed, 0xC7A1, static_cast<std::uint64_t>(chunk)));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const std::int64_t lo = chunk * kChunk;
    const std::int64_t hi = std::min<std::int64_t>(opts.rounds, lo + kChunk);
    std::int64_t sifted = 0;
    std::int64_t wrong = 0;
    for (std::int64_t round = lo; round < hi; ++round) {
      // Draw order: sender basis, sender symbol, [interception decision,]
      // eavesdropper outcome, receiver basis, receiver outcome.
      const auto ab = static_cast<std::size_t>(pick(basis_cum, u01(rng)));
      const Index sym = std::min<Index>(d - 1, static_cast<Index>(u01(rng) * static_cast<double>(d)));
      bool intercept = intercepting;
      if (partial) intercept = u01(rng) < opts.intercept_fraction;
      Index eve_out = -1;
      if (intercept) eve_out = pick(eve_cum[ab][static_cast<std::size_t>(sym)], u01(rng));
      const auto bb = static_cast<std::size_t>(pick(basis_cum, u01(rng)));
      if (bb != ab) continue;  // discarded: bases disagree
      ++sifted;
      if (!intercept) continue;  // the receiver measures an eigenstate; no error
      const Index bob_out = pick(bob_cum[ab][static_cast<std::size_t>(eve_out)], u01(rng));
      if (bob_out != sym) ++wrong;
    }
    sifted_by_chunk[static_cast<std::size_t>(chunk)] = sifted;
    wrong_by_chunk[static_cast<std::size_t>(chunk)] = wrong;
  });

  std::int64_t sifted = 0;
  std::int64_t wrong = 0;
  for (Index c = 0; c < n_chunks; ++c) {
    sifted += sifted_by_chunk[static_cast<std::size_t>(c)];
    wrong += wrong_by_chunk[static_cast<std::size_t>(c)];
  }
  if (sifted == 0) throw std::runtime_error("simulate_protocol: zero sifted rounds");

  ErrorRateReport rep;
  rep.exact_r = intercepting
                    ? opts.intercept_fraction * error_rate_exact(spec.ensemble(), eve_basis)
                    : 0.0;
  rep.empirical_r = static_cast<double>(wrong) / static_cast<double>(sifted);
  rep.rounds = opts.rounds;
  rep.sifted = sifted;
  rep.eve_basis = eve_basis;
  rep.q_reference = q_reference;
  return rep;
}

}  // namespace eccc
