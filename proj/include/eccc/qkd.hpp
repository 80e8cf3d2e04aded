// Intercept-resend eavesdropping: exact error rates, their minimum over the
// eavesdropper's basis, and a round-by-round protocol simulation.
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "eccc/ensemble.hpp"
#include "eccc/optimize.hpp"

namespace eccc {

/// Prepare-and-measure protocol: the sender draws a basis (with the given
/// probabilities) and a uniform symbol, and sends that basis vector. The
/// encoding of symbol s in basis b is the b-th basis' s-th vector.
struct ProtocolSpec {
  Index dim = 2;
  std::vector<OrthonormalBasis> bases;
  std::vector<double> basis_probs;

  ProtocolSpec(Index d, std::vector<OrthonormalBasis> b, std::vector<double> probs);

  static ProtocolSpec bb84();
  static ProtocolSpec six_state();

  /// Loads a protocol from an ensemble file whose items carry a "basis"
  /// group index: items of one group must be the pure, mutually orthogonal
  /// encoding states of that basis, with equal weights; the group's total
  /// weight is the basis choice probability.
  static ProtocolSpec load(const std::string& path);

  /// The sent ensemble {prob_b / d, |psi_{b,s}>}.
  Ensemble ensemble() const;
};

struct ErrorRateReport {
  double exact_r = 0.0;
  double empirical_r = 0.0;  ///< NaN when no simulation was run
  std::int64_t rounds = 0;
  std::int64_t sifted = 0;
  OrthonormalBasis eve_basis;
  double q_reference = 0.0;
};

/// Exact intercept-resend error rate for a pure-state ensemble:
/// R = sum_i q_i (1 - sum_j |<j|psi_i>|^4) = 1 - F_ave(E, eve_basis).
/// Throws when the ensemble contains a mixed state.
double error_rate_exact(const Ensemble& e, const OrthonormalBasis& eve_basis);

/// Minimizes the error rate over the eavesdropper's basis. Shares the
/// classicality optimizer: min R = 1 - J = Q, attained at the basis that
/// attains the classicality.
ErrorRateReport min_error_rate(const Ensemble& e, const EcccOptions& opts = {});

struct SimulationOptions {
  std::int64_t rounds = 1000000;
  std::uint64_t seed = kDefaultSeed;
  bool eavesdrop = true;             ///< false: pass-through channel, R = 0 exactly
  double intercept_fraction = 1.0;   ///< fraction of rounds Eve intercepts
  int workers = 1;
};

/// Round-by-round simulation. Per round the draws are, in order: sender
/// basis, sender symbol, eavesdropper outcome, receiver basis (plus the
/// receiver outcome when the received state is not an eigenstate of the
/// measurement). Rounds with mismatched bases are discarded; the empirical
/// rate is the wrong-symbol fraction among sifted rounds.
ErrorRateReport simulate_protocol(const ProtocolSpec& spec, const OrthonormalBasis& eve_basis,
                                  const SimulationOptions& opts,
                                  double q_reference = std::numeric_limits<double>::quiet_NaN());

}  // namespace eccc
