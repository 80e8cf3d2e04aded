// Closed forms and Monte Carlo estimators of J for the infinite ensemble
// families, plus the unitarily invariant pure-state overlap moments.
#pragma once

#include <cstdint>
#include <vector>

#include "eccc/ensemble.hpp"
#include "eccc/optimize.hpp"

namespace eccc {

/// J of the symmetric double-circle family at polar angle theta:
///   1 - sin^2(theta)/2          when sin(theta) <= sqrt(2/3),
///   1/2 + sin^2(theta)/4        otherwise.
/// Continuous at the crossover, where both branches equal 2/3.
double j_double_circle_closed(double theta);

/// Average cloning fidelity of the double-circle family under the basis at
/// (theta_1, phi_1): 1 - sin^2(theta)/2 + sin^2(theta_1)(3 sin^2(theta) - 2)/4.
double f_ave_double_circle(double theta, double theta1, double phi1);

/// Haar moment of pure-state overlaps,
/// integral of |<phi|psi>|^(2n) d(Omega_phi) = (d-1)! n! / (d+n-1)!,
/// computed with exact integer arithmetic.
double pure_overlap_moment(Index dim, int n);

/// Basis average of the cloning fidelity of a Haar pure state:
/// d * pure_overlap_moment(d, 2) = 2/(d+1).
double haar_average_cloning_fidelity(Index dim);

struct InfiniteEstimate {
  EcccResult result;
  double stderr_val = 0.0;  ///< batch-means standard error of F_ave at the chosen basis
  Index samples = 0;
  int batches = 0;
};

/// Sample-then-optimize estimator of J for an infinite ensemble: draws
/// n_states states, forms the equiprobable finite ensemble, optimizes once
/// and reports the batch-means standard error at the chosen basis.
InfiniteEstimate estimate_j_infinite(const ParametricEnsemble& pe, Index n_states,
                                     const EcccOptions& opts, std::uint64_t seed,
                                     int batches = 10);

struct SweepPoint {
  double theta = 0.0;
  double j_closed = 0.0;
  double j_mc = 0.0;
  double stderr_val = 0.0;
  Index samples = 0;
};

/// Monte Carlo sweep of the double-circle family over the given theta grid;
/// per-point seeds derive from (seed, point index) so results do not depend
/// on the worker count.
std::vector<SweepPoint> double_circle_sweep(const std::vector<double>& thetas, Index samples,
                                            const EcccOptions& opts, std::uint64_t seed,
                                            int workers = 1);

}  // namespace eccc
