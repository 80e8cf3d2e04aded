// Finite weighted ensembles, the named ensemble families, product
// ensembles, infinite-family samplers and JSON file I/O.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eccc/types.hpp"

namespace eccc {

/// Finite ensemble {q_i, rho_i}: a weighted list of states sharing one
/// dimension. Weights must be positive and sum to 1; zero-weight items are
/// dropped at construction (the count is kept for reporting).
class Ensemble {
 public:
  struct Item {
    double weight;
    DensityMatrix state;
  };

  Ensemble(Index dim, std::vector<Item> items);

  Index dim() const { return dim_; }
  Index size() const { return static_cast<Index>(items_.size()); }
  const std::vector<Item>& items() const { return items_; }
  const Item& item(Index i) const { return items_.at(static_cast<std::size_t>(i)); }
  double max_weight() const;
  Index dropped_zero_weight() const { return dropped_; }
  /// sum_i q_i rho_i
  DensityMatrix mixture() const;
  /// All states pure (rank 1 within tolerance)?
  bool all_pure() const;
  /// Max entrywise distance between any state and the first one is within
  /// tol; true also for single-item ensembles.
  bool all_states_identical(double tolerance) const;

 private:
  Index dim_;
  std::vector<Item> items_;
  Index dropped_ = 0;
};

/// Weighted BB84-style family: {|0>, |1>} with weight p/2 each and
/// {|+>, |->} with weight (1-p)/2 each. p in {0, 1} degenerates to the
/// two-state commuting ensemble.
Ensemble make_bb84_weighted(double p);

/// Six equiprobable qubit pure states along the +/-x, +/-y, +/-z Bloch axes.
Ensemble make_six_state();

/// Tensor-product ensemble {q_i q_j, rho_i (x) rho_j}. Throws when the
/// item count would exceed max_items.
Ensemble product_ensemble(const Ensemble& a, const Ensemble& b, Index max_items = 4096);

/// Infinite ensemble {f(alpha), rho(alpha)} as a seeded sampler. sample must
/// be a pure function of (seed, index) so parallel draws partition the index
/// space deterministically.
struct ParametricEnsemble {
  Index dim = 2;
  std::string label = "custom";
  double theta = 0.0;  ///< double-circle polar angle; unused otherwise
  std::optional<double> known_j;
  std::function<DensityMatrix(std::uint64_t seed, std::uint64_t index)> sample;
};

/// Pure qubit states on the two latitude circles z = +/- cos(theta):
/// a fair coin picks the circle, phi is uniform on [0, 2pi).
ParametricEnsemble make_double_circle(double theta);

/// Pure qubit states uniform on the Bloch sphere.
ParametricEnsemble make_bloch_uniform();

/// Pure states uniform (Haar) in a d-dimensional Hilbert space.
ParametricEnsemble make_haar_uniform(Index dim);

/// Equiprobable finite ensemble of n draws from a parametric family.
Ensemble sample_ensemble(const ParametricEnsemble& pe, Index n, std::uint64_t seed);

/// Random ensemble for property suites: n states with weights drawn away
/// from zero, states Haar-pure (pure_only) or a mix of pure and random
/// mixed states of varying rank.
Ensemble random_ensemble(Index dim, Index n, bool pure_only, std::uint64_t seed);

/// Deterministic quadrature version of the double-circle family:
/// phi_points states per circle at equally spaced phases, weight
/// 1/(2 phi_points) each. Exact for the cloning-fidelity average because the
/// integrand is a degree-2 trigonometric polynomial in phi.
Ensemble make_double_circle_discretized(double theta, Index phi_points);

/// JSON ensemble files:
///   { "dim": d, "items": [ { "weight": q, "matrix": [[[re,im],...],...] } ] }
/// Matrices are row-major, d rows of d [re, im] entries. Validation errors
/// name the failing item index and invariant.
Ensemble load_ensemble(const std::string& path);
void save_ensemble(const Ensemble& e, const std::string& path);

}  // namespace eccc
