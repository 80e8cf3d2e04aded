// Ensemble classicality J = max over orthonormal bases of the average
// cloning fidelity, quantumness Q = 1 - J, the qubit grid oracle, analytic
// lower bounds and unitary-invariance helpers.
#pragma once

#include <cstdint>
#include <vector>

#include "eccc/cloning.hpp"
#include "eccc/ensemble.hpp"
#include "eccc/random.hpp"

namespace eccc {

struct EcccOptions {
  int restarts = 32;          ///< local-search runs (warm starts first, then random)
  int max_iterations = 0;     ///< per run; 0 picks a default from the parameter count
  double ftol = 1e-12;        ///< simplex function-spread stopping tolerance
  std::uint64_t seed = kDefaultSeed;
  bool restrict_support = true;  ///< optimize over bases of the mixture support
  bool qubit_grid = true;        ///< use the grid+refine path when the search space is 2-dim
  int qubit_grid_resolution = 128;
  std::vector<OrthonormalBasis> warm_starts;  ///< extra candidate bases, always evaluated
};

struct EcccResult {
  double j = 0.0;
  double q = 1.0;             ///< stored as 1 - j
  OrthonormalBasis basis;     ///< a basis achieving j
  int restarts_used = 0;      ///< local-search runs performed (0 on grid / short-circuit paths)
  double best_gap = 0.0;      ///< best minus runner-up search value
  bool converged = false;
  double error_bound = 0.0;   ///< estimated distance to the true maximum
};

/// Theorem-style lower bounds on J for a finite ensemble:
///   lower_weight = 1/d + q_m (d-1)/d,  lower_size = (N+d-1)/(N d),
/// with lower_weight >= lower_size always.
struct JBounds {
  double lower_weight;
  double lower_size;
  double upper;  // always 1
};

JBounds j_bounds(const Ensemble& e);

/// Attainable lower bound: 2/(d+1) for pure-state ensembles, 2/3 for any
/// qubit ensemble (the larger applies when both hold). Throws when neither
/// condition is met.
double j_attainable_lower_bound(const Ensemble& e);

/// Expected optimizer accuracy at a given dimension (used by the test
/// suites as the assertion slack).
double default_eps_opt(Index dim);

/// Computes J by maximizing F_ave over orthonormal bases. Multi-start
/// derivative-free search over a Givens-rotation parametrization; warm
/// starts include the mixture eigenbasis, generic commuting-combination
/// eigenbases and each state's eigenbasis. For an effective 2-dimensional
/// search space the exhaustive grid+refine path is used by default.
/// The reported J is a certified lower bound on the true maximum.
EcccResult classicality(const Ensemble& e, const EcccOptions& opts = {});

/// Independent brute-force oracle for qubit ensembles: exhaustive
/// (theta_1, phi_1) grid over the basis family with local refinement at the
/// best cell. No warm starts, no shared search code with classicality().
EcccResult classicality_qubit_grid(const Ensemble& e, int resolution);

/// Maps every state to u rho u^dagger, weights unchanged.
Ensemble unitary_conjugate(const Ensemble& e, const Matrix& u);

struct ProductCheckReport {
  EcccResult a;
  EcccResult b;
  EcccResult ab;
  double product_lower;  ///< J(A) * J(B)
  double gap;            ///< J(AB) - J(A) J(B)
  double eps_opt;
  bool inequality_ok;    ///< gap >= -eps_opt
};

/// Computes J(A), J(B) and J(A x B) and checks the product inequality
/// J(AB) >= J(A) J(B). The product of the two best bases is passed to the
/// product run as a warm start, mirroring the basis that attains the bound.
ProductCheckReport check_product_inequality(const Ensemble& a, const Ensemble& b,
                                            const EcccOptions& opts = {},
                                            Index max_items = 4096);

/// Coordinates for a basis as the column set of a product of complex Givens
/// rotations: d(d-1)/2 factors with (angle, phase) each, in a fixed
/// elimination order. Per-column phases are quotiented out (F_ave does not
/// see them).
struct BasisParameters {
  Index dim = 1;
  std::vector<double> coords;  ///< 2 * d(d-1)/2 values: (theta_k, phi_k) per factor
};

OrthonormalBasis basis_from_parameters(const BasisParameters& p);
BasisParameters parameters_from_basis(const OrthonormalBasis& b);

}  // namespace eccc
