// Classical cloning as a dephasing channel and the average cloning
// fidelity functional.
#pragma once

#include "eccc/ensemble.hpp"
#include "eccc/types.hpp"

namespace eccc {

/// Output of dephasing rho in a basis: the Born weights <j|rho|j> and the
/// diagonal state rho' = sum_j <j|rho|j> |j><j|, expressed in the
/// computational frame.
struct ClonedOutput {
  OrthonormalBasis basis;
  Eigen::VectorXd born_weights;
  DensityMatrix output;
};

/// rho' = sum_j <j|rho|j> |j><j|. Idempotent: dephasing the output again in
/// the same basis reproduces it.
ClonedOutput dephase(const DensityMatrix& rho, const OrthonormalBasis& basis);

/// F(rho, rho') for rho' = dephase(rho, basis). Uses the pure-state shortcut
/// sum_j |<j|psi>|^4 when rho is pure.
double cloning_fidelity(const DensityMatrix& rho, const OrthonormalBasis& basis);

/// F_ave(E, basis) = sum_i q_i F(rho_i, rho_i'); always in (1/d, 1].
double average_cloning_fidelity(const Ensemble& e, const OrthonormalBasis& basis);

/// Average cloning fidelity of the eigen-ensemble {q_i, |psi_i>} of a qubit
/// state under the given basis: sum_{i,j} q_i |<e_j|psi_i>|^4, which equals
/// 1 - sin^2(theta_1)/2 with theta_1 the angle between basis and eigenbasis.
double eigen_ensemble_fidelity(const DensityMatrix& rho, const OrthonormalBasis& basis);

}  // namespace eccc
