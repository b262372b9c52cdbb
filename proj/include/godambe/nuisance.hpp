#pragma once

#include "godambe/inference.hpp"

namespace godambe {

// Parameter split into interest (alpha) and nuisance (beta) coordinates.
struct PartitionedModel {
    ModelFamily model;
    std::vector<int> interest;
    std::vector<int> nuisance;

    void validate() const;
    VectorXd nuisance_score(double x, const VectorXd& theta) const;
};

// Bhapkar-Godambe adjustment: psi* = Phi - E[Phi U_b'] (E[U_b U_b'])^{-1} U_b,
// with both expectation matrices computed by quadrature at theta and frozen
// into the returned functional (local projection).
InferenceFunctional bhapkar_godambe_project(const InferenceFunctional& phi,
                                            const PartitionedModel& pm, const VectorXd& theta,
                                            const QuadratureSpec& spec = {});

// The projection coefficient E[Phi U_b'] (E[U_b U_b'])^{-1} itself; zero for
// functionals already orthogonal to the nuisance scores.
MatrixXd projection_coefficient(const InferenceFunctional& phi, const PartitionedModel& pm,
                                const VectorXd& theta, const QuadratureSpec& spec = {});

struct OrthogonalityReport {
    std::vector<VectorXd> grid;
    std::vector<MatrixXd> cross;  // E_theta[psi_i U_beta_j] per grid point
    double max_abs = 0.0;
};

OrthogonalityReport orthogonality_check(const InferenceFunctional& psi, const PartitionedModel& pm,
                                        const std::vector<VectorXd>& theta_grid,
                                        const QuadratureSpec& spec = {});

// Godambe information for the interest block: S differentiates psi only in
// the alpha directions; J = S^T V^{-1} S.
MatrixXd nuisance_godambe(const InferenceFunctional& psi, const PartitionedModel& pm,
                          const VectorXd& theta, const QuadratureSpec& spec = {});

}  // namespace godambe
