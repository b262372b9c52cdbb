#pragma once

#include <optional>
#include <vector>

#include "godambe/inference.hpp"

namespace godambe {

struct SolverTrace {
    int iterations = 0;
    double residual_norm = 0.0;
    bool used_bisection = false;
};

struct EstimationResult {
    VectorXd theta_hat;
    MatrixXd S_hat;      // -(1/n) sum d/dtheta psi at theta_hat (q x p)
    MatrixXd V_hat;      // (1/n) sum psi psi^T at theta_hat (q x q)
    MatrixXd sandwich;   // estimated covariance of theta_hat (p x p)
    MatrixXd G_hat;      // S^T V^{-1} S (p x p)
    int n = 0;
    SolverTrace trace;
    std::string estimator;

    double standard_error(int i = 0) const { return std::sqrt(sandwich(i, i)); }
};

// Roots the empirical estimating equation (1/n) sum psi(Y_i, theta) = 0 by
// damped Newton from the pilot; the scalar case falls back to bracketed
// bisection when Newton stalls.
EstimationResult solve_z(const InferenceFunctional& psi, const std::vector<Observation>& data,
                         const VectorXd& pilot, double tol = 1e-9, int max_iter = 80);

// Location estimator from the phase of the empirical characteristic function
// z_n(u); the 2k pi branch is resolved toward the pilot (sample median by
// default).  S/V are the empirical sinusoidal moments at theta_hat.
EstimationResult ecf_phase_estimator(const std::vector<double>& data, double u,
                                     std::optional<double> pilot = std::nullopt);

// Two-step GMM for a stacked functional with output_dim >= param_dim.
// Step 1 weights with the identity, step 2 with inverse(V_hat) at the
// step-1 estimate.
EstimationResult gmm(const std::vector<InferenceFunctional>& psis,
                     const std::vector<Observation>& data, const VectorXd& pilot, int steps = 2,
                     double tol = 1e-10, int max_iter = 120);

// Stacks functionals sharing one parameter vector into a single one.
InferenceFunctional stack_functionals(const std::vector<InferenceFunctional>& psis);

// Maximum likelihood for counts on a censoring grid (the efficiency
// benchmark for interval estimators).  counts[slot] with slot 0 the first
// bin of the grid (the left tail when tails are open).
EstimationResult interval_mle_benchmark(const ModelFamily& model, const BinGrid& grid,
                                        const std::vector<long>& counts, double pilot,
                                        const QuadratureSpec& spec = {}, double tol = 1e-9);

double sample_median(std::vector<double> values);

}  // namespace godambe
