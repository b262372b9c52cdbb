#pragma once

#include <memory>
#include <optional>
#include <string>

#include "godambe/observation.hpp"

namespace godambe {

// Psi(y, theta): the estimating-equation contribution of one observation.
// output_dim == param_dim for exactly identified equations; stacked GMM
// functionals may have output_dim > param_dim.
struct InferenceFunctional {
    std::function<VectorXd(const Observation&, const VectorXd&)> eval;
    // analytic Jacobian d/dtheta (output_dim x param_dim); null -> central differences
    std::function<MatrixXd(const Observation&, const VectorXd&)> d_theta;
    int output_dim = 1;
    int param_dim = 1;
    bool bounded = false;
    std::optional<double> lipschitz_const;
    // base trigonometric frequency of psi in its point argument, when psi is
    // oscillatory; population integrals against heavy-tailed densities switch
    // to the oscillation-aware quadrature path
    std::optional<double> oscillation_freq;
    OperatorKind requires_kind = OperatorKind::point;
    std::string label;

    MatrixXd jacobian(const Observation& y, const VectorXd& theta) const;
};

// psi_c(x, theta) = sin(c (x - theta)): bounded, Lipschitz with constant c,
// unbiased for symmetric location families.
InferenceFunctional sinusoidal(double c);

// psi_k(x, theta) = x^k phi(x) - m_k(theta), the kernel-weighted moment
// equation centred by the weak moment.
InferenceFunctional weak_moment_if(int k, const KernelProfile& kernel, const ModelFamily& model,
                                   const QuadratureSpec& spec = {});

// Real and imaginary parts of e^{iux} phi(x) - weak_cf_theta(u).
InferenceFunctional weak_cf_if(double u, const KernelProfile& kernel, const ModelFamily& model,
                               const QuadratureSpec& spec = {});

// The model score as an inference functional (S = V = I_classical).
InferenceFunctional score_if(const ModelFamily& model);

enum class IntervalForm {
    conditional,     // E_mu[sin(c(X-mu)) | X in bin]  (unbiased under the bin law)
    paper_weighted,  // integral over the bin of sin(c(x-mu)) f_mu(x) phi(x) dx
};

// Sinusoidal location functional for interval-censored observations.
// Bin integrals are cached per theta so root-finding sweeps stay cheap.
InferenceFunctional interval_sinusoidal(double c, const ModelFamily& model, const BinGrid& grid,
                                        IntervalForm form = IntervalForm::conditional,
                                        const KernelProfile& kernel = KernelProfile::classical_limit(),
                                        const QuadratureSpec& spec = {});

// Score of the binned (multinomial) pushforward model: psi(b, theta) =
// d/dtheta log p_b(theta), computed by central differences.
InferenceFunctional interval_score_if(const ModelFamily& model, const BinGrid& grid,
                                      const QuadratureSpec& spec = {}, double dtheta = 1e-5);

// --- population expectations under an observation operator --------------

// E over Y ~ pushforward law at theta_data of psi(Y, theta_eval).
VectorXd population_mean(const InferenceFunctional& psi, const ModelFamily& model,
                         const ObservationOperator& op, const VectorXd& theta_data,
                         const VectorXd& theta_eval, const QuadratureSpec& spec = {});

// E of the Jacobian d/dtheta psi(Y, theta_eval).
MatrixXd population_jacobian(const InferenceFunctional& psi, const ModelFamily& model,
                             const ObservationOperator& op, const VectorXd& theta_data,
                             const VectorXd& theta_eval, const QuadratureSpec& spec = {});

// E of psi psi^T at theta_eval.
MatrixXd population_outer(const InferenceFunctional& psi, const ModelFamily& model,
                          const ObservationOperator& op, const VectorXd& theta_data,
                          const VectorXd& theta_eval, const QuadratureSpec& spec = {});

// Recentres psi so that it is unbiased under the operator's pushforward law
// at every theta: psi~(y, theta) = psi(y, theta) - E_theta[psi].  Identity
// for functionals that are already pushforward-unbiased.
InferenceFunctional recenter_for_operator(const InferenceFunctional& psi, const ModelFamily& model,
                                          const ObservationOperator& op,
                                          const QuadratureSpec& spec = {});

// --- regularity diagnostics ----------------------------------------------

struct RegularityRow {
    VectorXd theta;
    double unbiasedness_residual = 0.0;  // |E_theta[psi(Y, theta)]|_inf   (R2)
    double min_variability_eig = 0.0;    // smallest eigenvalue of V        (C4)
    double max_variability = 0.0;        // largest |V_ij|                  (C4)
    double interchange_gap = 0.0;        // |d/dtheta E[psi] - E[d/dtheta psi]|_inf (C5)
};

struct RegularityReport {
    std::vector<RegularityRow> rows;
    int root_count = 0;      // sign changes of theta -> E_theta0[psi] over the scan (R3)
    VectorXd theta0;         // data-generating point used for the R3 scan
    bool r2_ok = true;
    bool r3_ok = true;
    bool c4_ok = true;
    bool c5_ok = true;
};

RegularityReport regularity_report(const InferenceFunctional& psi, const ModelFamily& model,
                                   const ObservationOperator& op,
                                   const std::vector<VectorXd>& theta_grid,
                                   const QuadratureSpec& spec = {}, double tol = 1e-6);

}  // namespace godambe
