#pragma once

#include <string>
#include <vector>

#include "godambe/inference.hpp"

namespace godambe {

// Fisher information of the model itself: E[score score^T].
MatrixXd fisher_classical(const ModelFamily& model, const VectorXd& theta,
                          const QuadratureSpec& spec = {});

// Fisher information of the kernel-weighted pushforward experiment
// (density f phi / c):  integral of (d_theta f)^2 / f * phi / c  -  (c'/c)^2.
// Scalar-parameter models; c' by central differences with step dtheta.
double fisher_kernel_weighted(const ModelFamily& model, const KernelProfile& kernel,
                              const VectorXd& theta, const QuadratureSpec& spec = {},
                              double dtheta = 1e-5);

// Fisher information of the single-interval (Bernoulli) observation:
// (d_theta p)^2 / (p (1 - p)).
double fisher_interval(const ModelFamily& model, double lo, double hi, const VectorXd& theta,
                       const QuadratureSpec& spec = {}, double dtheta = 1e-5);

// Fisher information of the full censoring grid (multinomial bin sum):
// sum over bins of (d_theta p_b)^2 / p_b.
double grid_information(const ModelFamily& model, const BinGrid& grid, const VectorXd& theta,
                        const QuadratureSpec& spec = {}, double dtheta = 1e-5);

struct GodambeResult {
    MatrixXd G;  // S^T V^{-1} S
    MatrixXd S;
    MatrixXd V;
};

// Population Godambe information by quadrature under the operator's
// observation law at theta.
GodambeResult godambe_numeric(const InferenceFunctional& psi, const ModelFamily& model,
                              const ObservationOperator& op, const VectorXd& theta,
                              const QuadratureSpec& spec = {});

// Monte Carlo route for configurations without a quadrature law.
GodambeResult godambe_mc(const InferenceFunctional& psi, const ModelFamily& model,
                         const ObservationOperator& op, const VectorXd& theta, long n_draws,
                         Rng& rng);

// Closed-form sinusoidal Godambe information G_c = 2 c^2 phi(c)^2 / (1 - phi(2c))
// with phi the base characteristic function of the family.
struct SinusoidalFamily {
    enum class Kind { cauchy, student, gaussian };
    Kind kind = Kind::cauchy;
    double param = 1.0;  // nu for student, sigma for gaussian, unused for cauchy

    static SinusoidalFamily cauchy() { return {Kind::cauchy, 1.0}; }
    static SinusoidalFamily student(double nu) { return {Kind::student, nu}; }
    static SinusoidalFamily gaussian(double sigma = 1.0) { return {Kind::gaussian, sigma}; }

    double base_cf(double u) const;          // real CF of the centred family
    double fisher_location() const;          // classical information, by quadrature
};

double godambe_sinusoidal_closed(const SinusoidalFamily& family, double c);

// Location-scale Godambe information J(mu, sigma) = 2c^2 phiZ(c sigma)^2 /
// (1 - phiZ(2 c sigma)) for a symmetric base with real CF phiZ.
double locscale_godambe(double c, double sigma, const std::function<double(double)>& base_cf);

// ARE of the sinusoidal functional for a linear functional a'mu of an
// elliptical location, Gaussian kind.  Scalar form uses the optimal
// direction v = c Sigma^{-1} a; the general form takes any v.
double elliptical_are(const VectorXd& a, const MatrixXd& sigma, double c);
double elliptical_are_general(const VectorXd& v, const VectorXd& a, const MatrixXd& sigma);

struct InformationReport {
    MatrixXd I_classical;
    MatrixXd I_O;
    MatrixXd G_psi;
    MatrixXd observation_cost;  // I_classical - I_O
    MatrixXd estimation_cost;   // I_O - G_psi
    VectorXd theta;
    std::string operator_id;
    std::string functional_id;
    double observation_gap_min_eig = 0.0;
    double estimation_gap_min_eig = 0.0;
    bool hierarchy_ok(double tol = 1e-6) const {
        return observation_gap_min_eig >= -tol && estimation_gap_min_eig >= -tol;
    }
};

// Audits I_classical >= I_O >= G_psi for one (model, operator, functional)
// configuration.  Kernel-weighted operators recentre psi under the
// pushforward law so the Godambe quantity refers to a functional that is
// unbiased for the experiment being audited.  Violations are reported in
// the gap eigenvalues, never thrown.
InformationReport hierarchy_report(const ModelFamily& model, const ObservationOperator& op,
                                   const InferenceFunctional& psi, const VectorXd& theta,
                                   const QuadratureSpec& spec = {});

struct ArePoint {
    double c = 0.0;
    double godambe = 0.0;
    double fisher = 0.0;
    double are = 0.0;
};

struct AreCurve {
    std::vector<ArePoint> points;
    int argmax = 0;
    double small_c_limit = 0.0;     // ARE limit as c -> 0 (by series when defined)
    bool limit_defined = true;      // false when the base CF is not differentiable at 0
    std::string note;               // populated for families with known reference mismatches
};

AreCurve are_curve(const SinusoidalFamily& family, const std::vector<double>& c_grid);

}  // namespace godambe
