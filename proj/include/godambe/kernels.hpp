#pragma once

#include <complex>
#include <vector>

#include "godambe/models.hpp"
#include "godambe/quadrature.hpp"

namespace godambe {

// The fixed kernel phi of the distribution-kernel pair.  The gaussian shape
// is the amplitude-one bump exp(-(x-center)^2 / (2 sigma^2)); classical_limit
// stands for the formal phi == 1 and makes every weak quantity coincide with
// its classical counterpart.
struct KernelProfile {
    enum class Shape { gaussian, classical_limit };

    Shape shape = Shape::classical_limit;
    double sigma = 1.0;
    double center = 0.0;

    static KernelProfile gaussian(double sigma, double center = 0.0);
    static KernelProfile classical_limit() { return KernelProfile{}; }

    bool is_classical() const { return shape == Shape::classical_limit; }

    double operator()(double x) const {
        if (is_classical()) return 1.0;
        const double z = (x - center) / sigma;
        return std::exp(-0.5 * z * z);
    }
};

// Weak expectation <T_theta, psi phi> computed through the density of the
// family.  Requires a density except for the classical-limit exponential
// shortcut exposed by weak_cf.
double pairing(const ModelFamily& model, const VectorXd& theta,
               const std::function<double(double)>& psi, const KernelProfile& kernel,
               const QuadratureSpec& spec = {});

Complex pairing_complex(const ModelFamily& model, const VectorXd& theta,
                        const std::function<Complex(double)>& psi, const KernelProfile& kernel,
                        const QuadratureSpec& spec = {});

// n-th weak moment <T_theta, x^n phi>.
double weak_moment(const ModelFamily& model, const VectorXd& theta, int n,
                   const KernelProfile& kernel, const QuadratureSpec& spec = {});

// Weak characteristic function <T_theta, e^{itx} phi>.  Under the classical
// limit this is the model characteristic function itself (no quadrature).
Complex weak_cf(const ModelFamily& model, const VectorXd& theta, double t,
                const KernelProfile& kernel, const QuadratureSpec& spec = {});

struct WeakCumulants {
    std::vector<double> kappa;      // kappa[0] unused, kappa[n] = n-th weak cumulant
    double max_imag_residual = 0.0; // discarded imaginary part, should be ~0
};

// Weak cumulants by Richardson-extrapolated central differences of
// t -> log weak_cf(t) at 0, orders 1..max_order (max_order <= 4).
WeakCumulants weak_cumulants(const ModelFamily& model, const VectorXd& theta, int max_order,
                             const KernelProfile& kernel, const QuadratureSpec& spec = {},
                             double step = 1e-3);

// Weak summary at a parameter point: moments 0..max_moment, the cf on a
// grid, cumulants 1..max_cumulant.
struct WeakSummary {
    std::vector<double> moments;
    std::vector<std::pair<double, Complex>> cf_grid;
    std::vector<double> cumulants;
};

WeakSummary weak_summary(const ModelFamily& model, const VectorXd& theta,
                         const KernelProfile& kernel, int max_moment,
                         const std::vector<double>& cf_points, int max_cumulant,
                         const QuadratureSpec& spec = {});

}  // namespace godambe
