#include "godambe/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace godambe {
namespace {

// 5-point central-difference weights for d^n/dt^n at 0, step h.
// Orders 1..4 on the stencil {-2h,-h,0,h,2h}.
Complex stencil_derivative(const std::vector<Complex>& f, int order, double h) {
    // f = {f(-2h), f(-h), f(0), f(h), f(2h)}
    switch (order) {
        case 1: return (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
        case 2: return (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
        case 3: return (-f[0] + 2.0 * f[1] - 2.0 * f[3] + f[4]) / (2.0 * h * h * h);
        case 4: return (f[0] - 4.0 * f[1] + 6.0 * f[2] - 4.0 * f[3] + f[4]) / (h * h * h * h);
        default: throw std::domain_error("weak_cumulants: order must be in 1..4");
    }
}

}  // namespace

KernelProfile KernelProfile::gaussian(double sigma, double center) {
    if (!(sigma > 0.0)) throw std::domain_error("KernelProfile: sigma_phi must be > 0");
    KernelProfile k;
    k.shape = Shape::gaussian;
    k.sigma = sigma;
    k.center = center;
    return k;
}

double pairing(const ModelFamily& model, const VectorXd& theta,
               const std::function<double(double)>& psi, const KernelProfile& kernel,
               const QuadratureSpec& spec) {
    model.check_theta(theta);
    if (!model.has_density())
        throw std::invalid_argument("pairing: model '" + model.name +
                                    "' has no density and no shortcut applies");
    return integrate(
        [&](double x) { return psi(x) * kernel(x) * model.density(x, theta); }, -kInf, kInf,
        spec);
}

Complex pairing_complex(const ModelFamily& model, const VectorXd& theta,
                        const std::function<Complex(double)>& psi, const KernelProfile& kernel,
                        const QuadratureSpec& spec) {
    model.check_theta(theta);
    if (!model.has_density())
        throw std::invalid_argument("pairing: model '" + model.name +
                                    "' has no density and no shortcut applies");
    return integrate_complex(
        [&](double x) { return psi(x) * (kernel(x) * model.density(x, theta)); }, -kInf, kInf,
        spec);
}

double weak_moment(const ModelFamily& model, const VectorXd& theta, int n,
                   const KernelProfile& kernel, const QuadratureSpec& spec) {
    if (n < 0) throw std::domain_error("weak_moment: order must be >= 0");
    if (kernel.is_classical() && n == 0) return 1.0;
    return pairing(model, theta, [n](double x) { return std::pow(x, n); }, kernel, spec);
}

Complex weak_cf(const ModelFamily& model, const VectorXd& theta, double t,
                const KernelProfile& kernel, const QuadratureSpec& spec) {
    if (kernel.is_classical()) {
        model.check_theta(theta);
        return model.cf(t, theta);  // <T, e^{itx}> is the characteristic function
    }
    return pairing_complex(
        model, theta, [t](double x) { return std::exp(Complex(0.0, t * x)); }, kernel, spec);
}

WeakCumulants weak_cumulants(const ModelFamily& model, const VectorXd& theta, int max_order,
                             const KernelProfile& kernel, const QuadratureSpec& spec,
                             double step) {
    if (max_order < 1 || max_order > 4)
        throw std::domain_error("weak_cumulants: max_order must be in 1..4");
    if (!(step > 0.0)) throw std::domain_error("weak_cumulants: step must be > 0");
    const Complex phi0 = weak_cf(model, theta, 0.0, kernel, spec);
    if (std::abs(phi0) < 1e-12)
        throw NumericalError("weak_cumulants: weak_cf(0) is degenerate");

    auto log_cf_stencil = [&](double h) {
        std::vector<Complex> f(5);
        for (int i = 0; i < 5; ++i) {
            const double t = (i - 2) * h;
            f[static_cast<size_t>(i)] =
                std::log(i == 2 ? phi0 : weak_cf(model, theta, t, kernel, spec));
        }
        return f;
    };
    const auto fh = log_cf_stencil(step);
    const auto fh2 = log_cf_stencil(0.5 * step);

    WeakCumulants out;
    out.kappa.assign(static_cast<size_t>(max_order) + 1, 0.0);
    const Complex i_unit(0.0, 1.0);
    for (int n = 1; n <= max_order; ++n) {
        const Complex dh = stencil_derivative(fh, n, step);
        const Complex dh2 = stencil_derivative(fh2, n, 0.5 * step);
        // stencils are O(h^4) for orders 1-2 and O(h^2) for orders 3-4
        const double r = (n <= 2) ? 16.0 : 4.0;
        const Complex d = (r * dh2 - dh) / (r - 1.0);
        const Complex kappa = d / std::pow(i_unit, n);
        out.kappa[static_cast<size_t>(n)] = kappa.real();
        out.max_imag_residual = std::max(out.max_imag_residual, std::abs(kappa.imag()));
    }
    return out;
}

WeakSummary weak_summary(const ModelFamily& model, const VectorXd& theta,
                         const KernelProfile& kernel, int max_moment,
                         const std::vector<double>& cf_points, int max_cumulant,
                         const QuadratureSpec& spec) {
    WeakSummary s;
    for (int n = 0; n <= max_moment; ++n)
        s.moments.push_back(weak_moment(model, theta, n, kernel, spec));
    for (double t : cf_points) s.cf_grid.emplace_back(t, weak_cf(model, theta, t, kernel, spec));
    if (max_cumulant >= 1) {
        auto wc = weak_cumulants(model, theta, max_cumulant, kernel, spec);
        s.cumulants.assign(wc.kappa.begin() + 1, wc.kappa.end());
    }
    return s;
}

}  // namespace godambe
