#include "godambe/special.hpp"

#include <cmath>
#include <stdexcept>

namespace godambe {
namespace {

constexpr double kHalfIntegerEps = 1e-12;

bool near_half_integer(double order, int* twice) {
    const double t = 2.0 * order;
    const double r = std::round(t);
    if (std::abs(t - r) < kHalfIntegerEps && std::fmod(r, 2.0) != 0.0) {
        *twice = static_cast<int>(r);
        return true;
    }
    return false;
}

// K_{m+1/2}(x) = sqrt(pi/(2x)) e^{-x} sum_{j<=m} (m+j)! / (j!(m-j)! (2x)^j)
double bessel_k_half_integer(int twice_order, double x) {
    const int m = (twice_order - 1) / 2;
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j <= m; ++j) {
        term *= static_cast<double>((m + j) * (m - j + 1)) / (2.0 * j * x);
        sum += term;
    }
    return std::sqrt(M_PI / (2.0 * x)) * std::exp(-x) * sum;
}

}  // namespace

double bessel_k(double order, double x) {
    if (!(x > 0.0) || !std::isfinite(x) || !std::isfinite(order))
        throw std::domain_error("bessel_k: requires finite order and x > 0");
    if (order < 0.0) order = -order;  // K_{-nu} = K_nu
    int twice;
    if (near_half_integer(order, &twice)) return bessel_k_half_integer(twice, x);
    return std::cyl_bessel_k(order, x);
}

double radial_generator(double nu, double s) {
    if (!(nu > 0.0)) throw std::domain_error("radial_generator: nu must be > 0");
    if (!(s >= 0.0) || !std::isfinite(s))
        throw std::domain_error("radial_generator: s must be finite and >= 0");
    if (s == 0.0) return 1.0;  // continuity limit of the 0/0 form
    const double p = 0.5 * nu;
    const double x = std::sqrt(nu * s);
    // Underflow guard: K_p(x) ~ sqrt(pi/2x) e^{-x} for large x.
    if (x > 650.0) return 0.0;
    return std::pow(x, p) * bessel_k(p, x) / (std::pow(2.0, p - 1.0) * std::tgamma(p));
}

double radial_generator_ds(double nu, double s) {
    if (!(nu > 0.0)) throw std::domain_error("radial_generator_ds: nu must be > 0");
    if (!(s > 0.0)) throw std::domain_error("radial_generator_ds: s must be > 0");
    const double p = 0.5 * nu;
    const double x = std::sqrt(nu * s);
    if (x > 650.0) return 0.0;
    // g(s) = x^p K_p(x) / C with x = sqrt(nu s):
    //   g'(s) = -(nu/2) x^{p-1} K_{p-1}(x) / C
    const double c = std::pow(2.0, p - 1.0) * std::tgamma(p);
    return -p * std::pow(x, p - 1.0) * bessel_k(p - 1.0, x) / c;
}

}  // namespace godambe
