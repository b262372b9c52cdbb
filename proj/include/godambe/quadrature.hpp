#pragma once

#include <complex>
#include <functional>
#include <limits>

#include "godambe/common.hpp"

namespace godambe {

enum class QuadScheme {
    adaptive_interval,      // globally adaptive Gauss-Kronrod 7/15
    half_line_transformed,  // adaptive rule after mapping [a, inf) to [0, 1)
    hermite_weighted,       // fixed-order Gauss-Hermite for full-line integrands
};

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 400;
    QuadScheme scheme = QuadScheme::adaptive_interval;

    void validate() const;
};

struct IntegralResult {
    double value = 0.0;
    double error_bound = std::numeric_limits<double>::infinity();
    int subdivisions = 0;
    bool converged = false;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Integrates f over [a, b]; either endpoint may be infinite.  Infinite
// endpoints are handled by the rational map x = t/(1-t^2) (full line) or
// x = a + t/(1-t) (half line), then the adaptive rule runs on the finite
// image.  Returns the estimate together with the achieved error bound.
IntegralResult integrate_full(const std::function<double(double)>& f, double a, double b,
                              const QuadratureSpec& spec = {});

// Convenience wrapper: returns the value, throws QuadratureError (carrying
// the best estimate) if the requested tolerance was not reached.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

// Real and imaginary parts integrated jointly over one adaptive partition.
std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, const QuadratureSpec& spec = {});

// Full-line integral of f(x) = (trigonometric combination with base frequency
// omega) x (algebraically decaying envelope).  Plain adaptive rules stall on
// such integrands when the envelope decays slowly (heavy-tailed densities):
// the oscillation never dies out on the transformed interval.  This routine
// integrates an adaptive core [-W, W] and sums both tails over panels of an
// integer number of periods with geometrically growing panel sizes; the
// partial sums then admit a smooth expansion in 1/x and are extrapolated to
// x = infinity (Neville scheme).
double integrate_oscillatory(const std::function<double(double)>& f, double base_freq,
                             double core_half_width, const QuadratureSpec& spec = {});

// Half-line variant: integral of f over [a, inf) (or (-inf, a] when
// `downward`), same period-panel extrapolation starting at the endpoint.
double integrate_oscillatory_half(const std::function<double(double)>& f, double a,
                                  double base_freq, bool downward = false,
                                  const QuadratureSpec& spec = {});

}  // namespace godambe
