#pragma once

namespace godambe {

// Modified Bessel function of the second kind K_order(x), order >= 0, x > 0.
// Half-integer orders use the closed-form finite sum; other orders fall back
// to the standard library implementation.  Accurate to ~1e-13 relative on
// x in [1e-3, 50].
double bessel_k(double order, double x);

// Radial generating function of the Student t family:
//   g_nu(s) = (sqrt(nu s))^{nu/2} K_{nu/2}(sqrt(nu s)) / (2^{nu/2-1} Gamma(nu/2)),
// with g_nu(0) = 1 by continuity.  The t_nu characteristic function is
// phi(u) = g_nu(u^2); g_1(s) = e^{-sqrt(s)}, g_3(s) = (1+sqrt(3s))e^{-sqrt(3s)}.
double radial_generator(double nu, double s);

// d/ds g_nu(s), via d/dx [x^p K_p(x)] = -x^p K_{p-1}(x).  s > 0.
double radial_generator_ds(double nu, double s);

}  // namespace godambe
