#pragma once

#include <stdexcept>
#include <string>

namespace godambe {

inline constexpr const char* kVersion = "0.1.0";

// Base class for numerical failures (quadrature breakdown, solver
// divergence, singular matrices).  Precondition violations use
// std::domain_error / std::invalid_argument instead.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive quadrature ran out of subdivisions.  Carries the best
// available estimate and its error bound so callers can decide whether
// the partial result is still usable.
class QuadratureError : public NumericalError {
  public:
    QuadratureError(const std::string& what, double best_estimate, double error_bound)
        : NumericalError(what), best_estimate(best_estimate), error_bound(error_bound) {}
    double best_estimate;
    double error_bound;
};

class SolverError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

}  // namespace godambe
