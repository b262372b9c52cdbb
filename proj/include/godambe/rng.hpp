#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace godambe {

// Deterministic random stream with the samplers the model families need.
// Distribution transforms are hand-rolled on top of mt19937_64 so that a
// (seed, substream) pair reproduces the same draws on every platform;
// std::*_distribution sequences are implementation-defined and avoided.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(mix(seed)) {}

    // Independent stream for one Monte Carlo replication: the sequence
    // depends only on (seed, index), never on the worker that runs it.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(mix(seed ^ mix(index + 0x9e3779b97f4a7c15ull)));
    }

    std::uint64_t raw() { return eng_(); }

    // uniform on (0, 1), never returns 0 or 1
    double uniform() {
        const std::uint64_t u = eng_() >> 11;  // 53 bits
        return (static_cast<double>(u) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // Marsaglia polar method
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double cauchy() { return std::tan(M_PI * (uniform() - 0.5)); }

    // Marsaglia-Tsang; shapes < 1 via the boost relation gamma(a) = gamma(a+1) U^{1/a}
    double gamma(double shape) {
        if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double chi_squared(double nu) { return 2.0 * gamma(0.5 * nu); }

    double student_t(double nu) { return normal() / std::sqrt(chi_squared(nu) / nu); }

  private:
    static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace godambe
