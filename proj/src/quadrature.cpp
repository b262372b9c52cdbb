#include "godambe/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace godambe {
namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (positive half; the rule
// is symmetric).  Values from the QUADPACK dqk15 tables.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct RuleResult {
    T value;
    double error;
};

template <typename T>
RuleResult<T> gk15(const std::function<T(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    T flo[7], fhi[7];
    T fc = f(mid);
    T res_g = kWg[3] * fc;
    T res_k = kWgk[7] * fc;
    double res_abs = kWgk[7] * std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        flo[j] = f(mid - dx);
        fhi[j] = f(mid + dx);
        T sum = flo[j] + fhi[j];
        res_k += kWgk[j] * sum;
        res_abs += kWgk[j] * (std::abs(flo[j]) + std::abs(fhi[j]));
        if (j % 2 == 1) res_g += kWg[j / 2] * sum;
    }
    T mean = res_k * 0.5;
    double res_asc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        res_asc += kWgk[j] * (std::abs(flo[j] - mean) + std::abs(fhi[j] - mean));
    res_asc *= std::abs(half);
    res_abs *= std::abs(half);
    T value = res_k * half;
    double err = std::abs((res_k - res_g) * half);
    // QUADPACK error heuristic: sharpen the raw Kronrod-Gauss difference.
    if (res_asc != 0.0 && err != 0.0)
        err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(err, 50.0 * eps * res_abs);
    return {value, err};
}

struct Segment {
    double a, b, error;
    int idx;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename T>
IntegralResult adaptive(const std::function<T(double)>& f, double a, double b,
                        const QuadratureSpec& spec, T* out, int initial_parts = 1) {
    std::priority_queue<Segment> heap;
    std::vector<T> values;
    // seed with several segments: a single top-level rule can mistake an
    // integrand whose support falls between the nodes for zero
    initial_parts = std::max(1, initial_parts);
    double total_err = 0.0;
    for (int k = 0; k < initial_parts; ++k) {
        const double lo = a + (b - a) * k / initial_parts;
        const double hi = a + (b - a) * (k + 1) / initial_parts;
        auto r = gk15<T>(f, lo, hi);
        values.push_back(r.value);
        heap.push({lo, hi, r.error, k});
        total_err += r.error;
    }
    int splits = 0;
    auto total_value = [&] {
        T s{};
        for (const auto& v : values) s += v;
        return s;
    };
    while (splits < spec.max_subdivisions) {
        T tv = total_value();
        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(tv));
        if (total_err <= tol) break;
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {  // interval exhausted at machine precision
            total_err -= worst.error;
            heap.push({worst.a, worst.b, 0.0, worst.idx});
            if (heap.top().error == 0.0) break;
            continue;
        }
        auto left = gk15<T>(f, worst.a, mid);
        auto right = gk15<T>(f, mid, worst.b);
        values[static_cast<size_t>(worst.idx)] = left.value;
        values.push_back(right.value);
        heap.push({worst.a, mid, left.error, worst.idx});
        heap.push({mid, worst.b, right.error, static_cast<int>(values.size()) - 1});
        total_err += left.error + right.error - worst.error;
        ++splits;
    }
    T tv = total_value();
    *out = tv;
    IntegralResult res;
    res.value = std::abs(tv);  // overwritten by scalar caller
    res.error_bound = total_err;
    res.subdivisions = splits;
    res.converged = total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(tv));
    return res;
}

template <typename T>
std::function<T(double)> map_domain(const std::function<T(double)>& f, double a, double b,
                                    double* lo, double* hi) {
    const bool ainf = std::isinf(a);
    const bool binf = std::isinf(b);
    if (!ainf && !binf) {
        *lo = a;
        *hi = b;
        return f;
    }
    if (ainf && binf) {
        // x = t/(1-t^2), dx = (1+t^2)/(1-t^2)^2 dt,  t in (-1, 1)
        *lo = -1.0;
        *hi = 1.0;
        return [f](double t) -> T {
            const double om = 1.0 - t * t;
            const double x = t / om;
            const double jac = (1.0 + t * t) / (om * om);
            return f(x) * jac;
        };
    }
    if (!ainf && binf) {
        // x = a + t/(1-t), dx = dt/(1-t)^2,  t in [0, 1)
        *lo = 0.0;
        *hi = 1.0;
        return [f, a](double t) -> T {
            const double om = 1.0 - t;
            const double x = a + t / om;
            return f(x) / (om * om);
        };
    }
    // (-inf, b]: mirror of the half-line case
    *lo = 0.0;
    *hi = 1.0;
    return [f, b](double t) -> T {
        const double om = 1.0 - t;
        const double x = b - t / om;
        return f(x) / (om * om);
    };
}

// Gauss-Hermite nodes/weights, computed once by Newton iteration on the
// Hermite recurrence (physicists' convention, weight e^{-x^2}).
struct HermiteRule {
    std::vector<double> x, w;
};

HermiteRule build_hermite(int n) {
    HermiteRule r;
    r.x.resize(static_cast<size_t>(n));
    r.w.resize(static_cast<size_t>(n));
    const double eps = 1e-14;
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * r.x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * r.x[1];
        else
            z = 2.0 * z - r.x[static_cast<size_t>(i) - 2];
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= eps) break;
        }
        r.x[static_cast<size_t>(i)] = z;
        r.x[static_cast<size_t>(n) - 1 - static_cast<size_t>(i)] = -z;
        r.w[static_cast<size_t>(i)] = 2.0 / (pp * pp);
        r.w[static_cast<size_t>(n) - 1 - static_cast<size_t>(i)] = r.w[static_cast<size_t>(i)];
    }
    return r;
}

const HermiteRule& hermite_rule(int n) {
    static const HermiteRule r40 = build_hermite(40);
    static const HermiteRule r80 = build_hermite(80);
    return n <= 40 ? r40 : r80;
}

IntegralResult hermite_integrate(const std::function<double(double)>& f, const QuadratureSpec& spec) {
    auto eval = [&](const HermiteRule& r) {
        double s = 0.0;
        for (size_t i = 0; i < r.x.size(); ++i) {
            const double xi = r.x[i];
            s += r.w[i] * std::exp(xi * xi) * f(xi);
        }
        return s;
    };
    const double coarse = eval(hermite_rule(40));
    const double fine = eval(hermite_rule(80));
    IntegralResult res;
    res.value = fine;
    res.error_bound = std::abs(fine - coarse);
    res.subdivisions = 0;
    res.converged = res.error_bound <= std::max(spec.abs_tol, spec.rel_tol * std::abs(fine));
    return res;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0)) throw std::domain_error("QuadratureSpec: abs_tol must be > 0");
    if (!(rel_tol > 0.0)) throw std::domain_error("QuadratureSpec: rel_tol must be > 0");
    if (max_subdivisions < 1) throw std::domain_error("QuadratureSpec: max_subdivisions must be >= 1");
}

IntegralResult integrate_full(const std::function<double(double)>& f, double a, double b,
                              const QuadratureSpec& spec) {
    spec.validate();
    if (std::isnan(a) || std::isnan(b)) throw std::domain_error("integrate: NaN endpoint");
    if (a == b) return {0.0, 0.0, 0, true};
    if (a > b) {
        IntegralResult r = integrate_full(f, b, a, spec);
        r.value = -r.value;
        return r;
    }
    if (spec.scheme == QuadScheme::hermite_weighted) {
        if (!(std::isinf(a) && std::isinf(b)))
            throw std::domain_error("hermite_weighted scheme requires the full line");
        return hermite_integrate(f, spec);
    }
    double lo, hi;
    auto g = map_domain<double>(f, a, b, &lo, &hi);
    double value;
    IntegralResult res = adaptive<double>(g, lo, hi, spec, &value, 8);
    res.value = value;
    return res;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
    IntegralResult r = integrate_full(f, a, b, spec);
    if (!r.converged)
        throw QuadratureError("integrate: tolerance not reached after " +
                                  std::to_string(r.subdivisions) + " subdivisions",
                              r.value, r.error_bound);
    return r.value;
}

namespace {

// sum of f over [start, start + n_periods * period] with one adaptive pass
double panel_integral(const std::function<double(double)>& f, double start, double length) {
    QuadratureSpec spec;
    spec.abs_tol = 1e-15;
    spec.rel_tol = 1e-13;
    spec.max_subdivisions = 200;
    double value;
    adaptive<double>(f, start, start + length, spec, &value, 4);
    return value;
}

double oscillatory_tail(const std::function<double(double)>& f, double start, double period) {
    // panel sizes 1,1,2,2,4,4,... periods: extrapolation nodes 1/x spread
    // geometrically, keeping the Neville scheme well conditioned
    constexpr int kGroups = 12;
    double xs[kGroups], sums[kGroups];
    double x = start, acc = 0.0;
    int size = 1;
    for (int j = 0; j < kGroups; ++j) {
        acc += panel_integral(f, x, size * period);
        x += size * period;
        xs[j] = 1.0 / x;
        sums[j] = acc;
        if (j % 2 == 1) size *= 2;
    }
    double t[kGroups];
    for (int j = 0; j < kGroups; ++j) t[j] = sums[j];
    for (int j = 1; j < kGroups; ++j)
        for (int i = kGroups - 1; i >= j; --i)
            t[i] = t[i] + (t[i] - t[i - 1]) * xs[i] / (xs[i - j] - xs[i]);
    return t[kGroups - 1];
}

}  // namespace

double integrate_oscillatory(const std::function<double(double)>& f, double base_freq,
                             double core_half_width, const QuadratureSpec& spec) {
    spec.validate();
    if (!(base_freq > 0.0))
        throw std::domain_error("integrate_oscillatory: base frequency must be > 0");
    const double period = 2.0 * M_PI / base_freq;
    const double w = std::max(core_half_width, 1.0);
    QuadratureSpec core_spec = spec;
    // the core may hold many oscillations; give the rule room to resolve them
    core_spec.max_subdivisions =
        std::max(spec.max_subdivisions, 200 + 8 * static_cast<int>(2.0 * w / period + 1.0));
    const double chunk = std::min(4.0, 0.5 * period);
    const int parts = std::max(8, static_cast<int>(2.0 * w / chunk));
    double core;
    IntegralResult res = adaptive<double>(f, -w, w, core_spec, &core, parts);
    if (!res.converged)
        throw QuadratureError("integrate_oscillatory: core did not converge", core,
                              res.error_bound);
    return core + oscillatory_tail(f, w, period) +
           oscillatory_tail([f](double x) { return f(-x); }, w, period);
}

double integrate_oscillatory_half(const std::function<double(double)>& f, double a,
                                  double base_freq, bool downward, const QuadratureSpec& spec) {
    spec.validate();
    if (!(base_freq > 0.0))
        throw std::domain_error("integrate_oscillatory_half: base frequency must be > 0");
    const double period = 2.0 * M_PI / base_freq;
    if (downward) return oscillatory_tail([f, a](double t) { return f(2.0 * a - t); }, a, period);
    return oscillatory_tail(f, a, period);
}

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    if (a == b) return {0.0, 0.0};
    if (a > b) return -integrate_complex(f, b, a, spec);
    if (spec.scheme == QuadScheme::hermite_weighted)
        throw std::domain_error("hermite_weighted scheme is real-valued only");
    double lo, hi;
    auto g = map_domain<std::complex<double>>(f, a, b, &lo, &hi);
    std::complex<double> value;
    IntegralResult res = adaptive<std::complex<double>>(g, lo, hi, spec, &value, 8);
    if (!res.converged)
        throw QuadratureError("integrate_complex: tolerance not reached", std::abs(value),
                              res.error_bound);
    return value;
}

}  // namespace godambe
