#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "godambe/kernels.hpp"
#include "godambe/special.hpp"

using namespace godambe;

namespace {

VectorXd theta1(double v) { return VectorXd::Constant(1, v); }

// closed form: integral of exp(-x^2/(2 s^2)) N(x; mu, 1) dx
double gaussian_overlap(double mu, double s) {
    const double v = 1.0 + s * s;
    return s / std::sqrt(v) * std::exp(-0.5 * mu * mu / v);
}

}  // namespace

TEST_CASE("pairing against closed forms") {
    ModelFamily norm = gaussian_location(1.0);
    // psi == 1, classical limit: normalisation
    CHECK(pairing(norm, theta1(0.0), [](double) { return 1.0; },
                  KernelProfile::classical_limit()) == doctest::Approx(1.0).epsilon(1e-10));
    // gaussian overlap closed form
    for (double mu : {0.0, 0.7, -1.3})
        for (double s : {0.5, 1.0, 2.0})
            CHECK(pairing(norm, theta1(mu), [](double) { return 1.0; },
                          KernelProfile::gaussian(s)) ==
                  doctest::Approx(gaussian_overlap(mu, s)).epsilon(1e-10));
    // sigma_phi = 1, mu = 0 reduces to 1/sqrt(2)
    CHECK(pairing(norm, theta1(0.0), [](double) { return 1.0; }, KernelProfile::gaussian(1.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("weak second moment of the cauchy is finite under a gaussian kernel") {
    ModelFamily cau = cauchy_location();
    const double v =
        pairing(cau, theta1(0.0), [](double x) { return x * x; }, KernelProfile::gaussian(1.0));
    CHECK(v > 0.0);
    CHECK(std::isfinite(v));
    // stable under tolerance halving
    QuadratureSpec tight;
    tight.abs_tol = 5e-11;
    tight.rel_tol = 5e-9;
    const double v2 = pairing(cau, theta1(0.0), [](double x) { return x * x; },
                              KernelProfile::gaussian(1.0), tight);
    CHECK(v == doctest::Approx(v2).epsilon(1e-8));
}

TEST_CASE("classical second moment of the cauchy diverges (quadrature error)") {
    ModelFamily cau = cauchy_location();
    CHECK_THROWS_AS(weak_moment(cau, theta1(0.0), 2, KernelProfile::classical_limit()),
                    QuadratureError);
}

TEST_CASE("weak moments") {
    ModelFamily cau = cauchy_location();
    CHECK(std::abs(weak_moment(cau, theta1(0.0), 1, KernelProfile::gaussian(1.0))) < 1e-10);
    ModelFamily norm = gaussian_location(1.0);
    for (double s : {0.5, 2.0})
        CHECK(weak_moment(norm, theta1(0.9), 0, KernelProfile::gaussian(s)) ==
              doctest::Approx(gaussian_overlap(0.9, s)).epsilon(1e-10));
    ModelFamily t3 = student_t_location(3.0);
    const double m2 = weak_moment(t3, theta1(0.0), 2, KernelProfile::gaussian(1.0));
    QuadratureSpec tight;
    tight.abs_tol = 1e-12;
    tight.rel_tol = 1e-10;
    CHECK(m2 == doctest::Approx(weak_moment(t3, theta1(0.0), 2, KernelProfile::gaussian(1.0),
                                            tight)).epsilon(1e-8));
    CHECK_THROWS_AS(weak_moment(t3, theta1(0.0), -1, KernelProfile::gaussian(1.0)),
                    std::domain_error);
}

TEST_CASE("weak cf") {
    ModelFamily cau = cauchy_location();
    // classical limit equals the model cf: e^{iu theta} e^{-|u|}
    const Complex z = weak_cf(cau, theta1(0.7), 1.5, KernelProfile::classical_limit());
    CHECK(std::abs(z) == doctest::Approx(std::exp(-1.5)).epsilon(1e-13));
    CHECK(std::arg(z) == doctest::Approx(1.5 * 0.7).epsilon(1e-13));
    // t = 0 equals weak_moment(0)
    ModelFamily t3 = student_t_location(3.0);
    const Complex z0 = weak_cf(t3, theta1(0.4), 0.0, KernelProfile::gaussian(1.0));
    CHECK(z0.real() ==
          doctest::Approx(weak_moment(t3, theta1(0.4), 0, KernelProfile::gaussian(1.0)))
              .epsilon(1e-10));
    CHECK(std::abs(z0.imag()) < 1e-12);
    // t3 classical cf at 1 equals g3(1)
    CHECK(weak_cf(t3, theta1(0.0), 1.0, KernelProfile::classical_limit()).real() ==
          doctest::Approx(radial_generator(3.0, 1.0)).epsilon(1e-13));
}

TEST_CASE("hermitian symmetry of the weak cf") {
    ModelFamily t3 = student_t_location(3.0);
    for (double t : {0.3, 1.0, 2.2}) {
        const Complex zp = weak_cf(t3, theta1(0.5), t, KernelProfile::gaussian(1.0));
        const Complex zm = weak_cf(t3, theta1(0.5), -t, KernelProfile::gaussian(1.0));
        CHECK(std::abs(zm - std::conj(zp)) < 1e-10);
    }
}

TEST_CASE("positivity of the pairing for non-negative integrands") {
    std::vector<ModelFamily> fams = {gaussian_location(1.0), cauchy_location(),
                                     student_t_location(3.0)};
    auto psis = std::vector<std::function<double(double)>>{
        [](double x) { return x * x; }, [](double x) { return std::abs(x); },
        [](double x) { return 1.0 + std::sin(x) * std::sin(x); }};
    for (const auto& m : fams)
        for (const auto& psi : psis)
            for (double s : {0.5, 1.0, 2.0})
                CHECK(pairing(m, theta1(0.3), psi, KernelProfile::gaussian(s)) > -1e-12);
}

TEST_CASE("kernel continuity: pairing drifts to zero with the perturbation") {
    ModelFamily cau = cauchy_location();
    auto psi = [](double x) { return x * x; };
    const double base = pairing(cau, theta1(0.0), psi, KernelProfile::gaussian(1.0));
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        const double v = pairing(cau, theta1(0.0), psi, KernelProfile::gaussian(1.0 + delta));
        const double diff = std::abs(v - base);
        CHECK(diff < prev);
        prev = diff;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("weak cumulants of the gaussian are mean and variance") {
    ModelFamily norm = gaussian_location(1.4);
    auto wc = weak_cumulants(norm, theta1(0.8), 2, KernelProfile::classical_limit());
    CHECK(wc.kappa[1] == doctest::Approx(0.8).epsilon(1e-8));
    CHECK(wc.kappa[2] == doctest::Approx(1.4 * 1.4).epsilon(1e-8));
    CHECK(wc.max_imag_residual < 1e-6);
}

TEST_CASE("weak cumulants: symmetric model has zero first cumulant") {
    ModelFamily t3 = student_t_location(3.0);
    auto wc = weak_cumulants(t3, theta1(0.0), 1, KernelProfile::gaussian(1.0));
    CHECK(std::abs(wc.kappa[1]) < 1e-9);
}

TEST_CASE("weak cumulants: richardson agreement across step sizes") {
    ModelFamily cau = cauchy_location();
    auto a = weak_cumulants(cau, theta1(0.0), 2, KernelProfile::gaussian(1.0), {}, 1e-3);
    auto b = weak_cumulants(cau, theta1(0.0), 2, KernelProfile::gaussian(1.0), {}, 5e-4);
    CHECK(std::isfinite(a.kappa[2]));
    CHECK(a.kappa[2] == doctest::Approx(b.kappa[2]).epsilon(1e-5));
}

TEST_CASE("weak summary wiring") {
    ModelFamily norm = gaussian_location(1.0);
    WeakSummary s = weak_summary(norm, theta1(0.0), KernelProfile::gaussian(1.0), 2, {0.0, 0.5},
                                 2);
    CHECK(s.moments.size() == 3);
    CHECK(s.moments[0] > 0.0);
    CHECK(std::abs(s.cf_grid[0].second.real() - s.moments[0]) < 1e-10);
    CHECK(s.cumulants.size() == 2);
}

TEST_CASE("unsupported pairing and degenerate cf errors") {
    ModelFamily no_density = cauchy_location();
    no_density.density = nullptr;
    CHECK_THROWS_AS(pairing(no_density, theta1(0.0), [](double) { return 1.0; },
                            KernelProfile::gaussian(1.0)),
                    std::invalid_argument);
    // classical-limit exponential shortcut still works without a density
    CHECK(std::abs(weak_cf(no_density, theta1(0.0), 1.0, KernelProfile::classical_limit()) -
                   Complex(std::exp(-1.0), 0.0)) < 1e-14);

    // synthetic degenerate family: the pairing at 0 vanishes
    ModelFamily degenerate = cauchy_location();
    degenerate.density = [](double, const VectorXd&) { return 0.0; };
    CHECK_THROWS_AS(weak_cumulants(degenerate, theta1(0.0), 2, KernelProfile::gaussian(1.0)),
                    NumericalError);
}

TEST_CASE("kernel profile validation") {
    CHECK_THROWS_AS(KernelProfile::gaussian(0.0), std::domain_error);
    CHECK(KernelProfile::classical_limit()(123.4) == 1.0);
    CHECK(KernelProfile::gaussian(1.0)(0.0) == 1.0);
}
