#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "godambe/models.hpp"
#include "godambe/quadrature.hpp"
#include "godambe/special.hpp"

using namespace godambe;

namespace {

VectorXd theta1(double v) { return VectorXd::Constant(1, v); }

double integral_of_density(const ModelFamily& m, const VectorXd& th) {
    return integrate([&](double x) { return m.density(x, th); }, -kInf, kInf);
}

double score_mean(const ModelFamily& m, const VectorXd& th, int component) {
    return integrate([&](double x) { return m.score(x, th)[component] * m.density(x, th); },
                     -kInf, kInf);
}

// Kolmogorov-Smirnov distance of draws against the model cdf
double ks_distance(const ModelFamily& m, const VectorXd& th, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x;
    x.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) x.push_back(m.sample(th, rng));
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = m.cdf(x[static_cast<size_t>(i)], th);
        d = std::max(d, std::abs(f - (i + 1.0) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

const double kKs1pc = 1.628;  // 1% critical value of sqrt(n) * D_n

}  // namespace

TEST_CASE("gaussian location basics") {
    ModelFamily m = gaussian_location(2.0);
    CHECK(m.density(0.7, theta1(0.7)) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0 * M_PI))));
    const Complex cf = m.cf(0.3, theta1(1.5));
    CHECK(cf.real() == doctest::Approx(std::exp(-0.5 * 4.0 * 0.09) * std::cos(0.3 * 1.5)));
    CHECK(cf.imag() == doctest::Approx(std::exp(-0.5 * 4.0 * 0.09) * std::sin(0.3 * 1.5)));
    ModelFamily unit = gaussian_location(1.0);
    CHECK(unit.score(2.0, theta1(0.5))[0] == doctest::Approx(1.5));
    CHECK_THROWS_AS(gaussian_location(0.0), std::domain_error);
}

TEST_CASE("cauchy location basics") {
    ModelFamily m = cauchy_location();
    const Complex cf = m.cf(1.0, theta1(0.0));
    CHECK(cf.real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(cf.imag() == doctest::Approx(0.0));
    CHECK(m.score(1.0, theta1(0.0))[0] == doctest::Approx(1.0));  // 2z/(1+z^2) at z=1

    Rng rng(11);
    std::vector<double> draws;
    for (int i = 0; i < 100000; ++i) draws.push_back(m.sample(theta1(3.0), rng));
    std::nth_element(draws.begin(), draws.begin() + 50000, draws.end());
    CHECK(draws[50000] == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("student t basics and normal limit") {
    ModelFamily t3 = student_t_location(3.0);
    const double g3 = (1.0 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0));
    CHECK(t3.cf(1.0, theta1(0.0)).real() == doctest::Approx(g3).epsilon(1e-13));
    ModelFamily big = student_t_location(4000.0);
    CHECK(big.density(0.0, theta1(0.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-3));
    CHECK_THROWS_AS(student_t_location(-1.0), std::domain_error);
}

TEST_CASE("densities normalise and scores are unbiased") {
    std::vector<ModelFamily> fams = {gaussian_location(1.0), cauchy_location(),
                                     student_t_location(3.0), student_t_location(1.5)};
    for (const auto& m : fams) {
        CHECK(integral_of_density(m, theta1(0.4)) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(score_mean(m, theta1(0.4), 0)) < 1e-8);
        CHECK(std::abs(m.cf(0.0, theta1(0.4)) - Complex(1.0, 0.0)) < 1e-14);
    }
}

TEST_CASE("cf modulus bounded by one on a grid") {
    std::vector<ModelFamily> fams = {gaussian_location(1.0), cauchy_location(),
                                     student_t_location(3.0)};
    for (const auto& m : fams)
        for (double u = -6.0; u <= 6.0; u += 0.37)
            CHECK(std::abs(m.cf(u, theta1(1.2))) <= 1.0 + 1e-12);
}

TEST_CASE("samplers match densities (KS at the 1% level)") {
    const int n = 100000;
    std::vector<ModelFamily> fams = {gaussian_location(1.0), cauchy_location(),
                                     student_t_location(3.0), student_t_location(1.5)};
    int seed = 100;
    for (const auto& m : fams) {
        const double d = ks_distance(m, theta1(0.0), n, static_cast<std::uint64_t>(seed++));
        CHECK(std::sqrt(static_cast<double>(n)) * d < kKs1pc);
    }
}

TEST_CASE("empirical cf matches model cf within 4/sqrt(n)") {
    ModelFamily m = student_t_location(3.0);
    const int n = 1000000;
    Rng rng(77);
    Complex z05(0, 0), z1(0, 0), z2(0, 0);
    for (int i = 0; i < n; ++i) {
        const double x = m.sample(theta1(0.3), rng);
        z05 += std::exp(Complex(0.0, 0.5 * x));
        z1 += std::exp(Complex(0.0, 1.0 * x));
        z2 += std::exp(Complex(0.0, 2.0 * x));
    }
    const double tol = 4.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(z05 / static_cast<double>(n) - m.cf(0.5, theta1(0.3))) < tol);
    CHECK(std::abs(z1 / static_cast<double>(n) - m.cf(1.0, theta1(0.3))) < tol);
    CHECK(std::abs(z2 / static_cast<double>(n) - m.cf(2.0, theta1(0.3))) < tol);
}

TEST_CASE("location-scale families") {
    ModelFamily norm = location_scale(LocScaleBase::normal);
    VectorXd th(2);
    th << 1.0, 2.0;
    const Complex cf = norm.cf(0.7, th);
    CHECK(std::abs(cf) == doctest::Approx(std::exp(-0.5 * 4.0 * 0.49)).epsilon(1e-13));
    CHECK(std::arg(cf) == doctest::Approx(0.7).epsilon(1e-13));
    VectorXd s = norm.score(2.0, th);
    CHECK(s[0] == doctest::Approx((2.0 - 1.0) / 4.0));
    CHECK(s[1] == doctest::Approx((1.0 - 4.0) / 8.0));
    ModelFamily base = gaussian_location(1.0);
    Rng a(5), b(5);
    VectorXd unit(2);
    unit << 0.0, 1.0;
    for (int i = 0; i < 10; ++i)
        CHECK(norm.sample(unit, a) == doctest::Approx(base.sample(theta1(0.0), b)));

    ModelFamily t3 = location_scale(LocScaleBase::student, 3.0);
    CHECK(integrate([&](double x) { return t3.density(x, th); }, -kInf, kInf) ==
          doctest::Approx(1.0).epsilon(1e-8));
    for (int comp : {0, 1})
        CHECK(std::abs(integrate(
                  [&](double x) { return t3.score(x, th)[comp] * t3.density(x, th); }, -kInf,
                  kInf)) < 1e-8);
}

TEST_CASE("two-component mixture") {
    ModelFamily n1 = gaussian_location(1.0);
    ModelFamily mix = two_component_mixture(n1, theta1(-1.0), n1, theta1(1.0));
    CHECK(std::abs(mix.cf(0.8, theta1(1.0)) - n1.cf(0.8, theta1(-1.0))) < 1e-14);
    const Complex cf = mix.cf(1.3, theta1(0.5));
    CHECK(cf.real() == doctest::Approx(std::cos(1.3) * std::exp(-0.5 * 1.69)).epsilon(1e-13));
    CHECK(std::abs(cf.imag()) < 1e-14);

    // score unbiasedness in the mixing weight
    CHECK(std::abs(integrate(
              [&](double x) {
                  return mix.score(x, theta1(0.3))[0] * mix.density(x, theta1(0.3));
              },
              -kInf, kInf)) < 1e-8);

    // sampler component frequencies: binomial oracle at 3 MC standard errors
    const double pi_true = 0.3;
    const int n = 100000;
    Rng rng(42);
    int left = 0;
    for (int i = 0; i < n; ++i) left += mix.sample(theta1(pi_true), rng) < 0.0;
    const double p_left =
        pi_true * n1.cdf(0.0, theta1(-1.0)) + (1.0 - pi_true) * n1.cdf(0.0, theta1(1.0));
    const double se = std::sqrt(p_left * (1.0 - p_left) / n);
    CHECK(std::abs(static_cast<double>(left) / n - p_left) < 3.0 * se);
}

TEST_CASE("elliptical families") {
    EllipticalFamily g(EllipticalFamily::Kind::gaussian, 2);
    VectorXd mu(2);
    mu << 0.5, -0.25;
    MatrixXd sigma(2, 2);
    sigma << 2.0, 0.3, 0.3, 1.0;
    VectorXd th = g.pack(mu, sigma);
    VectorXd u(2);
    u << 0.4, -0.2;
    const double q = u.dot(sigma * u);
    const Complex cf = g.cf(u, th);
    CHECK(std::abs(cf) == doctest::Approx(std::exp(-0.5 * q)).epsilon(1e-13));
    CHECK(std::arg(cf) == doctest::Approx(u.dot(mu)).epsilon(1e-13));

    EllipticalFamily t(EllipticalFamily::Kind::student, 2, 3.0);
    CHECK(std::abs(t.cf(u, th)) == doctest::Approx(radial_generator(3.0, q)).epsilon(1e-13));

    // dim = 1 reduction to the univariate family cf
    EllipticalFamily t1(EllipticalFamily::Kind::student, 1, 3.0);
    VectorXd th1(2);
    th1 << 0.7, 1.0;
    ModelFamily uni = student_t_location(3.0);
    VectorXd u1 = VectorXd::Constant(1, 1.3);
    CHECK(std::abs(t1.cf(u1, th1) - uni.cf(1.3, theta1(0.7))) < 1e-13);

    // cf gradient vs finite differences
    Eigen::VectorXcd grad = t.cf_grad(u, th);
    for (int j = 0; j < th.size(); ++j) {
        VectorXd tp = th, tm = th;
        const double h = 1e-6;
        tp[j] += h;
        tm[j] -= h;
        const Complex fd = (t.cf(u, tp) - t.cf(u, tm)) / (2.0 * h);
        CHECK(std::abs(grad[j] - fd) < 1e-7);
    }

    MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    Rng rng(3);
    CHECK_THROWS_AS(g.sample(g.pack(mu, bad), rng), std::domain_error);

    Rng rng2(9);
    VectorXd acc = VectorXd::Zero(2);
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += g.sample(th, rng2);
    acc /= n;
    CHECK(acc[0] == doctest::Approx(mu[0]).epsilon(0.05));
    CHECK(std::abs(acc[1] - mu[1]) < 0.02);
}
