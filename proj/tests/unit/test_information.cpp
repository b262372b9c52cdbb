#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "godambe/information.hpp"
#include "godambe/special.hpp"

using namespace godambe;

namespace {
VectorXd theta1(double v) { return VectorXd::Constant(1, v); }
}  // namespace

TEST_CASE("classical fisher information constants") {
    CHECK(fisher_classical(cauchy_location(), theta1(0.0))(0, 0) ==
          doctest::Approx(0.5).epsilon(1e-8));
    // student t location: (nu + 1) / (nu + 3)
    CHECK(fisher_classical(student_t_location(3.0), theta1(0.0))(0, 0) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-8));
    CHECK(fisher_classical(student_t_location(1.0), theta1(0.7))(0, 0) ==
          doctest::Approx(0.5).epsilon(1e-8));
    for (double sigma : {0.5, 1.0, 2.0})
        CHECK(fisher_classical(gaussian_location(sigma), theta1(0.3))(0, 0) ==
              doctest::Approx(1.0 / (sigma * sigma)).epsilon(1e-9));
    // location-scale: diagonal (1/s^2, 2/s^2) for the normal base
    VectorXd th(2);
    th << 0.0, 2.0;
    MatrixXd info = fisher_classical(location_scale(LocScaleBase::normal), th);
    CHECK(info(0, 0) == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(info(1, 1) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(std::abs(info(0, 1)) < 1e-9);
}

TEST_CASE("kernel-weighted fisher information") {
    // classical limit recovers the classical information
    CHECK(fisher_kernel_weighted(cauchy_location(), KernelProfile::classical_limit(),
                                 theta1(0.0)) == doctest::Approx(0.5).epsilon(1e-6));
    // gaussian model: pushforward is gaussian with information s^2/(1+s^2)
    for (double s : {0.5, 1.0, 2.0})
        CHECK(fisher_kernel_weighted(gaussian_location(1.0), KernelProfile::gaussian(s),
                                     theta1(0.0)) ==
              doctest::Approx(s * s / (1.0 + s * s)).epsilon(1e-6));
    // cauchy: reference values from an independent high-precision evaluation
    // of the pushforward score variance.  Note sigma_phi >= 1 exceeds the
    // classical information: kernel weighting biases sampling toward the
    // informative region, it does not coarsen the data.
    CHECK(fisher_kernel_weighted(cauchy_location(), KernelProfile::gaussian(0.5), theta1(0.0)) ==
          doctest::Approx(0.366077664114).epsilon(1e-6));
    CHECK(fisher_kernel_weighted(cauchy_location(), KernelProfile::gaussian(1.0), theta1(0.0)) ==
          doctest::Approx(0.525135276161).epsilon(1e-6));
    CHECK(fisher_kernel_weighted(cauchy_location(), KernelProfile::gaussian(2.0), theta1(0.0)) ==
          doctest::Approx(0.575336803240).epsilon(1e-6));
    // stability under tolerance halving
    QuadratureSpec tight;
    tight.abs_tol = 5e-11;
    tight.rel_tol = 5e-9;
    const double a =
        fisher_kernel_weighted(cauchy_location(), KernelProfile::gaussian(1.0), theta1(0.0));
    const double b = fisher_kernel_weighted(cauchy_location(), KernelProfile::gaussian(1.0),
                                            theta1(0.0), tight);
    CHECK(a == doctest::Approx(b).epsilon(1e-7));
}

TEST_CASE("kernel-weighted information approaches the classical value as the kernel widens") {
    double prev = 0.0;
    for (double s : {1.0, 4.0, 16.0, 64.0}) {
        const double v =
            fisher_kernel_weighted(gaussian_location(1.0), KernelProfile::gaussian(s), theta1(0.0));
        CHECK(v > prev);
        prev = v;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("interval fisher information") {
    ModelFamily norm = gaussian_location(1.0);
    // I = [theta, inf): (d p)^2/(p(1-p)) = 4 f(0)^2 = 2/pi
    CHECK(fisher_interval(norm, 0.3, kInf, theta1(0.3)) ==
          doctest::Approx(2.0 / M_PI).epsilon(1e-6));
    CHECK_THROWS_AS(fisher_interval(norm, -kInf, kInf, theta1(0.0)), NumericalError);
}

TEST_CASE("grid information refines monotonically toward the classical value") {
    ModelFamily norm = gaussian_location(1.0);
    double prev = 0.0;
    const double expected[] = {0.755137, 0.923085, 0.979592, 0.994819};
    int i = 0;
    for (double w : {2.0, 1.0, 0.5, 0.25}) {
        BinGrid g;
        const int half = static_cast<int>(std::round(6.0 / w));
        g.left_edge = -6.0;
        g.bin_width = w;
        g.n_bins = 2 * half;
        const double v = grid_information(norm, g, theta1(0.0));
        CHECK(v == doctest::Approx(expected[i++]).epsilon(1e-4));
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(prev >= 0.95);
    CHECK(prev <= 1.0 + 1e-9);
}

TEST_CASE("bernoulli sum vs multinomial grid information under refinement") {
    // The information of the grid experiment is the multinomial bin sum
    // sum (dp)^2/p, which refines monotonically toward I_classical from
    // below.  Summing the single-interval Bernoulli informations
    // (dp)^2/(p(1-p)) over a partition double counts and approaches the
    // classical value from above instead.
    ModelFamily norm = gaussian_location(1.0);
    const VectorXd th = VectorXd::Zero(1);
    double prev_bern = std::numeric_limits<double>::infinity();
    for (double w : {2.0, 1.0, 0.5, 0.25}) {
        BinGrid g;
        const int half = static_cast<int>(std::round(6.0 / w));
        g.left_edge = -6.0;
        g.bin_width = w;
        g.n_bins = 2 * half;
        double bern = 0.0;
        for (int b = g.first_index(); b <= g.last_index(); ++b) {
            const double p = bin_probability(norm, th, g, b);
            if (p < 1e-12 || p > 1.0 - 1e-12) continue;
            bern += fisher_interval(norm, g.lower(b), g.upper(b), th);
        }
        CHECK(bern > 1.0);        // above the classical information
        CHECK(bern < prev_bern);  // decreasing toward it under refinement
        CHECK(bern > grid_information(norm, g, th));
        prev_bern = bern;
    }
    CHECK(prev_bern == doctest::Approx(1.0318).epsilon(1e-3));
}

TEST_CASE("closed-form sinusoidal godambe information") {
    // cauchy: S = c e^{-c}, V = (1 - e^{-2c})/2, so G = 2 c^2 e^{-2c} / (1 - e^{-2c})
    const double c = 1.0;
    CHECK(godambe_sinusoidal_closed(SinusoidalFamily::cauchy(), c) ==
          doctest::Approx(2.0 * std::exp(-2.0) / (1.0 - std::exp(-2.0))).epsilon(1e-14));
    // student 3: 2 c^2 g3(c^2)^2 / (1 - g3(4c^2))
    const double g1 = radial_generator(3.0, 1.0);
    const double g4 = radial_generator(3.0, 4.0);
    CHECK(godambe_sinusoidal_closed(SinusoidalFamily::student(3.0), 1.0) ==
          doctest::Approx(2.0 * g1 * g1 / (1.0 - g4)).epsilon(1e-14));
    // gaussian sigma=1 at c: u/sinh(u) with u = c^2 equals G / I = G
    CHECK(godambe_sinusoidal_closed(SinusoidalFamily::gaussian(1.0), 1.0) ==
          doctest::Approx(1.0 / std::sinh(1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(godambe_sinusoidal_closed(SinusoidalFamily::cauchy(), 0.0),
                    std::domain_error);
}

TEST_CASE("closed form vs quadrature godambe: the dual-route cross-check") {
    struct Cell {
        SinusoidalFamily family;
        ModelFamily model;
    };
    std::vector<Cell> cells = {{SinusoidalFamily::cauchy(), cauchy_location()},
                               {SinusoidalFamily::student(3.0), student_t_location(3.0)},
                               {SinusoidalFamily::gaussian(1.0), gaussian_location(1.0)}};
    for (const auto& cell : cells) {
        for (double c : {0.25, 0.5, 1.0, 2.0}) {
            const double closed = godambe_sinusoidal_closed(cell.family, c);
            const GodambeResult numeric = godambe_numeric(
                sinusoidal(c), cell.model, ObservationOperator::point_op(), theta1(0.0));
            CHECK(numeric.G(0, 0) == doctest::Approx(closed).epsilon(1e-6));
        }
    }
}

TEST_CASE("quadrature godambe matches at a shifted parameter point") {
    const double closed = godambe_sinusoidal_closed(SinusoidalFamily::cauchy(), 0.7);
    const GodambeResult numeric = godambe_numeric(sinusoidal(0.7), cauchy_location(),
                                                  ObservationOperator::point_op(), theta1(1.3));
    CHECK(numeric.G(0, 0) == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("godambe equals fisher for the score (equality case)") {
    for (const ModelFamily& m :
         {gaussian_location(1.0), cauchy_location(), student_t_location(3.0)}) {
        const GodambeResult g =
            godambe_numeric(score_if(m), m, ObservationOperator::point_op(), theta1(0.2));
        const double fisher = fisher_classical(m, theta1(0.2))(0, 0);
        CHECK(g.G(0, 0) == doctest::Approx(fisher).epsilon(1e-6));
    }
}

TEST_CASE("monte carlo godambe route agrees with the closed form at 3 sigma") {
    Rng rng(2718);
    const GodambeResult mc = godambe_mc(sinusoidal(1.0), cauchy_location(),
                                        ObservationOperator::point_op(), theta1(0.0), 1000000,
                                        rng);
    const double closed = godambe_sinusoidal_closed(SinusoidalFamily::cauchy(), 1.0);
    CHECK(mc.G(0, 0) == doctest::Approx(closed).epsilon(0.01));
    Rng rng2(3141);
    const GodambeResult mc2 = godambe_mc(sinusoidal(1.0), student_t_location(3.0),
                                         ObservationOperator::point_op(), theta1(0.0), 1000000,
                                         rng2);
    CHECK(mc2.G(0, 0) ==
          doctest::Approx(godambe_sinusoidal_closed(SinusoidalFamily::student(3.0), 1.0))
              .epsilon(0.01));
}

TEST_CASE("godambe inequality: sinusoidal never beats the score") {
    for (const auto& [fam, model] :
         std::vector<std::pair<SinusoidalFamily, ModelFamily>>{
             {SinusoidalFamily::cauchy(), cauchy_location()},
             {SinusoidalFamily::student(3.0), student_t_location(3.0)},
             {SinusoidalFamily::gaussian(1.0), gaussian_location(1.0)}}) {
        const double fisher = fisher_classical(model, theta1(0.0))(0, 0);
        for (double c : {0.25, 0.5, 1.0, 2.0, 3.0})
            CHECK(godambe_sinusoidal_closed(fam, c) <= fisher + 1e-12);
    }
}

TEST_CASE("location-scale godambe information") {
    auto normal_cf = [](double t) { return std::exp(-0.5 * t * t); };
    // u = c^2 sigma^2 = 1 gives J = 1/sinh(1) at sigma = 1
    CHECK(locscale_godambe(1.0, 1.0, normal_cf) ==
          doctest::Approx(1.0 / std::sinh(1.0)).epsilon(1e-14));
    // ARE = J sigma^2 = u/sinh(u), decreasing from 1
    double prev = 1.0;
    for (double u : {0.25, 0.75, 1.5, 3.0}) {
        const double c = std::sqrt(u);
        const double are = locscale_godambe(c, 1.0, normal_cf);
        CHECK(are == doctest::Approx(u / std::sinh(u)).epsilon(1e-12));
        CHECK(are < prev);
        prev = are;
    }
    // sigma = 1 reduces to the closed-form family value
    auto cauchy_cf = [](double t) { return std::exp(-std::abs(t)); };
    CHECK(locscale_godambe(0.8, 1.0, cauchy_cf) ==
          doctest::Approx(godambe_sinusoidal_closed(SinusoidalFamily::cauchy(), 0.8))
              .epsilon(1e-13));
}

TEST_CASE("elliptical ARE") {
    VectorXd a(3);
    a << 1.0, -0.5, 0.25;
    MatrixXd sigma(3, 3);
    sigma << 2.0, 0.4, 0.1, 0.4, 1.5, -0.2, 0.1, -0.2, 1.0;
    // optimal-v form equals the scalar form
    for (double c : {0.05, 0.5, 1.5}) {
        Eigen::LLT<MatrixXd> llt(sigma);
        VectorXd v = c * llt.solve(a);
        CHECK(elliptical_are_general(v, a, sigma) ==
              doctest::Approx(elliptical_are(a, sigma, c)).epsilon(1e-13));
    }
    // c -> 0 approaches full efficiency
    CHECK(elliptical_are(a, sigma, 0.01) > 0.999);
    // dim 1 reduces to the location-scale ARE of the normal base; the
    // optimal direction rescales the frequency to v = c / sigma^2
    VectorXd a1 = VectorXd::Constant(1, 1.0);
    MatrixXd s1 = MatrixXd::Constant(1, 1, 4.0);  // sigma^2 = 4
    auto normal_cf = [](double t) { return std::exp(-0.5 * t * t); };
    const double c = 0.6;
    CHECK(elliptical_are(a1, s1, c) ==
          doctest::Approx(locscale_godambe(c / 4.0, 2.0, normal_cf) * 4.0).epsilon(1e-12));
    MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    VectorXd a2(2);
    a2 << 1.0, 0.0;
    CHECK_THROWS_AS(elliptical_are(a2, bad, 1.0), std::domain_error);
}

TEST_CASE("hierarchy report: equality and strict cells") {
    ModelFamily norm = gaussian_location(1.0);
    auto classical = ObservationOperator::kernel_weighted(KernelProfile::classical_limit());
    // (N, classical, score): all three equal 1
    InformationReport eq = hierarchy_report(norm, classical, score_if(norm), theta1(0.0));
    CHECK(eq.I_classical(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(eq.I_O(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(eq.G_psi(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(eq.observation_gap_min_eig) < 1e-6);
    CHECK(std::abs(eq.estimation_gap_min_eig) < 1e-6);
    CHECK(eq.hierarchy_ok());

    // cauchy + gaussian(1) + sinusoidal: strict estimation gap, and the
    // kernel-weighted observation carries more information than classical
    // point sampling for this family
    ModelFamily cau = cauchy_location();
    auto kw = ObservationOperator::kernel_weighted(KernelProfile::gaussian(1.0));
    InformationReport rep = hierarchy_report(cau, kw, sinusoidal(1.0), theta1(0.0));
    CHECK(rep.I_classical(0, 0) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(rep.I_O(0, 0) == doctest::Approx(0.525135276161).epsilon(1e-6));
    CHECK(rep.estimation_gap_min_eig > 1e-4);
    CHECK(rep.observation_gap_min_eig < 0.0);  // genuine reversal for this family
    CHECK_FALSE(rep.hierarchy_ok());

    // interval operator: score functional attains the grid information
    BinGrid g;
    g.left_edge = -6.0;
    g.bin_width = 1.0;
    g.n_bins = 12;
    auto iop = ObservationOperator::interval(g);
    InformationReport ir =
        hierarchy_report(norm, iop, interval_score_if(norm, g), theta1(0.0));
    CHECK(ir.I_O(0, 0) == doctest::Approx(0.923085).epsilon(1e-4));
    CHECK(ir.observation_gap_min_eig > 0.0);
    CHECK(std::abs(ir.estimation_gap_min_eig) < 1e-5);

    InformationReport is =
        hierarchy_report(norm, iop, interval_sinusoidal(1.0, norm, g), theta1(0.0));
    CHECK(is.G_psi(0, 0) == doctest::Approx(0.803184).epsilon(1e-4));
    CHECK(is.hierarchy_ok());
}

TEST_CASE("are curve: cauchy discrepancy note and argmax") {
    std::vector<double> grid;
    for (double c = 0.05; c <= 2.0 + 1e-9; c += 0.01) grid.push_back(c);
    AreCurve curve = are_curve(SinusoidalFamily::cauchy(), grid);
    CHECK(curve.note.find("0.56") != std::string::npos);
    CHECK(curve.note.find("65%") != std::string::npos);
    const ArePoint& best = curve.points[static_cast<size_t>(curve.argmax)];
    CHECK(best.c == doctest::Approx(0.80).epsilon(0.03));
    CHECK(best.are == doctest::Approx(0.6476).epsilon(1e-3));
    // curve value at c = 0.56: 4 c^2 e^{-2c}/(1-e^{-2c})
    for (const auto& pt : curve.points)
        if (std::abs(pt.c - 0.56) < 1e-9)
            CHECK(pt.are ==
                  doctest::Approx(4.0 * 0.56 * 0.56 * std::exp(-1.12) /
                                  (1.0 - std::exp(-1.12)))
                      .epsilon(1e-6));
    CHECK_FALSE(curve.limit_defined);
}

TEST_CASE("are curve: gaussian monotone, student limit") {
    std::vector<double> grid;
    for (double c = 0.1; c <= 2.0 + 1e-9; c += 0.1) grid.push_back(c);
    AreCurve g = are_curve(SinusoidalFamily::gaussian(1.0), grid);
    CHECK(g.argmax == 0);  // supremum at the left edge
    for (size_t i = 1; i < g.points.size(); ++i)
        CHECK(g.points[i].are < g.points[i - 1].are);
    CHECK(g.limit_defined);
    CHECK(g.small_c_limit == doctest::Approx(1.0).epsilon(1e-6));

    AreCurve t = are_curve(SinusoidalFamily::student(3.0), grid);
    CHECK(t.limit_defined);
    // small-c limit: G -> 1/Var = 1/3, ARE -> (1/3)/(2/3) = 1/2
    CHECK(t.small_c_limit == doctest::Approx(0.5).epsilon(1e-6));
    // and the small-c end of the curve trends toward it
    AreCurve t2 = are_curve(SinusoidalFamily::student(3.0), {0.01, 0.05});
    CHECK(t2.points[0].are == doctest::Approx(0.5).epsilon(0.02));
}
