#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "godambe/information.hpp"
#include "godambe/nuisance.hpp"

using namespace godambe;

namespace {

PartitionedModel locscale_pm(LocScaleBase base, double nu = 3.0) {
    return PartitionedModel{location_scale(base, nu), {0}, {1}};
}

VectorXd theta2(double mu, double sigma) {
    VectorXd th(2);
    th << mu, sigma;
    return th;
}

// interest-score functional of a two-parameter model: Phi(x) = U_mu(x)
InferenceFunctional location_score(const ModelFamily& model) {
    InferenceFunctional f;
    f.label = "U_mu";
    f.output_dim = 1;
    f.param_dim = 2;
    f.eval = [model](const Observation& y, const VectorXd& th) {
        return VectorXd::Constant(1, model.score(y.value, th)[0]);
    };
    return f;
}

// deliberately nuisance-entangled functional: psi = U_mu + 0.3 U_sigma
InferenceFunctional entangled(const ModelFamily& model) {
    InferenceFunctional f;
    f.label = "entangled";
    f.output_dim = 1;
    f.param_dim = 2;
    f.eval = [model](const Observation& y, const VectorXd& th) {
        const VectorXd s = model.score(y.value, th);
        return VectorXd::Constant(1, s[0] + 0.3 * s[1]);
    };
    return f;
}

InferenceFunctional sin2(double c) {
    InferenceFunctional f;
    f.label = "sin_c";
    f.output_dim = 1;
    f.param_dim = 2;
    f.oscillation_freq = c;
    f.eval = [c](const Observation& y, const VectorXd& th) {
        return VectorXd::Constant(1, std::sin(c * (y.value - th[0])));
    };
    f.d_theta = [c](const Observation& y, const VectorXd& th) {
        MatrixXd j(1, 2);
        j << -c * std::cos(c * (y.value - th[0])), 0.0;
        return j;
    };
    return f;
}

}  // namespace

TEST_CASE("partitioned model validation") {
    PartitionedModel ok = locscale_pm(LocScaleBase::normal);
    ok.validate();
    PartitionedModel bad = ok;
    bad.nuisance = {0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.interest = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("gaussian location and scale scores are orthogonal: projection is the identity") {
    PartitionedModel pm = locscale_pm(LocScaleBase::normal);
    const VectorXd th = theta2(0.5, 1.5);
    auto phi = location_score(pm.model);
    MatrixXd coeff = projection_coefficient(phi, pm, th);
    CHECK(std::abs(coeff(0, 0)) < 1e-10);
    auto proj = bhapkar_godambe_project(phi, pm, th);
    for (double x : {-1.0, 0.2, 2.4})
        CHECK(proj.eval(Observation::point(x), th)[0] ==
              doctest::Approx(phi.eval(Observation::point(x), th)[0]).epsilon(1e-10));
}

TEST_CASE("t3 location-scale: projected location score is nuisance-orthogonal") {
    PartitionedModel pm = locscale_pm(LocScaleBase::student, 3.0);
    const VectorXd th = theta2(0.0, 1.0);
    auto phi = location_score(pm.model);
    auto proj = bhapkar_godambe_project(phi, pm, th);
    // orthogonality by quadrature
    auto rep = orthogonality_check(proj, pm, {th});
    CHECK(rep.max_abs < 1e-8);
    // idempotence: projecting again changes nothing
    MatrixXd coeff2 = projection_coefficient(proj, pm, th);
    CHECK(coeff2.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("entangled functional is detected and fixed by the projection") {
    PartitionedModel pm = locscale_pm(LocScaleBase::student, 3.0);
    const VectorXd th = theta2(0.2, 1.3);
    auto phi = entangled(pm.model);
    auto rep = orthogonality_check(phi, pm, {th});
    CHECK(rep.max_abs > 1e-3);  // nonzero residual detected
    auto proj = bhapkar_godambe_project(phi, pm, th);
    auto rep2 = orthogonality_check(proj, pm, {th});
    CHECK(rep2.max_abs < 1e-8);
}

TEST_CASE("U_beta itself is maximally non-orthogonal") {
    PartitionedModel pm = locscale_pm(LocScaleBase::normal);
    const VectorXd th = theta2(0.0, 1.0);
    InferenceFunctional ubeta;
    ubeta.output_dim = 1;
    ubeta.param_dim = 2;
    ModelFamily model = pm.model;
    ubeta.eval = [model](const Observation& y, const VectorXd& t) {
        return VectorXd::Constant(1, model.score(y.value, t)[1]);
    };
    auto rep = orthogonality_check(ubeta, pm, {th});
    // E[U_sigma^2] = 2/sigma^2 = 2 for the unit normal
    CHECK(rep.max_abs == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("sinusoidal is automatically orthogonal in symmetric location-scale") {
    for (auto base : {LocScaleBase::normal, LocScaleBase::student}) {
        PartitionedModel pm = locscale_pm(base, 3.0);
        auto psi = sin2(0.9);
        std::vector<VectorXd> grid;
        for (double s : {0.5, 1.0, 2.0}) grid.push_back(theta2(0.3, s));
        auto rep = orthogonality_check(psi, pm, grid);
        CHECK(rep.max_abs < 1e-8);
    }
}

TEST_CASE("nuisance godambe matches the location-scale closed form") {
    PartitionedModel pm = locscale_pm(LocScaleBase::normal);
    auto normal_cf = [](double t) { return std::exp(-0.5 * t * t); };
    const double c = 0.8;
    for (double sigma : {1.0, 2.0}) {
        const VectorXd th = theta2(0.4, sigma);
        MatrixXd j = nuisance_godambe(sin2(c), pm, th);
        CHECK(j(0, 0) == doctest::Approx(locscale_godambe(c, sigma, normal_cf)).epsilon(1e-6));
    }
    // J depends on the nuisance scale
    CHECK(nuisance_godambe(sin2(c), pm, theta2(0.0, 1.0))(0, 0) !=
          doctest::Approx(nuisance_godambe(sin2(c), pm, theta2(0.0, 2.0))(0, 0)).epsilon(1e-3));
}

TEST_CASE("efficient projected score attains 1/sigma^2; sinusoidal stays below") {
    PartitionedModel pm = locscale_pm(LocScaleBase::normal);
    const double sigma = 1.5;
    const VectorXd th = theta2(0.0, sigma);
    auto proj = bhapkar_godambe_project(location_score(pm.model), pm, th);
    MatrixXd j = nuisance_godambe(proj, pm, th);
    CHECK(j(0, 0) == doctest::Approx(1.0 / (sigma * sigma)).epsilon(1e-6));
    for (double c : {0.3, 0.8, 1.5})
        CHECK(nuisance_godambe(sin2(c), pm, th)(0, 0) <= j(0, 0) + 1e-8);
}

TEST_CASE("norm reduction: the projection shrinks the second moment") {
    PartitionedModel pm = locscale_pm(LocScaleBase::student, 3.0);
    const VectorXd th = theta2(0.0, 1.0);
    auto phi = entangled(pm.model);
    auto proj = bhapkar_godambe_project(phi, pm, th);
    auto second_moment = [&](const InferenceFunctional& f) {
        return integrate(
            [&](double x) {
                const double v = f.eval(Observation::point(x), th)[0];
                return v * v * pm.model.density(x, th);
            },
            -kInf, kInf);
    };
    CHECK(second_moment(proj) < second_moment(phi));
}
