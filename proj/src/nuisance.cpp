#include "godambe/nuisance.hpp"

#include <algorithm>
#include <set>

namespace godambe {

void PartitionedModel::validate() const {
    if (!model.has_score() || !model.has_density())
        throw std::invalid_argument("PartitionedModel: model needs density and score");
    std::set<int> all(interest.begin(), interest.end());
    all.insert(nuisance.begin(), nuisance.end());
    if (interest.empty() || nuisance.empty() ||
        all.size() != interest.size() + nuisance.size() ||
        static_cast<int>(all.size()) != model.param_dim || *all.begin() != 0 ||
        *all.rbegin() != model.param_dim - 1)
        throw std::invalid_argument(
            "PartitionedModel: interest and nuisance must disjointly cover all indices");
}

VectorXd PartitionedModel::nuisance_score(double x, const VectorXd& theta) const {
    VectorXd full = model.score(x, theta);
    VectorXd u(static_cast<Eigen::Index>(nuisance.size()));
    for (size_t j = 0; j < nuisance.size(); ++j) u[static_cast<Eigen::Index>(j)] = full[nuisance[j]];
    return u;
}

namespace {

double model_integral(const std::function<double(double)>& integrand, const ModelFamily& model,
                      const VectorXd& theta, const std::optional<double>& freq,
                      const QuadratureSpec& spec) {
    auto f = [&](double x) { return integrand(x) * model.density(x, theta); };
    if (freq) return integrate_oscillatory(f, *freq, 60.0 + 10.0 * theta.cwiseAbs().maxCoeff(), spec);
    return integrate(f, -kInf, kInf, spec);
}

// E[ a(x) b(x)^T ] under the model at theta, by quadrature.
MatrixXd cross_moment(const std::function<VectorXd(double)>& a, int dim_a,
                      const std::function<VectorXd(double)>& b, int dim_b,
                      const ModelFamily& model, const VectorXd& theta,
                      const std::optional<double>& freq, const QuadratureSpec& spec) {
    MatrixXd out(dim_a, dim_b);
    for (int r = 0; r < dim_a; ++r)
        for (int c = 0; c < dim_b; ++c)
            out(r, c) =
                model_integral([&](double x) { return a(x)[r] * b(x)[c]; }, model, theta, freq,
                               spec);
    return out;
}

}  // namespace

MatrixXd projection_coefficient(const InferenceFunctional& phi, const PartitionedModel& pm,
                                const VectorXd& theta, const QuadratureSpec& spec) {
    pm.validate();
    pm.model.check_theta(theta);
    const int q = static_cast<int>(pm.nuisance.size());
    auto u_beta = [&](double x) { return pm.nuisance_score(x, theta); };
    auto phi_at = [&](double x) { return phi.eval(Observation::point(x), theta); };
    MatrixXd a = cross_moment(phi_at, phi.output_dim, u_beta, q, pm.model, theta,
                              phi.oscillation_freq, spec);
    MatrixXd b = cross_moment(u_beta, q, u_beta, q, pm.model, theta, std::nullopt, spec);
    Eigen::FullPivLU<MatrixXd> lu(b);
    if (!lu.isInvertible())
        throw NumericalError("bhapkar_godambe_project: singular nuisance information");
    return a * lu.inverse();
}

InferenceFunctional bhapkar_godambe_project(const InferenceFunctional& phi,
                                            const PartitionedModel& pm, const VectorXd& theta,
                                            const QuadratureSpec& spec) {
    MatrixXd coeff = projection_coefficient(phi, pm, theta, spec);
    InferenceFunctional out = phi;
    out.label = phi.label + "*";
    ModelFamily model = pm.model;
    std::vector<int> nuis = pm.nuisance;
    out.eval = [phi, coeff, model, nuis](const Observation& y, const VectorXd& th) {
        VectorXd full = model.score(y.value, th);
        VectorXd u(static_cast<Eigen::Index>(nuis.size()));
        for (size_t j = 0; j < nuis.size(); ++j) u[static_cast<Eigen::Index>(j)] = full[nuis[j]];
        return (phi.eval(y, th) - coeff * u).eval();
    };
    out.d_theta = nullptr;  // finite differences; the coefficient is frozen
    return out;
}

OrthogonalityReport orthogonality_check(const InferenceFunctional& psi, const PartitionedModel& pm,
                                        const std::vector<VectorXd>& theta_grid,
                                        const QuadratureSpec& spec) {
    pm.validate();
    OrthogonalityReport rep;
    const int q = static_cast<int>(pm.nuisance.size());
    for (const VectorXd& theta : theta_grid) {
        auto u_beta = [&](double x) { return pm.nuisance_score(x, theta); };
        auto psi_at = [&](double x) { return psi.eval(Observation::point(x), theta); };
        MatrixXd c = cross_moment(psi_at, psi.output_dim, u_beta, q, pm.model, theta,
                                  psi.oscillation_freq, spec);
        rep.max_abs = std::max(rep.max_abs, c.cwiseAbs().maxCoeff());
        rep.grid.push_back(theta);
        rep.cross.push_back(std::move(c));
    }
    return rep;
}

MatrixXd nuisance_godambe(const InferenceFunctional& psi, const PartitionedModel& pm,
                          const VectorXd& theta, const QuadratureSpec& spec) {
    pm.validate();
    pm.model.check_theta(theta);
    const int k = static_cast<int>(pm.interest.size());
    // S: minus the mean Jacobian restricted to the interest columns
    MatrixXd s(psi.output_dim, k);
    for (int c = 0; c < k; ++c) {
        const int idx = pm.interest[static_cast<size_t>(c)];
        for (int r = 0; r < psi.output_dim; ++r)
            s(r, c) = -model_integral(
                [&](double x) { return psi.jacobian(Observation::point(x), theta)(r, idx); },
                pm.model, theta, psi.oscillation_freq, spec);
    }
    auto psi_at = [&](double x) { return psi.eval(Observation::point(x), theta); };
    MatrixXd v = cross_moment(psi_at, psi.output_dim, psi_at, psi.output_dim, pm.model, theta,
                              psi.oscillation_freq, spec);
    Eigen::LDLT<MatrixXd> ldlt(v);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("nuisance_godambe: singular variability matrix");
    return s.transpose() * ldlt.solve(s);
}

}  // namespace godambe
