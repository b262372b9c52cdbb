#include "godambe/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace godambe {
namespace {

VectorXd mean_eval(const InferenceFunctional& psi, const std::vector<Observation>& data,
                   const VectorXd& theta) {
    VectorXd acc = VectorXd::Zero(psi.output_dim);
    for (const Observation& y : data) acc += psi.eval(y, theta);
    return acc / static_cast<double>(data.size());
}

MatrixXd mean_jacobian(const InferenceFunctional& psi, const std::vector<Observation>& data,
                       const VectorXd& theta) {
    MatrixXd acc = MatrixXd::Zero(psi.output_dim, psi.param_dim);
    for (const Observation& y : data) acc += psi.jacobian(y, theta);
    return acc / static_cast<double>(data.size());
}

MatrixXd mean_outer(const InferenceFunctional& psi, const std::vector<Observation>& data,
                    const VectorXd& theta) {
    MatrixXd acc = MatrixXd::Zero(psi.output_dim, psi.output_dim);
    for (const Observation& y : data) {
        VectorXd v = psi.eval(y, theta);
        acc += v * v.transpose();
    }
    return acc / static_cast<double>(data.size());
}

void finalize(EstimationResult* res, const InferenceFunctional& psi,
              const std::vector<Observation>& data) {
    const int n = static_cast<int>(data.size());
    res->n = n;
    res->S_hat = -mean_jacobian(psi, data, res->theta_hat);
    res->V_hat = mean_outer(psi, data, res->theta_hat);
    const double s_scale = std::max(1.0, res->S_hat.cwiseAbs().maxCoeff());
    Eigen::FullPivLU<MatrixXd> lu(res->S_hat);
    if (psi.output_dim == psi.param_dim) {
        if (std::abs(lu.determinant()) <
            1e-12 * std::pow(s_scale, res->S_hat.rows()))
            throw SolverError("solve_z: singular sensitivity matrix at the root");
        MatrixXd sinv = lu.inverse();
        res->sandwich = sinv * res->V_hat * sinv.transpose() / n;
        res->G_hat = res->S_hat.transpose() * res->V_hat.ldlt().solve(res->S_hat);
    } else {
        // over-identified case: G = S^T V^{-1} S, sandwich = G^{-1}/n (optimal W)
        res->G_hat = res->S_hat.transpose() * res->V_hat.ldlt().solve(res->S_hat);
        res->sandwich = res->G_hat.inverse() / n;
    }
}

}  // namespace

double sample_median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("sample_median: empty data");
    const size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
    return 0.5 * (lo + hi);
}

EstimationResult solve_z(const InferenceFunctional& psi, const std::vector<Observation>& data,
                         const VectorXd& pilot, double tol, int max_iter) {
    if (data.empty()) throw std::invalid_argument("solve_z: empty data");
    if (pilot.size() != psi.param_dim)
        throw std::invalid_argument("solve_z: pilot dimension mismatch");
    if (psi.output_dim != psi.param_dim)
        throw std::invalid_argument("solve_z: output_dim must equal param_dim (use gmm)");

    VectorXd theta = pilot;
    VectorXd r = mean_eval(psi, data, theta);
    double rnorm = r.norm();
    SolverTrace trace;
    for (int it = 0; it < max_iter && rnorm > tol; ++it) {
        ++trace.iterations;
        MatrixXd jac = mean_jacobian(psi, data, theta);
        Eigen::FullPivLU<MatrixXd> lu(jac);
        if (!lu.isInvertible()) break;
        VectorXd step = lu.solve(-r);
        double lambda = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 20; ++halving) {
            VectorXd cand = theta + lambda * step;
            VectorXd rc = mean_eval(psi, data, cand);
            if (rc.norm() < rnorm) {
                theta = cand;
                r = rc;
                rnorm = rc.norm();
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }

    if (rnorm > tol && psi.param_dim == 1) {
        // bracketed bisection around the pilot
        auto f = [&](double t) {
            VectorXd th(1);
            th[0] = t;
            return mean_eval(psi, data, th)[0];
        };
        double a = pilot[0], b = pilot[0];
        double fa = f(a), fb = fa;
        double width = 1.0;
        bool bracketed = false;
        for (int k = 0; k < 60; ++k) {
            a = pilot[0] - width;
            b = pilot[0] + width;
            fa = f(a);
            fb = f(b);
            if (fa == 0.0 || fb == 0.0 || fa * fb < 0.0) {
                bracketed = true;
                break;
            }
            width *= 2.0;
            if (width > 1e8) break;
        }
        if (bracketed) {
            trace.used_bisection = true;
            for (int k = 0; k < 200; ++k) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                ++trace.iterations;
                if (std::abs(fm) <= tol || 0.5 * (b - a) < 1e-14 * (1.0 + std::abs(m))) {
                    a = b = m;
                    break;
                }
                if (fa * fm <= 0.0) {
                    b = m;
                    fb = fm;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            theta[0] = 0.5 * (a + b);
            r = mean_eval(psi, data, theta);
            rnorm = r.norm();
        }
    }
    if (rnorm > tol)
        throw SolverError("solve_z: no root found (residual " + std::to_string(rnorm) + ")");

    EstimationResult res;
    res.estimator = psi.label;
    res.theta_hat = theta;
    trace.residual_norm = rnorm;
    res.trace = trace;
    finalize(&res, psi, data);
    return res;
}

EstimationResult ecf_phase_estimator(const std::vector<double>& data, double u,
                                     std::optional<double> pilot) {
    if (data.empty()) throw std::invalid_argument("ecf_phase_estimator: empty data");
    if (!(u > 0.0)) throw std::domain_error("ecf_phase_estimator: u must be > 0");
    const double n = static_cast<double>(data.size());
    Complex z(0.0, 0.0);
    for (double x : data) z += std::exp(Complex(0.0, u * x));
    z /= n;
    if (std::abs(z) < 3.0 / std::sqrt(n))
        throw SolverError("ecf_phase_estimator: |z_n(u)| below noise level, phase indeterminate");
    const double alpha = std::arg(z);
    const double p = pilot ? *pilot : sample_median(data);
    // candidates (alpha + 2 k pi)/u covering pilot +/- one full period
    const double k0 = std::round((p * u - alpha) / (2.0 * M_PI));
    double best = 0.0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int dk = -1; dk <= 1; ++dk) {
        const double cand = (alpha + 2.0 * M_PI * (k0 + dk)) / u;
        const double dist = std::abs(cand - p);
        if (dist < best_dist - 1e-15 ||
            (std::abs(dist - best_dist) <= 1e-15 && cand < best)) {
            best = cand;
            best_dist = dist;
        }
    }
    EstimationResult res;
    res.estimator = "ecf_phase(u=" + std::to_string(u) + ")";
    res.theta_hat = VectorXd::Constant(1, best);
    res.n = static_cast<int>(data.size());
    double s = 0.0, v = 0.0;
    for (double x : data) {
        s += u * std::cos(u * (x - best));
        const double sn = std::sin(u * (x - best));
        v += sn * sn;
    }
    s /= n;
    v /= n;
    res.S_hat = MatrixXd::Constant(1, 1, s);
    res.V_hat = MatrixXd::Constant(1, 1, v);
    res.sandwich = MatrixXd::Constant(1, 1, v / (n * s * s));
    res.G_hat = MatrixXd::Constant(1, 1, s * s / v);
    res.trace.residual_norm = 0.0;
    return res;
}

InferenceFunctional stack_functionals(const std::vector<InferenceFunctional>& psis) {
    if (psis.empty()) throw std::invalid_argument("stack_functionals: empty list");
    int q = 0;
    const int p = psis.front().param_dim;
    for (const auto& f : psis) {
        if (f.param_dim != p)
            throw std::invalid_argument("stack_functionals: mixed parameter dimensions");
        q += f.output_dim;
    }
    InferenceFunctional out;
    out.label = "stack[" + std::to_string(psis.size()) + "]";
    out.output_dim = q;
    out.param_dim = p;
    out.requires_kind = psis.front().requires_kind;
    out.eval = [psis, q](const Observation& y, const VectorXd& th) {
        VectorXd v(q);
        int at = 0;
        for (const auto& f : psis) {
            v.segment(at, f.output_dim) = f.eval(y, th);
            at += f.output_dim;
        }
        return v;
    };
    out.d_theta = [psis, q, p](const Observation& y, const VectorXd& th) {
        MatrixXd j(q, p);
        int at = 0;
        for (const auto& f : psis) {
            j.middleRows(at, f.output_dim) = f.jacobian(y, th);
            at += f.output_dim;
        }
        return j;
    };
    return out;
}

EstimationResult gmm(const std::vector<InferenceFunctional>& psis,
                     const std::vector<Observation>& data, const VectorXd& pilot, int steps,
                     double tol, int max_iter) {
    if (steps != 1 && steps != 2) throw std::invalid_argument("gmm: steps must be 1 or 2");
    if (data.empty()) throw std::invalid_argument("gmm: empty data");
    InferenceFunctional psi = stack_functionals(psis);
    const int q = psi.output_dim;
    const int p = psi.param_dim;
    if (q < p) throw std::invalid_argument("gmm: need output_dim >= param_dim");

    MatrixXd w = MatrixXd::Identity(q, q);
    VectorXd theta = pilot;
    SolverTrace trace;

    auto minimize = [&](const MatrixXd& weight) {
        VectorXd r = mean_eval(psi, data, theta);
        double obj = r.dot(weight * r);
        for (int it = 0; it < max_iter; ++it) {
            MatrixXd jac = mean_jacobian(psi, data, theta);
            MatrixXd jwj = jac.transpose() * weight * jac;
            VectorXd grad = jac.transpose() * weight * r;
            if (grad.norm() <= tol * (1.0 + std::abs(obj))) break;
            Eigen::LDLT<MatrixXd> ldlt(jwj);
            if (ldlt.info() != Eigen::Success)
                throw SolverError("gmm: Gauss-Newton normal matrix not positive definite");
            VectorXd step = ldlt.solve(-grad);
            double lambda = 1.0;
            bool improved = false;
            for (int halving = 0; halving < 25; ++halving) {
                VectorXd cand = theta + lambda * step;
                VectorXd rc = mean_eval(psi, data, cand);
                const double oc = rc.dot(weight * rc);
                if (oc < obj) {
                    theta = cand;
                    r = rc;
                    obj = oc;
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            ++trace.iterations;
            if (!improved) break;
        }
        return r;
    };

    VectorXd r = minimize(w);
    if (steps == 2) {
        MatrixXd v = mean_outer(psi, data, theta);
        Eigen::JacobiSVD<MatrixXd> svd(v);
        const double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
        if (!std::isfinite(cond) || cond > 1e12)
            throw SolverError("gmm: variability matrix conditioning exceeds 1e12");
        w = v.inverse();
        r = minimize(w);
    }

    EstimationResult res;
    res.estimator = "gmm[" + std::to_string(q) + "->" + std::to_string(p) + "]";
    res.theta_hat = theta;
    res.n = static_cast<int>(data.size());
    res.S_hat = -mean_jacobian(psi, data, theta);
    res.V_hat = mean_outer(psi, data, theta);
    res.G_hat = res.S_hat.transpose() * res.V_hat.ldlt().solve(res.S_hat);
    // sandwich for the chosen weight: (S'WS)^{-1} S'W V W S (S'WS)^{-1} / n
    MatrixXd sws = res.S_hat.transpose() * w * res.S_hat;
    MatrixXd swsi = sws.inverse();
    res.sandwich = swsi * res.S_hat.transpose() * w * res.V_hat * w * res.S_hat * swsi /
                   static_cast<double>(res.n);
    trace.residual_norm = r.norm();
    res.trace = trace;
    return res;
}

EstimationResult interval_mle_benchmark(const ModelFamily& model, const BinGrid& grid,
                                        const std::vector<long>& counts, double pilot,
                                        const QuadratureSpec& spec, double tol) {
    grid.validate();
    const int first = grid.first_index();
    const int slots = grid.last_index() - first + 1;
    if (static_cast<int>(counts.size()) != slots)
        throw std::invalid_argument("interval_mle_benchmark: counts do not match the grid");
    long n = 0;
    for (long c : counts) {
        if (c < 0) throw std::invalid_argument("interval_mle_benchmark: negative count");
        n += c;
    }
    if (n == 0) throw std::invalid_argument("interval_mle_benchmark: empty counts");
    if (model.param_dim != 1)
        throw std::invalid_argument("interval_mle_benchmark: scalar-parameter models only");

    auto probs = [&](double th) {
        VectorXd t(1);
        t[0] = th;
        std::vector<double> p(static_cast<size_t>(slots));
        for (int b = first; b <= grid.last_index(); ++b)
            p[static_cast<size_t>(b - first)] = bin_probability(model, t, grid, b, spec);
        return p;
    };
    const double h = 1e-5;
    auto score = [&](double th) {
        const auto pu = probs(th + h);
        const auto pd = probs(th - h);
        const auto p0 = probs(th);
        double s = 0.0;
        for (int i = 0; i < slots; ++i) {
            if (counts[static_cast<size_t>(i)] == 0) continue;
            const double pi = std::max(p0[static_cast<size_t>(i)], 1e-300);
            const double dp = (pu[static_cast<size_t>(i)] - pd[static_cast<size_t>(i)]) / (2.0 * h);
            s += static_cast<double>(counts[static_cast<size_t>(i)]) * dp / pi;
        }
        return s;
    };

    // Bracket by marching from the pilot toward the zero of the score.  The
    // score may underflow to exactly zero far outside the data window, so the
    // march requires a strict sign change within the padded span.
    const double pad = 10.0 * grid.bin_width * grid.n_bins;
    const double lo_edge = grid.left_edge - pad;
    const double hi_edge = grid.right_edge() + pad;
    SolverTrace trace;
    double a = std::clamp(pilot, lo_edge, hi_edge);
    double fa = score(a);
    double th = a;
    if (fa != 0.0) {
        const double dir = fa > 0.0 ? 1.0 : -1.0;  // score > 0: root lies to the right
        double step = 0.5 * grid.bin_width;
        double b = a, fb = fa;
        bool bracketed = false;
        for (int k = 0; k < 200; ++k) {
            const double cand = std::clamp(b + dir * step, lo_edge, hi_edge);
            const double fc = score(cand);
            if (fa * fc < 0.0 || fc == 0.0) {
                a = b;
                fa = fb;
                b = cand;
                fb = fc;
                bracketed = true;
                break;
            }
            if (cand == lo_edge || cand == hi_edge) break;
            b = cand;
            fb = fc;
            step *= 1.6;
        }
        if (!bracketed)
            throw SolverError(
                "interval_mle_benchmark: likelihood optimum at the parameter boundary");
        if (a > b) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
        for (int it = 0; it < 200; ++it) {
            th = 0.5 * (a + b);
            const double fm = score(th);
            ++trace.iterations;
            if (std::abs(fm) <= tol * static_cast<double>(n) || 0.5 * (b - a) < 1e-12) break;
            if (fa * fm <= 0.0) {
                b = th;
            } else {
                a = th;
                fa = fm;
            }
        }
    }

    // per-observation multinomial information at theta_hat
    const auto pu = probs(th + h);
    const auto pd = probs(th - h);
    const auto p0 = probs(th);
    double info = 0.0;
    for (int i = 0; i < slots; ++i) {
        const double pi = p0[static_cast<size_t>(i)];
        if (pi < 1e-14) continue;
        const double dp = (pu[static_cast<size_t>(i)] - pd[static_cast<size_t>(i)]) / (2.0 * h);
        info += dp * dp / pi;
    }
    if (!(info > 1e-12))
        throw SolverError("interval_mle_benchmark: degenerate grid (zero information)");

    EstimationResult res;
    res.estimator = "interval_mle";
    res.theta_hat = VectorXd::Constant(1, th);
    res.n = static_cast<int>(n);
    res.S_hat = MatrixXd::Constant(1, 1, info);
    res.V_hat = MatrixXd::Constant(1, 1, info);
    res.G_hat = MatrixXd::Constant(1, 1, info);
    res.sandwich = MatrixXd::Constant(1, 1, 1.0 / (static_cast<double>(n) * info));
    trace.residual_norm = std::abs(score(th)) / static_cast<double>(n);
    res.trace = trace;
    return res;
}

}  // namespace godambe
