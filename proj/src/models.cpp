#include "godambe/models.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <stdexcept>

#include "godambe/special.hpp"

namespace godambe {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / kSqrt2Pi; }
double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double student_t_log_norm(double nu) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * M_PI);
}

double student_t_pdf(double z, double nu, double log_norm) {
    return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu));
}

double student_t_cdf(double z, double nu) {
    if (z == 0.0) return 0.5;
    const double ib = boost::math::ibeta(0.5 * nu, 0.5, nu / (nu + z * z));
    return z > 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

VectorXd unbounded(int p, double sign) {
    return VectorXd::Constant(p, sign * std::numeric_limits<double>::infinity());
}

}  // namespace

void ModelFamily::check_theta(const VectorXd& theta) const {
    if (theta.size() != param_dim)
        throw std::invalid_argument(name + ": parameter dimension mismatch");
    for (int i = 0; i < param_dim; ++i)
        if (!(theta[i] >= lower_bound[i] && theta[i] <= upper_bound[i]))
            throw std::domain_error(name + ": parameter outside domain");
}

ModelFamily gaussian_location(double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("gaussian_location: sigma must be > 0");
    ModelFamily m;
    m.name = "gaussian_location";
    m.param_dim = 1;
    m.density = [sigma](double x, const VectorXd& th) {
        return normal_pdf((x - th[0]) / sigma) / sigma;
    };
    m.cf = [sigma](double u, const VectorXd& th) {
        return std::exp(Complex(-0.5 * sigma * sigma * u * u, u * th[0]));
    };
    m.sample = [sigma](const VectorXd& th, Rng& rng) { return th[0] + sigma * rng.normal(); };
    m.score = [sigma](double x, const VectorXd& th) {
        VectorXd s(1);
        s[0] = (x - th[0]) / (sigma * sigma);
        return s;
    };
    m.cdf = [sigma](double x, const VectorXd& th) { return normal_cdf((x - th[0]) / sigma); };
    m.lower_bound = unbounded(1, -1.0);
    m.upper_bound = unbounded(1, 1.0);
    return m;
}

ModelFamily cauchy_location() {
    ModelFamily m;
    m.name = "cauchy_location";
    m.param_dim = 1;
    m.density = [](double x, const VectorXd& th) {
        const double z = x - th[0];
        return 1.0 / (M_PI * (1.0 + z * z));
    };
    m.cf = [](double u, const VectorXd& th) {
        return std::exp(Complex(-std::abs(u), u * th[0]));
    };
    m.sample = [](const VectorXd& th, Rng& rng) { return th[0] + rng.cauchy(); };
    m.score = [](double x, const VectorXd& th) {
        const double z = x - th[0];
        VectorXd s(1);
        s[0] = 2.0 * z / (1.0 + z * z);
        return s;
    };
    m.cdf = [](double x, const VectorXd& th) {
        return 0.5 + std::atan(x - th[0]) / M_PI;
    };
    m.lower_bound = unbounded(1, -1.0);
    m.upper_bound = unbounded(1, 1.0);
    return m;
}

ModelFamily student_t_location(double nu) {
    if (!(nu > 0.0)) throw std::domain_error("student_t_location: nu must be > 0");
    const double log_norm = student_t_log_norm(nu);
    ModelFamily m;
    m.name = "student_t_location";
    m.param_dim = 1;
    m.density = [nu, log_norm](double x, const VectorXd& th) {
        return student_t_pdf(x - th[0], nu, log_norm);
    };
    m.cf = [nu](double u, const VectorXd& th) {
        return radial_generator(nu, u * u) * std::exp(Complex(0.0, u * th[0]));
    };
    m.sample = [nu](const VectorXd& th, Rng& rng) { return th[0] + rng.student_t(nu); };
    m.score = [nu](double x, const VectorXd& th) {
        const double z = x - th[0];
        VectorXd s(1);
        s[0] = (nu + 1.0) * z / (nu + z * z);
        return s;
    };
    m.cdf = [nu](double x, const VectorXd& th) { return student_t_cdf(x - th[0], nu); };
    m.lower_bound = unbounded(1, -1.0);
    m.upper_bound = unbounded(1, 1.0);
    return m;
}

ModelFamily location_scale(LocScaleBase base, double nu) {
    ModelFamily m;
    m.param_dim = 2;
    const bool normal = base == LocScaleBase::normal;
    if (!normal && !(nu > 0.0)) throw std::domain_error("location_scale: nu must be > 0");
    const double log_norm = normal ? 0.0 : student_t_log_norm(nu);
    m.name = normal ? "normal_location_scale" : "student_t_location_scale";

    auto base_pdf = [normal, nu, log_norm](double z) {
        return normal ? normal_pdf(z) : student_t_pdf(z, nu, log_norm);
    };
    // -f'(z)/f(z) of the standard base
    auto base_neg_dlog = [normal, nu](double z) {
        return normal ? z : (nu + 1.0) * z / (nu + z * z);
    };
    m.density = [base_pdf](double x, const VectorXd& th) {
        return base_pdf((x - th[0]) / th[1]) / th[1];
    };
    m.cf = [normal, nu](double u, const VectorXd& th) {
        const double su = th[1] * u;
        const double mod = normal ? std::exp(-0.5 * su * su) : radial_generator(nu, su * su);
        return mod * std::exp(Complex(0.0, u * th[0]));
    };
    m.sample = [normal, nu](const VectorXd& th, Rng& rng) {
        const double z = normal ? rng.normal() : rng.student_t(nu);
        return th[0] + th[1] * z;
    };
    m.score = [base_neg_dlog](double x, const VectorXd& th) {
        const double sigma = th[1];
        const double z = (x - th[0]) / sigma;
        const double w = base_neg_dlog(z);  // = -d/dz log f0(z)
        VectorXd s(2);
        s[0] = w / sigma;
        s[1] = (z * w - 1.0) / sigma;
        return s;
    };
    m.cdf = [normal, nu](double x, const VectorXd& th) {
        const double z = (x - th[0]) / th[1];
        return normal ? normal_cdf(z) : student_t_cdf(z, nu);
    };
    m.lower_bound = VectorXd(2);
    m.lower_bound << -std::numeric_limits<double>::infinity(), 1e-12;
    m.upper_bound = unbounded(2, 1.0);
    return m;
}

ModelFamily two_component_mixture(const ModelFamily& p1, const VectorXd& theta1,
                                  const ModelFamily& p2, const VectorXd& theta2) {
    p1.check_theta(theta1);
    p2.check_theta(theta2);
    ModelFamily m;
    m.name = "two_component_mixture";
    m.param_dim = 1;
    const bool has_density = p1.has_density() && p2.has_density();
    if (has_density) {
        m.density = [p1, theta1, p2, theta2](double x, const VectorXd& th) {
            return th[0] * p1.density(x, theta1) + (1.0 - th[0]) * p2.density(x, theta2);
        };
        m.score = [p1, theta1, p2, theta2](double x, const VectorXd& th) {
            const double f1 = p1.density(x, theta1);
            const double f2 = p2.density(x, theta2);
            const double denom = th[0] * f1 + (1.0 - th[0]) * f2;
            VectorXd s(1);
            // both components can underflow in the far tails; such points
            // carry no mass and contribute nothing to any estimating equation
            s[0] = denom > 0.0 ? (f1 - f2) / denom : 0.0;
            return s;
        };
    }
    m.cf = [p1, theta1, p2, theta2](double u, const VectorXd& th) {
        return th[0] * p1.cf(u, theta1) + (1.0 - th[0]) * p2.cf(u, theta2);
    };
    m.sample = [p1, theta1, p2, theta2](const VectorXd& th, Rng& rng) {
        return rng.uniform() < th[0] ? p1.sample(theta1, rng) : p2.sample(theta2, rng);
    };
    if (p1.has_cdf() && p2.has_cdf()) {
        m.cdf = [p1, theta1, p2, theta2](double x, const VectorXd& th) {
            return th[0] * p1.cdf(x, theta1) + (1.0 - th[0]) * p2.cdf(x, theta2);
        };
    }
    m.lower_bound = VectorXd::Zero(1);
    m.upper_bound = VectorXd::Ones(1);
    return m;
}

EllipticalFamily::EllipticalFamily(Kind kind, int dim, double nu)
    : kind_(kind), dim_(dim), nu_(nu) {
    if (dim < 1) throw std::domain_error("elliptical: dim must be >= 1");
    if (kind == Kind::student && !(nu > 0.0))
        throw std::domain_error("elliptical: nu must be > 0");
}

VectorXd EllipticalFamily::pack(const VectorXd& mu, const MatrixXd& sigma) const {
    if (mu.size() != dim_ || sigma.rows() != dim_ || sigma.cols() != dim_)
        throw std::invalid_argument("elliptical: dimension mismatch in pack");
    VectorXd th(param_dim());
    th.head(dim_) = mu;
    int k = dim_;
    for (int j = 0; j < dim_; ++j)
        for (int i = j; i < dim_; ++i) th[k++] = sigma(i, j);
    return th;
}

void EllipticalFamily::unpack(const VectorXd& theta, VectorXd* mu, MatrixXd* sigma) const {
    if (theta.size() != param_dim())
        throw std::invalid_argument("elliptical: parameter dimension mismatch");
    *mu = theta.head(dim_);
    sigma->resize(dim_, dim_);
    int k = dim_;
    for (int j = 0; j < dim_; ++j)
        for (int i = j; i < dim_; ++i) {
            (*sigma)(i, j) = theta[k];
            (*sigma)(j, i) = theta[k];
            ++k;
        }
}

double EllipticalFamily::generator(double s) const {
    return kind_ == Kind::gaussian ? std::exp(-0.5 * s) : radial_generator(nu_, s);
}

double EllipticalFamily::generator_ds(double s) const {
    return kind_ == Kind::gaussian ? -0.5 * std::exp(-0.5 * s) : radial_generator_ds(nu_, s);
}

Complex EllipticalFamily::cf(const VectorXd& u, const VectorXd& theta) const {
    VectorXd mu;
    MatrixXd sigma;
    unpack(theta, &mu, &sigma);
    const double s = u.dot(sigma * u);
    return generator(s) * std::exp(Complex(0.0, u.dot(mu)));
}

Eigen::VectorXcd EllipticalFamily::cf_grad(const VectorXd& u, const VectorXd& theta) const {
    VectorXd mu;
    MatrixXd sigma;
    unpack(theta, &mu, &sigma);
    const double s = u.dot(sigma * u);
    const Complex phase = std::exp(Complex(0.0, u.dot(mu)));
    const Complex val = generator(s) * phase;
    const double gds = generator_ds(s);
    Eigen::VectorXcd g(param_dim());
    for (int l = 0; l < dim_; ++l) g[l] = Complex(0.0, u[l]) * val;
    int k = dim_;
    for (int j = 0; j < dim_; ++j)
        for (int i = j; i < dim_; ++i) {
            const double ds = (i == j ? u[i] * u[j] : 2.0 * u[i] * u[j]);
            g[k++] = gds * ds * phase;
        }
    return g;
}

VectorXd EllipticalFamily::sample(const VectorXd& theta, Rng& rng) const {
    VectorXd mu;
    MatrixXd sigma;
    unpack(theta, &mu, &sigma);
    Eigen::LLT<MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("elliptical: Sigma is not positive definite");
    VectorXd z(dim_);
    for (int i = 0; i < dim_; ++i) z[i] = rng.normal();
    VectorXd x = llt.matrixL() * z;
    if (kind_ == Kind::student) x /= std::sqrt(rng.chi_squared(nu_) / nu_);
    return mu + x;
}

EllipticalFamily elliptical(EllipticalFamily::Kind kind, int dim, double nu) {
    return EllipticalFamily(kind, dim, nu);
}

}  // namespace godambe
