#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <string>

#include "godambe/rng.hpp"

namespace godambe {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Complex = std::complex<double>;

// A parametric family theta -> P_theta on the real line.  density/score/cdf
// are optional (null std::function when the family does not expose them);
// the characteristic function and the sampler are always present.
struct ModelFamily {
    std::string name;
    int param_dim = 1;
    std::function<double(double x, const VectorXd& theta)> density;
    std::function<Complex(double u, const VectorXd& theta)> cf;
    std::function<double(const VectorXd& theta, Rng& rng)> sample;
    std::function<VectorXd(double x, const VectorXd& theta)> score;
    std::function<double(double x, const VectorXd& theta)> cdf;
    VectorXd lower_bound;  // box parameter domain (may contain +-inf)
    VectorXd upper_bound;

    bool has_density() const { return static_cast<bool>(density); }
    bool has_score() const { return static_cast<bool>(score); }
    bool has_cdf() const { return static_cast<bool>(cdf); }
    void check_theta(const VectorXd& theta) const;
};

// N(theta, sigma^2), location parameter theta.
ModelFamily gaussian_location(double sigma = 1.0);

// Cauchy(theta, 1).
ModelFamily cauchy_location();

// theta + t_nu with unit scale.
ModelFamily student_t_location(double nu);

enum class LocScaleBase { normal, student };

// X = mu + sigma Z, theta = (mu, sigma); Z standard normal or t_nu.
ModelFamily location_scale(LocScaleBase base, double nu = 3.0);

// pi P1 + (1 - pi) P2 with both component parameter vectors frozen;
// the single unknown parameter is the mixing weight pi.
ModelFamily two_component_mixture(const ModelFamily& p1, const VectorXd& theta1,
                                  const ModelFamily& p2, const VectorXd& theta2);

// Elliptically contoured family on R^k with parameters (mu, Sigma),
// Sigma symmetric positive definite, packed as theta = (mu, vech Sigma)
// with vech the column-stacked lower triangle.  The characteristic
// function is cf(u) = e^{i u.mu} psi(u' Sigma u) with psi the scalar
// generator (e^{-s/2} for the Gaussian kind, g_nu for the Student kind).
class EllipticalFamily {
  public:
    enum class Kind { gaussian, student };

    EllipticalFamily(Kind kind, int dim, double nu = 3.0);

    int dim() const { return dim_; }
    int param_dim() const { return dim_ + dim_ * (dim_ + 1) / 2; }
    Kind kind() const { return kind_; }
    double nu() const { return nu_; }

    VectorXd pack(const VectorXd& mu, const MatrixXd& sigma) const;
    void unpack(const VectorXd& theta, VectorXd* mu, MatrixXd* sigma) const;

    double generator(double s) const;
    double generator_ds(double s) const;

    Complex cf(const VectorXd& u, const VectorXd& theta) const;
    // Gradient of cf with respect to the packed parameter vector.
    Eigen::VectorXcd cf_grad(const VectorXd& u, const VectorXd& theta) const;

    VectorXd sample(const VectorXd& theta, Rng& rng) const;

  private:
    Kind kind_;
    int dim_;
    double nu_;
};

EllipticalFamily elliptical(EllipticalFamily::Kind kind, int dim, double nu = 3.0);

}  // namespace godambe
