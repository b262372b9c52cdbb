#pragma once

#include <vector>

#include "godambe/kernels.hpp"
#include "godambe/models.hpp"

namespace godambe {

// Fixed censoring grid: n_bins interior bins of equal width starting at
// left_edge, indexed 0..n_bins-1.  With open tails, index -1 is
// (-inf, left_edge) and index n_bins is [right_edge, inf).
struct BinGrid {
    double left_edge = 0.0;
    double bin_width = 1.0;
    int n_bins = 2;
    enum class TailPolicy { open_tails, truncate } tail_policy = TailPolicy::open_tails;

    void validate() const;
    double right_edge() const { return left_edge + bin_width * n_bins; }
    int first_index() const { return tail_policy == TailPolicy::open_tails ? -1 : 0; }
    int last_index() const { return tail_policy == TailPolicy::open_tails ? n_bins : n_bins - 1; }
    // bin boundaries; tail bins return +-inf on the open side
    double lower(int bin) const;
    double upper(int bin) const;
    int bin_index(double x) const;  // throws under truncate when x is outside the window
};

enum class OperatorKind { point, kernel_weighted, interval, transform, convolutional };

struct ObservationOperator {
    OperatorKind kind = OperatorKind::point;
    KernelProfile kernel;               // kernel_weighted / transform / convolutional
    BinGrid grid;                       // interval
    std::vector<double> frequencies;    // transform
    std::vector<double> output_grid;    // convolutional

    static ObservationOperator point_op();
    static ObservationOperator kernel_weighted(const KernelProfile& kernel);
    static ObservationOperator interval(const BinGrid& grid);
    static ObservationOperator transform(const std::vector<double>& frequencies,
                                         const KernelProfile& kernel);
    static ObservationOperator convolutional(const KernelProfile& kernel,
                                             const std::vector<double>& output_grid);
};

struct Observation {
    OperatorKind kind = OperatorKind::point;
    double value = 0.0;               // point / kernel_weighted payload
    double weight = 1.0;              // kernel_weighted: phi at the draw
    int bin = 0;                      // interval
    Eigen::VectorXcd transform;       // transform: e^{i u_j x} phi(x)
    VectorXd vec;                     // multivariate point draw

    static Observation point(double x);
    static Observation point_vector(const VectorXd& x);
};

// Applies the operator to one latent draw.  Convolutional operators act on
// densities, not draws, and are rejected here (see convolve_density).
Observation observe(const ObservationOperator& op, double latent_draw);

// Pushforward of a kernel-weighted observation: density f phi / c and the
// normalising constant c(theta) = integral of f phi.
struct PushforwardDensity {
    std::function<double(double)> density;
    double c_theta = 1.0;
};

PushforwardDensity pushforward_density(const ObservationOperator& op, const ModelFamily& model,
                                       const VectorXd& theta, const QuadratureSpec& spec = {});

// n draws from f phi / c by rejection from the model with acceptance
// probability phi(x) (the kernel has amplitude one).  Returns the draws;
// *acceptance_rate, when given, receives the observed rate.
std::vector<double> sample_pushforward(const ObservationOperator& op, const ModelFamily& model,
                                       const VectorXd& theta, int n, Rng& rng,
                                       double* acceptance_rate = nullptr);

// P_theta(X in [lo, hi]); uses the model cdf when present, quadrature otherwise.
double interval_probability(const ModelFamily& model, const VectorXd& theta, double lo, double hi,
                            const QuadratureSpec& spec = {});

double bin_probability(const ModelFamily& model, const VectorXd& theta, const BinGrid& grid,
                       int bin, const QuadratureSpec& spec = {});

// Smoothed density (K * f_theta) evaluated on the operator's output grid.
std::vector<std::pair<double, double>> convolve_density(const ObservationOperator& op,
                                                        const ModelFamily& model,
                                                        const VectorXd& theta,
                                                        const QuadratureSpec& spec = {});

}  // namespace godambe
