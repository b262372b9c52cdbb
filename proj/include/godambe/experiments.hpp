#pragma once

#include <iosfwd>

#include "godambe/config.hpp"
#include "godambe/estimation.hpp"
#include "godambe/information.hpp"

namespace godambe {

// One aggregated line of a Monte Carlo study.
struct SimulationRow {
    std::string family;
    std::string estimator;
    double bias = 0.0;
    double variance = 0.0;  // divisor R-1
    double mse = 0.0;       // mean of (theta_hat - theta_true)^2
    double mad = 0.0;       // median of |theta_hat - theta_true|
    double mean_sandwich = std::numeric_limits<double>::quiet_NaN();
    int replications_used = 0;
    int failures = 0;
};

struct SimulateSpec {
    ModelFamily model;
    std::string family_label;
    VectorXd theta_true;
    long n = 100;
    int replications = 2000;
    std::uint64_t seed = 0;
    int workers = 1;
    std::vector<std::string> estimators;  // mean | median | weak | sinusoidal
    double u = 1.0;                       // weak (ECF) frequency
    double c = 1.0;                       // sinusoidal tuning
    KernelProfile kernel = KernelProfile::classical_limit();  // kernel_weighted draws when gaussian
};

std::vector<SimulationRow> run_simulate(const SimulateSpec& spec);

struct IntervalStudySpec {
    ModelFamily model;
    std::string family_label;
    VectorXd theta_true;
    long n = 100;
    int replications = 2000;
    std::uint64_t seed = 0;
    int workers = 1;
    double c = 1.0;           // interval_sinusoidal tuning
    double span = 6.0;        // grid half-width around 0
    std::vector<double> widths;
};

struct IntervalStudyRow {
    double width = 0.0;
    std::string estimator;  // interval_sinusoidal | interval_mle
    double bias = 0.0, variance = 0.0, mse = 0.0, mad = 0.0;
    double mean_sandwich = std::numeric_limits<double>::quiet_NaN();
    double grid_info = 0.0;       // multinomial information of the grid
    double asymptotic_var = 0.0;  // 1 / (n * grid_info)
    int replications_used = 0;
    int failures = 0;
};

std::vector<IntervalStudyRow> run_interval_study(const IntervalStudySpec& spec);

// Builds a grid with edges at multiples of `width` covering [-span, span],
// open tails.
BinGrid symmetric_grid(double width, double span);

// Dispatches one experiment described by a parsed config; writes the CSV to
// `out` and human-readable notes (the `estimate` summary) to `console`.
void run_experiment(const std::string& experiment, const Config& cfg, std::ostream& out,
                    std::ostream& console);

// Model spec shared by the CLI experiments: model.family in
// {gaussian, cauchy, student_t}, model.sigma / model.nu, model.theta.
ModelFamily model_from_config(const Config& cfg, std::string* label);

void write_csv_header_line(std::ostream& out, const Config& cfg, std::uint64_t seed);

}  // namespace godambe
