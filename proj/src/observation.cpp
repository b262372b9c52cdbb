#include "godambe/observation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace godambe {

void BinGrid::validate() const {
    if (!(bin_width > 0.0)) throw std::domain_error("BinGrid: bin_width must be > 0");
    if (n_bins < 2) throw std::domain_error("BinGrid: n_bins must be >= 2");
    if (!std::isfinite(left_edge)) throw std::domain_error("BinGrid: left_edge must be finite");
}

double BinGrid::lower(int bin) const {
    if (bin < first_index() || bin > last_index()) throw std::out_of_range("BinGrid: bad bin");
    if (bin == -1) return -std::numeric_limits<double>::infinity();
    return left_edge + bin * bin_width;
}

double BinGrid::upper(int bin) const {
    if (bin < first_index() || bin > last_index()) throw std::out_of_range("BinGrid: bad bin");
    if (bin == n_bins) return std::numeric_limits<double>::infinity();
    return left_edge + (bin + 1) * bin_width;
}

int BinGrid::bin_index(double x) const {
    const int raw = static_cast<int>(std::floor((x - left_edge) / bin_width));
    if (tail_policy == TailPolicy::open_tails)
        return std::clamp(raw, -1, n_bins);
    if (raw < 0 || raw >= n_bins)
        throw std::domain_error("BinGrid: draw outside the truncated support window");
    return raw;
}

ObservationOperator ObservationOperator::point_op() {
    return ObservationOperator{};
}

ObservationOperator ObservationOperator::kernel_weighted(const KernelProfile& kernel) {
    ObservationOperator op;
    op.kind = OperatorKind::kernel_weighted;
    op.kernel = kernel;
    return op;
}

ObservationOperator ObservationOperator::interval(const BinGrid& grid) {
    grid.validate();
    ObservationOperator op;
    op.kind = OperatorKind::interval;
    op.grid = grid;
    return op;
}

ObservationOperator ObservationOperator::transform(const std::vector<double>& frequencies,
                                                   const KernelProfile& kernel) {
    if (frequencies.empty())
        throw std::domain_error("transform operator: frequency list must be non-empty");
    std::set<double> uniq(frequencies.begin(), frequencies.end());
    if (uniq.size() != frequencies.size())
        throw std::domain_error("transform operator: frequencies must be distinct");
    ObservationOperator op;
    op.kind = OperatorKind::transform;
    op.frequencies = frequencies;
    op.kernel = kernel;
    return op;
}

ObservationOperator ObservationOperator::convolutional(const KernelProfile& kernel,
                                                       const std::vector<double>& output_grid) {
    if (kernel.is_classical())
        throw std::domain_error("convolutional operator: kernel must be integrable");
    ObservationOperator op;
    op.kind = OperatorKind::convolutional;
    op.kernel = kernel;
    op.output_grid = output_grid;
    return op;
}

Observation Observation::point(double x) {
    Observation y;
    y.kind = OperatorKind::point;
    y.value = x;
    return y;
}

Observation Observation::point_vector(const VectorXd& x) {
    Observation y;
    y.kind = OperatorKind::point;
    y.vec = x;
    return y;
}

Observation observe(const ObservationOperator& op, double latent_draw) {
    if (!std::isfinite(latent_draw)) throw std::domain_error("observe: draw must be finite");
    Observation y;
    y.kind = op.kind;
    switch (op.kind) {
        case OperatorKind::point:
            y.value = latent_draw;
            return y;
        case OperatorKind::kernel_weighted:
            y.value = latent_draw;
            y.weight = op.kernel(latent_draw);
            return y;
        case OperatorKind::interval:
            y.bin = op.grid.bin_index(latent_draw);
            return y;
        case OperatorKind::transform: {
            y.transform.resize(static_cast<Eigen::Index>(op.frequencies.size()));
            const double w = op.kernel(latent_draw);
            for (size_t j = 0; j < op.frequencies.size(); ++j)
                y.transform[static_cast<Eigen::Index>(j)] =
                    std::exp(Complex(0.0, op.frequencies[j] * latent_draw)) * w;
            return y;
        }
        case OperatorKind::convolutional:
            throw std::invalid_argument(
                "observe: convolutional operators act on densities, use convolve_density");
    }
    throw std::logic_error("observe: unknown operator kind");
}

PushforwardDensity pushforward_density(const ObservationOperator& op, const ModelFamily& model,
                                       const VectorXd& theta, const QuadratureSpec& spec) {
    if (op.kind != OperatorKind::kernel_weighted)
        throw std::invalid_argument("pushforward_density: requires a kernel_weighted operator");
    if (!model.has_density())
        throw std::invalid_argument("pushforward_density: model has no density");
    model.check_theta(theta);
    const KernelProfile kernel = op.kernel;
    if (kernel.is_classical()) {
        PushforwardDensity out;
        out.c_theta = 1.0;
        out.density = [model, theta](double x) { return model.density(x, theta); };
        return out;
    }
    const double c = integrate(
        [&](double x) { return model.density(x, theta) * kernel(x); }, -kInf, kInf, spec);
    PushforwardDensity out;
    out.c_theta = c;
    out.density = [model, theta, kernel, c](double x) {
        return model.density(x, theta) * kernel(x) / c;
    };
    return out;
}

std::vector<double> sample_pushforward(const ObservationOperator& op, const ModelFamily& model,
                                       const VectorXd& theta, int n, Rng& rng,
                                       double* acceptance_rate) {
    if (op.kind != OperatorKind::kernel_weighted)
        throw std::invalid_argument("sample_pushforward: requires a kernel_weighted operator");
    model.check_theta(theta);
    std::vector<double> out;
    out.reserve(static_cast<size_t>(n));
    if (op.kernel.is_classical()) {
        for (int i = 0; i < n; ++i) out.push_back(model.sample(theta, rng));
        if (acceptance_rate) *acceptance_rate = 1.0;
        return out;
    }
    long attempts = 0;
    while (out.size() < static_cast<size_t>(n)) {
        const double x = model.sample(theta, rng);
        ++attempts;
        if (rng.uniform() < op.kernel(x)) out.push_back(x);
        if (attempts == 10000 && out.size() < 100)
            throw NumericalError("sample_pushforward: acceptance rate below 1%");
    }
    if (acceptance_rate) *acceptance_rate = static_cast<double>(n) / static_cast<double>(attempts);
    return out;
}

double interval_probability(const ModelFamily& model, const VectorXd& theta, double lo, double hi,
                            const QuadratureSpec& spec) {
    model.check_theta(theta);
    if (lo > hi) std::swap(lo, hi);
    if (model.has_cdf()) {
        const double phi = std::isinf(hi) && hi > 0 ? 1.0 : model.cdf(hi, theta);
        const double plo = std::isinf(lo) && lo < 0 ? 0.0 : model.cdf(lo, theta);
        return std::clamp(phi - plo, 0.0, 1.0);
    }
    if (!model.has_density())
        throw std::invalid_argument("interval_probability: model has neither cdf nor density");
    const double p =
        integrate([&](double x) { return model.density(x, theta); }, lo, hi, spec);
    return std::clamp(p, 0.0, 1.0);
}

double bin_probability(const ModelFamily& model, const VectorXd& theta, const BinGrid& grid,
                       int bin, const QuadratureSpec& spec) {
    return interval_probability(model, theta, grid.lower(bin), grid.upper(bin), spec);
}

std::vector<std::pair<double, double>> convolve_density(const ObservationOperator& op,
                                                        const ModelFamily& model,
                                                        const VectorXd& theta,
                                                        const QuadratureSpec& spec) {
    if (op.kind != OperatorKind::convolutional)
        throw std::invalid_argument("convolve_density: requires a convolutional operator");
    if (!model.has_density())
        throw std::invalid_argument("convolve_density: model has no density");
    model.check_theta(theta);
    // normalised smoothing kernel: amplitude-one gaussian / (sigma sqrt(2 pi))
    const double norm = 1.0 / (op.kernel.sigma * std::sqrt(2.0 * M_PI));
    std::vector<std::pair<double, double>> out;
    out.reserve(op.output_grid.size());
    for (double g : op.output_grid) {
        // K(g - x) confines the integrand to a 12-sigma window around g
        const double mid = g - op.kernel.center;
        const double half = 12.0 * op.kernel.sigma;
        const double v = integrate(
            [&](double x) { return norm * op.kernel(g - x) * model.density(x, theta); },
            mid - half, mid + half, spec);
        out.emplace_back(g, v);
    }
    return out;
}

}  // namespace godambe
