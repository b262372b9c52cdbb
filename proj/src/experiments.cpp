#include "godambe/experiments.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

namespace godambe {
namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void parallel_for(int n_tasks, int workers, const std::function<void(int)>& task) {
    workers = std::max(1, std::min(workers, n_tasks));
    if (workers == 1) {
        for (int i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    const int i = next.fetch_add(1);
                    if (i >= n_tasks) return;
                    task(i);
                }
            } catch (...) {
                errors[static_cast<size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double kahan_sum(const std::vector<double>& v) {
    double s = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

SimulationRow aggregate(const std::string& family, const std::string& estimator,
                        double theta_true, const std::vector<double>& estimates,
                        const std::vector<double>& sandwiches, int failures) {
    SimulationRow row;
    row.family = family;
    row.estimator = estimator;
    row.failures = failures;
    row.replications_used = static_cast<int>(estimates.size());
    if (estimates.empty()) {
        row.bias = row.variance = row.mse = row.mad = std::numeric_limits<double>::quiet_NaN();
        return row;
    }
    const double used = static_cast<double>(estimates.size());
    const double mean = kahan_sum(estimates) / used;
    std::vector<double> centred2, err2, abserr;
    centred2.reserve(estimates.size());
    err2.reserve(estimates.size());
    abserr.reserve(estimates.size());
    for (double t : estimates) {
        centred2.push_back((t - mean) * (t - mean));
        err2.push_back((t - theta_true) * (t - theta_true));
        abserr.push_back(std::abs(t - theta_true));
    }
    row.bias = mean - theta_true;
    row.variance = estimates.size() > 1 ? kahan_sum(centred2) / (used - 1.0)
                                        : std::numeric_limits<double>::quiet_NaN();
    row.mse = kahan_sum(err2) / used;
    row.mad = sample_median(abserr);
    if (!sandwiches.empty()) row.mean_sandwich = kahan_sum(sandwiches) / static_cast<double>(sandwiches.size());
    return row;
}

// approximate median from bin counts: midpoint of the bin holding the 0.5
// quantile (clamped to the grid window for tail bins)
double binned_median_pilot(const BinGrid& grid, const std::vector<long>& counts) {
    long total = 0;
    for (long c : counts) total += c;
    long acc = 0;
    for (int slot = 0; slot < static_cast<int>(counts.size()); ++slot) {
        acc += counts[static_cast<size_t>(slot)];
        if (2 * acc >= total) {
            const int bin = slot + grid.first_index();
            const double lo = std::max(grid.lower(bin), grid.left_edge - grid.bin_width);
            const double hi = std::min(grid.upper(bin), grid.right_edge() + grid.bin_width);
            return 0.5 * (lo + hi);
        }
    }
    return 0.5 * (grid.left_edge + grid.right_edge());
}

}  // namespace

BinGrid symmetric_grid(double width, double span) {
    if (!(width > 0.0) || !(span > 0.0))
        throw std::domain_error("symmetric_grid: width and span must be > 0");
    const int half = std::max(1, static_cast<int>(std::ceil(span / width - 1e-12)));
    BinGrid grid;
    grid.left_edge = -half * width;
    grid.bin_width = width;
    grid.n_bins = 2 * half;
    grid.tail_policy = BinGrid::TailPolicy::open_tails;
    return grid;
}

std::vector<SimulationRow> run_simulate(const SimulateSpec& spec) {
    if (spec.n < 2) throw std::invalid_argument("run_simulate: n must be >= 2");
    if (spec.replications < 1) throw std::invalid_argument("run_simulate: replications >= 1");
    for (const std::string& e : spec.estimators)
        if (e != "mean" && e != "median" && e != "weak" && e != "sinusoidal")
            throw std::invalid_argument("run_simulate: unknown estimator '" + e + "'");

    const int R = spec.replications;
    const size_t n_est = spec.estimators.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> theta(n_est, std::vector<double>(static_cast<size_t>(R), nan));
    std::vector<std::vector<double>> sand(n_est, std::vector<double>(static_cast<size_t>(R), nan));

    const ObservationOperator push = ObservationOperator::kernel_weighted(spec.kernel);
    parallel_for(R, spec.workers, [&](int rep) {
        Rng rng = Rng::substream(spec.seed, static_cast<std::uint64_t>(rep));
        std::vector<double> x;
        if (spec.kernel.is_classical()) {
            x.reserve(static_cast<size_t>(spec.n));
            for (long i = 0; i < spec.n; ++i) x.push_back(spec.model.sample(spec.theta_true, rng));
        } else {
            x = sample_pushforward(push, spec.model, spec.theta_true, static_cast<int>(spec.n), rng);
        }
        for (size_t e = 0; e < n_est; ++e) {
            const std::string& name = spec.estimators[e];
            try {
                if (name == "mean") {
                    const double m = kahan_sum(x) / static_cast<double>(x.size());
                    double ss = 0.0;
                    for (double xi : x) ss += (xi - m) * (xi - m);
                    theta[e][static_cast<size_t>(rep)] = m;
                    sand[e][static_cast<size_t>(rep)] =
                        ss / static_cast<double>(x.size()) / static_cast<double>(x.size());
                } else if (name == "median") {
                    theta[e][static_cast<size_t>(rep)] = sample_median(x);
                } else if (name == "weak") {
                    EstimationResult r = ecf_phase_estimator(x, spec.u);
                    theta[e][static_cast<size_t>(rep)] = r.theta_hat[0];
                    sand[e][static_cast<size_t>(rep)] = r.sandwich(0, 0);
                } else {  // sinusoidal via the Z-solver
                    std::vector<Observation> obs;
                    obs.reserve(x.size());
                    for (double xi : x) obs.push_back(Observation::point(xi));
                    VectorXd pilot(1);
                    pilot[0] = sample_median(x);
                    EstimationResult r = solve_z(sinusoidal(spec.c), obs, pilot);
                    theta[e][static_cast<size_t>(rep)] = r.theta_hat[0];
                    sand[e][static_cast<size_t>(rep)] = r.sandwich(0, 0);
                }
            } catch (const NumericalError&) {
                // per-replication failure: leave NaN, counted below
            }
        }
    });

    std::vector<SimulationRow> rows;
    for (size_t e = 0; e < n_est; ++e) {
        std::vector<double> est, sw;
        int failures = 0;
        for (int rep = 0; rep < R; ++rep) {
            const double t = theta[e][static_cast<size_t>(rep)];
            if (std::isnan(t)) {
                ++failures;
                continue;
            }
            est.push_back(t);
            const double s = sand[e][static_cast<size_t>(rep)];
            if (!std::isnan(s)) sw.push_back(s);
        }
        rows.push_back(aggregate(spec.family_label, spec.estimators[e], spec.theta_true[0], est,
                                 sw, failures));
    }
    return rows;
}

std::vector<IntervalStudyRow> run_interval_study(const IntervalStudySpec& spec) {
    if (spec.widths.empty()) throw std::invalid_argument("run_interval_study: no widths");
    std::vector<IntervalStudyRow> rows;
    for (double width : spec.widths) {
        const BinGrid grid = symmetric_grid(width, spec.span);
        const ObservationOperator op = ObservationOperator::interval(grid);
        const double ginfo = grid_information(spec.model, grid, spec.theta_true);
        const int R = spec.replications;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::vector<std::vector<double>> theta(2, std::vector<double>(static_cast<size_t>(R), nan));
        std::vector<std::vector<double>> sand(2, std::vector<double>(static_cast<size_t>(R), nan));
        const InferenceFunctional psi =
            interval_sinusoidal(spec.c, spec.model, grid, IntervalForm::conditional);

        parallel_for(R, spec.workers, [&](int rep) {
            Rng rng = Rng::substream(spec.seed ^ std::bit_cast<std::uint64_t>(width),
                                     static_cast<std::uint64_t>(rep));
            std::vector<Observation> obs;
            std::vector<long> counts(static_cast<size_t>(grid.last_index() - grid.first_index() + 1), 0);
            obs.reserve(static_cast<size_t>(spec.n));
            for (long i = 0; i < spec.n; ++i) {
                Observation y = observe(op, spec.model.sample(spec.theta_true, rng));
                ++counts[static_cast<size_t>(y.bin - grid.first_index())];
                obs.push_back(y);
            }
            const double pilot = binned_median_pilot(grid, counts);
            try {
                VectorXd p(1);
                p[0] = pilot;
                EstimationResult r = solve_z(psi, obs, p);
                theta[0][static_cast<size_t>(rep)] = r.theta_hat[0];
                sand[0][static_cast<size_t>(rep)] = r.sandwich(0, 0);
            } catch (const NumericalError&) {
            }
            try {
                EstimationResult r = interval_mle_benchmark(spec.model, grid, counts, pilot);
                theta[1][static_cast<size_t>(rep)] = r.theta_hat[0];
                sand[1][static_cast<size_t>(rep)] = r.sandwich(0, 0);
            } catch (const NumericalError&) {
            } catch (const std::invalid_argument&) {
            }
        });

        const char* names[2] = {"interval_sinusoidal", "interval_mle"};
        for (int e = 0; e < 2; ++e) {
            std::vector<double> est, sw;
            int failures = 0;
            for (int rep = 0; rep < R; ++rep) {
                const double t = theta[static_cast<size_t>(e)][static_cast<size_t>(rep)];
                if (std::isnan(t)) {
                    ++failures;
                    continue;
                }
                est.push_back(t);
                const double s = sand[static_cast<size_t>(e)][static_cast<size_t>(rep)];
                if (!std::isnan(s)) sw.push_back(s);
            }
            SimulationRow base = aggregate(spec.family_label, names[e], spec.theta_true[0], est,
                                           sw, failures);
            IntervalStudyRow row;
            row.width = width;
            row.estimator = base.estimator;
            row.bias = base.bias;
            row.variance = base.variance;
            row.mse = base.mse;
            row.mad = base.mad;
            row.mean_sandwich = base.mean_sandwich;
            row.replications_used = base.replications_used;
            row.failures = base.failures;
            row.grid_info = ginfo;
            row.asymptotic_var = 1.0 / (static_cast<double>(spec.n) * ginfo);
            rows.push_back(row);
        }
    }
    return rows;
}

// --- config plumbing -------------------------------------------------------

ModelFamily model_from_config(const Config& cfg, std::string* label) {
    const std::string family = cfg.get("model.family", "gaussian");
    ModelFamily m;
    if (family == "gaussian") {
        m = gaussian_location(cfg.get_double("model.sigma", 1.0));
    } else if (family == "cauchy") {
        m = cauchy_location();
    } else if (family == "student_t") {
        m = student_t_location(cfg.get_double("model.nu", 3.0));
    } else {
        throw ConfigError("model.family must be gaussian, cauchy or student_t");
    }
    if (label) *label = family;
    return m;
}

void write_csv_header_line(std::ostream& out, const Config& cfg, std::uint64_t seed) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    out << "# godambe " << kVersion << " config_hash=" << buf << " seed=" << seed
        << " variance_divisor=R-1 mad=median|theta_hat-theta_true|\n";
}

namespace {

std::uint64_t effective_seed(const Config& cfg) { return cfg.get_u64("seed", 0); }

int effective_workers(const Config& cfg) {
    if (cfg.has("workers")) return static_cast<int>(cfg.get_long("workers", 1));
    if (const char* env = std::getenv("GODAMBE_WORKERS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            throw ConfigError("GODAMBE_WORKERS must be an integer");
        }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void experiment_simulate(const Config& cfg, std::ostream& out) {
    SimulateSpec spec;
    spec.model = model_from_config(cfg, &spec.family_label);
    spec.theta_true = VectorXd::Constant(1, cfg.get_double("model.theta", 0.0));
    spec.n = cfg.get_long("n", 100);
    spec.replications = static_cast<int>(cfg.get_long("replications", 2000));
    spec.seed = effective_seed(cfg);
    spec.workers = effective_workers(cfg);
    spec.estimators = cfg.get_list("estimator.list", {"mean", "median", "weak"});
    spec.u = cfg.get_double("estimator.u", 1.0);
    spec.c = cfg.get_double("estimator.c", 1.0);
    if (!(spec.u > 0.0) || !(spec.c > 0.0))
        throw ConfigError("estimator tuning constants must be > 0");
    const std::string variant = cfg.get("operator.variant", "point");
    if (variant == "kernel_weighted")
        spec.kernel = KernelProfile::gaussian(cfg.get_double("operator.sigma_phi", 1.0));
    else if (variant != "point")
        throw ConfigError("simulate: operator.variant must be point or kernel_weighted");

    write_csv_header_line(out, cfg, spec.seed);
    out << "family,estimator,bias,variance,mse,mad,mean_sandwich_variance,replications_used,"
           "failures\n";
    for (const SimulationRow& r : run_simulate(spec))
        out << r.family << ',' << r.estimator << ',' << fmt(r.bias) << ',' << fmt(r.variance)
            << ',' << fmt(r.mse) << ',' << fmt(r.mad) << ',' << fmt(r.mean_sandwich) << ','
            << r.replications_used << ',' << r.failures << '\n';
}

void experiment_info_hierarchy(const Config& cfg, std::ostream& out) {
    const std::uint64_t seed = effective_seed(cfg);
    const double c = cfg.get_double("hierarchy.c", 1.0);
    const double theta0 = cfg.get_double("model.theta", 0.0);
    const VectorXd theta = VectorXd::Constant(1, theta0);
    const std::vector<std::string> model_names =
        cfg.get_list("hierarchy.models", {"cauchy", "gaussian", "student_t"});
    const std::vector<double> sigmas = cfg.get_doubles("hierarchy.sigma_phi", {0.5, 1.0, 2.0});
    const std::vector<double> widths = cfg.get_doubles("hierarchy.widths", {2.0, 1.0});
    const double span = cfg.get_double("hierarchy.span", 6.0);
    const double nu = cfg.get_double("model.nu", 3.0);

    write_csv_header_line(out, cfg, seed);
    out << "model,operator,functional,I_classical,I_O,G_psi,observation_cost,estimation_cost,"
           "observation_gap_min_eig,estimation_gap_min_eig,hierarchy_ok\n";

    auto emit = [&](const std::string& model_name, const InformationReport& rep) {
        out << model_name << ',' << rep.operator_id << ',' << rep.functional_id << ','
            << fmt(rep.I_classical(0, 0)) << ',' << fmt(rep.I_O(0, 0)) << ','
            << fmt(rep.G_psi(0, 0)) << ',' << fmt(rep.observation_cost(0, 0)) << ','
            << fmt(rep.estimation_cost(0, 0)) << ',' << fmt(rep.observation_gap_min_eig) << ','
            << fmt(rep.estimation_gap_min_eig) << ',' << (rep.hierarchy_ok() ? 1 : 0) << '\n';
    };

    for (const std::string& name : model_names) {
        ModelFamily model;
        if (name == "gaussian")
            model = gaussian_location(cfg.get_double("model.sigma", 1.0));
        else if (name == "cauchy")
            model = cauchy_location();
        else if (name == "student_t")
            model = student_t_location(nu);
        else
            throw ConfigError("hierarchy.models: unknown family '" + name + "'");

        std::vector<ObservationOperator> ops;
        ops.push_back(ObservationOperator::kernel_weighted(KernelProfile::classical_limit()));
        for (double s : sigmas)
            ops.push_back(ObservationOperator::kernel_weighted(KernelProfile::gaussian(s)));
        for (double w : widths)
            ops.push_back(ObservationOperator::interval(symmetric_grid(w, span)));

        for (const ObservationOperator& op : ops) {
            if (op.kind == OperatorKind::interval) {
                emit(name, hierarchy_report(model, op, interval_score_if(model, op.grid), theta));
                emit(name, hierarchy_report(
                               model, op,
                               interval_sinusoidal(c, model, op.grid, IntervalForm::conditional),
                               theta));
            } else {
                emit(name, hierarchy_report(model, op, score_if(model), theta));
                emit(name, hierarchy_report(model, op, sinusoidal(c), theta));
            }
        }
    }
}

void experiment_are_curve(const Config& cfg, std::ostream& out) {
    const std::uint64_t seed = effective_seed(cfg);
    const std::string family = cfg.get("family", "cauchy");
    SinusoidalFamily fam;
    if (family == "cauchy")
        fam = SinusoidalFamily::cauchy();
    else if (family == "student_t")
        fam = SinusoidalFamily::student(cfg.get_double("model.nu", 3.0));
    else if (family == "gaussian")
        fam = SinusoidalFamily::gaussian(cfg.get_double("model.sigma", 1.0));
    else
        throw ConfigError("are-curve: family must be cauchy, student_t or gaussian");

    std::vector<double> grid = cfg.get_doubles("c.grid", {});
    if (grid.empty()) {
        const double lo = cfg.get_double("c.min", 0.05);
        const double hi = cfg.get_double("c.max", 3.0);
        const double step = cfg.get_double("c.step", 0.01);
        if (!(lo > 0.0) || !(hi > lo) || !(step > 0.0))
            throw ConfigError("are-curve: need 0 < c.min < c.max and c.step > 0");
        for (double v = lo; v <= hi + 1e-12; v += step) grid.push_back(v);
    }
    AreCurve curve = are_curve(fam, grid);

    write_csv_header_line(out, cfg, seed);
    out << "family,kind,c,godambe,fisher,are,note\n";
    for (const ArePoint& pt : curve.points)
        out << family << ",point," << fmt(pt.c) << ',' << fmt(pt.godambe) << ','
            << fmt(pt.fisher) << ',' << fmt(pt.are) << ",\n";
    const ArePoint& best = curve.points[static_cast<size_t>(curve.argmax)];
    out << family << ",argmax," << fmt(best.c) << ',' << fmt(best.godambe) << ','
        << fmt(best.fisher) << ',' << fmt(best.are) << ',' << curve.note << '\n';
    out << family << ",limit,0," << fmt(curve.limit_defined ? curve.small_c_limit * best.fisher
                                                            : 0.0)
        << ',' << fmt(best.fisher) << ','
        << (curve.limit_defined ? fmt(curve.small_c_limit)
                                : std::string("nan"))
        << ','
        << (curve.limit_defined ? "small-c series limit"
                                : "base cf not differentiable at 0; no series limit")
        << '\n';
}

void experiment_estimate(const Config& cfg, std::ostream& out, std::ostream& console) {
    const std::uint64_t seed = effective_seed(cfg);
    std::string family_label;
    ModelFamily model = model_from_config(cfg, &family_label);
    const double theta0 = cfg.get_double("model.theta", 0.0);
    std::vector<double> data;
    if (cfg.has("data.path")) {
        std::ifstream in(cfg.require("data.path"));
        if (!in) throw ConfigError("estimate: cannot open data file " + cfg.require("data.path"));
        double v;
        while (in >> v) data.push_back(v);
        if (data.size() < 2) throw ConfigError("estimate: need at least two observations");
    } else {
        const long n = cfg.get_long("n", 1000);
        Rng rng = Rng::substream(seed, 0);
        VectorXd th = VectorXd::Constant(1, theta0);
        for (long i = 0; i < n; ++i) data.push_back(model.sample(th, rng));
    }

    const std::string estimator = cfg.get("estimator", "weak");
    EstimationResult res;
    if (estimator == "weak") {
        res = ecf_phase_estimator(data, cfg.get_double("estimator.u", 1.0));
    } else {
        std::vector<Observation> obs;
        obs.reserve(data.size());
        for (double x : data) obs.push_back(Observation::point(x));
        VectorXd pilot = VectorXd::Constant(1, sample_median(data));
        if (estimator == "sinusoidal")
            res = solve_z(sinusoidal(cfg.get_double("estimator.c", 1.0)), obs, pilot);
        else if (estimator == "score")
            res = solve_z(score_if(model), obs, pilot);
        else
            throw ConfigError("estimate: estimator must be weak, sinusoidal or score");
    }

    console << "theta_hat = " << fmt(res.theta_hat[0]) << " +/- " << fmt(res.standard_error())
            << "  (n = " << res.n << ", estimator = " << res.estimator << ")\n";
    write_csv_header_line(out, cfg, seed);
    out << "estimator,n,theta_hat,standard_error,S,V,G\n";
    out << res.estimator << ',' << res.n << ',' << fmt(res.theta_hat[0]) << ','
        << fmt(res.standard_error()) << ',' << fmt(res.S_hat(0, 0)) << ',' << fmt(res.V_hat(0, 0))
        << ',' << fmt(res.G_hat(0, 0)) << '\n';
}

void experiment_interval_study(const Config& cfg, std::ostream& out) {
    IntervalStudySpec spec;
    spec.model = model_from_config(cfg, &spec.family_label);
    spec.theta_true = VectorXd::Constant(1, cfg.get_double("model.theta", 0.0));
    spec.n = cfg.get_long("n", 100);
    spec.replications = static_cast<int>(cfg.get_long("replications", 2000));
    spec.seed = effective_seed(cfg);
    spec.workers = effective_workers(cfg);
    spec.c = cfg.get_double("estimator.c", 1.0);
    spec.span = cfg.get_double("grid.span", 6.0);
    spec.widths = cfg.get_doubles("grid.widths", {2.0, 1.0, 0.5});

    write_csv_header_line(out, cfg, spec.seed);
    out << "width,estimator,bias,variance,mse,mad,mean_sandwich_variance,grid_info,"
           "asymptotic_var,replications_used,failures\n";
    for (const IntervalStudyRow& r : run_interval_study(spec))
        out << fmt(r.width) << ',' << r.estimator << ',' << fmt(r.bias) << ',' << fmt(r.variance)
            << ',' << fmt(r.mse) << ',' << fmt(r.mad) << ',' << fmt(r.mean_sandwich) << ','
            << fmt(r.grid_info) << ',' << fmt(r.asymptotic_var) << ',' << r.replications_used
            << ',' << r.failures << '\n';
}

}  // namespace

void run_experiment(const std::string& experiment, const Config& cfg, std::ostream& out,
                    std::ostream& console) {
    const std::string declared = cfg.get("experiment", experiment);
    if (declared != experiment)
        throw ConfigError("config declares experiment '" + declared + "' but '" + experiment +
                          "' was requested");
    if (experiment == "simulate")
        experiment_simulate(cfg, out);
    else if (experiment == "info-hierarchy")
        experiment_info_hierarchy(cfg, out);
    else if (experiment == "are-curve")
        experiment_are_curve(cfg, out);
    else if (experiment == "estimate")
        experiment_estimate(cfg, out, console);
    else if (experiment == "interval-study")
        experiment_interval_study(cfg, out);
    else
        throw ConfigError("unknown experiment: " + experiment);
}

}  // namespace godambe
