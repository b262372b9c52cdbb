#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "godambe/estimation.hpp"
#include "godambe/experiments.hpp"
#include "godambe/information.hpp"
#include "godambe/nuisance.hpp"
#include "godambe/special.hpp"

namespace py = pybind11;
using namespace godambe;

namespace {

std::vector<Observation> point_data(const std::vector<double>& xs) {
    std::vector<Observation> obs;
    obs.reserve(xs.size());
    for (double x : xs) obs.push_back(Observation::point(x));
    return obs;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.attr("__version__") = kVersion;

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    // --- special functions / quadrature
    m.def("bessel_k", &bessel_k, py::arg("order"), py::arg("x"));
    m.def("radial_generator", &radial_generator, py::arg("nu"), py::arg("s"));

    py::class_<QuadratureSpec>(m, "QuadratureSpec")
        .def(py::init<>())
        .def_readwrite("abs_tol", &QuadratureSpec::abs_tol)
        .def_readwrite("rel_tol", &QuadratureSpec::rel_tol)
        .def_readwrite("max_subdivisions", &QuadratureSpec::max_subdivisions);
    m.def(
        "integrate",
        [](const std::function<double(double)>& f, double a, double b, const QuadratureSpec& s) {
            return integrate(f, a, b, s);
        },
        py::arg("f"), py::arg("a"), py::arg("b"), py::arg("spec") = QuadratureSpec{});

    // --- kernels
    py::class_<KernelProfile>(m, "KernelProfile")
        .def_static("gaussian", &KernelProfile::gaussian, py::arg("sigma"), py::arg("center") = 0.0)
        .def_static("classical_limit", &KernelProfile::classical_limit)
        .def("__call__", &KernelProfile::operator())
        .def_property_readonly("is_classical", &KernelProfile::is_classical);

    // --- models
    py::class_<ModelFamily>(m, "ModelFamily")
        .def_readonly("name", &ModelFamily::name)
        .def_readonly("param_dim", &ModelFamily::param_dim)
        .def("density", [](const ModelFamily& f, double x, const VectorXd& th) {
            if (!f.has_density()) throw std::invalid_argument("model has no density");
            return f.density(x, th);
        })
        .def("cf", [](const ModelFamily& f, double u, const VectorXd& th) { return f.cf(u, th); })
        .def("score", [](const ModelFamily& f, double x, const VectorXd& th) {
            if (!f.has_score()) throw std::invalid_argument("model has no score");
            return f.score(x, th);
        })
        .def("cdf", [](const ModelFamily& f, double x, const VectorXd& th) {
            if (!f.has_cdf()) throw std::invalid_argument("model has no cdf");
            return f.cdf(x, th);
        })
        .def("sample", [](const ModelFamily& f, const VectorXd& th, long n, std::uint64_t seed) {
            Rng rng(seed);
            std::vector<double> out;
            out.reserve(static_cast<size_t>(n));
            for (long i = 0; i < n; ++i) out.push_back(f.sample(th, rng));
            return out;
        }, py::arg("theta"), py::arg("n"), py::arg("seed") = 0);

    m.def("gaussian_location", &gaussian_location, py::arg("sigma") = 1.0);
    m.def("cauchy_location", &cauchy_location);
    m.def("student_t_location", &student_t_location, py::arg("nu"));
    py::enum_<LocScaleBase>(m, "LocScaleBase")
        .value("normal", LocScaleBase::normal)
        .value("student", LocScaleBase::student);
    m.def("location_scale", &location_scale, py::arg("base"), py::arg("nu") = 3.0);
    m.def("two_component_mixture", &two_component_mixture);

    py::class_<EllipticalFamily> ell(m, "EllipticalFamily");
    py::enum_<EllipticalFamily::Kind>(ell, "Kind")
        .value("gaussian", EllipticalFamily::Kind::gaussian)
        .value("student", EllipticalFamily::Kind::student);
    ell.def(py::init<EllipticalFamily::Kind, int, double>(), py::arg("kind"), py::arg("dim"),
            py::arg("nu") = 3.0)
        .def_property_readonly("param_dim", &EllipticalFamily::param_dim)
        .def("pack", &EllipticalFamily::pack)
        .def("cf", &EllipticalFamily::cf)
        .def("sample", [](const EllipticalFamily& f, const VectorXd& th, long n,
                          std::uint64_t seed) {
            Rng rng(seed);
            std::vector<VectorXd> out;
            for (long i = 0; i < n; ++i) out.push_back(f.sample(th, rng));
            return out;
        }, py::arg("theta"), py::arg("n"), py::arg("seed") = 0);

    // --- weak objects
    m.def("weak_moment", &weak_moment, py::arg("model"), py::arg("theta"), py::arg("n"),
          py::arg("kernel"), py::arg("spec") = QuadratureSpec{});
    m.def("weak_cf", &weak_cf, py::arg("model"), py::arg("theta"), py::arg("t"), py::arg("kernel"),
          py::arg("spec") = QuadratureSpec{});
    m.def("weak_cumulants",
          [](const ModelFamily& model, const VectorXd& theta, int max_order,
             const KernelProfile& kernel, double step) {
              auto wc = weak_cumulants(model, theta, max_order, kernel, {}, step);
              return py::make_tuple(wc.kappa, wc.max_imag_residual);
          },
          py::arg("model"), py::arg("theta"), py::arg("max_order"), py::arg("kernel"),
          py::arg("step") = 1e-3);

    // --- observation
    py::class_<BinGrid> grid(m, "BinGrid");
    py::enum_<BinGrid::TailPolicy>(grid, "TailPolicy")
        .value("open_tails", BinGrid::TailPolicy::open_tails)
        .value("truncate", BinGrid::TailPolicy::truncate);
    grid.def(py::init([](double left, double width, int n,
                         BinGrid::TailPolicy policy) {
                 BinGrid g;
                 g.left_edge = left;
                 g.bin_width = width;
                 g.n_bins = n;
                 g.tail_policy = policy;
                 g.validate();
                 return g;
             }),
             py::arg("left_edge"), py::arg("bin_width"), py::arg("n_bins"),
             py::arg("tail_policy") = BinGrid::TailPolicy::open_tails)
        .def("bin_index", &BinGrid::bin_index)
        .def("lower", &BinGrid::lower)
        .def("upper", &BinGrid::upper);
    m.def("symmetric_grid", &symmetric_grid, py::arg("width"), py::arg("span") = 6.0);

    py::class_<ObservationOperator>(m, "ObservationOperator")
        .def_static("point", &ObservationOperator::point_op)
        .def_static("kernel_weighted", &ObservationOperator::kernel_weighted)
        .def_static("interval", &ObservationOperator::interval)
        .def_static("transform", &ObservationOperator::transform);

    m.def("interval_probability", &interval_probability, py::arg("model"), py::arg("theta"),
          py::arg("lo"), py::arg("hi"), py::arg("spec") = QuadratureSpec{});
    m.def("sample_pushforward",
          [](const ObservationOperator& op, const ModelFamily& model, const VectorXd& theta,
             int n, std::uint64_t seed) {
              Rng rng(seed);
              return sample_pushforward(op, model, theta, n, rng);
          },
          py::arg("op"), py::arg("model"), py::arg("theta"), py::arg("n"), py::arg("seed") = 0);
    m.def("convolve_density", &convolve_density, py::arg("op"), py::arg("model"), py::arg("theta"),
          py::arg("spec") = QuadratureSpec{});

    // --- inference functionals
    py::class_<InferenceFunctional>(m, "InferenceFunctional")
        .def_readonly("label", &InferenceFunctional::label)
        .def_readonly("output_dim", &InferenceFunctional::output_dim)
        .def_readonly("param_dim", &InferenceFunctional::param_dim)
        .def("eval_point", [](const InferenceFunctional& f, double x, const VectorXd& th) {
            return f.eval(Observation::point(x), th);
        });
    m.def("sinusoidal", &sinusoidal, py::arg("c"));
    m.def("weak_moment_if", &weak_moment_if, py::arg("k"), py::arg("kernel"), py::arg("model"),
          py::arg("spec") = QuadratureSpec{});
    m.def("weak_cf_if", &weak_cf_if, py::arg("u"), py::arg("kernel"), py::arg("model"),
          py::arg("spec") = QuadratureSpec{});
    m.def("score_if", &score_if, py::arg("model"));
    py::enum_<IntervalForm>(m, "IntervalForm")
        .value("conditional", IntervalForm::conditional)
        .value("paper_weighted", IntervalForm::paper_weighted);
    m.def("interval_sinusoidal", &interval_sinusoidal, py::arg("c"), py::arg("model"),
          py::arg("grid"), py::arg("form") = IntervalForm::conditional,
          py::arg("kernel") = KernelProfile::classical_limit(),
          py::arg("spec") = QuadratureSpec{});

    // --- estimation
    py::class_<EstimationResult>(m, "EstimationResult")
        .def_readonly("theta_hat", &EstimationResult::theta_hat)
        .def_readonly("S", &EstimationResult::S_hat)
        .def_readonly("V", &EstimationResult::V_hat)
        .def_readonly("sandwich", &EstimationResult::sandwich)
        .def_readonly("G", &EstimationResult::G_hat)
        .def_readonly("n", &EstimationResult::n)
        .def_readonly("estimator", &EstimationResult::estimator)
        .def("standard_error", &EstimationResult::standard_error, py::arg("i") = 0);

    m.def("solve_z",
          [](const InferenceFunctional& psi, const std::vector<double>& data,
             const VectorXd& pilot, double tol, int max_iter) {
              return solve_z(psi, point_data(data), pilot, tol, max_iter);
          },
          py::arg("psi"), py::arg("data"), py::arg("pilot"), py::arg("tol") = 1e-9,
          py::arg("max_iter") = 80);
    m.def("ecf_phase_estimator",
          [](const std::vector<double>& data, double u, std::optional<double> pilot) {
              return ecf_phase_estimator(data, u, pilot);
          },
          py::arg("data"), py::arg("u"), py::arg("pilot") = std::nullopt);
    m.def("gmm",
          [](const std::vector<InferenceFunctional>& psis, const std::vector<double>& data,
             const VectorXd& pilot, int steps) {
              return gmm(psis, point_data(data), pilot, steps);
          },
          py::arg("psis"), py::arg("data"), py::arg("pilot"), py::arg("steps") = 2);
    m.def("interval_mle_benchmark",
          [](const ModelFamily& model, const BinGrid& grid, const std::vector<long>& counts,
             double pilot) { return interval_mle_benchmark(model, grid, counts, pilot); },
          py::arg("model"), py::arg("grid"), py::arg("counts"), py::arg("pilot"));
    m.def("sample_median", &sample_median);

    // --- information
    m.def("fisher_classical", &fisher_classical, py::arg("model"), py::arg("theta"),
          py::arg("spec") = QuadratureSpec{});
    m.def("fisher_kernel_weighted", &fisher_kernel_weighted, py::arg("model"), py::arg("kernel"),
          py::arg("theta"), py::arg("spec") = QuadratureSpec{}, py::arg("dtheta") = 1e-5);
    m.def("fisher_interval", &fisher_interval, py::arg("model"), py::arg("lo"), py::arg("hi"),
          py::arg("theta"), py::arg("spec") = QuadratureSpec{}, py::arg("dtheta") = 1e-5);
    m.def("grid_information", &grid_information, py::arg("model"), py::arg("grid"),
          py::arg("theta"), py::arg("spec") = QuadratureSpec{}, py::arg("dtheta") = 1e-5);

    py::class_<SinusoidalFamily> sf(m, "SinusoidalFamily");
    sf.def_static("cauchy", &SinusoidalFamily::cauchy)
        .def_static("student", &SinusoidalFamily::student)
        .def_static("gaussian", &SinusoidalFamily::gaussian, py::arg("sigma") = 1.0)
        .def("base_cf", &SinusoidalFamily::base_cf)
        .def("fisher_location", &SinusoidalFamily::fisher_location);
    m.def("godambe_sinusoidal_closed", &godambe_sinusoidal_closed, py::arg("family"), py::arg("c"));
    m.def("locscale_godambe", &locscale_godambe, py::arg("c"), py::arg("sigma"),
          py::arg("base_cf"));
    m.def("elliptical_are", &elliptical_are, py::arg("a"), py::arg("sigma"), py::arg("c"));
    m.def("elliptical_are_general", &elliptical_are_general, py::arg("v"), py::arg("a"),
          py::arg("sigma"));

    py::class_<GodambeResult>(m, "GodambeResult")
        .def_readonly("G", &GodambeResult::G)
        .def_readonly("S", &GodambeResult::S)
        .def_readonly("V", &GodambeResult::V);
    m.def("godambe_numeric", &godambe_numeric, py::arg("psi"), py::arg("model"), py::arg("op"),
          py::arg("theta"), py::arg("spec") = QuadratureSpec{});

    py::class_<InformationReport>(m, "InformationReport")
        .def_readonly("I_classical", &InformationReport::I_classical)
        .def_readonly("I_O", &InformationReport::I_O)
        .def_readonly("G_psi", &InformationReport::G_psi)
        .def_readonly("observation_cost", &InformationReport::observation_cost)
        .def_readonly("estimation_cost", &InformationReport::estimation_cost)
        .def_readonly("operator_id", &InformationReport::operator_id)
        .def_readonly("functional_id", &InformationReport::functional_id)
        .def_readonly("observation_gap_min_eig", &InformationReport::observation_gap_min_eig)
        .def_readonly("estimation_gap_min_eig", &InformationReport::estimation_gap_min_eig)
        .def("hierarchy_ok", &InformationReport::hierarchy_ok, py::arg("tol") = 1e-6);
    m.def("hierarchy_report", &hierarchy_report, py::arg("model"), py::arg("op"), py::arg("psi"),
          py::arg("theta"), py::arg("spec") = QuadratureSpec{});

    py::class_<ArePoint>(m, "ArePoint")
        .def_readonly("c", &ArePoint::c)
        .def_readonly("godambe", &ArePoint::godambe)
        .def_readonly("fisher", &ArePoint::fisher)
        .def_readonly("are", &ArePoint::are);
    py::class_<AreCurve>(m, "AreCurve")
        .def_readonly("points", &AreCurve::points)
        .def_readonly("argmax", &AreCurve::argmax)
        .def_readonly("small_c_limit", &AreCurve::small_c_limit)
        .def_readonly("limit_defined", &AreCurve::limit_defined)
        .def_readonly("note", &AreCurve::note);
    m.def("are_curve", &are_curve, py::arg("family"), py::arg("c_grid"));

    // --- nuisance
    py::class_<PartitionedModel>(m, "PartitionedModel")
        .def(py::init([](const ModelFamily& model, const std::vector<int>& interest,
                         const std::vector<int>& nuisance) {
                 PartitionedModel pm{model, interest, nuisance};
                 pm.validate();
                 return pm;
             }),
             py::arg("model"), py::arg("interest"), py::arg("nuisance"));
    m.def("bhapkar_godambe_project", &bhapkar_godambe_project, py::arg("phi"), py::arg("pm"),
          py::arg("theta"), py::arg("spec") = QuadratureSpec{});
    m.def("projection_coefficient", &projection_coefficient, py::arg("phi"), py::arg("pm"),
          py::arg("theta"), py::arg("spec") = QuadratureSpec{});
    m.def("nuisance_godambe", &nuisance_godambe, py::arg("psi"), py::arg("pm"), py::arg("theta"),
          py::arg("spec") = QuadratureSpec{});

    // --- experiments
    py::class_<SimulationRow>(m, "SimulationRow")
        .def_readonly("family", &SimulationRow::family)
        .def_readonly("estimator", &SimulationRow::estimator)
        .def_readonly("bias", &SimulationRow::bias)
        .def_readonly("variance", &SimulationRow::variance)
        .def_readonly("mse", &SimulationRow::mse)
        .def_readonly("mad", &SimulationRow::mad)
        .def_readonly("mean_sandwich", &SimulationRow::mean_sandwich)
        .def_readonly("replications_used", &SimulationRow::replications_used)
        .def_readonly("failures", &SimulationRow::failures);
    m.def("run_simulate",
          [](const ModelFamily& model, double theta, long n, int replications, std::uint64_t seed,
             int workers, const std::vector<std::string>& estimators, double u, double c) {
              SimulateSpec spec;
              spec.model = model;
              spec.family_label = model.name;
              spec.theta_true = VectorXd::Constant(1, theta);
              spec.n = n;
              spec.replications = replications;
              spec.seed = seed;
              spec.workers = workers;
              spec.estimators = estimators;
              spec.u = u;
              spec.c = c;
              return run_simulate(spec);
          },
          py::arg("model"), py::arg("theta"), py::arg("n"), py::arg("replications"),
          py::arg("seed") = 0, py::arg("workers") = 1,
          py::arg("estimators") = std::vector<std::string>{"mean", "median", "weak"},
          py::arg("u") = 1.0, py::arg("c") = 1.0);
}
