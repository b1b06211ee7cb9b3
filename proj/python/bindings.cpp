// pybind11 module exposing the main operations: fields as numpy arrays
// of shape (height, width), scanpaths as Fixation lists.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wavefoa/dataset_io.hpp"
#include "wavefoa/metrics.hpp"
#include "wavefoa/oracles.hpp"
#include "wavefoa/run_config.hpp"

namespace py = pybind11;
using namespace wavefoa;

namespace {

ScalarField field_from_array(const py::array_t<double, py::array::c_style |
                                                           py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw GridMismatchError("expected a 2-D array (height, width)");
    const Grid g(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
    std::vector<double> values(arr.data(), arr.data() + arr.size());
    return ScalarField(g, std::move(values));
}

py::array_t<double> array_from_field(const ScalarField& f) {
    py::array_t<double> arr({f.height(), f.width()});
    std::copy(f.values().begin(), f.values().end(), arr.mutable_data());
    return arr;
}

std::vector<Frame> frames_from_arrays(const std::vector<py::array_t<double>>& images,
                                      double fps) {
    if (fps <= 0.0) throw ConfigError("fps must be > 0");
    std::vector<Frame> frames;
    frames.reserve(images.size());
    for (size_t i = 0; i < images.size(); ++i)
        frames.push_back({field_from_array(images[i]), static_cast<double>(i) / fps});
    return frames;
}

FixationSet fixations_from_array(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& pts) {
    if (pts.ndim() != 2 || pts.shape(1) != 2)
        throw ConfigError("fixation points must be an (n, 2) array of (x, y)");
    FixationSet fix;
    for (py::ssize_t i = 0; i < pts.shape(0); ++i)
        fix.points.push_back({pts.at(i, 0), pts.at(i, 1)});
    return fix;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Damped-wave focus-of-attention simulation";

    py::register_exception<OutOfDomainError>(m, "OutOfDomainError");
    py::register_exception<SolverDivergedError>(m, "SolverDivergedError");
    py::register_exception<UnstableSchemeError>(m, "UnstableSchemeError");
    py::register_exception<Error>(m, "WavefoaError");

    py::class_<Grid>(m, "Grid")
        .def(py::init<int, int>(), py::arg("width"), py::arg("height"))
        .def_readonly("width", &Grid::width)
        .def_readonly("height", &Grid::height);

    py::enum_<Scheme>(m, "Scheme")
        .value("EXPLICIT", Scheme::Explicit)
        .value("IMPLICIT", Scheme::Implicit);

    py::class_<PdeParams>(m, "PdeParams")
        .def(py::init<>())
        .def(py::init([](double m_, double d, double c, double tau) {
                 return PdeParams{m_, d, c, tau};
             }),
             py::arg("m"), py::arg("d"), py::arg("c") = 1.0, py::arg("tau") = 0.04)
        .def_readwrite("m", &PdeParams::m)
        .def_readwrite("d", &PdeParams::d)
        .def_readwrite("c", &PdeParams::c)
        .def_readwrite("tau", &PdeParams::tau)
        .def_static("heat_preset", &PdeParams::heat_preset, py::arg("tau") = 0.04)
        .def_static("damped_wave_preset", &PdeParams::damped_wave_preset,
                    py::arg("tau") = 0.04);

    py::class_<MassParams>(m, "MassParams")
        .def(py::init<>())
        .def_readwrite("alpha1", &MassParams::alpha1)
        .def_readwrite("alpha2", &MassParams::alpha2)
        .def_readwrite("k", &MassParams::k)
        .def_readwrite("beta", &MassParams::beta)
        .def_readwrite("sigma", &MassParams::sigma)
        .def_readwrite("gamma", &MassParams::gamma);

    py::class_<DynamicsParams>(m, "DynamicsParams")
        .def(py::init<>())
        .def_readwrite("lambda_", &DynamicsParams::lambda)
        .def_readwrite("v_fix", &DynamicsParams::v_fix)
        .def_readwrite("t_fix", &DynamicsParams::t_fix)
        .def_readwrite("jitter", &DynamicsParams::jitter)
        .def_readwrite("seed", &DynamicsParams::seed);

    py::class_<Fixation>(m, "Fixation")
        .def(py::init<>())
        .def(py::init([](double x, double y, double onset, double duration) {
                 return Fixation{x, y, onset, duration};
             }),
             py::arg("x"), py::arg("y"), py::arg("onset"), py::arg("duration"))
        .def_readwrite("x", &Fixation::x)
        .def_readwrite("y", &Fixation::y)
        .def_readwrite("onset", &Fixation::onset)
        .def_readwrite("duration", &Fixation::duration)
        .def("__repr__", [](const Fixation& f) {
            return "Fixation(x=" + std::to_string(f.x) + ", y=" + std::to_string(f.y) +
                   ", onset=" + std::to_string(f.onset) +
                   ", duration=" + std::to_string(f.duration) + ")";
        });

    py::class_<Scanpath>(m, "Scanpath")
        .def(py::init<>())
        .def_readwrite("stimulus_id", &Scanpath::stimulus_id)
        .def_readwrite("fixations", &Scanpath::fixations);

    py::class_<SimulationParams>(m, "SimulationParams")
        .def(py::init<>())
        .def_readwrite("pde", &SimulationParams::pde)
        .def_readwrite("mass", &SimulationParams::mass)
        .def_readwrite("dyn", &SimulationParams::dyn)
        .def_readwrite("scheme", &SimulationParams::scheme)
        .def_readwrite("duration", &SimulationParams::duration)
        .def_readwrite("threads", &SimulationParams::threads);

    py::class_<SimulationResult>(m, "SimulationResult")
        .def_readonly("scanpath", &SimulationResult::scanpath)
        .def_readonly("steps", &SimulationResult::steps)
        .def_property_readonly(
            "potential",
            [](const SimulationResult& r) { return array_from_field(r.potential); })
        .def_property_readonly(
            "inhibition",
            [](const SimulationResult& r) { return array_from_field(r.inhibition.level); })
        .def_property_readonly("trajectory", [](const SimulationResult& r) {
            py::array_t<double> arr({static_cast<py::ssize_t>(r.trajectory.size()),
                                     static_cast<py::ssize_t>(3)});
            auto a = arr.mutable_unchecked<2>();
            for (py::ssize_t i = 0; i < a.shape(0); ++i) {
                a(i, 0) = r.trajectory[static_cast<size_t>(i)].t;
                a(i, 1) = r.trajectory[static_cast<size_t>(i)].pos.x;
                a(i, 2) = r.trajectory[static_cast<size_t>(i)].pos.y;
            }
            return arr;
        });

    py::class_<MetricReport>(m, "MetricReport")
        .def_readonly("auc", &MetricReport::auc)
        .def_readonly("nss", &MetricReport::nss)
        .def_readonly("sed_mean", &MetricReport::sed_mean)
        .def_readonly("sed_best", &MetricReport::sed_best)
        .def_readonly("stde_mean", &MetricReport::stde_mean)
        .def_readonly("stde_best", &MetricReport::stde_best);

    py::class_<ConvergenceReport>(m, "ConvergenceReport")
        .def_readonly("c_values", &ConvergenceReport::c_values)
        .def_readonly("wave_error", &ConvergenceReport::wave_error)
        .def_readonly("heat_error", &ConvergenceReport::heat_error)
        .def_readonly("wave_strictly_decreasing",
                      &ConvergenceReport::wave_strictly_decreasing)
        .def_readonly("heat_strictly_decreasing",
                      &ConvergenceReport::heat_strictly_decreasing);

    // Field operations.
    m.def(
        "laplacian_5pt",
        [](const py::array_t<double>& f, int threads) {
            return array_from_field(laplacian_5pt(field_from_array(f), threads));
        },
        py::arg("field"), py::arg("threads") = 1);
    m.def("apply_dirichlet", [](const py::array_t<double>& f) {
        return array_from_field(apply_dirichlet(field_from_array(f)));
    });
    m.def(
        "bilinear_sample",
        [](const py::array_t<double>& f, double x, double y) {
            return bilinear_sample(field_from_array(f), {x, y});
        },
        py::arg("field"), py::arg("x"), py::arg("y"));
    m.def(
        "gradient_at",
        [](const py::array_t<double>& f, double x, double y) {
            const Vec2 g = gradient_at(field_from_array(f), {x, y});
            return py::make_tuple(g.x, g.y);
        },
        py::arg("field"), py::arg("x"), py::arg("y"));

    // Solvers and oracles.
    m.def(
        "solve_poisson",
        [](const py::array_t<double>& mass, double rel_tol, int threads) {
            return array_from_field(solve_poisson(field_from_array(mass), rel_tol, threads));
        },
        py::arg("mass"), py::arg("rel_tol") = 1e-8, py::arg("threads") = 1);
    m.def("stability_bound", &stability_bound, py::arg("params"));
    m.def("analytic_point_mass_wave", &analytic_point_mass_wave, py::arg("r"), py::arg("t"),
          py::arg("c"));
    m.def("analytic_heat_kernel", &analytic_heat_kernel, py::arg("r"), py::arg("t"),
          py::arg("c"));
    m.def(
        "gravitational_gradient_bruteforce",
        [](const py::array_t<double>& mass, double x, double y) {
            const Vec2 g = gravitational_gradient_bruteforce(field_from_array(mass), {x, y});
            return py::make_tuple(g.x, g.y);
        },
        py::arg("mass"), py::arg("x"), py::arg("y"));
    m.def(
        "verify_limit",
        [](const py::array_t<double>& mass, std::vector<double> c_list, double settle_time,
           double tau, int threads) {
            VerifyLimitOptions opt;
            opt.tau = tau;
            opt.threads = threads;
            return verify_limit(field_from_array(mass), std::move(c_list), settle_time, opt);
        },
        py::arg("mass"), py::arg("c_list"), py::arg("settle_time"), py::arg("tau") = 0.04,
        py::arg("threads") = 1);
    m.def(
        "three_blob_mass",
        [](int width, int height, double amplitude) {
            return array_from_field(three_blob_mass(Grid(width, height), amplitude));
        },
        py::arg("width"), py::arg("height"), py::arg("amplitude") = 1.0);

    // One PDE step from an explicit history pair.
    m.def(
        "step_potential",
        [](const py::array_t<double>& curr, const py::array_t<double>& prev,
           const py::array_t<double>& mass, const PdeParams& params, Scheme scheme,
           int threads) {
            PotentialState state(field_from_array(curr), field_from_array(prev), 0, params);
            StepOptions opt;
            opt.scheme = scheme;
            opt.threads = threads;
            const PotentialState next = step(state, field_from_array(mass), opt);
            return py::make_tuple(array_from_field(next.current()),
                                  array_from_field(next.previous()));
        },
        py::arg("curr"), py::arg("prev"), py::arg("mass"), py::arg("params"),
        py::arg("scheme") = Scheme::Implicit, py::arg("threads") = 1);

    // Simulation.
    m.def(
        "simulate",
        [](const std::vector<py::array_t<double>>& images, const SimulationParams& params,
           double fps, const std::string& stimulus_id) {
            return simulate(frames_from_arrays(images, fps), params, stimulus_id);
        },
        py::arg("images"), py::arg("params") = SimulationParams{}, py::arg("fps") = 25.0,
        py::arg("stimulus_id") = std::string());
    m.def(
        "accumulate_saliency",
        [](const std::vector<Scanpath>& paths, int width, int height, double sigma_map) {
            return array_from_field(
                accumulate_saliency(paths, Grid(width, height), sigma_map));
        },
        py::arg("paths"), py::arg("width"), py::arg("height"), py::arg("sigma_map"));

    // Metrics.
    m.def(
        "nss",
        [](const py::array_t<double>& sal, const py::array_t<double>& pts) {
            return nss(field_from_array(sal), fixations_from_array(pts));
        },
        py::arg("saliency"), py::arg("fixations"));
    m.def(
        "auc_judd",
        [](const py::array_t<double>& sal, const py::array_t<double>& pts) {
            return auc_judd(field_from_array(sal), fixations_from_array(pts));
        },
        py::arg("saliency"), py::arg("fixations"));
    m.def(
        "sed",
        [](const Scanpath& a, const Scanpath& b, int width, int height, int rows, int cols) {
            return sed(a, b, Grid(width, height), rows, cols);
        },
        py::arg("a"), py::arg("b"), py::arg("width"), py::arg("height"), py::arg("rows") = 5,
        py::arg("cols") = 5);
    m.def(
        "stde",
        [](const Scanpath& a, const Scanpath& b, int width, int height, int k) {
            return stde(a, b, Grid(width, height), k);
        },
        py::arg("a"), py::arg("b"), py::arg("width"), py::arg("height"), py::arg("k") = 3);
    m.def(
        "aggregate",
        [](const std::vector<Scanpath>& model, const std::vector<Scanpath>& human, int width,
           int height, int sed_rows, int sed_cols, int stde_k) {
            return aggregate(model, human, Grid(width, height),
                             MetricsConfig{sed_rows, sed_cols, stde_k});
        },
        py::arg("model_paths"), py::arg("human_paths"), py::arg("width"), py::arg("height"),
        py::arg("sed_rows") = 5, py::arg("sed_cols") = 5, py::arg("stde_k") = 3);

    // Dataset I/O.
    m.def("load_pgm", [](const std::string& path) {
        const Frame f = load_pgm(path);
        return array_from_field(f.brightness);
    });
    m.def(
        "write_saliency_pgm",
        [](const std::string& path, const py::array_t<double>& f) {
            const SaliencyScale s = write_saliency_pgm(path, field_from_array(f));
            return py::make_tuple(s.min, s.max);
        },
        py::arg("path"), py::arg("field"));
    m.def("load_saliency_pgm", [](const std::string& path) {
        return array_from_field(load_saliency_pgm(path));
    });
    m.def(
        "write_scanpath_json",
        [](const std::string& path, const Scanpath& sp, std::uint64_t seed,
           const std::string& model) { write_scanpath_json(path, sp, seed, model); },
        py::arg("path"), py::arg("scanpath"), py::arg("seed") = 0, py::arg("model") = "DW");
    m.def(
        "read_scanpath_json",
        [](const std::string& path) { return read_scanpath_json(path); },
        py::arg("path"));
}
