#include "flexflip/config.hpp"
#include "flexflip/elastica.hpp"
#include "flexflip/energy_field.hpp"
#include "flexflip/errors.hpp"
#include "flexflip/finger.hpp"
#include "flexflip/grasp.hpp"
#include "flexflip/io.hpp"
#include "flexflip/sweep.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace flexflip;

namespace {

using Array = py::array_t<double>;

RunConfig config_of(const std::optional<std::string>& path, const std::vector<std::string>& overrides,
                    bool nondimensional) {
    return load_config(path, overrides, nondimensional);
}

Array points_array(const std::vector<Vec2>& pts) {
    Array a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
    auto m = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        m(i, 0) = pts[i].x();
        m(i, 1) = pts[i].y();
    }
    return a;
}

py::dict solve(double px, double pz, double length, double rigidity, int segments) {
    const RodSpec rod{length, rigidity, segments};
    const ContactSolution s = solve_min_energy_shape(rod, {px, pz});
    py::dict d;
    d["converged"] = s.converged;
    d["energy"] = s.energy;
    d["force"] = py::make_tuple(s.force.x(), s.force.y());
    d["mu_min"] = s.friction.feasible ? s.friction.mu : std::numeric_limits<double>::infinity();
    d["near_singular"] = s.near_singular;
    d["iterations"] = s.iterations;
    d["phi"] = s.shape.phi;
    d["nodes"] = points_array(s.shape.nodes());
    d["inflections"] = s.converged ? inflection_count(s.shape) : -1;
    return d;
}

py::dict energy_field(const std::optional<std::string>& config, const std::vector<std::string>& overrides,
                      bool nondimensional, int threads) {
    const RunConfig cfg = config_of(config, overrides, nondimensional);
    const GridSpec g = cfg.field.grid(cfg.rod);
    const EnergyField f = compute_energy_field(cfg.rod, g, cfg.solver, threads);
    const std::vector<py::ssize_t> shape{g.nz, g.nx};
    Array energy(shape), gx(shape), gz(shape), mu(shape);
    py::array_t<bool> reachable(shape), converged(shape);
    auto e = energy.mutable_unchecked<2>();
    auto fx = gx.mutable_unchecked<2>();
    auto fz = gz.mutable_unchecked<2>();
    auto m = mu.mutable_unchecked<2>();
    auto r = reachable.mutable_unchecked<2>();
    auto c = converged.mutable_unchecked<2>();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const FieldCell& cell = f.at(i, j);
            const bool ok = cell.reachable && cell.converged;
            e(j, i) = ok ? cell.energy : nan;
            fx(j, i) = ok ? cell.force.x() : nan;
            fz(j, i) = ok ? cell.force.y() : nan;
            m(j, i) = !ok ? nan : cell.friction.feasible ? cell.friction.mu : std::numeric_limits<double>::infinity();
            r(j, i) = cell.reachable;
            c(j, i) = cell.converged;
        }
    std::vector<double> px(g.nx), pz(g.nz);
    for (int i = 0; i < g.nx; ++i) px[i] = g.px(i);
    for (int j = 0; j < g.nz; ++j) pz[j] = g.pz(j);
    py::dict d;
    d["px"] = px;
    d["pz"] = pz;
    d["energy"] = energy;
    d["grad_x"] = gx;
    d["grad_z"] = gz;
    d["mu_min"] = mu;
    d["reachable"] = reachable;
    d["converged"] = converged;
    return d;
}

HandConfig hand_of(const RunConfig& cfg, double x, double z, double theta) {
    HandConfig h = cfg.hand;
    h.x = x;
    h.z = z;
    h.theta = theta;
    return h;
}

py::dict finger_path(double x, double z, double theta, const std::optional<std::string>& config,
                     const std::vector<std::string>& overrides) {
    const RunConfig cfg = config_of(config, overrides, false);
    const FingertipPath p = nominal_tip_path(cfg.finger, hand_of(cfg, x, z, theta), cfg.ramp(), cfg.geometry,
                                             cfg.rod.length);
    py::dict d;
    d["pressure"] = p.pressure;
    d["curvature"] = p.curvature;
    d["tip"] = points_array(p.points);
    d["clamped"] = std::vector<bool>(p.clamped.begin(), p.clamped.end());
    return d;
}

py::dict outcome_dict(const AttemptOutcome& o) {
    py::dict d;
    d["label"] = to_string(o.label);
    d["energy_at_separation"] = o.energy_at_separation;
    d["flip_angle"] = o.flip_angle;
    d["mu_min_max"] = o.mu_min_max;
    return d;
}

py::dict classify(double x, double z, double theta, const std::optional<std::string>& config,
                  const std::vector<std::string>& overrides) {
    const RunConfig cfg = config_of(config, overrides, false);
    return outcome_dict(classify_attempt(cfg.attempt_setup(), hand_of(cfg, x, z, theta)));
}

py::dict fit_dict(const FitReport& r) {
    py::dict d;
    d["status"] = r.status;
    if (r.interval) d["x_interval"] = py::make_tuple(r.interval->x_min, r.interval->x_max);
    else d["x_interval"] = py::none();
    if (r.fit) {
        d["slope"] = r.fit->slope;
        d["intercept"] = r.fit->intercept;
        d["rms"] = r.fit->residual_rms;
        d["n"] = r.fit->n_points;
    }
    return d;
}

py::dict run_sweep(const std::optional<std::string>& config, const std::vector<std::string>& overrides,
                   int threads) {
    const RunConfig cfg = config_of(config, overrides, false);
    const SweepResult r = sweep(cfg.attempt_setup(), cfg.sweep.lattice, cfg.hand, threads);
    std::vector<double> xs, zs, ts, energy, flip;
    std::vector<std::string> labels;
    for (const auto& e : r.entries) {
        xs.push_back(e.config.x);
        zs.push_back(e.config.z);
        ts.push_back(e.config.theta);
        labels.push_back(to_string(e.outcome.label));
        energy.push_back(e.outcome.energy_at_separation);
        flip.push_back(e.outcome.flip_angle);
    }
    py::dict d;
    d["x"] = xs;
    d["z"] = zs;
    d["theta"] = ts;
    d["label"] = labels;
    d["energy_at_separation"] = energy;
    d["flip_angle"] = flip;
    d["fit"] = fit_dict(fit_report(r, cfg.sweep.x_fraction));
    d["csv"] = sweep_csv(r, cfg.output.precision);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Elastica contact solver and flex-and-flip grasp simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<UnreachableEndpoint>(m, "UnreachableEndpoint", PyExc_ValueError);
    py::register_exception<DegenerateFit>(m, "DegenerateFit", PyExc_RuntimeError);
    py::register_exception<NoSuccesses>(m, "NoSuccesses", PyExc_RuntimeError);

    m.def("solve", &solve, "Minimum-energy rod shape for a contact endpoint.", py::arg("px"), py::arg("pz"),
          py::arg("length") = 1.0, py::arg("rigidity") = 1.0, py::arg("segments") = 100);
    m.def("energy_field", &energy_field, "Energy, gradient and friction bound over the configured grid.",
          py::arg("config") = py::none(), py::arg("overrides") = std::vector<std::string>{},
          py::arg("nondimensional") = false, py::arg("threads") = 1);
    m.def("finger_path", &finger_path, "Nominal fingertip path over the pressure ramp.", py::arg("x"),
          py::arg("z"), py::arg("theta"), py::arg("config") = py::none(),
          py::arg("overrides") = std::vector<std::string>{});
    m.def("classify", &classify, "Outcome of one grasp attempt.", py::arg("x"), py::arg("z"), py::arg("theta"),
          py::arg("config") = py::none(), py::arg("overrides") = std::vector<std::string>{});
    m.def("sweep", &run_sweep, "Classify every lattice configuration and fit the band.",
          py::arg("config") = py::none(), py::arg("overrides") = std::vector<std::string>{},
          py::arg("threads") = 1);
    m.def(
        "fit_affine",
        [](const std::vector<double>& z, const std::vector<double>& theta) {
            if (z.size() != theta.size()) throw InvalidArgument("z and theta differ in length");
            std::vector<std::pair<double, double>> pts;
            for (std::size_t k = 0; k < z.size(); ++k) pts.emplace_back(z[k], theta[k]);
            const AffineFit f = fit_affine(pts);
            return py::make_tuple(f.slope, f.intercept, f.residual_rms, f.n_points);
        },
        "Least-squares theta = slope z + intercept; returns (slope, intercept, rms, n).", py::arg("z"),
        py::arg("theta"));
    m.def(
        "fit_sweep_csv",
        [](const std::string& text, double x_fraction) {
            return fit_dict(fit_report(sweep_from_rows(parse_sweep_csv(text)), x_fraction));
        },
        "Feasible x interval and band fit of a sweep CSV.", py::arg("text"), py::arg("x_fraction") = 0.8);
    m.def(
        "resolved_config",
        [](const std::optional<std::string>& config, const std::vector<std::string>& overrides,
           bool nondimensional) { return config_of(config, overrides, nondimensional).to_toml(); },
        "Fully resolved configuration as TOML.", py::arg("config") = py::none(),
        py::arg("overrides") = std::vector<std::string>{}, py::arg("nondimensional") = false);
    m.attr("__version__") = FLEXFLIP_VERSION;
}
