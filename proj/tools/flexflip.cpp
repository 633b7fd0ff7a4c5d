// flexflip: energy and friction fields, fingertip paths, grasp sweeps and fits.

#include "flexflip/config.hpp"
#include "flexflip/errors.hpp"
#include "flexflip/io.hpp"
#include "flexflip/parallel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace flexflip;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kFailureRate = 3;

struct Common {
    std::optional<std::string> config;
    std::optional<std::string> out;
    int threads = 0;
    std::vector<std::string> overrides;
    bool nondimensional = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "TOML run configuration");
    cmd->add_option("--out", c.out, "output directory (overrides output.directory)");
    cmd->add_option("--threads", c.threads, "worker threads, 0 = hardware concurrency")->check(CLI::NonNegativeNumber);
    cmd->add_option("--set", c.overrides, "override, block.key=value")->allow_extra_args(false);
    cmd->add_flag("--nondimensional", c.nondimensional, "rod length and rigidity set to 1");
}

int thread_count(const Common& c) { return c.threads > 0 ? c.threads : default_thread_count(); }

fs::path output_dir(const Common& c, const RunConfig& cfg) {
    const fs::path dir = c.out ? fs::path(*c.out) : fs::path(cfg.output.directory);
    fs::create_directories(dir);
    return dir;
}

int field_command(const Common& c, bool friction) {
    const RunConfig cfg = load_config(c.config, c.overrides, c.nondimensional);
    const fs::path dir = output_dir(c, cfg);
    std::vector<RodShape> shapes;
    const EnergyField field =
        compute_energy_field(cfg.rod, cfg.field.grid(cfg.rod), cfg.solver, thread_count(c), &shapes);
    const std::string name = friction ? "friction_field.csv" : "energy_field.csv";
    write_file(dir / name, field_csv(field, friction, cfg.output.precision));
    write_file(dir / "shapes.csv", shapes_csv(field, shapes, cfg.output.precision));
    write_manifest(dir, friction ? "friction-field" : "energy-field", cfg.to_toml());

    std::size_t reachable = 0, failed = 0;
    for (const auto& cell : field.cells) {
        reachable += cell.reachable;
        failed += cell.reachable && !cell.converged;
    }
    const double rate = reachable ? static_cast<double>(failed) / reachable : 0.0;
    std::printf("%s: %zu cells, %zu reachable, %zu unconverged\n", name.c_str(), field.cells.size(), reachable,
                failed);
    if (rate > cfg.field.max_failure_fraction) {
        std::fprintf(stderr, "unconverged fraction %.3f exceeds field.max_failure_fraction %.3f\n", rate,
                     cfg.field.max_failure_fraction);
        return kFailureRate;
    }
    return kOk;
}

int finger_path_command(const Common& c, std::optional<double> x, std::optional<double> z,
                        std::optional<double> theta) {
    RunConfig cfg = load_config(c.config, c.overrides, c.nondimensional);
    if (x) cfg.hand.x = *x;
    if (z) cfg.hand.z = *z;
    if (theta) cfg.hand.theta = *theta;
    try {
        cfg.hand.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    const AxisRange& t = cfg.sweep.lattice.theta;
    if (cfg.hand.theta < t.start || cfg.hand.theta > t.stop)
        std::fprintf(stderr, "warning: theta %g deg lies outside the lattice range [%g, %g]\n", cfg.hand.theta,
                     t.start, t.stop);
    const fs::path dir = output_dir(c, cfg);
    const FingertipPath path = nominal_tip_path(cfg.finger, cfg.hand, cfg.ramp(), cfg.geometry, cfg.rod.length);
    const std::string name = "path_x" + format_number(cfg.hand.x) + "_z" + format_number(cfg.hand.z) + "_theta" +
                             format_number(cfg.hand.theta) + ".csv";
    write_file(dir / name, path_csv(path, cfg.output.precision));
    write_manifest(dir, "finger-path", cfg.to_toml());
    std::printf("%s: %zu samples\n", name.c_str(), path.size());
    return kOk;
}

void print_report(const FitReport& r) {
    if (r.interval) std::printf("feasible x: [%g, %g] mm\n", r.interval->x_min, r.interval->x_max);
    if (r.fit)
        std::printf("theta = %.4f z + %.3f  (rms %.3f deg, n = %zu)\n", r.fit->slope, r.fit->intercept,
                    r.fit->residual_rms, r.fit->n_points);
    else
        std::printf("fit: %s\n", r.status.c_str());
}

int sweep_command(const Common& c) {
    const RunConfig cfg = load_config(c.config, c.overrides, c.nondimensional);
    const fs::path dir = output_dir(c, cfg);
    const SweepResult result = sweep(cfg.attempt_setup(), cfg.sweep.lattice, cfg.hand, thread_count(c));
    const FitReport report = fit_report(result, cfg.sweep.x_fraction);
    write_file(dir / "sweep.csv", sweep_csv(result, cfg.output.precision));
    write_file(dir / "fit.csv", fit_csv(report, cfg.output.precision));
    write_manifest(dir, "sweep", cfg.to_toml());

    std::size_t unconverged = 0;
    for (const auto& e : result.entries) unconverged += e.outcome.label == Outcome::Unconverged;
    std::printf("sweep.csv: %zu configurations, %zu successes, %zu unconverged\n", result.entries.size(),
                result.successes(), unconverged);
    print_report(report);
    const double rate = result.entries.empty() ? 0.0 : static_cast<double>(unconverged) / result.entries.size();
    if (rate > cfg.sweep.max_failure_fraction) {
        std::fprintf(stderr, "unconverged fraction %.3f exceeds sweep.max_failure_fraction %.3f\n", rate,
                     cfg.sweep.max_failure_fraction);
        return kFailureRate;
    }
    return kOk;
}

int fit_command(const Common& c, const std::optional<std::string>& input) {
    const RunConfig cfg = load_config(c.config, c.overrides, c.nondimensional);
    const fs::path dir = output_dir(c, cfg);
    const fs::path source = input ? fs::path(*input) : dir / "sweep.csv";
    std::string text;
    try {
        text = read_file(source);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    const FitReport report = fit_report(sweep_from_rows(parse_sweep_csv(text)), cfg.sweep.x_fraction);
    write_file(dir / "fit.csv", fit_csv(report, cfg.output.precision));
    write_manifest(dir, "fit", cfg.to_toml());
    print_report(report);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasistatic flex-and-flip grasp simulator"};
    app.require_subcommand(1);
    Common common;

    auto* energy = app.add_subcommand("energy-field", "minimum flexural energy over contact positions");
    add_common(energy, common);
    auto* friction = app.add_subcommand("friction-field", "energy field with the friction lower bound");
    add_common(friction, common);

    auto* path = app.add_subcommand("finger-path", "nominal fingertip path for one hand configuration");
    add_common(path, common);
    std::optional<double> x, z, theta;
    path->add_option("--x", x, "hand x (mm)");
    path->add_option("--z", z, "hand z (mm)");
    path->add_option("--theta", theta, "hand angle (deg)");

    auto* sweep_cmd = app.add_subcommand("sweep", "classify every lattice configuration and fit the band");
    add_common(sweep_cmd, common);

    auto* fit = app.add_subcommand("fit", "refit an existing sweep CSV");
    add_common(fit, common);
    std::optional<std::string> input;
    fit->add_option("--input", input, "sweep CSV (default <out>/sweep.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*energy) return field_command(common, false);
        if (*friction) return field_command(common, true);
        if (*path) return finger_path_command(common, x, z, theta);
        if (*sweep_cmd) return sweep_command(common);
        if (*fit) return fit_command(common, input);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kOk;
}
