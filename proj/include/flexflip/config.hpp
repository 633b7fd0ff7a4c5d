#pragma once

#include "flexflip/energy_field.hpp"
#include "flexflip/finger.hpp"
#include "flexflip/grasp.hpp"
#include "flexflip/sweep.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flexflip {

/// Energy/friction field grid. Unset extents default to the half-disk
/// [-L, L] x [0, L] of the configured rod.
struct FieldConfig {
    std::optional<double> px_min, px_max, pz_min, pz_max;  // mm
    int nx = 41;
    int nz = 21;
    double max_failure_fraction = 0.6;  // unconverged share of reachable cells

    GridSpec grid(const RodSpec& rod) const;
};

struct SweepConfig {
    Lattice lattice = Lattice::hardware();
    double ramp_start = 0.0;  // MPa
    double ramp_end = 0.3;    // MPa
    int ramp_samples = 61;
    double mu_available = 0.6;
    GraspThresholds thresholds;
    double x_fraction = 0.8;            // feasible-x rule
    double max_failure_fraction = 0.05; // Unconverged share of the lattice
};

struct OutputConfig {
    std::string directory = "out";
    int precision = 9;
};

struct RunConfig {
    RodSpec rod{125.0, 1.0, 100};
    FingerSpec finger;
    HandGeometry geometry;
    HandConfig hand;  // finger-path configuration; delta and mount angle also seed the sweep
    SolverConfig solver;
    FieldConfig field;
    SweepConfig sweep;
    OutputConfig output;

    void validate() const;
    PressureRamp ramp() const;
    AttemptSetup attempt_setup() const;
    /// Canonical TOML of every resolved value.
    std::string to_toml() const;
};

/// Built-in defaults, then the file at `path` (if any), then `key=value`
/// overrides of the form block.key=value. `nondimensional` fixes L = R_f = 1
/// after everything else. Throws ConfigError on unreadable files, syntax
/// errors, unknown keys, wrong types or values that fail validation.
RunConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides = {},
                      bool nondimensional = false);

/// Same as load_config for in-memory TOML text.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                       bool nondimensional = false);

}  // namespace flexflip
