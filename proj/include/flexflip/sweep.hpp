#pragma once

#include "flexflip/grasp.hpp"

#include <utility>
#include <vector>

namespace flexflip {

/// Inclusive arithmetic range start, start + step, ..., <= stop.
struct AxisRange {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    std::vector<double> values() const;
};

/// (x, z, theta) hand-configuration lattice, x outermost.
struct Lattice {
    AxisRange x{30.0, 90.0, 10.0};
    AxisRange z{116.0, 135.0, 1.0};
    AxisRange theta{0.0, 12.0, 1.0};

    /// 7 x 20 x 13 = 1820 configurations.
    static Lattice hardware() { return {}; }
    std::size_t size() const;
    /// Throws InvalidArgument when any axis is empty.
    std::vector<HandConfig> points(const HandConfig& base = {}) const;
};

struct SweepEntry {
    HandConfig config;
    AttemptOutcome outcome;
};

struct SweepResult {
    Lattice lattice;
    std::vector<SweepEntry> entries;  // lattice order
    std::vector<bool> success_mask;

    std::size_t successes() const;
};

/// classify_attempt at every lattice point. `base` supplies delta and the
/// mount angle. The result does not depend on `threads`.
SweepResult sweep(const AttemptSetup& setup, const Lattice& lattice, const HandConfig& base = {},
                  int threads = 1);

struct AffineFit {
    double slope = 0.0;         // deg/mm
    double intercept = 0.0;     // deg
    double residual_rms = 0.0;  // deg
    std::size_t n_points = 0;
};

/// Ordinary least squares of theta on z over (z, theta) pairs. Throws
/// DegenerateFit unless at least two distinct z values are present.
AffineFit fit_affine(const std::vector<std::pair<double, double>>& z_theta);

struct XInterval {
    double x_min = 0.0;
    double x_max = 0.0;
};

/// Widest contiguous run of lattice x values whose success count is at least
/// `fraction` of the best x; ties go to the smaller x. Throws NoSuccesses.
XInterval feasible_x_interval(const SweepResult& result, double fraction = 0.8);

/// (z, theta) of the successes with x inside `interval`.
std::vector<std::pair<double, double>> successes_in(const SweepResult& result, const XInterval& interval);

}  // namespace flexflip
