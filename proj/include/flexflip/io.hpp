#pragma once

#include "flexflip/energy_field.hpp"
#include "flexflip/finger.hpp"
#include "flexflip/sweep.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace flexflip {

/// printf %.{precision}g; +inf as "inf", -inf as "-inf", NaN as the empty
/// field.
std::string format_number(double v, int precision = 9);

/// Header row plus rows, comma separated, LF terminated.
std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

/// Columns px_mm, pz_mm, energy, grad_x, grad_y, mu_min, reachable, converged
/// in row-major order. mu_min stays empty unless `with_mu`; infeasible cells
/// read "inf". Masked cells leave every value column empty.
std::string field_csv(const EnergyField& field, bool with_mu, int precision = 9);

/// Node coordinates of every converged cell: cell, px_mm, pz_mm, s_mm, x_mm,
/// z_mm.
std::string shapes_csv(const EnergyField& field, const std::vector<RodShape>& shapes, int precision = 9);

/// pressure_mpa, tip_x_mm, tip_z_mm, clamped.
std::string path_csv(const FingertipPath& path, int precision = 9);

/// x_mm, z_mm, theta_deg, label, energy_at_sep, mu_min_max, flip_angle_deg.
std::string sweep_csv(const SweepResult& result, int precision = 9);

struct SweepRow {
    double x = 0.0, z = 0.0, theta = 0.0;
    Outcome label = Outcome::NoInteraction;
};

/// Reads the label columns of a sweep CSV. Throws InvalidArgument on a
/// malformed file.
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

/// Rebuilds a SweepResult (configs and labels only) from parsed rows on a
/// complete x/z/theta lattice.
SweepResult sweep_from_rows(const std::vector<SweepRow>& rows);

struct FitReport {
    std::string status;  // "ok", "NoSuccesses" or "DegenerateFit"
    std::optional<AffineFit> fit;
    std::optional<XInterval> interval;
};

/// Feasible x interval, then the affine fit of the successes inside it.
FitReport fit_report(const SweepResult& result, double x_fraction = 0.8);

/// status, slope_deg_per_mm, intercept_deg, rms_deg, n, x_min_mm, x_max_mm.
std::string fit_csv(const FitReport& report, int precision = 9);

std::string sha256_hex(const std::string& bytes);

/// Writes `text` byte for byte.
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

/// resolved_config.toml plus manifest.json in `dir`; the manifest lists the
/// SHA-256 and size of every CSV in the directory.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const std::string& config_toml);

}  // namespace flexflip
