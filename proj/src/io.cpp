#include "flexflip/io.hpp"

#include "flexflip/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#ifndef FLEXFLIP_VERSION
#define FLEXFLIP_VERSION "0.0.0"
#endif

namespace flexflip {

namespace fs = std::filesystem;

std::string format_number(double v, int precision) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

std::string field_csv(const EnergyField& field, bool with_mu, int precision) {
    const auto grad = energy_gradient_field(field);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(field.cells.size());
    for (std::size_t k = 0; k < field.cells.size(); ++k) {
        const FieldCell& c = field.cells[k];
        std::string mu;
        if (with_mu && c.reachable && c.converged)
            mu = c.friction.feasible ? format_number(c.friction.mu, precision) : "inf";
        rows.push_back({format_number(c.px, precision), format_number(c.pz, precision),
                        format_number(c.energy, precision),
                        grad[k] ? format_number(grad[k]->x(), precision) : "",
                        grad[k] ? format_number(grad[k]->y(), precision) : "", mu, c.reachable ? "1" : "0",
                        c.converged ? "1" : "0"});
    }
    return csv_text({"px_mm", "pz_mm", "energy", "grad_x", "grad_y", "mu_min", "reachable", "converged"}, rows);
}

std::string shapes_csv(const EnergyField& field, const std::vector<RodShape>& shapes, int precision) {
    if (shapes.size() != field.cells.size()) throw InvalidArgument("one shape per field cell expected");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < field.cells.size(); ++k) {
        const FieldCell& c = field.cells[k];
        if (!c.converged || shapes[k].phi.empty()) continue;
        const auto nodes = shapes[k].nodes();
        for (std::size_t i = 0; i < nodes.size(); ++i)
            rows.push_back({std::to_string(k), format_number(c.px, precision), format_number(c.pz, precision),
                            format_number(shapes[k].h * static_cast<double>(i), precision),
                            format_number(nodes[i].x(), precision), format_number(nodes[i].y(), precision)});
    }
    return csv_text({"cell", "px_mm", "pz_mm", "s_mm", "x_mm", "z_mm"}, rows);
}

std::string path_csv(const FingertipPath& path, int precision) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < path.size(); ++k)
        rows.push_back({format_number(path.pressure[k], precision), format_number(path.points[k].x(), precision),
                        format_number(path.points[k].y(), precision), path.clamped[k] ? "1" : "0"});
    return csv_text({"pressure_mpa", "tip_x_mm", "tip_z_mm", "clamped"}, rows);
}

std::string sweep_csv(const SweepResult& result, int precision) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(result.entries.size());
    for (const auto& e : result.entries)
        rows.push_back({format_number(e.config.x, precision), format_number(e.config.z, precision),
                        format_number(e.config.theta, precision), to_string(e.outcome.label),
                        format_number(e.outcome.energy_at_separation, precision),
                        format_number(e.outcome.mu_min_max, precision),
                        format_number(e.outcome.flip_angle, precision)});
    return csv_text({"x_mm", "z_mm", "theta_deg", "label", "energy_at_sep", "mu_min_max", "flip_angle_deg"}, rows);
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("sweep CSV line " + std::to_string(line) + ": bad number '" + s + "'");
    }
}

/// Sorted distinct values as an evenly spaced axis.
AxisRange axis_of(const std::set<double>& values, const char* name) {
    const std::vector<double> v(values.begin(), values.end());
    AxisRange a{v.front(), v.back(), v.size() > 1 ? v[1] - v[0] : 1.0};
    const auto expected = a.values();
    bool even = expected.size() == v.size();
    for (std::size_t i = 0; even && i < v.size(); ++i) even = std::abs(expected[i] - v[i]) <= 1e-6 * a.step;
    if (!even) throw InvalidArgument(std::string("sweep CSV ") + name + " values are not evenly spaced");
    return a;
}

std::size_t snap(const std::vector<double>& axis, double v) {
    const auto it = std::lower_bound(axis.begin(), axis.end(), v - 1e-9);
    std::size_t i = static_cast<std::size_t>(it - axis.begin());
    if (i == axis.size() || (i > 0 && v - axis[i - 1] < axis[i] - v)) --i;
    return i;
}

}  // namespace

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("sweep CSV is empty");
    const auto header = split(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"x_mm", "z_mm", "theta_deg", "label"})
        if (!col.count(need)) throw InvalidArgument(std::string("sweep CSV lacks column ") + need);

    std::vector<SweepRow> rows;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw InvalidArgument("sweep CSV line " + std::to_string(n) + " has the wrong column count");
        SweepRow r;
        r.x = parse_number(cells[col["x_mm"]], n);
        r.z = parse_number(cells[col["z_mm"]], n);
        r.theta = parse_number(cells[col["theta_deg"]], n);
        r.label = outcome_from_string(cells[col["label"]]);
        rows.push_back(r);
    }
    return rows;
}

SweepResult sweep_from_rows(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw InvalidArgument("sweep has no rows");
    std::set<double> xs, zs, ts;
    for (const auto& r : rows) {
        xs.insert(r.x);
        zs.insert(r.z);
        ts.insert(r.theta);
    }
    SweepResult out;
    out.lattice = Lattice{axis_of(xs, "x"), axis_of(zs, "z"), axis_of(ts, "theta")};
    const auto points = out.lattice.points();
    if (points.size() != rows.size()) throw InvalidArgument("sweep rows do not fill a complete lattice");
    const auto vx = out.lattice.x.values(), vz = out.lattice.z.values(), vt = out.lattice.theta.values();
    out.entries.resize(points.size());
    std::vector<bool> seen(points.size(), false);
    for (const auto& r : rows) {
        const std::size_t k = (snap(vx, r.x) * vz.size() + snap(vz, r.z)) * vt.size() + snap(vt, r.theta);
        if (seen[k]) throw InvalidArgument("sweep rows repeat a configuration");
        seen[k] = true;
        out.entries[k].config = points[k];
        out.entries[k].outcome.label = r.label;
    }
    out.success_mask.resize(points.size());
    for (std::size_t k = 0; k < points.size(); ++k)
        out.success_mask[k] = out.entries[k].outcome.label == Outcome::Success;
    return out;
}

FitReport fit_report(const SweepResult& result, double x_fraction) {
    FitReport r;
    try {
        r.interval = feasible_x_interval(result, x_fraction);
    } catch (const NoSuccesses&) {
        r.status = "NoSuccesses";
        return r;
    }
    try {
        r.fit = fit_affine(successes_in(result, *r.interval));
        r.status = "ok";
    } catch (const DegenerateFit&) {
        r.status = "DegenerateFit";
    }
    return r;
}

std::string fit_csv(const FitReport& report, int precision) {
    auto num = [precision](const std::optional<double>& v) { return v ? format_number(*v, precision) : ""; };
    std::optional<double> slope, intercept, rms, n, lo, hi;
    if (report.fit) {
        slope = report.fit->slope;
        intercept = report.fit->intercept;
        rms = report.fit->residual_rms;
        n = static_cast<double>(report.fit->n_points);
    }
    if (report.interval) {
        lo = report.interval->x_min;
        hi = report.interval->x_max;
    }
    return csv_text({"status", "slope_deg_per_mm", "intercept_deg", "rms_deg", "n", "x_min_mm", "x_max_mm"},
                    {{report.status, num(slope), num(intercept), num(rms), num(n), num(lo), num(hi)}});
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& config_toml) {
    write_file(dir / "resolved_config.toml", config_toml);
    std::vector<fs::path> csvs;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv") csvs.push_back(entry.path());
    std::sort(csvs.begin(), csvs.end());

    nlohmann::json files = nlohmann::json::object();
    for (const auto& p : csvs) {
        const std::string bytes = read_file(p);
        files[p.filename().string()] = {{"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}};
    }
    nlohmann::json m;
    m["tool"] = "flexflip";
    m["version"] = FLEXFLIP_VERSION;
    m["command"] = command;
    m["config_file"] = "resolved_config.toml";
    m["config_sha256"] = sha256_hex(config_toml);
    m["files"] = files;
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace flexflip
