#include "flexflip/config.hpp"

#include "flexflip/errors.hpp"

#define TOML_EXCEPTIONS 1
#include <tomlplusplus/toml.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace flexflip {

GridSpec FieldConfig::grid(const RodSpec& rod) const {
    GridSpec g = GridSpec::half_disk(rod, nx, nz);
    if (px_min) g.px_min = *px_min;
    if (px_max) g.px_max = *px_max;
    if (pz_min) g.pz_min = *pz_min;
    if (pz_max) g.pz_max = *pz_max;
    return g;
}

void RunConfig::validate() const {
    rod.validate();
    finger.validate();
    geometry.validate();
    hand.validate();
    solver.validate();
    field.grid(rod).validate();
    if (!(field.max_failure_fraction >= 0.0 && field.max_failure_fraction <= 1.0))
        throw InvalidArgument("field.max_failure_fraction must lie in [0, 1]");
    ramp().validate(finger);
    sweep.lattice.points(hand);
    if (!(sweep.mu_available >= 0.0)) throw InvalidArgument("sweep.mu_available must be nonnegative");
    sweep.thresholds.validate();
    if (!(sweep.x_fraction > 0.0 && sweep.x_fraction <= 1.0))
        throw InvalidArgument("sweep.x_fraction must lie in (0, 1]");
    if (!(sweep.max_failure_fraction >= 0.0 && sweep.max_failure_fraction <= 1.0))
        throw InvalidArgument("sweep.max_failure_fraction must lie in [0, 1]");
    if (output.precision < 1 || output.precision > 17)
        throw InvalidArgument("output.precision must lie in [1, 17]");
}

PressureRamp RunConfig::ramp() const {
    return PressureRamp::linear(sweep.ramp_start, sweep.ramp_end, sweep.ramp_samples);
}

AttemptSetup RunConfig::attempt_setup() const {
    AttemptSetup s;
    s.rod = rod;
    s.finger = finger;
    s.geometry = geometry;
    s.ramp = ramp();
    s.mu_available = sweep.mu_available;
    s.thresholds = sweep.thresholds;
    s.solver = solver;
    return s;
}

namespace {

enum class Kind { Real, Integer, Text, Budget, Seed };

/// One configurable value: where it lives in the TOML tree and how to read
/// and write it on a RunConfig.
struct Field {
    Kind kind;
    double* real = nullptr;
    int* integer = nullptr;
    std::string* text = nullptr;
    std::optional<double>* optional = nullptr;
    std::uint64_t* seed = nullptr;
};

using Schema = std::map<std::string, std::map<std::string, Field>>;

Field real(double& v) { return {Kind::Real, &v}; }
Field integer(int& v) { return {Kind::Integer, nullptr, &v}; }
Field text(std::string& v) { return {Kind::Text, nullptr, nullptr, &v}; }
Field optional_real(std::optional<double>& v) { return {Kind::Real, nullptr, nullptr, nullptr, &v}; }
Field budget(double& v) { return {Kind::Budget, &v}; }
Field seed(std::uint64_t& v) { return {Kind::Seed, nullptr, nullptr, nullptr, nullptr, &v}; }

Schema schema_of(RunConfig& c) {
    Schema s;
    s["rod"] = {{"length_mm", real(c.rod.length)},
                {"rigidity", real(c.rod.rigidity)},
                {"segments", integer(c.rod.segments)}};
    s["finger"] = {{"arc_length_mm", real(c.finger.arc_length)},
                   {"pressure_gain", real(c.finger.pressure_gain)},
                   {"curvature_offset", real(c.finger.curvature_offset)},
                   {"max_pressure_mpa", real(c.finger.max_pressure)}};
    s["hand"] = {{"x_mm", real(c.hand.x)},
                 {"z_mm", real(c.hand.z)},
                 {"theta_deg", real(c.hand.theta)},
                 {"delta_mm", real(c.hand.delta)},
                 {"inter_finger_angle_deg", real(c.hand.inter_finger_angle)},
                 {"palm_offset_mm", real(c.geometry.palm_offset)},
                 {"base_spacing_mm", real(c.geometry.base_spacing)}};
    s["solver"] = {{"tol_c", real(c.solver.tol_c)},
                   {"tol_g", real(c.solver.tol_g)},
                   {"max_iter", integer(c.solver.max_iter)},
                   {"continuation_steps", integer(c.solver.continuation_steps)},
                   {"seed", seed(c.solver.restart_seed)}};
    s["field"] = {{"px_min_mm", optional_real(c.field.px_min)},
                  {"px_max_mm", optional_real(c.field.px_max)},
                  {"pz_min_mm", optional_real(c.field.pz_min)},
                  {"pz_max_mm", optional_real(c.field.pz_max)},
                  {"nx", integer(c.field.nx)},
                  {"nz", integer(c.field.nz)},
                  {"max_failure_fraction", real(c.field.max_failure_fraction)}};
    auto& l = c.sweep.lattice;
    auto& t = c.sweep.thresholds;
    s["sweep"] = {{"x_min_mm", real(l.x.start)},
                  {"x_max_mm", real(l.x.stop)},
                  {"x_step_mm", real(l.x.step)},
                  {"z_min_mm", real(l.z.start)},
                  {"z_max_mm", real(l.z.stop)},
                  {"z_step_mm", real(l.z.step)},
                  {"theta_min_deg", real(l.theta.start)},
                  {"theta_max_deg", real(l.theta.stop)},
                  {"theta_step_deg", real(l.theta.step)},
                  {"ramp_start_mpa", real(c.sweep.ramp_start)},
                  {"ramp_end_mpa", real(c.sweep.ramp_end)},
                  {"ramp_samples", integer(c.sweep.ramp_samples)},
                  {"mu_available", real(c.sweep.mu_available)},
                  {"engage_tolerance_mm", real(t.engage_tolerance)},
                  {"dwell_fraction", real(t.dwell_fraction)},
                  {"flip_angle_deg", real(t.flip_angle)},
                  {"pocket_margin_mm", real(t.pocket_margin)},
                  {"ke_budget", budget(t.ke_budget)},
                  {"x_fraction", real(c.sweep.x_fraction)},
                  {"max_failure_fraction", real(c.sweep.max_failure_fraction)}};
    s["output"] = {{"directory", text(c.output.directory)}, {"precision", integer(c.output.precision)}};
    return s;
}

[[noreturn]] void type_error(const std::string& key, const char* expected) {
    throw ConfigError("config key '" + key + "' must be " + expected);
}

void assign(const Field& f, const toml::node& node, const std::string& key) {
    switch (f.kind) {
        case Kind::Real: {
            std::optional<double> v;
            if (auto d = node.as_floating_point()) v = d->get();
            else if (auto i = node.as_integer()) v = static_cast<double>(i->get());
            if (!v) type_error(key, "a number");
            if (f.optional) *f.optional = *v;
            else *f.real = *v;
            return;
        }
        case Kind::Integer: {
            auto i = node.as_integer();
            if (!i) type_error(key, "an integer");
            const std::int64_t v = i->get();
            if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
                type_error(key, "an integer in range");
            *f.integer = static_cast<int>(v);
            return;
        }
        case Kind::Text: {
            auto s = node.as_string();
            if (!s) type_error(key, "a string");
            *f.text = s->get();
            return;
        }
        case Kind::Seed: {
            auto i = node.as_integer();
            if (!i || i->get() < 0) type_error(key, "a nonnegative integer");
            *f.seed = static_cast<std::uint64_t>(i->get());
            return;
        }
        case Kind::Budget: {
            if (auto s = node.as_string()) {
                if (s->get() != "ramp_end") type_error(key, "a number or \"ramp_end\"");
                *f.real = std::numeric_limits<double>::infinity();
            } else if (auto d = node.as_floating_point()) {
                *f.real = d->get();
            } else if (auto i = node.as_integer()) {
                *f.real = static_cast<double>(i->get());
            } else {
                type_error(key, "a number or \"ramp_end\"");
            }
            return;
        }
    }
}

void apply_table(RunConfig& cfg, const toml::table& root) {
    Schema schema = schema_of(cfg);
    for (const auto& [block_key, block_node] : root) {
        const std::string block(block_key.str());
        auto it = schema.find(block);
        if (it == schema.end()) throw ConfigError("unknown config block [" + block + "]");
        const toml::table* tbl = block_node.as_table();
        if (!tbl) throw ConfigError("config entry '" + block + "' must be a table");
        for (const auto& [key, node] : *tbl) {
            const std::string name(key.str());
            auto f = it->second.find(name);
            if (f == it->second.end()) throw ConfigError("unknown config key '" + block + "." + name + "'");
            assign(f->second, node, block + "." + name);
        }
    }
}

toml::table parse_toml(const std::string& text, const std::string& origin) {
    try {
        return toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << origin << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
            << e.description();
        throw ConfigError(msg.str());
    }
}

/// block.key=value; the value is read as a TOML literal, falling back to a
/// bare string.
void apply_override(toml::table& root, const std::string& item) {
    const auto eq = item.find('=');
    const auto dot = item.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq || dot == 0 || dot + 1 == eq)
        throw ConfigError("override '" + item + "' is not of the form block.key=value");
    const std::string block = item.substr(0, dot);
    const std::string key = item.substr(dot + 1, eq - dot - 1);
    const std::string value = item.substr(eq + 1);
    toml::table parsed;
    try {
        parsed = toml::parse("v = " + value);
    } catch (const toml::parse_error&) {
        toml::table t;
        t.insert("v", value);
        parsed = std::move(t);
    }
    auto* tbl = root[block].as_table();
    if (!tbl) {
        root.insert_or_assign(block, toml::table{});
        tbl = root[block].as_table();
    }
    tbl->insert_or_assign(key, *parsed.get("v"));
}

RunConfig build(toml::table root, const std::vector<std::string>& overrides, bool nondimensional) {
    for (const auto& item : overrides) apply_override(root, item);
    RunConfig cfg;
    apply_table(cfg, root);
    if (nondimensional) {
        cfg.rod.length = 1.0;
        cfg.rod.rigidity = 1.0;
    }
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return cfg;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                       bool nondimensional) {
    return build(parse_toml(text, "config"), overrides, nondimensional);
}

RunConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides,
                      bool nondimensional) {
    if (!path) return build(toml::table{}, overrides, nondimensional);
    std::ifstream in(*path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + *path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return build(parse_toml(buf.str(), *path), overrides, nondimensional);
}

std::string RunConfig::to_toml() const {
    RunConfig copy = *this;
    Schema schema = schema_of(copy);
    const GridSpec g = field.grid(rod);
    copy.field.px_min = g.px_min;
    copy.field.px_max = g.px_max;
    copy.field.pz_min = g.pz_min;
    copy.field.pz_max = g.pz_max;
    toml::table root;
    for (const auto& [block, fields] : schema) {
        toml::table tbl;
        for (const auto& [key, f] : fields) {
            switch (f.kind) {
                case Kind::Real:
                    tbl.insert(key, f.optional ? f.optional->value() : *f.real);
                    break;
                case Kind::Integer: tbl.insert(key, static_cast<std::int64_t>(*f.integer)); break;
                case Kind::Text: tbl.insert(key, *f.text); break;
                case Kind::Seed: tbl.insert(key, static_cast<std::int64_t>(*f.seed)); break;
                case Kind::Budget:
                    if (std::isinf(*f.real)) tbl.insert(key, "ramp_end");
                    else tbl.insert(key, *f.real);
                    break;
            }
        }
        root.insert(block, std::move(tbl));
    }
    std::ostringstream out;
    out << root << "\n";
    return out.str();
}

}  // namespace flexflip
