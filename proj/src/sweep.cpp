#include "flexflip/sweep.hpp"

#include "flexflip/errors.hpp"
#include "flexflip/parallel.hpp"

#include <cmath>
#include <map>

namespace flexflip {

std::vector<double> AxisRange::values() const {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step) || !(step > 0.0))
        throw InvalidArgument("lattice axis needs finite bounds and a positive step");
    std::vector<double> out;
    if (stop < start) return out;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

std::size_t Lattice::size() const { return x.values().size() * z.values().size() * theta.values().size(); }

std::vector<HandConfig> Lattice::points(const HandConfig& base) const {
    const auto xs = x.values(), zs = z.values(), ts = theta.values();
    if (xs.empty() || zs.empty() || ts.empty()) throw InvalidArgument("lattice is empty");
    std::vector<HandConfig> out;
    out.reserve(xs.size() * zs.size() * ts.size());
    for (double xv : xs)
        for (double zv : zs)
            for (double tv : ts) {
                HandConfig c = base;
                c.x = xv;
                c.z = zv;
                c.theta = tv;
                out.push_back(c);
            }
    return out;
}

std::size_t SweepResult::successes() const {
    std::size_t n = 0;
    for (bool b : success_mask) n += b;
    return n;
}

SweepResult sweep(const AttemptSetup& setup, const Lattice& lattice, const HandConfig& base, int threads) {
    const auto configs = lattice.points(base);
    SweepResult result{lattice, std::vector<SweepEntry>(configs.size()),
                       std::vector<bool>(configs.size(), false)};
    parallel_for(configs.size(), threads, [&](std::size_t k) {
        result.entries[k] = {configs[k], classify_attempt(setup, configs[k])};
    });
    for (std::size_t k = 0; k < configs.size(); ++k)
        result.success_mask[k] = result.entries[k].outcome.label == Outcome::Success;
    return result;
}

AffineFit fit_affine(const std::vector<std::pair<double, double>>& z_theta) {
    const std::size_t n = z_theta.size();
    if (n < 2) throw DegenerateFit("affine fit needs at least two points");
    double mz = 0.0, mt = 0.0;
    for (const auto& [z, t] : z_theta) {
        mz += z;
        mt += t;
    }
    mz /= n;
    mt /= n;
    double szz = 0.0, szt = 0.0;
    for (const auto& [z, t] : z_theta) {
        szz += (z - mz) * (z - mz);
        szt += (z - mz) * (t - mt);
    }
    bool distinct = false;
    for (const auto& p : z_theta) distinct = distinct || p.first != z_theta.front().first;
    if (!distinct || !(szz > 0.0)) throw DegenerateFit("affine fit needs at least two distinct z values");

    AffineFit fit;
    fit.slope = szt / szz;
    fit.intercept = mt - fit.slope * mz;
    fit.n_points = n;
    double ss = 0.0;
    for (const auto& [z, t] : z_theta) {
        const double r = t - (fit.intercept + fit.slope * z);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

XInterval feasible_x_interval(const SweepResult& result, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("fraction must lie in (0, 1]");
    const auto xs = result.lattice.x.values();
    std::map<double, std::size_t> counts;
    for (double x : xs) counts[x] = 0;
    for (std::size_t k = 0; k < result.entries.size(); ++k)
        if (result.success_mask[k]) ++counts[result.entries[k].config.x];
    std::size_t best = 0;
    for (const auto& [x, c] : counts) best = std::max(best, c);
    if (best == 0) throw NoSuccesses("sweep has no successful configuration");

    const double need = fraction * static_cast<double>(best);
    bool found = false;
    XInterval chosen;
    std::size_t i = 0;
    while (i < xs.size()) {
        if (counts[xs[i]] == 0 || static_cast<double>(counts[xs[i]]) < need) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < xs.size() && counts[xs[j + 1]] > 0 && static_cast<double>(counts[xs[j + 1]]) >= need)
            ++j;
        const XInterval run{xs[i], xs[j]};
        if (!found || run.x_max - run.x_min > chosen.x_max - chosen.x_min) chosen = run;
        found = true;
        i = j + 1;
    }
    return chosen;
}

std::vector<std::pair<double, double>> successes_in(const SweepResult& result, const XInterval& interval) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 0; k < result.entries.size(); ++k) {
        const HandConfig& c = result.entries[k].config;
        if (result.success_mask[k] && c.x >= interval.x_min && c.x <= interval.x_max)
            out.emplace_back(c.z, c.theta);
    }
    return out;
}

}  // namespace flexflip
