#include "flexflip/elastica.hpp"

#include "flexflip/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <string>

namespace flexflip {

void RodSpec::validate() const {
    if (!(length > 0.0) || !std::isfinite(length))
        throw InvalidArgument("rod length must be positive, got " + std::to_string(length));
    if (!(rigidity > 0.0) || !std::isfinite(rigidity))
        throw InvalidArgument("flexural rigidity must be positive, got " + std::to_string(rigidity));
    if (segments < 8)
        throw InvalidArgument("rod needs at least 8 segments, got " + std::to_string(segments));
}

void SolverConfig::validate() const {
    if (!(tol_c > 0.0) || !(tol_g > 0.0)) throw InvalidArgument("solver tolerances must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    if (continuation_steps < 1) throw InvalidArgument("continuation_steps must be at least 1");
}

////////////////////////////////////////////////////////////////////////////////
// Shape geometry
////////////////////////////////////////////////////////////////////////////////

RodShape RodShape::straight(const RodSpec& rod) {
    return {std::vector<double>(rod.segments + 1, 0.0), rod.segment_length()};
}

std::vector<Vec2> RodShape::nodes() const {
    std::vector<Vec2> out;
    out.reserve(phi.size());
    Vec2 p = Vec2::Zero();
    out.push_back(p);
    for (int j = 0; j < segments(); ++j) {
        p += h * Vec2(std::cos(phi[j]), std::sin(phi[j]));
        out.push_back(p);
    }
    return out;
}

Vec2 RodShape::endpoint() const {
    Vec2 p = Vec2::Zero();
    for (int j = 0; j < segments(); ++j) p += Vec2(std::cos(phi[j]), std::sin(phi[j]));
    return h * p;
}

std::vector<double> RodShape::curvature() const {
    std::vector<double> k(segments());
    for (int i = 0; i < segments(); ++i) k[i] = (phi[i + 1] - phi[i]) / h;
    return k;
}

Vec2 RodShape::end_tangent() const {
    return {std::cos(phi.back()), std::sin(phi.back())};
}

double flexural_energy(const RodShape& shape, double rigidity) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < shape.phi.size(); ++i) {
        const double d = shape.phi[i + 1] - shape.phi[i];
        sum += d * d;
    }
    return 0.5 * rigidity * sum / shape.h;
}

bool is_reachable(const RodSpec& rod, const Vec2& p, double tol_c) {
    return p.allFinite() && p.y() >= 0.0 && p.norm() <= rod.length * (1.0 + tol_c);
}

////////////////////////////////////////////////////////////////////////////////
// KKT system
////////////////////////////////////////////////////////////////////////////////
// Unknowns are phi_1..phi_N followed by (lambda_x, lambda_z). The stationarity
// rows read dU/dphi_i - (J^T lambda)_i with J = d(endpoint)/dphi.

namespace {

constexpr double kMaxAngleStep = 0.5;  // rad per Newton update
constexpr int kMaxHalvings = 8;
constexpr int kMaxStalledIterations = 6;

struct KktState {
    Eigen::VectorXd phi;  // N+1 entries, phi[0] == 0
    Vec2 lambda = Vec2::Zero();
};

/// Tridiagonal solve with partial pivoting (row interchanges between
/// neighbours), applied to every column of `rhs`. Returns false on a zero pivot.
bool solve_tridiagonal(Eigen::VectorXd dl, Eigen::VectorXd d, Eigen::VectorXd du,
                       Eigen::MatrixXd& rhs) {
    const Eigen::Index n = d.size();
    Eigen::VectorXd du2 = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - 2, 0));
    const double scale = d.cwiseAbs().maxCoeff() + 1.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (std::abs(d[i]) <= 1e-14 * scale) return false;
            const double fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            rhs.row(i + 1) -= fact * rhs.row(i);
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            const double tmp = d[i + 1];
            d[i + 1] = du[i] - fact * tmp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = tmp;
            Eigen::RowVectorXd r = rhs.row(i);
            rhs.row(i) = rhs.row(i + 1);
            rhs.row(i + 1) = r - fact * rhs.row(i + 1);
        }
    }
    if (std::abs(d[n - 1]) <= 1e-14 * scale) return false;
    rhs.row(n - 1) /= d[n - 1];
    if (n > 1) rhs.row(n - 2) = (rhs.row(n - 2) - du[n - 2] * rhs.row(n - 1)) / d[n - 2];
    for (Eigen::Index i = n - 3; i >= 0; --i)
        rhs.row(i) = (rhs.row(i) - du[i] * rhs.row(i + 1) - du2[i] * rhs.row(i + 2)) / d[i];
    return true;
}

class KktSystem {
public:
    KktSystem(const RodSpec& rod, const Vec2& target)
        : n_(rod.segments), h_(rod.segment_length()), rf_(rod.rigidity), length_(rod.length),
          target_(target) {}

    const Vec2& target() const { return target_; }
    void set_target(const Vec2& p) { target_ = p; }

    /// Raw KKT residual (N stationarity rows, 2 constraint rows).
    Eigen::VectorXd residual(const KktState& s) const {
        Eigen::VectorXd f(n_ + 2);
        const auto& phi = s.phi;
        Vec2 r = Vec2::Zero();
        for (int j = 0; j < n_; ++j) r += Vec2(std::cos(phi[j]), std::sin(phi[j]));
        r *= h_;
        for (int i = 1; i <= n_; ++i) {
            double g;
            if (i < n_) {
                g = rf_ / h_ * (2.0 * phi[i] - phi[i - 1] - phi[i + 1]);
                g -= h_ * (-s.lambda.x() * std::sin(phi[i]) + s.lambda.y() * std::cos(phi[i]));
            } else {
                g = rf_ / h_ * (phi[n_] - phi[n_ - 1]);
            }
            f[i - 1] = g;
        }
        f[n_] = r.x() - target_.x();
        f[n_ + 1] = r.y() - target_.y();
        return f;
    }

    double stationarity_scale() const { return length_ * length_ / (rf_ * h_); }

    double stationarity(const Eigen::VectorXd& f) const {
        return f.head(n_).cwiseAbs().maxCoeff() * stationarity_scale();
    }
    double constraint(const Eigen::VectorXd& f) const {
        return f.tail<2>().cwiseAbs().maxCoeff() / length_;
    }
    double merit(const Eigen::VectorXd& f) const {
        const double a = f.head(n_).squaredNorm() * stationarity_scale() * stationarity_scale();
        const double b = f.tail<2>().squaredNorm() / (length_ * length_);
        return a + b;
    }

    /// Newton step (dphi_1..dphi_N, dlambda) for the bordered system
    ///   [H  -J^T] [dphi]      [g]
    ///   [J    0 ] [dlam] = -  [c]
    /// with H tridiagonal. Eliminates through H and a 2x2 Schur complement;
    /// falls back to sparse LU when H is numerically singular.
    bool newton_step(const KktState& s, const Eigen::VectorXd& f, Eigen::VectorXd& step) {
        const auto& phi = s.phi;
        const double k = rf_ / h_;
        Eigen::VectorXd d(n_), off = Eigen::VectorXd::Constant(n_ - 1, -k);
        Eigen::MatrixXd jac(2, n_);  // J, last column zero
        for (int i = 1; i <= n_; ++i) {
            if (i < n_) {
                const double c = std::cos(phi[i]), sn = std::sin(phi[i]);
                d[i - 1] = 2.0 * k + h_ * (s.lambda.x() * c + s.lambda.y() * sn);
                jac(0, i - 1) = -h_ * sn;
                jac(1, i - 1) = h_ * c;
            } else {
                d[i - 1] = k;
                jac.col(i - 1).setZero();
            }
        }
        // Columns: -g, then J^T (H X = J^T  gives the multiplier coupling).
        Eigen::MatrixXd rhs(n_, 3);
        rhs.col(0) = -f.head(n_);
        rhs.rightCols<2>() = jac.transpose();
        if (solve_tridiagonal(off, d, off, rhs)) {
            const Eigen::Matrix2d schur = jac * rhs.rightCols<2>();
            // J dphi = -c with dphi = w + X dlam
            const Eigen::Vector2d b = -f.tail<2>() - jac * rhs.col(0);
            const double cond_scale = schur.cwiseAbs().maxCoeff();
            if (std::abs(schur.determinant()) > 1e-24 * cond_scale * cond_scale) {
                const Eigen::Vector2d dlam = schur.inverse() * b;
                step.resize(n_ + 2);
                step.head(n_) = rhs.col(0) + rhs.rightCols<2>() * dlam;
                step.tail<2>() = dlam;
                if (step.allFinite()) return true;
            }
        }
        return sparse_step(d, jac, f, step);
    }

private:
    bool sparse_step(const Eigen::VectorXd& d, const Eigen::MatrixXd& jac, const Eigen::VectorXd& f,
                     Eigen::VectorXd& step) const {
        const double k = rf_ / h_;
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(7 * n_);
        for (int r = 0; r < n_; ++r) {
            t.emplace_back(r, r, d[r]);
            if (r + 1 < n_) {
                t.emplace_back(r, r + 1, -k);
                t.emplace_back(r + 1, r, -k);
                t.emplace_back(r, n_, -jac(0, r));
                t.emplace_back(r, n_ + 1, -jac(1, r));
                t.emplace_back(n_, r, jac(0, r));
                t.emplace_back(n_ + 1, r, jac(1, r));
            }
        }
        Eigen::SparseMatrix<double> m(n_ + 2, n_ + 2);
        m.setFromTriplets(t.begin(), t.end());
        m.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(m);
        if (lu.info() != Eigen::Success) return false;
        step = lu.solve(-f);
        return lu.info() == Eigen::Success && step.allFinite();
    }

    int n_;
    double h_, rf_, length_;
    Vec2 target_;
};

/// Least-squares multipliers J^T lambda = grad U for a given shape.
Vec2 least_squares_multipliers(const RodSpec& rod, const Eigen::VectorXd& phi) {
    const int n = rod.segments;
    const double h = rod.segment_length();
    Eigen::MatrixXd jt(n, 2);
    Eigen::VectorXd g(n);
    for (int i = 1; i <= n; ++i) {
        if (i < n) {
            jt(i - 1, 0) = -h * std::sin(phi[i]);
            jt(i - 1, 1) = h * std::cos(phi[i]);
            g[i - 1] = rod.rigidity / h * (2.0 * phi[i] - phi[i - 1] - phi[i + 1]);
        } else {
            jt(i - 1, 0) = 0.0;
            jt(i - 1, 1) = 0.0;
            g[i - 1] = rod.rigidity / h * (phi[n] - phi[n - 1]);
        }
    }
    return jt.completeOrthogonalDecomposition().solve(g);
}

struct NewtonResult {
    KktState state;
    Eigen::VectorXd residual;
    int iterations = 0;
    bool converged = false;
};

NewtonResult newton_solve(KktSystem& sys, KktState s, const SolverConfig& cfg) {
    NewtonResult out;
    Eigen::VectorXd f = sys.residual(s);
    Eigen::VectorXd step;
    const double tol_c = cfg.tol_c;
    int stalled = 0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        if (sys.constraint(f) <= tol_c && sys.stationarity(f) <= cfg.tol_g) {
            out.converged = true;
            break;
        }
        if (!sys.newton_step(s, f, step)) break;
        ++out.iterations;
        const int n = static_cast<int>(s.phi.size()) - 1;
        const double max_dphi = step.head(n).cwiseAbs().maxCoeff();
        double alpha = max_dphi > kMaxAngleStep ? kMaxAngleStep / max_dphi : 1.0;
        const double m0 = sys.merit(f);
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            KktState trial = s;
            trial.phi.tail(n) += alpha * step.head(n);
            trial.lambda += alpha * step.tail<2>();
            Eigen::VectorXd ft = sys.residual(trial);
            if (ft.allFinite() && sys.merit(ft) < (1.0 - 1e-4 * alpha) * m0) {
                s = std::move(trial);
                f = std::move(ft);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        stalled = alpha < 1.0 / 64.0 ? stalled + 1 : 0;
        if (stalled >= kMaxStalledIterations) break;
    }
    if (!out.converged) out.converged = sys.constraint(f) <= tol_c && sys.stationarity(f) <= cfg.tol_g;
    out.state = std::move(s);
    out.residual = std::move(f);
    return out;
}

/// Two-mode shape a*sin(pi s/L) + b*sigma(2 - sigma) fitted to hit `p`: an
/// S-mode that buckles upward plus a cantilever mode. Seeds the first step
/// away from the straight (singular) state.
Eigen::VectorXd buckled_seed(const RodSpec& rod, const Vec2& p) {
    const int n = rod.segments;
    const double h = rod.segment_length();
    Eigen::VectorXd mode_a(n + 1), mode_b(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double sigma = static_cast<double>(j) / n;
        mode_a[j] = std::sin(std::numbers::pi * sigma);
        mode_b[j] = sigma * (2.0 - sigma);
    }
    const double shortening = std::max(rod.length - p.norm(), 1e-6 * rod.length);
    Eigen::Vector2d ab(2.0 * std::sqrt(shortening / rod.length), 0.0);
    auto end_of = [&](const Eigen::Vector2d& c) {
        Eigen::VectorXd phi = c[0] * mode_a + c[1] * mode_b;
        Vec2 r = Vec2::Zero();
        for (int j = 0; j < n; ++j) r += Vec2(std::cos(phi[j]), std::sin(phi[j]));
        return Vec2(h * r);
    };
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd phi = ab[0] * mode_a + ab[1] * mode_b;
        const Vec2 res = end_of(ab) - p;
        if (res.norm() < 1e-12 * rod.length) break;
        Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
        for (int j = 0; j < n; ++j) {
            const Vec2 d(-std::sin(phi[j]), std::cos(phi[j]));
            jac.col(0) += h * mode_a[j] * d;
            jac.col(1) += h * mode_b[j] * d;
        }
        Eigen::Vector2d step = jac.fullPivLu().solve(-res);
        if (!step.allFinite()) break;
        double alpha = 1.0;
        const double r0 = res.norm();
        for (int ls = 0; ls < 20; ++ls) {
            if ((end_of(ab + alpha * step) - p).norm() < r0) break;
            alpha *= 0.5;
        }
        ab += alpha * step;
    }
    if (ab[0] < 0.0) ab[0] = -ab[0];
    return ab[0] * mode_a + ab[1] * mode_b;
}

bool is_flat(const RodShape& shape) {
    return std::all_of(shape.phi.begin(), shape.phi.end(), [](double v) { return v == 0.0; });
}

ContactSolution straight_solution(const RodSpec& rod, const Vec2& target) {
    ContactSolution sol;
    sol.shape = RodShape::straight(rod);
    sol.target = target;
    sol.converged = true;
    sol.residuals.constraint = (sol.shape.endpoint() - target).cwiseAbs().maxCoeff() / rod.length;
    return sol;
}

ContactSolution make_solution(const RodSpec& rod, const KktSystem& sys, const NewtonResult& nr,
                              int iterations, bool converged) {
    ContactSolution sol;
    sol.shape.h = rod.segment_length();
    sol.shape.phi.assign(nr.state.phi.data(), nr.state.phi.data() + nr.state.phi.size());
    sol.target = sys.target();
    sol.energy = flexural_energy(sol.shape, rod.rigidity);
    sol.force = nr.state.lambda;
    sol.residuals.constraint = sys.constraint(nr.residual);
    sol.residuals.stationarity = sys.stationarity(nr.residual);
    sol.iterations = iterations;
    sol.converged = converged;
    if (converged)
        sol.friction = friction_bound(sol.force, sol.shape.end_tangent(), contact_normal(sol.shape));
    return sol;
}

/// Walks the endpoint along the segment start -> target in `steps` nominal
/// increments, halving on failure. `start` must be converged at `from_p`.
ContactSolution track(const RodSpec& rod, const KktState& start, const Vec2& from_p,
                      const Vec2& target, int steps, const SolverConfig& cfg) {
    const bool from_flat = (start.phi.array() == 0.0).all();
    const double nominal = 1.0 / steps;
    double t = 0.0, dt = nominal;
    KktState cur = start;
    KktState prev;
    double t_prev = -1.0;
    int total_iter = 0;
    NewtonResult last;
    KktSystem sys(rod, target);
    KktSystem step_sys(rod, target);
    bool have_last = false;

    while (t < 1.0) {
        const double t_next = std::min(1.0, t + dt);
        const Vec2 p = from_p + t_next * (target - from_p);
        step_sys.set_target(p);
        KktState guess;
        if (t == 0.0 && from_flat) {
            guess.phi = buckled_seed(rod, p);
            guess.lambda = least_squares_multipliers(rod, guess.phi);
        } else if (t_prev >= 0.0 && !(t_prev == 0.0 && from_flat)) {
            const double w = (t_next - t) / (t - t_prev);
            guess.phi = cur.phi + w * (cur.phi - prev.phi);
            guess.lambda = cur.lambda + w * (cur.lambda - prev.lambda);
        } else {
            guess = cur;
        }
        NewtonResult nr = newton_solve(step_sys, guess, cfg);
        total_iter += nr.iterations;
        if (nr.converged) {
            prev = std::move(cur);
            t_prev = t;
            cur = nr.state;
            t = t_next;
            dt = std::min(nominal, dt * 2.0);
            if (t >= 1.0) {
                return make_solution(rod, step_sys, nr, total_iter, true);
            }
        } else {
            last = std::move(nr);
            have_last = true;
            dt *= 0.5;
            if (dt < nominal / (1 << kMaxHalvings)) break;
        }
    }
    // Report the best iterate against the final target.
    KktState best = have_last ? last.state : cur;
    NewtonResult tagged;
    tagged.state = best;
    tagged.residual = sys.residual(best);
    return make_solution(rod, sys, tagged, total_iter, false);
}

}  // namespace

////////////////////////////////////////////////////////////////////////////////
// Public solver entry points
////////////////////////////////////////////////////////////////////////////////

ContactSolution solve_min_energy_shape(const RodSpec& rod, const Vec2& endpoint,
                                       const SolverConfig& cfg) {
    rod.validate();
    cfg.validate();
    if (!is_reachable(rod, endpoint, cfg.tol_c))
        throw UnreachableEndpoint("endpoint (" + std::to_string(endpoint.x()) + ", " +
                                  std::to_string(endpoint.y()) + ") outside reachable half-disk");
    const Vec2 flat_end(rod.length, 0.0);
    if ((endpoint - flat_end).norm() <= cfg.tol_c * rod.length) return straight_solution(rod, endpoint);

    KktState start;
    start.phi = Eigen::VectorXd::Zero(rod.segments + 1);
    ContactSolution sol = track(rod, start, flat_end, endpoint, cfg.continuation_steps, cfg);
    sol.near_singular = endpoint.norm() >= rod.length * (1.0 - cfg.tol_c);
    return sol;
}

ContactSolution continue_min_energy_shape(const RodSpec& rod, const ContactSolution& from,
                                          const Vec2& endpoint, const SolverConfig& cfg) {
    rod.validate();
    cfg.validate();
    if (!from.converged) throw UnconvergedSolution("continuation needs a converged starting shape");
    if (from.shape.segments() != rod.segments)
        throw InvalidArgument("starting shape discretization does not match the rod");
    if (!is_reachable(rod, endpoint, cfg.tol_c))
        throw UnreachableEndpoint("endpoint (" + std::to_string(endpoint.x()) + ", " +
                                  std::to_string(endpoint.y()) + ") outside reachable half-disk");
    const Vec2 flat_end(rod.length, 0.0);
    if ((endpoint - flat_end).norm() <= cfg.tol_c * rod.length) return straight_solution(rod, endpoint);
    if ((endpoint - from.target).norm() == 0.0) return from;

    KktState start;
    start.phi = Eigen::Map<const Eigen::VectorXd>(from.shape.phi.data(), from.shape.phi.size());
    start.lambda = from.force;
    if (is_flat(from.shape)) start.phi.setZero();
    // Same nominal step length as a full continuation from flat.
    const double step_len = rod.length / cfg.continuation_steps;
    const int steps =
        std::max(1, static_cast<int>(std::ceil((endpoint - from.target).norm() / step_len)));
    ContactSolution sol = track(rod, start, from.target, endpoint, steps, cfg);
    sol.near_singular = endpoint.norm() >= rod.length * (1.0 - cfg.tol_c);
    return sol;
}

////////////////////////////////////////////////////////////////////////////////
// Contact force and friction
////////////////////////////////////////////////////////////////////////////////

Vec2 compute_contact_force(const ContactSolution& sol, const RodSpec& rod) {
    if (!sol.converged) throw UnconvergedSolution("contact force requested from an unconverged solve");
    if (sol.shape.segments() != rod.segments)
        throw InvalidArgument("solution discretization does not match the rod");
    return sol.force;
}

Vec2 contact_normal(const RodShape& shape) {
    const double a = shape.phi.back();
    return {std::sin(a), -std::cos(a)};
}

FrictionBound friction_bound(const Vec2& force, const Vec2& tangent, const Vec2& normal) {
    if (force.norm() == 0.0) return {0.0, true};
    const double fn = force.dot(normal);
    if (fn <= 0.0) return {std::numeric_limits<double>::infinity(), false};
    return {std::abs(force.dot(tangent)) / fn, true};
}

FrictionBound min_friction_coefficient(const ContactSolution& sol) {
    if (!sol.converged) throw UnconvergedSolution("friction bound requested from an unconverged solve");
    return friction_bound(sol.force, sol.shape.end_tangent(), contact_normal(sol.shape));
}

int inflection_count(const RodShape& shape, double noise_floor) {
    int count = 0;
    int last_sign = 0;
    for (double k : shape.curvature()) {
        if (std::abs(k) <= noise_floor) continue;
        const int s = k > 0.0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++count;
        last_sign = s;
    }
    return count;
}

int inflection_count(const RodShape& shape, const SolverConfig& cfg) {
    return inflection_count(shape, cfg.tol_g / shape.h);
}

}  // namespace flexflip
