#include "rah/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace rah::oracles {

Vector fd_gradient(const std::function<double(const Vector&)>& field, const Vector& point, double step)
{
    Vector g(point.size());
    Vector xp = point;
    for (Eigen::Index i = 0; i < point.size(); ++i) {
        const double orig = xp(i);
        xp(i) = orig + step;
        const double fp = field(xp);
        xp(i) = orig - step;
        const double fm = field(xp);
        xp(i) = orig;
        g(i) = (fp - fm) / (2.0 * step);
    }
    return g;
}

double d_discretized(const Vector& ze, const std::vector<Obstacle>& obstacles,
                     const std::function<double(const Vector&, const Vector&)>& level, int points)
{
    if (points < 16) {
        throw std::invalid_argument("d_discretized: need at least 16 points");
    }
    double best = std::numeric_limits<double>::infinity();
    Vector z(2);
    for (const Obstacle& o : obstacles) {
        if (o.center.size() != 2 || ze.size() != 2) {
            throw std::invalid_argument("d_discretized: 2-D only");
        }
        const double dx = ze(0) - o.center(0);
        const double dy = ze(1) - o.center(1);
        if (dx * dx + dy * dy <= o.radius * o.radius) {
            best = std::min(best, level(ze, ze));
        }
        const double step = 2.0 * std::numbers::pi / points;
        for (int k = 0; k < points; ++k) {
            z(0) = o.center(0) + o.radius * std::cos(step * k);
            z(1) = o.center(1) + o.radius * std::sin(step * k);
            best = std::min(best, level(z, ze));
        }
    }
    return best;
}

double d_discretized_order(const Vector& ze, const std::vector<Obstacle>& obstacles,
                           const std::function<double(const Vector&, const Vector&)>& level, int points,
                           double reference)
{
    const double e1 = std::abs(d_discretized(ze, obstacles, level, points) - reference);
    const double e2 = std::abs(d_discretized(ze, obstacles, level, 2 * points) - reference);
    if (e2 == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return std::log2(e1 / e2);
}

double stabilizer_arrival_time(double r0, double c)
{
    if (r0 < 0.0 || c <= 0.0) {
        throw std::invalid_argument("stabilizer_arrival_time: need r0 >= 0, c > 0");
    }
    const double outside = std::max(0.0, r0 - c);
    return outside + 3.0 * std::cbrt(c * c) * std::cbrt(std::min(r0, c));
}

Vector trap_stall_point(const Obstacle& obs)
{
    const double n = obs.center.norm();
    if (n == 0.0) {
        throw std::invalid_argument("trap_stall_point: obstacle at the target");
    }
    return obs.center * (1.0 + obs.safety_radius() / n);
}

namespace {

std::optional<std::size_t> diagnostic_index(const HybridSolution& sol, const std::string& name)
{
    const auto it = std::find(sol.diagnostic_names.begin(), sol.diagnostic_names.end(), name);
    if (it == sol.diagnostic_names.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - sol.diagnostic_names.begin());
}

// Tracks the worst sample of a margin that should stay >= -tol.
struct Worst {
    double value = std::numeric_limits<double>::infinity();
    const Sample* at = nullptr;

    void see(double v, const Sample& s)
    {
        if (v < value) {
            value = v;
            at = &s;
        }
    }
};

PropertyReport finish(std::string name, double tol, const Worst& w, std::string detail = {})
{
    PropertyReport r;
    r.name = std::move(name);
    r.tolerance = tol;
    r.passed = w.at == nullptr || w.value >= -tol;
    if (w.at != nullptr) {
        r.witness = Witness{w.at->time, w.at->state, w.value};
    }
    r.detail = std::move(detail);
    return r;
}

} // namespace

std::vector<PropertyReport> check_trajectory(const HybridSolution& sol, const TrajectoryChecks& chk)
{
    if (sol.samples.empty()) {
        throw std::invalid_argument("check_trajectory: empty solution");
    }
    const Eigen::Index p = chk.dimension;
    const Vector target = chk.target.size() == p ? chk.target : Vector::Zero(p);
    const auto rho_of = [](const Sample& s) { return s.state(s.state.size() - 1); };
    std::vector<PropertyReport> out;

    if (chk.safety) {
        Worst w;
        for (const Sample& s : sol.samples) {
            for (const Obstacle& o : chk.obstacles) {
                w.see((s.state.segment(chk.xi_offset, p) - o.center).norm() - o.safety_radius(), s);
            }
        }
        out.push_back(finish("safety", chk.safety_tol, w, "min |xi - q_i| - Delta_i"));
    }

    if (chk.norm_monotonicity) {
        Worst w;
        for (std::size_t k = 1; k < sol.samples.size(); ++k) {
            const Sample& a = sol.samples[k - 1];
            const Sample& b = sol.samples[k];
            if (a.time.j != b.time.j || rho_of(a) != 0.0 || rho_of(b) != 0.0) {
                continue;
            }
            const double na = (a.state.segment(chk.xi_offset, p) - target).norm();
            const double nb = (b.state.segment(chk.xi_offset, p) - target).norm();
            w.see(na - nb, b);
        }
        out.push_back(finish("norm_monotonicity", chk.monotonic_slack, w, "min |xi(k-1)| - |xi(k)| on rho=0 flows"));
    }

    if (chk.gate) {
        Worst w;
        const auto idx = diagnostic_index(sol, "gate");
        if (!idx) {
            throw std::invalid_argument("check_trajectory: solution has no gate diagnostic");
        }
        for (const Sample& s : sol.samples) {
            if (chk.gate_from && s.time.t < *chk.gate_from) {
                continue;
            }
            w.see(s.diagnostics.at(*idx), s);
        }
        out.push_back(finish("gate", chk.gate_tol, w, "min d(zeta) - V(x, zeta)"));
    }

    if (chk.output_safety) {
        Worst w;
        std::vector<std::size_t> zi;
        for (Eigen::Index k = 0; k < p; ++k) {
            const auto idx = diagnostic_index(sol, "z_" + std::to_string(k + 1));
            if (!idx) {
                throw std::invalid_argument("check_trajectory: solution has no output diagnostics");
            }
            zi.push_back(*idx);
        }
        Vector z(p);
        for (const Sample& s : sol.samples) {
            for (Eigen::Index k = 0; k < p; ++k) {
                z(k) = s.diagnostics.at(zi[static_cast<std::size_t>(k)]);
            }
            for (const Obstacle& o : chk.obstacles) {
                w.see((z - o.center).norm() - o.radius, s);
            }
        }
        out.push_back(finish("output_safety", chk.output_tol, w, "min |z - q_i| - r_i"));
    }

    if (chk.jump_budget) {
        const long cap = chk.max_jumps >= 0 ? chk.max_jumps : 2 * static_cast<long>(chk.obstacles.size());
        PropertyReport r;
        r.name = "jump_budget";
        r.tolerance = static_cast<double>(cap);
        const long jumps = static_cast<long>(sol.jumps.size());
        r.passed = jumps <= cap;
        const Sample& last = sol.samples.back();
        r.witness = Witness{last.time, last.state, static_cast<double>(jumps)};
        r.detail = std::to_string(jumps) + " jumps, cap " + std::to_string(cap);
        out.push_back(std::move(r));
    }

    if (chk.non_zeno) {
        PropertyReport r;
        r.name = "non_zeno";
        r.tolerance = chk.zeno_window;
        int worst_burst = sol.jumps.empty() ? 0 : 1;
        std::size_t worst_at = 0;
        std::size_t lo = 0;
        for (std::size_t k = 0; k < sol.jumps.size(); ++k) {
            while (sol.jumps[k].time.t - sol.jumps[lo].time.t > chk.zeno_window) {
                ++lo;
            }
            const int burst = static_cast<int>(k - lo + 1);
            if (burst > worst_burst) {
                worst_burst = burst;
                worst_at = k;
            }
        }
        r.passed = worst_burst <= chk.zeno_burst && sol.termination != Termination::zeno_guard;
        if (!sol.jumps.empty()) {
            r.witness = Witness{sol.jumps[worst_at].time, sol.jumps[worst_at].pre, static_cast<double>(worst_burst)};
        } else {
            r.witness = Witness{sol.samples.back().time, sol.samples.back().state, 0.0};
        }
        r.detail = "max " + std::to_string(worst_burst) + " jumps within the window; termination " +
                   to_string(sol.termination);
        out.push_back(std::move(r));
    }

    if (chk.well_formed) {
        PropertyReport r;
        r.name = "well_formed";
        long jumps_seen = 0;
        const Sample* bad = nullptr;
        std::string why;
        for (std::size_t k = 0; k < sol.samples.size() && bad == nullptr; ++k) {
            const Sample& s = sol.samples[k];
            if (!s.state.allFinite() || !std::isfinite(s.time.t)) {
                bad = &s;
                why = "non-finite sample";
                break;
            }
            const double rho = rho_of(s);
            if (rho != 0.0 && rho != 1.0) {
                bad = &s;
                why = "logic state outside {0, 1}";
                break;
            }
            if (k == 0) {
                if (s.time.j != 0 || s.time.t != 0.0) {
                    bad = &s;
                    why = "domain does not start at (0, 0)";
                }
                continue;
            }
            const Sample& prev = sol.samples[k - 1];
            if (s.time.j == prev.time.j + 1) {
                ++jumps_seen;
                if (s.time.t != prev.time.t) {
                    bad = &s;
                    why = "jump with time advance";
                }
            } else if (s.time.j != prev.time.j) {
                bad = &s;
                why = "jump counter skipped";
            } else if (s.time.t < prev.time.t) {
                bad = &s;
                why = "time decreased during flow";
            }
        }
        if (bad == nullptr && jumps_seen != static_cast<long>(sol.jumps.size())) {
            bad = &sol.samples.back();
            why = "jump records do not match the domain";
        }
        r.passed = bad == nullptr;
        const Sample& at = bad != nullptr ? *bad : sol.samples.back();
        r.witness = Witness{at.time, at.state, r.passed ? 0.0 : 1.0};
        r.detail = r.passed ? "ok" : why;
        out.push_back(std::move(r));
    }
    return out;
}

bool all_passed(const std::vector<PropertyReport>& reports)
{
    return std::all_of(reports.begin(), reports.end(), [](const PropertyReport& r) { return r.passed; });
}

std::string format_report(const PropertyReport& r)
{
    std::ostringstream os;
    os << (r.passed ? "PASS " : "FAIL ") << r.name << " (tol " << r.tolerance << ")";
    if (!r.detail.empty()) {
        os << ": " << r.detail;
    }
    if (r.witness) {
        os << "; worst " << r.witness->value << " at (t=" << r.witness->time.t << ", j=" << r.witness->time.j << ")";
    }
    return os.str();
}

double winding_angle(const HybridSolution& solution, const Vector& centre, Eigen::Index offset)
{
    if (centre.size() != 2) {
        throw std::invalid_argument("winding_angle: 2-D only");
    }
    double total = 0.0;
    std::optional<double> prev;
    for (const Sample& s : solution.samples) {
        const Vector e = s.state.segment(offset, 2) - centre;
        const double a = std::atan2(e(1), e(0));
        if (prev) {
            double da = a - *prev;
            while (da > std::numbers::pi) {
                da -= 2.0 * std::numbers::pi;
            }
            while (da < -std::numbers::pi) {
                da += 2.0 * std::numbers::pi;
            }
            total += da;
        }
        prev = a;
    }
    return total;
}

} // namespace rah::oracles
