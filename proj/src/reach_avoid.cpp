#include "rah/reach_avoid.hpp"

#include "rah/plant.hpp"

#include <cmath>
#include <limits>

namespace rah {

bool in_state_space(const Vector& xi, const std::vector<Obstacle>& obstacles, double slack)
{
    for (const Obstacle& o : obstacles) {
        if ((xi - o.center).norm() < o.safety_radius() - slack) {
            return false;
        }
    }
    return true;
}

bool in_virtual_jump_set(const Vector& xi, int rho, const std::vector<Obstacle>& obstacles)
{
    if (obstacles.empty()) {
        return false;
    }
    if (rho == 0) {
        for (const Obstacle& o : obstacles) {
            if (m1_membership(xi, o)) {
                return true;
            }
        }
        return false;
    }
    for (const Obstacle& o : obstacles) {
        if (!m0_membership(xi, o)) {
            return false;
        }
    }
    return true;
}

bool in_virtual_flow_set(const Vector& xi, int rho, const std::vector<Obstacle>& obstacles)
{
    if (!in_state_space(xi, obstacles, state_space_slack)) {
        return false;
    }
    if (obstacles.empty()) {
        return true;
    }
    if (rho == 0) {
        for (const Obstacle& o : obstacles) {
            if (m1_interior_membership(xi, o)) {
                return false;
            }
        }
        return true;
    }
    for (const Obstacle& o : obstacles) {
        if (!m0_interior_membership(xi, o)) {
            return true;
        }
    }
    return false;
}

std::optional<std::size_t> virtual_jump_trigger(const Vector& xi, int rho, const std::vector<Obstacle>& obstacles)
{
    if (obstacles.empty()) {
        return std::nullopt;
    }
    if (rho == 0) {
        for (std::size_t i = 0; i < obstacles.size(); ++i) {
            if (m1_membership(xi, obstacles[i])) {
                return i;
            }
        }
        return std::nullopt;
    }
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        const Obstacle& o = obstacles[i];
        const double gap = (xi - o.center).norm() - (o.activation_radius + o.eps);
        if (gap < best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    return best;
}

double obstacle_step_bound(const Vector& xi, const std::vector<Obstacle>& obstacles)
{
    double bound = std::numeric_limits<double>::infinity();
    for (const Obstacle& o : obstacles) {
        if ((xi - o.center).norm() < 2.0 * o.activation_radius) {
            bound = std::min(bound, 0.25 * (o.activation_radius - o.safety_radius()));
        }
    }
    return bound;
}

HybridSystemDef make_virtual_system(const VirtualControllerParams& params, VirtualLaw law, double eps_stop)
{
    if (!(params.c > 0.0)) {
        throw std::invalid_argument("make_virtual_system: c must be positive");
    }
    const auto p = params.obstacles.empty() ? Eigen::Index{-1} : params.obstacles.front().center.size();
    const bool hybrid = law == VirtualLaw::hybrid;

    HybridSystemDef def;
    def.flow = [params, hybrid](const Vector& s) {
        const Eigen::Index n = s.size() - 1;
        const Vector xi = s.head(n);
        const int rho = static_cast<int>(s(n));
        Vector ds = Vector::Zero(s.size());
        ds.head(n) = hybrid ? mu_bar(xi, rho, params) : mu_multi(xi, params);
        return ds;
    };
    def.jump = [](const Vector& s) {
        Vector out = s;
        out(s.size() - 1) = 1.0 - s(s.size() - 1);
        return out;
    };
    const auto obstacles = params.obstacles;
    if (hybrid) {
        def.in_jump_set = [obstacles](const Vector& s) {
            const Eigen::Index n = s.size() - 1;
            return in_virtual_jump_set(s.head(n), static_cast<int>(s(n)), obstacles);
        };
        def.in_flow_set = [obstacles](const Vector& s) {
            const Eigen::Index n = s.size() - 1;
            return in_virtual_flow_set(s.head(n), static_cast<int>(s(n)), obstacles);
        };
        def.jump_trigger = [obstacles](const Vector& s) {
            const Eigen::Index n = s.size() - 1;
            return virtual_jump_trigger(s.head(n), static_cast<int>(s(n)), obstacles);
        };
    } else {
        def.in_flow_set = [obstacles](const Vector& s) {
            return in_state_space(s.head(s.size() - 1), obstacles, state_space_slack);
        };
    }
    def.max_step = [obstacles](const Vector& s) { return obstacle_step_bound(s.head(s.size() - 1), obstacles); };
    def.snap_set = [eps_stop](const Vector& s) {
        const double r = s.head(s.size() - 1).norm();
        return r > 0.0 && r <= eps_stop;
    };
    def.snap = [](const Vector& s) {
        Vector out = s;
        out.head(s.size() - 1).setZero();
        return out;
    };
    def.converged = [](const Vector& s) {
        return s.head(s.size() - 1).norm() == 0.0 && s(s.size() - 1) == 0.0;
    };

    def.diagnostic_names = {"rho"};
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        def.diagnostic_names.push_back("dist_" + std::to_string(i + 1));
    }
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        def.diagnostic_names.push_back("alpha_s_" + std::to_string(i + 1));
    }
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        def.diagnostic_names.push_back("alpha_a_" + std::to_string(i + 1));
    }
    def.diagnostics = [obstacles](const Vector& s) {
        const Vector xi = s.head(s.size() - 1);
        std::vector<double> out;
        out.reserve(3 * obstacles.size() + 1);
        out.push_back(s(s.size() - 1));
        for (const Obstacle& o : obstacles) {
            out.push_back((xi - o.center).norm());
        }
        for (const Obstacle& o : obstacles) {
            out.push_back(alpha_s(xi, o));
        }
        for (const Obstacle& o : obstacles) {
            out.push_back(alpha_a(xi, o));
        }
        return out;
    };
    if (p > 0) {
        def.dimension = static_cast<std::size_t>(p + 1);
    }
    return def;
}

VirtualRun simulate_virtual(const Scenario& scenario, VirtualLaw law)
{
    const Scenario shifted = shift_to_origin(scenario);
    VirtualRun run;
    run.target = scenario.target;
    run.params.c = shifted.c;
    run.params.obstacles = shifted.obstacles;

    const Eigen::Index p = scenario.dimension;
    if (shifted.initial.xi.size() != p) {
        throw std::invalid_argument("simulate_virtual: initial xi has wrong dimension");
    }
    Vector init(p + 1);
    init.head(p) = shifted.initial.xi;
    init(p) = law == VirtualLaw::hybrid ? static_cast<double>(shifted.initial.rho) : 0.0;

    HybridSystemDef def = make_virtual_system(run.params, law, shifted.stop.eps_stop);
    def.dimension = static_cast<std::size_t>(p + 1);
    StopSettings limits = shifted.stop;
    if (limits.zeno_max_jumps < 0) {
        limits.zeno_max_jumps = 10 * static_cast<long>(shifted.obstacles.size());
    }
    DistanceMonitor monitor(run.params.obstacles, 0);
    run.solution = simulate(def, init, limits, shifted.integrator,
                            [&monitor](double t, const Vector& s) { monitor.observe(t, s); });
    run.min_distance = distance_trace(run.solution, run.params.obstacles, 0, &monitor);
    return run;
}

} // namespace rah
