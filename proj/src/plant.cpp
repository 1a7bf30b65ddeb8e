#include "rah/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rah {

Scenario shift_to_origin(const Scenario& scenario)
{
    Scenario out = scenario;
    const Vector t = scenario.target.size() == scenario.dimension ? scenario.target
                                                                  : Vector::Zero(scenario.dimension);
    for (Obstacle& o : out.obstacles) {
        require_same_dimension(o.center, t, "shift_to_origin");
        o.center -= t;
    }
    if (out.initial.xi.size() == t.size()) {
        out.initial.xi -= t;
    }
    out.target = Vector::Zero(t.size());
    return out;
}

Vector unshift(const Vector& point, const Vector& target)
{
    require_same_dimension(point, target, "unshift");
    return point + target;
}

namespace {

// Boundary points of the sphere of radius r around q.
std::vector<Vector> boundary_points(const Vector& q, double r, int points)
{
    const Eigen::Index p = q.size();
    std::vector<Vector> out;
    if (p == 1) {
        out.push_back(q.array() + r);
        out.push_back(q.array() - r);
        return out;
    }
    out.reserve(static_cast<std::size_t>(points));
    if (p == 2) {
        for (int k = 0; k < points; ++k) {
            const double a = 2.0 * std::numbers::pi * k / points;
            Vector z(2);
            z << q(0) + r * std::cos(a), q(1) + r * std::sin(a);
            out.push_back(std::move(z));
        }
        return out;
    }
    if (p == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < points; ++k) {
            const double y = 1.0 - 2.0 * (k + 0.5) / points;
            const double rad = std::sqrt(std::max(0.0, 1.0 - y * y));
            const double a = golden * k;
            Vector z(3);
            z << q(0) + r * rad * std::cos(a), q(1) + r * y, q(2) + r * rad * std::sin(a);
            out.push_back(std::move(z));
        }
        return out;
    }
    throw std::invalid_argument("d_bound: boundary discretization supports p <= 3 only");
}

double d_min(const Vector& ze, const std::vector<Obstacle>& obstacles,
             const std::function<double(const Vector&, const Vector&)>& level, int points)
{
    double best = std::numeric_limits<double>::infinity();
    for (const Obstacle& o : obstacles) {
        require_same_dimension(ze, o.center, "d_bound");
        if ((ze - o.center).norm() <= o.radius) {
            best = std::min(best, level(ze, ze));
        }
        for (const Vector& z : boundary_points(o.center, o.radius, points)) {
            best = std::min(best, level(z, ze));
        }
    }
    return best;
}

} // namespace

DBound d_bound(const Vector& ze, const std::vector<Obstacle>& obstacles,
               const std::function<double(const Vector&, const Vector&)>& output_level, double eps_tilde, int points)
{
    if (obstacles.empty()) {
        return {std::numeric_limits<double>::infinity(), 0.0};
    }
    if (!output_level) {
        throw std::invalid_argument("d_bound: controller provides no output level function");
    }
    if (points < 2) {
        throw std::invalid_argument("d_bound: need at least 2 points per obstacle");
    }
    const double full = d_min(ze, obstacles, output_level, points);
    const double half = d_min(ze, obstacles, output_level, std::max(2, points / 2));
    return {full - eps_tilde, std::abs(full - half)};
}

double safety_margin(const Vector& zeta, const TrackingController& ctrl, const CoupledParams& params)
{
    double d = 0.0;
    if (ctrl.d_closed_form) {
        d = ctrl.d_closed_form(zeta, params.obstacles) - params.eps_tilde;
    } else {
        // Only the value is needed here; skip the half-resolution estimate.
        d = params.obstacles.empty() ? std::numeric_limits<double>::infinity()
                                     : d_min(zeta, params.obstacles, ctrl.output_level, params.d_points) -
                                           params.eps_tilde;
    }
    return std::min(d, params.d_cap);
}

Vector zeta_velocity(const Vector& x, const Vector& zeta, int rho, const TrackingController& ctrl,
                     const CoupledParams& params)
{
    const double v = ctrl.V(x, zeta);
    if (!std::isfinite(v)) {
        throw SimulationError("coupled_flow: non-finite Lyapunov value");
    }
    const double gate = params.ell * (safety_margin(zeta, ctrl, params) - v);
    const Vector xi = zeta - params.target;
    if (!(gate > 0.0) || xi.norm() == 0.0) {
        return Vector::Zero(zeta.size());
    }
    return gate * mu_bar(xi, rho, params.virtual_params);
}

Vector coupled_flow(const Vector& s, const PlantModel& plant, const TrackingController& ctrl,
                    const CoupledParams& params)
{
    const Eigen::Index n = plant.n;
    const Eigen::Index p = plant.p;
    if (s.size() != n + p + 1) {
        throw std::invalid_argument("coupled_flow: state has wrong dimension");
    }
    const Vector x = s.head(n);
    const Vector zeta = s.segment(n, p);
    const int rho = static_cast<int>(s(n + p));
    Vector ds = Vector::Zero(s.size());
    ds.head(n) = plant.f(x, ctrl.u(x, zeta));
    if (!ds.head(n).allFinite()) {
        throw SimulationError("coupled_flow: non-finite plant derivative");
    }
    ds.segment(n, p) = zeta_velocity(x, zeta, rho, ctrl, params);
    return ds;
}

CoupledParams make_coupled_params(const Scenario& scenario)
{
    const Scenario shifted = shift_to_origin(scenario);
    CoupledParams params;
    params.virtual_params.c = scenario.c;
    params.virtual_params.obstacles = shifted.obstacles;
    params.obstacles = scenario.obstacles;
    params.target = scenario.target.size() == scenario.dimension ? scenario.target : Vector::Zero(scenario.dimension);
    params.ell = scenario.ell;
    params.eps_tilde = scenario.eps_tilde;
    params.d_points = scenario.d_points;
    params.d_cap = scenario.d_cap;
    params.eps_stop = scenario.stop.eps_stop;
    return params;
}

HybridSystemDef make_coupled_system(const PlantModel& plant, const TrackingController& ctrl,
                                    const CoupledParams& params, double z_tol)
{
    const Eigen::Index n = plant.n;
    const Eigen::Index p = plant.p;
    const auto split = [n, p](const Vector& s, const Vector& target) {
        return std::pair<Vector, int>(s.segment(n, p) - target, static_cast<int>(s(n + p)));
    };

    HybridSystemDef def;
    def.dimension = static_cast<std::size_t>(n + p + 1);
    def.flow = [plant, ctrl, params](const Vector& s) { return coupled_flow(s, plant, ctrl, params); };
    def.jump = [n, p](const Vector& s) {
        Vector out = s;
        out(n + p) = 1.0 - s(n + p);
        return out;
    };
    const auto& shifted = params.virtual_params.obstacles;
    def.in_jump_set = [split, shifted, target = params.target](const Vector& s) {
        const auto [xi, rho] = split(s, target);
        return in_virtual_jump_set(xi, rho, shifted);
    };
    def.in_flow_set = [split, shifted, target = params.target](const Vector& s) {
        const auto [xi, rho] = split(s, target);
        return in_virtual_flow_set(xi, rho, shifted);
    };
    def.jump_trigger = [split, shifted, target = params.target](const Vector& s) {
        const auto [xi, rho] = split(s, target);
        return virtual_jump_trigger(xi, rho, shifted);
    };
    def.max_step = [plant, ctrl, params, n, p](const Vector& s) {
        const Vector zeta = s.segment(n, p);
        const double bound = obstacle_step_bound(zeta - params.target, params.virtual_params.obstacles);
        if (!std::isfinite(bound)) {
            return bound;
        }
        const double speed = zeta_velocity(s.head(n), zeta, static_cast<int>(s(n + p)), ctrl, params).norm();
        return bound / std::max(1.0, speed);
    };
    def.snap_set = [n, p, params](const Vector& s) {
        const double r = (s.segment(n, p) - params.target).norm();
        return r > 0.0 && r <= params.eps_stop;
    };
    def.snap = [n, p, params](const Vector& s) {
        Vector out = s;
        out.segment(n, p) = params.target;
        return out;
    };
    def.converged = [plant, n, p, params, z_tol](const Vector& s) {
        if (s(n + p) != 0.0 || !(s.segment(n, p).array() == params.target.array()).all()) {
            return false;
        }
        return (plant.h(s.head(n)) - params.target).norm() <= z_tol;
    };

    def.diagnostic_names = {"V", "d", "gate", "zeta_speed"};
    for (Eigen::Index k = 0; k < p; ++k) {
        def.diagnostic_names.push_back("z_" + std::to_string(k + 1));
    }
    def.diagnostics = [plant, ctrl, params, n, p](const Vector& s) {
        const Vector x = s.head(n);
        const Vector zeta = s.segment(n, p);
        const double v = ctrl.V(x, zeta);
        const double d = safety_margin(zeta, ctrl, params);
        const double speed = zeta_velocity(x, zeta, static_cast<int>(s(n + p)), ctrl, params).norm();
        std::vector<double> out{v, d, d - v, speed};
        const Vector z = plant.h(x);
        out.insert(out.end(), z.data(), z.data() + z.size());
        return out;
    };
    return def;
}

namespace {

class ClosedLoopMonitor {
public:
    ClosedLoopMonitor(const PlantModel& plant, const TrackingController& ctrl, const CoupledParams& params,
                      bool gate_open)
        : plant_(plant), ctrl_(ctrl), params_(params), gate_open_(gate_open),
          output_(params.obstacles.size(), std::numeric_limits<double>::infinity()),
          virtual_(params.obstacles.size(), std::numeric_limits<double>::infinity())
    {
    }

    void observe(double t, const Vector& s)
    {
        const Eigen::Index n = plant_.n;
        const Eigen::Index p = plant_.p;
        const Vector x = s.head(n);
        const Vector zeta = s.segment(n, p);
        const Vector z = plant_.h(x);
        for (std::size_t i = 0; i < params_.obstacles.size(); ++i) {
            output_[i] = std::min(output_[i], (z - params_.obstacles[i].center).norm());
            virtual_[i] = std::min(virtual_[i], (zeta - params_.obstacles[i].center).norm());
        }
        const double gate = safety_margin(zeta, ctrl_, params_) - ctrl_.V(x, zeta);
        if (!gate_open_ && gate >= 0.0) {
            gate_open_ = true;
            open_time_ = t;
        }
        if (gate_open_ && (!open_time_ || t >= *open_time_)) {
            min_gate_ = std::min(min_gate_, gate);
        }
    }

    const PlantModel& plant_;
    const TrackingController& ctrl_;
    const CoupledParams& params_;
    bool gate_open_;
    std::optional<double> open_time_;
    double min_gate_ = std::numeric_limits<double>::infinity();
    std::vector<double> output_;
    std::vector<double> virtual_;
};

} // namespace

ClosedLoopRun simulate_closed_loop(const Scenario& scenario, const PlantModel& plant, const TrackingController& ctrl,
                                   const Vector& x0, const Vector& zeta0, int rho0)
{
    if (x0.size() != plant.n || zeta0.size() != plant.p || scenario.dimension != plant.p) {
        throw std::invalid_argument("simulate_closed_loop: dimension mismatch between scenario, plant and state");
    }
    if (rho0 != 0 && rho0 != 1) {
        throw std::invalid_argument("simulate_closed_loop: rho must be 0 or 1");
    }
    ClosedLoopRun run;
    run.params = make_coupled_params(scenario);

    Vector init(plant.n + plant.p + 1);
    init << x0, zeta0, static_cast<double>(rho0);

    run.initial_gate = safety_margin(zeta0, ctrl, run.params) - ctrl.V(x0, zeta0);
    run.initial_gate_ok = run.initial_gate >= 0.0;

    StopSettings limits = scenario.stop;
    if (limits.zeno_max_jumps < 0) {
        limits.zeno_max_jumps = 10 * static_cast<long>(scenario.obstacles.size());
    }
    const HybridSystemDef def = make_coupled_system(plant, ctrl, run.params, limits.z_tol);
    ClosedLoopMonitor monitor(plant, ctrl, run.params, run.initial_gate_ok);
    monitor.observe(0.0, init);
    run.solution = simulate(def, init, limits, scenario.integrator,
                            [&monitor](double t, const Vector& s) { monitor.observe(t, s); });
    for (const Sample& s : run.solution.samples) {
        monitor.observe(s.time.t, s.state);
    }
    run.gate_open_time = run.initial_gate_ok ? std::optional<double>{} : monitor.open_time_;
    run.min_gate = monitor.min_gate_;
    run.min_output_distance = monitor.output_;
    run.min_virtual_distance = monitor.virtual_;
    return run;
}

} // namespace rah
