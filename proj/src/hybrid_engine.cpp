#include "rah/hybrid_engine.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace rah {

const char* to_string(Termination t)
{
    switch (t) {
    case Termination::converged:
        return "converged";
    case Termination::t_budget:
        return "t_budget";
    case Termination::j_budget:
        return "j_budget";
    case Termination::zeno_guard:
        return "zeno_guard";
    case Termination::flow_stall:
        return "flow_stall";
    }
    return "unknown";
}

namespace {

bool holds(const Guard& g, const Vector& x)
{
    return g && g(x);
}

} // namespace

HybridSolution simulate(const HybridSystemDef& def, const Vector& init, const StopSettings& limits,
                        const IntegratorSettings& integrator, const StepObserver& observer)
{
    if (!def.flow) {
        throw std::invalid_argument("simulate: flow map missing");
    }
    if (def.dimension != 0 && static_cast<std::size_t>(init.size()) != def.dimension) {
        throw std::invalid_argument("simulate: initial state has wrong dimension");
    }
    const bool in_c = !def.in_flow_set || def.in_flow_set(init);
    if (!in_c && !holds(def.in_jump_set, init)) {
        throw SimulationError("simulate: initial state outside C and D");
    }

    HybridSolution sol;
    sol.diagnostic_names = def.diagnostic_names;
    Vector x = init;
    double t = 0.0;
    long j = 0;
    std::deque<double> recent_jumps;
    sol.samples.push_back({{t, j}, x, {}});

    const Guard stop_guard = [&def](const Vector& s) {
        return holds(def.in_jump_set, s) || holds(def.snap_set, s) || holds(def.converged, s);
    };

    for (;;) {
        if (holds(def.in_jump_set, x)) {
            if (j >= limits.j_max) {
                sol.termination = Termination::j_budget;
                break;
            }
            JumpRecord rec;
            rec.time = {t, j};
            rec.trigger = def.jump_trigger ? def.jump_trigger(x) : std::nullopt;
            rec.pre = x;
            x = def.jump(x);
            ++j;
            rec.post = x;
            sol.jumps.push_back(rec);
            sol.samples.push_back({{t, j}, x, {}});

            const bool post_c = !def.in_flow_set || def.in_flow_set(x);
            const bool post_d = holds(def.in_jump_set, x);
            if (!post_c && !post_d) {
                throw SimulationError("simulate: jump map output outside C and D");
            }
            recent_jumps.push_back(t);
            while (!recent_jumps.empty() && t - recent_jumps.front() > limits.zeno_window) {
                recent_jumps.pop_front();
            }
            if ((limits.zeno_max_jumps >= 0 && j > limits.zeno_max_jumps) ||
                static_cast<int>(recent_jumps.size()) > limits.zeno_burst) {
                sol.termination = Termination::zeno_guard;
                break;
            }
            if (post_d && def.forbid_repeated_jumps) {
                throw SimulationError("simulate: jump map output lies in the jump set");
            }
            continue;
        }
        if (holds(def.snap_set, x)) {
            x = def.snap(x);
            sol.samples.push_back({{t, j}, x, {}});
            if (holds(def.snap_set, x)) {
                throw SimulationError("simulate: snap map output remains in the snap set");
            }
            continue;
        }
        if (holds(def.converged, x)) {
            sol.termination = Termination::converged;
            break;
        }
        if (t >= limits.t_max) {
            sol.termination = Termination::t_budget;
            break;
        }

        FlowSegment seg = integrate_flow(x, t, limits.t_max, def.flow, integrator, stop_guard, def.max_step,
                                         observer);
        sol.flow_steps += seg.steps;
        for (std::size_t k = 1; k < seg.samples.size(); ++k) {
            sol.samples.push_back({{seg.samples[k].t, j}, std::move(seg.samples[k].x), {}});
        }
        t = seg.t_end;
        x = seg.x_end;
        if (seg.exit == FlowExit::stall) {
            sol.termination = Termination::flow_stall;
            break;
        }
        if (seg.exit == FlowExit::budget) {
            sol.termination = Termination::t_budget;
            break;
        }
    }

    if (def.diagnostics) {
        for (Sample& s : sol.samples) {
            s.diagnostics = def.diagnostics(s.state);
        }
    }
    return sol;
}

DistanceMonitor::DistanceMonitor(std::vector<Obstacle> obstacles, Eigen::Index offset)
    : obstacles_(std::move(obstacles)), offset_(offset),
      minima_(obstacles_.size(), std::numeric_limits<double>::infinity())
{
}

void DistanceMonitor::observe(double /*t*/, const Vector& state)
{
    for (std::size_t i = 0; i < obstacles_.size(); ++i) {
        const auto p = obstacles_[i].center.size();
        const double d = (state.segment(offset_, p) - obstacles_[i].center).norm();
        minima_[i] = std::min(minima_[i], d);
    }
}

std::vector<double> distance_trace(const HybridSolution& solution, const std::vector<Obstacle>& obstacles,
                                   Eigen::Index offset, const DistanceMonitor* dense)
{
    if (solution.samples.empty()) {
        throw std::invalid_argument("distance_trace: empty solution");
    }
    DistanceMonitor mon(obstacles, offset);
    for (const Sample& s : solution.samples) {
        mon.observe(s.time.t, s.state);
    }
    std::vector<double> out = mon.minima();
    if (dense != nullptr) {
        for (std::size_t i = 0; i < out.size() && i < dense->minima().size(); ++i) {
            out[i] = std::min(out[i], dense->minima()[i]);
        }
    }
    return out;
}

} // namespace rah
