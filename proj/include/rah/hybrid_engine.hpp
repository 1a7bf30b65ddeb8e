#ifndef RAH_HYBRID_ENGINE_HPP
#define RAH_HYBRID_ENGINE_HPP

#include "rah/geometry.hpp"
#include "rah/integrator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rah {

/// Point (t, j) of a hybrid time domain. Ordered by t + j.
struct HybridTime {
    double t = 0.0;
    long j = 0;
};

inline bool operator<=(const HybridTime& a, const HybridTime& b)
{
    return a.t + static_cast<double>(a.j) <= b.t + static_cast<double>(b.j);
}

/**
 * Data (C, F, D, G) of a hybrid system over Eigen vectors, plus the hooks
 * the engine needs for bookkeeping.
 *
 * `converged` ends a run. `snap_set`/`snap` describe a non-jump state
 * regularization (the stop ball of the virtual state); it is located like a
 * jump but does not advance j.
 */
struct HybridSystemDef {
    std::size_t dimension = 0;
    FlowField flow;
    std::function<Vector(const Vector&)> jump;
    Guard in_flow_set;
    Guard in_jump_set;
    std::function<std::optional<std::size_t>(const Vector&)> jump_trigger;
    MaxStepFn max_step;
    Guard converged;
    Guard snap_set;
    std::function<Vector(const Vector&)> snap;
    std::function<std::vector<double>(const Vector&)> diagnostics;
    std::vector<std::string> diagnostic_names;
    bool forbid_repeated_jumps = true; ///< G(D) must leave D
};

struct Sample {
    HybridTime time;
    Vector state;
    std::vector<double> diagnostics;
};

struct JumpRecord {
    HybridTime time; ///< instant before the jump
    std::optional<std::size_t> trigger;
    Vector pre;
    Vector post;
};

enum class Termination { converged, t_budget, j_budget, zeno_guard, flow_stall };

const char* to_string(Termination t);

struct HybridSolution {
    std::vector<Sample> samples;
    std::vector<JumpRecord> jumps;
    std::vector<std::string> diagnostic_names;
    Termination termination = Termination::t_budget;
    std::size_t flow_steps = 0;

    HybridTime end_time() const { return samples.empty() ? HybridTime{} : samples.back().time; }
    const Vector& final_state() const { return samples.back().state; }
};

/**
 * Run a hybrid system from `init`: jump with priority whenever the state is in
 * D, otherwise flow until D, the snap set or the convergence predicate is hit.
 * Aborts with zeno_guard when more than limits.zeno_max_jumps jumps occur in
 * total (if nonnegative) or more than limits.zeno_burst inside zeno_window.
 */
HybridSolution simulate(const HybridSystemDef& def, const Vector& init, const StopSettings& limits,
                        const IntegratorSettings& integrator, const StepObserver& observer = {});

/// Minimum distance per obstacle over a stream of states; usable as a StepObserver.
class DistanceMonitor {
public:
    DistanceMonitor(std::vector<Obstacle> obstacles, Eigen::Index offset);

    void observe(double t, const Vector& state);
    const std::vector<double>& minima() const { return minima_; }

private:
    std::vector<Obstacle> obstacles_;
    Eigen::Index offset_;
    std::vector<double> minima_;
};

/**
 * Per-obstacle minimum of |xi - q_i| over the samples, where xi occupies
 * state[offset, offset + p). When `dense` is given its minima (collected from
 * the integrator's dense output) are merged in.
 */
std::vector<double> distance_trace(const HybridSolution& solution, const std::vector<Obstacle>& obstacles,
                                   Eigen::Index offset = 0, const DistanceMonitor* dense = nullptr);

} // namespace rah

#endif // RAH_HYBRID_ENGINE_HPP
