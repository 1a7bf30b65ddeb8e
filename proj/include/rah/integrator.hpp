#ifndef RAH_INTEGRATOR_HPP
#define RAH_INTEGRATOR_HPP

#include "rah/types.hpp"

#include <functional>
#include <vector>

namespace rah {

using FlowField = std::function<Vector(const Vector&)>;
using Guard = std::function<bool(const Vector&)>;
using MaxStepFn = std::function<double(const Vector&)>;
/// Called with (t, state) at every accepted step end and every guard sub-sample.
using StepObserver = std::function<void(double, const Vector&)>;

/// One accepted Dormand-Prince step with its 4th-order continuous extension.
class DenseStep {
public:
    DenseStep() = default;
    DenseStep(double t0, double h, Vector y0, Vector y1, Vector r3, Vector r4, Vector r5);

    double t0() const { return t0_; }
    double t1() const { return t0_ + h_; }
    const Vector& y0() const { return y0_; }
    const Vector& y1() const { return y1_; }

    Vector operator()(double t) const;

private:
    double t0_ = 0.0;
    double h_ = 0.0;
    Vector y0_, y1_, r3_, r4_, r5_;
};

struct TimedState {
    double t;
    Vector x;
};

/// Result of a single explicit step attempt.
struct StepAttempt {
    Vector y1;
    Vector k_end; ///< f(y1), reused as the first stage of the next step
    double error_norm = 0.0;
    bool finite = true;
    DenseStep dense;
};

/// Dormand-Prince 5(4) step from (t0, y0) with k0 = f(y0).
StepAttempt dopri_step(const FlowField& f, double t0, const Vector& y0, const Vector& k0, double h,
                       const IntegratorSettings& settings);

struct EventLocation {
    double t;
    Vector x;
};

/**
 * Bisection for the first time in [ta, tb] where the guard becomes true,
 * using the dense output of `step`. Requires guard(step(tb)). If the guard
 * already holds at ta, ta is returned. The returned state satisfies the guard.
 */
EventLocation locate_event(const DenseStep& step, double ta, double tb, const Guard& guard, double tol);

enum class FlowExit { guard, immediate_event, budget, stall };

struct FlowSegment {
    std::vector<TimedState> samples; ///< grid samples plus the first and final state
    double t_end = 0.0;
    Vector x_end;
    FlowExit exit = FlowExit::budget;
    std::size_t steps = 0;
};

/**
 * Flow from (t0, x0) until t_final or until `guard` turns true.
 *
 * Steps use adaptive Dormand-Prince 5(4) (or fixed steps when
 * settings.fixed_step is set). The guard is tested at the end of every step
 * and at settings.guard_subsamples interior dense-output points; a crossing is
 * localized by bisection. A guard that becomes true and false again inside
 * one sub-sample interval is missed; max_step bounds the skipped distance.
 */
FlowSegment integrate_flow(const Vector& x0, double t0, double t_final, const FlowField& f,
                           const IntegratorSettings& settings, const Guard& guard = {},
                           const MaxStepFn& max_step = {}, const StepObserver& observer = {});

} // namespace rah

#endif // RAH_INTEGRATOR_HPP
