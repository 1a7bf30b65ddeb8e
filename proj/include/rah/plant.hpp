#ifndef RAH_PLANT_HPP
#define RAH_PLANT_HPP

#include "rah/hybrid_engine.hpp"
#include "rah/reach_avoid.hpp"

#include <functional>
#include <optional>
#include <string>

namespace rah {

/// x' = f(x, u), z = h(x).
struct PlantModel {
    std::string name;
    int n = 0;
    int m = 0;
    int p = 0;
    std::function<Vector(const Vector& x, const Vector& u)> f;
    std::function<Vector(const Vector& x)> h;
};

/**
 * Lyapunov pair for tracking a constant output reference z_e.
 *
 * `output_level(z, z_e)` is a lower bound of V over the states whose output is
 * z; the generic safety margin minimises it over obstacle boundaries. Plants
 * with a radial bound can provide `d_closed_form` instead.
 */
struct TrackingController {
    std::function<double(const Vector& x, const Vector& ze)> V;
    std::function<Vector(const Vector& x, const Vector& ze)> grad_V;
    std::function<Vector(const Vector& x, const Vector& ze)> u;
    std::function<double(const Vector& z, const Vector& ze)> output_level;
    std::function<double(const Vector& ze, const std::vector<Obstacle>& obstacles)> d_closed_form;
};

/// Translate obstacles and the initial virtual state so that the target sits at the origin.
Scenario shift_to_origin(const Scenario& scenario);

/// Inverse of the translation applied to points.
Vector unshift(const Vector& point, const Vector& target);

struct DBound {
    double value = 0.0;
    double error_estimate = 0.0; ///< |d_M - d_{M/2}|
};

/**
 * min over sampled obstacle boundary points z of output_level(z, ze), minus
 * eps_tilde. `points` per obstacle: a circle in 2-D, a Fibonacci sphere in
 * 3-D, the two boundary points in 1-D. When ze lies in a closed obstacle it
 * is itself a candidate. +inf without obstacles.
 */
DBound d_bound(const Vector& ze, const std::vector<Obstacle>& obstacles,
               const std::function<double(const Vector&, const Vector&)>& output_level, double eps_tilde, int points);

/// Parameters shared by the coupled flow and the closed-loop run.
struct CoupledParams {
    VirtualControllerParams virtual_params; ///< obstacles shifted so the target is at 0
    std::vector<Obstacle> obstacles;        ///< obstacles in world coordinates
    Vector target;
    double ell = 1.0;
    double eps_tilde = 0.0;
    int d_points = 720;
    double d_cap = 100.0;
    double eps_stop = 1e-8;
};

/// Safety margin used by the gate: closed form when available, else discretized; capped at d_cap.
double safety_margin(const Vector& zeta, const TrackingController& ctrl, const CoupledParams& params);

/// Velocity of the virtual reference; exactly zero when the gate is closed.
Vector zeta_velocity(const Vector& x, const Vector& zeta, int rho, const TrackingController& ctrl,
                     const CoupledParams& params);

/// Time derivative of the state [x; zeta; rho].
Vector coupled_flow(const Vector& s, const PlantModel& plant, const TrackingController& ctrl,
                    const CoupledParams& params);

struct ClosedLoopRun {
    HybridSolution solution;            ///< states [x; zeta; rho] in world coordinates
    CoupledParams params;
    double initial_gate = 0.0;
    bool initial_gate_ok = false;
    std::optional<double> gate_open_time; ///< first time the gate became nonnegative, when it started closed
    double min_gate = 0.0;                ///< over samples and dense output, after the gate first opened
    std::vector<double> min_output_distance;  ///< |h(x) - q_i|
    std::vector<double> min_virtual_distance; ///< |zeta - q_i|
};

CoupledParams make_coupled_params(const Scenario& scenario);

HybridSystemDef make_coupled_system(const PlantModel& plant, const TrackingController& ctrl,
                                    const CoupledParams& params, double z_tol);

/// Run the coupled closed loop from (x0, zeta0, rho0), all in world coordinates.
ClosedLoopRun simulate_closed_loop(const Scenario& scenario, const PlantModel& plant, const TrackingController& ctrl,
                                   const Vector& x0, const Vector& zeta0, int rho0);

} // namespace rah

#endif // RAH_PLANT_HPP
