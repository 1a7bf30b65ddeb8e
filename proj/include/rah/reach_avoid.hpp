#ifndef RAH_REACH_AVOID_HPP
#define RAH_REACH_AVOID_HPP

#include "rah/hybrid_engine.hpp"
#include "rah/virtual_control.hpp"

namespace rah {

/// blended: the continuous multi-obstacle law, no logic state jumps.
/// hybrid: the hysteresis-switched law with rho in {0, 1}.
enum class VirtualLaw { blended, hybrid };

/// Slack used when testing membership of flowed states in the state space.
inline constexpr double state_space_slack = 1e-6;

/// xi outside every open safety ball (up to `slack`).
bool in_state_space(const Vector& xi, const std::vector<Obstacle>& obstacles, double slack = 0.0);

/**
 * Jump set on (xi, rho): rho = 0 and xi in some M1^i, or rho = 1 and xi in
 * M0^i for every obstacle (the detour ends once all wide cones are left).
 */
bool in_virtual_jump_set(const Vector& xi, int rho, const std::vector<Obstacle>& obstacles);

/// Closure of the state space minus the jump set, via interior tests of the M sets.
bool in_virtual_flow_set(const Vector& xi, int rho, const std::vector<Obstacle>& obstacles);

/// Obstacle responsible for a jump: the M1 owner for 0 -> 1, the nearest wide cone for 1 -> 0.
std::optional<std::size_t> virtual_jump_trigger(const Vector& xi, int rho, const std::vector<Obstacle>& obstacles);

/// (lambda_i - Delta_i) / 4 for every obstacle whose centre is within 2 lambda_i; +inf otherwise.
double obstacle_step_bound(const Vector& xi, const std::vector<Obstacle>& obstacles);

/// Hybrid data for the state [xi; rho] in origin-shifted coordinates.
HybridSystemDef make_virtual_system(const VirtualControllerParams& params, VirtualLaw law, double eps_stop);

struct VirtualRun {
    HybridSolution solution;         ///< origin-shifted coordinates
    VirtualControllerParams params;  ///< shifted obstacles
    Vector target;
    std::vector<double> min_distance; ///< per obstacle, samples and dense output
};

/// Simulate the virtual dynamics of a scenario from its initial (xi, rho).
VirtualRun simulate_virtual(const Scenario& scenario, VirtualLaw law = VirtualLaw::hybrid);

} // namespace rah

#endif // RAH_REACH_AVOID_HPP
