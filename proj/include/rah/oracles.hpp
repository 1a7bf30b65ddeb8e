#ifndef RAH_ORACLES_HPP
#define RAH_ORACLES_HPP

#include "rah/hybrid_engine.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rah::oracles {

/// Central differences, one coordinate at a time.
Vector fd_gradient(const std::function<double(const Vector&)>& field, const Vector& point, double step = 1e-5);

/**
 * Minimum of `level(z, ze)` over `points` equally spaced points on each
 * obstacle circle (2-D only). A reference implementation kept apart from the
 * production safety margin. ze inside an obstacle yields level(ze, ze).
 */
double d_discretized(const Vector& ze, const std::vector<Obstacle>& obstacles,
                     const std::function<double(const Vector&, const Vector&)>& level, int points);

/// Empirical order log2(|d_M - d*| / |d_2M - d*|) of the discretized margin against a reference value.
double d_discretized_order(const Vector& ze, const std::vector<Obstacle>& obstacles,
                           const std::function<double(const Vector&, const Vector&)>& level, int points,
                           double reference);

/// Arrival time of the stabilizer from |xi0| = r0: (r0 - c) outside B_c plus 3 c^(2/3) r^(1/3) inside.
double stabilizer_arrival_time(double r0, double c);

/// Where the blended law stalls for xi0 on the ray through q_i beyond the obstacle: q_i (1 + Delta_i / |q_i|).
Vector trap_stall_point(const Obstacle& obs);

struct Witness {
    HybridTime time;
    Vector state;
    double value = 0.0;
};

struct PropertyReport {
    std::string name;
    bool passed = true;
    double tolerance = 0.0;
    std::optional<Witness> witness; ///< worst case; always present on failure
    std::string detail;
};

struct TrajectoryChecks {
    std::vector<Obstacle> obstacles;   ///< world coordinates of the virtual state
    Eigen::Index xi_offset = 0;        ///< where the virtual state starts in the solution state
    Eigen::Index dimension = 2;        ///< p
    Vector target;                     ///< empty means the origin

    bool safety = true;
    double safety_tol = 1e-6;
    bool norm_monotonicity = true;
    double monotonic_slack = 1e-9;
    bool gate = false;                 ///< reads the "gate" diagnostic
    double gate_tol = 1e-6;
    std::optional<double> gate_from;   ///< only samples at or after this time
    bool output_safety = false;        ///< reads the z_k diagnostics
    double output_tol = 1e-6;
    bool jump_budget = true;
    long max_jumps = -1;               ///< negative means 2N
    bool non_zeno = true;
    double zeno_window = 1e-6;
    int zeno_burst = 2;
    bool well_formed = true;
};

/// rho is the last state component.
std::vector<PropertyReport> check_trajectory(const HybridSolution& solution, const TrajectoryChecks& checks);

bool all_passed(const std::vector<PropertyReport>& reports);

std::string format_report(const PropertyReport& report);

/// Accumulated polar angle of the 2-D point state[offset..offset+2) - centre over the samples.
double winding_angle(const HybridSolution& solution, const Vector& centre, Eigen::Index offset = 0);

} // namespace rah::oracles

#endif // RAH_ORACLES_HPP
