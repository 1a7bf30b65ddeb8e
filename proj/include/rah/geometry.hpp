#ifndef RAH_GEOMETRY_HPP
#define RAH_GEOMETRY_HPP

#include "rah/types.hpp"

#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace rah {

enum class Relation { less, less_equal, equal, greater_equal, greater };

/// Direction of the detour vector used in the hybrid mode (2-D naming).
enum class QbarConvention { counterclockwise, clockwise };

/**
 * A static spherical obstacle.
 *
 * The unsafe set is the closed ball of radius `radius` around `center`. The
 * virtual state keeps out of the open ball of radius safety_radius() and the
 * avoidance blend starts at `activation_radius`. theta1/theta0/eps shape the
 * hysteresis cones M1 and M0 behind the obstacle.
 */
struct Obstacle {
    Vector center;
    double radius = 0.0;
    double safety_margin = 0.0;
    double activation_radius = 0.0;
    double theta1 = std::numbers::pi / 12.0;
    double theta0 = std::numbers::pi / 6.0;
    double eps = 0.0;
    QbarConvention qbar = QbarConvention::counterclockwise;

    double safety_radius() const { return radius + safety_margin; }
};

/// Initial conditions carried by a scenario file. `x` is empty for virtual-only runs.
struct InitialConditions {
    Vector xi;
    int rho = 0;
    Vector x;
};

struct Scenario {
    int dimension = 2;
    double c = 1.0;
    double ell = 1.0;
    Vector target;
    std::vector<Obstacle> obstacles;
    IntegratorSettings integrator;
    StopSettings stop;
    InitialConditions initial;
    double eps_tilde = 0.0;
    int d_points = 720;
    double d_cap = 100.0;
};

struct Violation {
    std::string assumption;
    std::vector<std::size_t> obstacles;
    std::string detail;
};

/// Sign test of <a, a - q> against zero, evaluated exactly on the computed inner product.
bool q_halfspace_membership(const Vector& a, const Vector& q, Relation relation);

/// Closed cone with vertex q, axis along q, half-aperture theta, truncated to the closed eta-ball.
/// The vertex itself is reported as a non-member.
bool cone_membership(const Vector& z, double theta, const Vector& q, double eta);

/// Strict-inequality interior of the cone set.
bool cone_interior_membership(const Vector& z, double theta, const Vector& q, double eta);

bool m1_membership(const Vector& xi, const Obstacle& obs);
bool m0_membership(const Vector& xi, const Obstacle& obs);

/// Interiors of M1 / M0, used for the closure of the flow set.
bool m1_interior_membership(const Vector& xi, const Obstacle& obs);
bool m0_interior_membership(const Vector& xi, const Obstacle& obs);

/**
 * Build an obstacle, filling omitted parameters with the defaults
 * delta = r/4, theta1 = pi/12, theta0 = pi/6, eps = lambda/10.
 * When lambda is omitted it is set to twice the safety radius.
 */
Obstacle make_obstacle(Vector center, double radius, std::optional<double> delta = std::nullopt,
                       std::optional<double> lambda = std::nullopt, std::optional<double> theta1 = std::nullopt,
                       std::optional<double> theta0 = std::nullopt, std::optional<double> eps = std::nullopt,
                       QbarConvention qbar = QbarConvention::counterclockwise);

/// Check obstacle parameters, pairwise separation, the clearance of B_c(target)
/// and the activation-radius interval. Empty result means valid.
std::vector<Violation> validate_scenario(const Scenario& s);

std::string describe(const Violation& v);

} // namespace rah

#endif // RAH_GEOMETRY_HPP
