#ifndef RAH_TESTS_COMMON_HPP
#define RAH_TESTS_COMMON_HPP

#include "rah/geometry.hpp"

#include <initializer_list>
#include <numbers>

namespace rah::testing {

inline Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v) {
        out(k++) = x;
    }
    return out;
}

/// Obstacle with explicit Delta split as r = Delta / 2, delta = Delta / 2.
inline Obstacle obstacle(Vector q, double Delta, double lambda, double theta1 = std::numbers::pi / 12,
                         double theta0 = std::numbers::pi / 6, double eps = -1.0,
                         QbarConvention qbar = QbarConvention::counterclockwise)
{
    Obstacle o;
    o.center = std::move(q);
    o.radius = Delta / 2;
    o.safety_margin = Delta / 2;
    o.activation_radius = lambda;
    o.theta1 = theta1;
    o.theta0 = theta0;
    o.eps = eps > 0 ? eps : 0.1 * lambda;
    o.qbar = qbar;
    return o;
}

/// Collinear trap: obstacle (3,0) with Delta = 1, lambda = 2, start (6,0).
inline Scenario trap_scenario(QbarConvention qbar = QbarConvention::counterclockwise)
{
    Scenario s;
    s.dimension = 2;
    s.c = 1.0;
    s.target = Vector::Zero(2);
    s.obstacles.push_back(obstacle(vec({3.0, 0.0}), 1.0, 2.0, std::numbers::pi / 12, std::numbers::pi / 6, -1.0, qbar));
    s.initial.xi = vec({6.0, 0.0});
    s.stop.t_max = 60.0;
    return s;
}

/// Three-obstacle unicycle course; x0 at rest on the reference, heading towards the target.
inline Scenario course_scenario()
{
    Scenario s;
    s.dimension = 2;
    s.c = 1.0;
    s.ell = 1.0;
    s.target = Vector::Zero(2);
    s.obstacles.push_back(make_obstacle(vec({7.0, 0.0}), 1.0, 0.5, 2.5, std::nullopt, std::nullopt, 0.25));
    s.obstacles.push_back(make_obstacle(vec({3.5, 3.0}), 0.8, 0.4, 1.8, std::nullopt, std::nullopt, 0.18));
    s.obstacles.push_back(make_obstacle(vec({3.5, -3.0}), 0.8, 0.4, 1.8, std::nullopt, std::nullopt, 0.18));
    s.integrator.sample_interval = 0.5;
    s.integrator.max_step = 1.0;
    s.stop.t_max = 1e5;
    s.stop.z_tol = 1e-3;
    s.initial.xi = vec({11.0, 0.0});
    s.initial.x = vec({11.0, 0.0, std::numbers::pi, 0.0, 0.0});
    return s;
}

} // namespace rah::testing

#endif // RAH_TESTS_COMMON_HPP
