#ifndef RAH_UNICYCLE_HPP
#define RAH_UNICYCLE_HPP

#include "rah/plant.hpp"

#include <cmath>

namespace rah::unicycle {

/// State layout: (p1, p2, theta, w1, w2). Input: (u1, u2). Output: (p1, p2).
inline constexpr int state_dim = 5;

/// Smallest eigenvalue of P = [[1, 1], [1, 2]].
inline const double lambda_min = (3.0 - std::sqrt(5.0)) / 2.0;

Vector dynamics(const Vector& x, const Vector& u);

/// R(theta)^T (ze - p).
Eigen::Vector2d body_frame_error(const Vector& x, const Vector& ze);

Eigen::Vector2d v_profile(const Eigen::Vector2d& pbar);

double lyapunov(const Vector& x, const Vector& ze);
Vector lyapunov_grad(const Vector& x, const Vector& ze);
Vector feedback(const Vector& x, const Vector& ze);

/// (lambda_min / 2) s^2 + s^4 / 8: lower bound of V over states at output distance s from ze.
double radial_level(double s);

/// min_i radial_level(max(0, |ze - q_i| - r_i)); +inf without obstacles.
double d_closed_form(const Vector& ze, const std::vector<Obstacle>& obstacles);

PlantModel plant();
TrackingController controller();

} // namespace rah::unicycle

#endif // RAH_UNICYCLE_HPP
