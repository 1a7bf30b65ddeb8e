#ifndef RAH_VIRTUAL_CONTROL_HPP
#define RAH_VIRTUAL_CONTROL_HPP

#include "rah/geometry.hpp"

#include <vector>

namespace rah {

struct VirtualControllerParams {
    double c = 1.0;
    std::vector<Obstacle> obstacles;
};

/// c^(2/3) r^(1/3) on [0, c], r beyond. Gives unit speed outside B_c and finite-time arrival inside.
double velocity_scaling(double r, double c);

/// Stabilizer -xi / s_c(|xi|); zero at the origin.
Vector nu_s(const Vector& xi, double c);

/// I - z z^T / |z|^2.
Matrix orthogonal_projection(const Vector& z);

/// pi(z) v without forming the matrix.
Vector project_out(const Vector& z, const Vector& v);

/// Stabilizer with the radial component (relative to q_i) removed.
Vector nu_a(const Vector& xi, const Vector& q_i, double c);

double sigma(const Vector& xi, const Vector& q_i);
double alpha_s(const Vector& xi, const Obstacle& obs);
double alpha_a(const Vector& xi, const Obstacle& obs);

Vector mu_single(const Vector& xi, const Obstacle& obs, double c);
Vector mu_multi(const Vector& xi, const VirtualControllerParams& params);

/**
 * Unit vector orthogonal to xi - q_i.
 *
 * In 2-D the convention rotates the unit radial direction by +90 deg
 * (counterclockwise) or -90 deg (clockwise). For p >= 3 the first standard
 * basis vector (second if degenerate) is projected onto the orthogonal
 * complement and normalized; clockwise negates it.
 */
Vector select_qbar(const Vector& xi, const Vector& q_i, QbarConvention convention);

/// Hybrid law: blended law for rho = 0, detour along qbar for rho = 1.
Vector mu_bar(const Vector& xi, int rho, const VirtualControllerParams& params);

} // namespace rah

#endif // RAH_VIRTUAL_CONTROL_HPP
