#include "rah/virtual_control.hpp"

#include <algorithm>
#include <cmath>

namespace rah {

namespace {

void reject_center(const Vector& xi, const Vector& q, const char* where)
{
    require_same_dimension(xi, q, where);
    if ((xi - q).norm() == 0.0) {
        throw std::invalid_argument(std::string(where) + ": xi coincides with an obstacle center");
    }
}

double clamp01(double v)
{
    return std::max(0.0, std::min(v, 1.0));
}

} // namespace

double velocity_scaling(double r, double c)
{
    if (r < 0.0) {
        throw std::invalid_argument("velocity_scaling: negative radius");
    }
    if (!(c > 0.0)) {
        throw std::invalid_argument("velocity_scaling: c must be positive");
    }
    if (r <= c) {
        return std::cbrt(c * c) * std::cbrt(r);
    }
    return r;
}

Vector nu_s(const Vector& xi, double c)
{
    const double r = xi.norm();
    if (r == 0.0) {
        return Vector::Zero(xi.size());
    }
    return -xi / velocity_scaling(r, c);
}

Matrix orthogonal_projection(const Vector& z)
{
    const double n2 = z.squaredNorm();
    if (n2 == 0.0) {
        throw std::invalid_argument("orthogonal_projection: zero vector");
    }
    return Matrix::Identity(z.size(), z.size()) - z * z.transpose() / n2;
}

Vector project_out(const Vector& z, const Vector& v)
{
    const double n2 = z.squaredNorm();
    if (n2 == 0.0) {
        throw std::invalid_argument("project_out: zero vector");
    }
    return v - z * (z.dot(v) / n2);
}

Vector nu_a(const Vector& xi, const Vector& q_i, double c)
{
    reject_center(xi, q_i, "nu_a");
    return project_out(xi - q_i, nu_s(xi, c));
}

double sigma(const Vector& xi, const Vector& q_i)
{
    require_same_dimension(xi, q_i, "sigma");
    return clamp01(xi.dot(xi - q_i) + 1.0);
}

double alpha_s(const Vector& xi, const Obstacle& obs)
{
    const double delta = obs.safety_radius();
    const double num = (xi - obs.center).norm() - delta * sigma(xi, obs.center);
    return clamp01(num / (obs.activation_radius - delta));
}

double alpha_a(const Vector& xi, const Obstacle& obs)
{
    return sigma(xi, obs.center) * (1.0 - alpha_s(xi, obs));
}

Vector mu_single(const Vector& xi, const Obstacle& obs, double c)
{
    reject_center(xi, obs.center, "mu_single");
    const Vector vs = nu_s(xi, c);
    return alpha_s(xi, obs) * vs + alpha_a(xi, obs) * project_out(xi - obs.center, vs);
}

namespace {

Vector blend(const Vector& xi, int rho, const VirtualControllerParams& params)
{
    const Vector vs = nu_s(xi, params.c);
    double prod = 1.0;
    Vector sum = Vector::Zero(xi.size());
    for (const Obstacle& o : params.obstacles) {
        reject_center(xi, o.center, "mu");
        const double as = alpha_s(xi, o);
        prod *= as;
        const double aa = sigma(xi, o.center) * (1.0 - as);
        if (aa == 0.0) {
            continue;
        }
        const Vector e = xi - o.center;
        if (rho == 0) {
            sum += aa * project_out(e, vs);
        } else {
            sum += aa * project_out(e, select_qbar(xi, o.center, o.qbar));
        }
    }
    return prod * vs + sum;
}

} // namespace

Vector mu_multi(const Vector& xi, const VirtualControllerParams& params)
{
    return blend(xi, 0, params);
}

Vector select_qbar(const Vector& xi, const Vector& q_i, QbarConvention convention)
{
    reject_center(xi, q_i, "select_qbar");
    const Vector e = xi - q_i;
    const double sign = convention == QbarConvention::counterclockwise ? 1.0 : -1.0;
    if (e.size() == 2) {
        const Vector u = e / e.norm();
        Vector out(2);
        out << -sign * u(1), sign * u(0);
        return out;
    }
    if (e.size() < 2) {
        throw std::invalid_argument("select_qbar: kernel of xi - q_i is trivial for p = 1");
    }
    for (Eigen::Index k = 0; k < 2; ++k) {
        const Vector ref = Vector::Unit(e.size(), k);
        const Vector v = project_out(e, ref);
        const double n = v.norm();
        if (n > 1e-6) {
            return sign * v / n;
        }
    }
    throw std::logic_error("select_qbar: both reference directions degenerate");
}

Vector mu_bar(const Vector& xi, int rho, const VirtualControllerParams& params)
{
    if (rho != 0 && rho != 1) {
        throw std::invalid_argument("mu_bar: rho must be 0 or 1");
    }
    return blend(xi, rho, params);
}

} // namespace rah
