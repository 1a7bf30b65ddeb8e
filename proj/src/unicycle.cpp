#include "rah/unicycle.hpp"

#include <limits>

namespace rah::unicycle {

namespace {

void check_state(const Vector& x, const Vector& ze, const char* where)
{
    if (x.size() != state_dim || ze.size() != 2) {
        throw std::invalid_argument(std::string(where) + ": expected a 5-state and a 2-D reference");
    }
}

} // namespace

Vector dynamics(const Vector& x, const Vector& u)
{
    if (x.size() != state_dim || u.size() != 2) {
        throw std::invalid_argument("unicycle::dynamics: expected a 5-state and a 2-input");
    }
    Vector dx(state_dim);
    dx << x(3) * std::cos(x(2)), x(3) * std::sin(x(2)), x(4), u(0), u(1);
    return dx;
}

Eigen::Vector2d body_frame_error(const Vector& x, const Vector& ze)
{
    check_state(x, ze, "unicycle::body_frame_error");
    const double c = std::cos(x(2));
    const double s = std::sin(x(2));
    const double e1 = ze(0) - x(0);
    const double e2 = ze(1) - x(1);
    return {c * e1 + s * e2, -s * e1 + c * e2};
}

Eigen::Vector2d v_profile(const Eigen::Vector2d& pb)
{
    const double a = pb(0);
    const double b = pb(1);
    return {20.0 * a * b * b + 25.0 * a * a * a + 20.0 * b * b * b, 20.0 * a * b};
}

double lyapunov(const Vector& x, const Vector& ze)
{
    const Eigen::Vector2d pb = body_frame_error(x, ze);
    const Eigen::Vector2d v = v_profile(pb);
    const double a = pb(0);
    const double b = pb(1);
    const double quad = a * a + 2.0 * a * b + 2.0 * b * b;
    const double dw1 = x(3) - v(0);
    const double dw2 = x(4) - v(1);
    return 0.5 * quad + 0.25 * (a * a * a * a + b * b * b * b) + 0.5 * (dw1 * dw1 + dw2 * dw2);
}

Vector lyapunov_grad(const Vector& x, const Vector& ze)
{
    const Eigen::Vector2d pb = body_frame_error(x, ze);
    const Eigen::Vector2d v = v_profile(pb);
    const double a = pb(0);
    const double b = pb(1);
    const double dw1 = x(3) - v(0);
    const double dw2 = x(4) - v(1);

    // dV/dpbar
    const double g1 = (a + b) + a * a * a - dw1 * (75.0 * a * a + 20.0 * b * b) - dw2 * 20.0 * b;
    const double g2 = (a + 2.0 * b) + b * b * b - dw1 * (40.0 * a * b + 60.0 * b * b) - dw2 * 20.0 * a;

    const double c = std::cos(x(2));
    const double s = std::sin(x(2));
    Vector g(state_dim);
    g(0) = -c * g1 + s * g2;
    g(1) = -s * g1 - c * g2;
    g(2) = g1 * b - g2 * a;
    g(3) = dw1;
    g(4) = dw2;
    return g;
}

Vector feedback(const Vector& x, const Vector& ze)
{
    const Eigen::Vector2d pb = body_frame_error(x, ze);
    const Eigen::Vector2d v = v_profile(pb);
    const double a = pb(0);
    const double b = pb(1);
    const double w1 = x(3);
    const double w2 = x(4);
    Vector u(2);
    u(0) = -w1 + v(0) + (75.0 * a * a + 20.0 * b * b) * (-w1 + w2 * b) - (60.0 * b * b + 40.0 * a * b) * w2 * a;
    u(1) = -w2 + v(1) + 20.0 * b * (-w1 + w2 * b) - 20.0 * a * a * w2;
    return u;
}

double radial_level(double s)
{
    return 0.5 * lambda_min * s * s + s * s * s * s / 8.0;
}

double d_closed_form(const Vector& ze, const std::vector<Obstacle>& obstacles)
{
    double d = std::numeric_limits<double>::infinity();
    for (const Obstacle& o : obstacles) {
        require_same_dimension(ze, o.center, "unicycle::d_closed_form");
        d = std::min(d, radial_level(std::max(0.0, (ze - o.center).norm() - o.radius)));
    }
    return d;
}

PlantModel plant()
{
    PlantModel m;
    m.name = "unicycle";
    m.n = state_dim;
    m.m = 2;
    m.p = 2;
    m.f = dynamics;
    m.h = [](const Vector& x) -> Vector { return x.head(2); };
    return m;
}

TrackingController controller()
{
    TrackingController c;
    c.V = lyapunov;
    c.grad_V = lyapunov_grad;
    c.u = feedback;
    c.output_level = [](const Vector& z, const Vector& ze) { return radial_level((z - ze).norm()); };
    c.d_closed_form = d_closed_form;
    return c;
}

} // namespace rah::unicycle
