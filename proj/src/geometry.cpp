#include "rah/geometry.hpp"

#include <cmath>
#include <sstream>

namespace rah {

bool q_halfspace_membership(const Vector& a, const Vector& q, Relation relation)
{
    require_same_dimension(a, q, "q_halfspace_membership");
    const double s = a.dot(a - q);
    switch (relation) {
    case Relation::less:
        return s < 0.0;
    case Relation::less_equal:
        return s <= 0.0;
    case Relation::equal:
        return s == 0.0;
    case Relation::greater_equal:
        return s >= 0.0;
    case Relation::greater:
        return s > 0.0;
    }
    return false;
}

namespace {

void check_cone_args(const Vector& z, const Vector& q, double eta)
{
    require_same_dimension(z, q, "cone_membership");
    if (q.norm() == 0.0) {
        throw std::invalid_argument("cone_membership: axis q must be nonzero");
    }
    if (!(eta > 0.0)) {
        throw std::invalid_argument("cone_membership: eta must be positive");
    }
}

} // namespace

bool cone_membership(const Vector& z, double theta, const Vector& q, double eta)
{
    check_cone_args(z, q, eta);
    const Vector e = z - q;
    const double ne = e.norm();
    if (ne == 0.0 || ne > eta) {
        return false;
    }
    return e.dot(q) >= std::cos(theta) * ne * q.norm();
}

bool cone_interior_membership(const Vector& z, double theta, const Vector& q, double eta)
{
    check_cone_args(z, q, eta);
    const Vector e = z - q;
    const double ne = e.norm();
    if (ne == 0.0 || ne >= eta) {
        return false;
    }
    return e.dot(q) > std::cos(theta) * ne * q.norm();
}

bool m1_membership(const Vector& xi, const Obstacle& obs)
{
    return cone_membership(xi, obs.theta1, obs.center, obs.activation_radius) &&
           (xi - obs.center).norm() >= obs.safety_radius();
}

bool m0_membership(const Vector& xi, const Obstacle& obs)
{
    return !cone_interior_membership(xi, obs.theta0, obs.center, obs.activation_radius + obs.eps) &&
           (xi - obs.center).norm() >= obs.safety_radius();
}

bool m1_interior_membership(const Vector& xi, const Obstacle& obs)
{
    return cone_interior_membership(xi, obs.theta1, obs.center, obs.activation_radius) &&
           (xi - obs.center).norm() > obs.safety_radius();
}

bool m0_interior_membership(const Vector& xi, const Obstacle& obs)
{
    return !cone_membership(xi, obs.theta0, obs.center, obs.activation_radius + obs.eps) &&
           (xi - obs.center).norm() > obs.safety_radius();
}

Obstacle make_obstacle(Vector center, double radius, std::optional<double> delta, std::optional<double> lambda,
                       std::optional<double> theta1, std::optional<double> theta0, std::optional<double> eps,
                       QbarConvention qbar)
{
    Obstacle o;
    o.center = std::move(center);
    o.radius = radius;
    o.safety_margin = delta.value_or(0.25 * radius);
    o.activation_radius = lambda.value_or(2.0 * o.safety_radius());
    o.theta1 = theta1.value_or(std::numbers::pi / 12.0);
    o.theta0 = theta0.value_or(std::numbers::pi / 6.0);
    o.eps = eps.value_or(0.1 * o.activation_radius);
    o.qbar = qbar;
    return o;
}

std::vector<Violation> validate_scenario(const Scenario& s)
{
    std::vector<Violation> out;
    auto add = [&out](std::string what, std::vector<std::size_t> idx, std::string detail) {
        out.push_back({std::move(what), std::move(idx), std::move(detail)});
    };

    if (s.dimension < 1) {
        add("dimension", {}, "dimension must be positive");
        return out;
    }
    const auto p = static_cast<Eigen::Index>(s.dimension);
    if (!(s.c > 0.0)) {
        add("stabilizer radius", {}, "c must be positive");
    }
    if (!(s.ell > 0.0)) {
        add("gate gain", {}, "ell must be positive");
    }
    if (s.target.size() != p) {
        add("dimension", {}, "target has wrong dimension");
        return out;
    }

    const std::size_t n = s.obstacles.size();
    bool shapes_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        const Obstacle& o = s.obstacles[i];
        if (o.center.size() != p) {
            add("dimension", {i}, "obstacle center has wrong dimension");
            shapes_ok = false;
            continue;
        }
        if (!(o.radius > 0.0) || !(o.safety_margin > 0.0)) {
            add("obstacle radii", {i}, "radius and safety margin must be positive");
        }
        if (!(o.activation_radius > o.safety_radius())) {
            add("activation radius interval", {i}, "lambda must exceed r + delta");
        }
        if (!(o.theta1 > 0.0 && o.theta1 < o.theta0 && o.theta0 < std::numbers::pi / 4.0)) {
            add("hysteresis angles", {i}, "need 0 < theta1 < theta0 < pi/4");
        }
        if (!(o.eps > 0.0)) {
            add("hysteresis gap", {i}, "eps must be positive");
        }
    }
    if (!shapes_ok) {
        return out;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const Obstacle& oi = s.obstacles[i];
        const double dist0 = (oi.center - s.target).norm();
        if (!(dist0 >= s.c + oi.safety_radius())) {
            std::ostringstream msg;
            msg << "B_c(target) meets the closed safety ball (distance " << dist0 << " < c + Delta = "
                << s.c + oi.safety_radius() << ")";
            add("target clearance", {i}, msg.str());
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            const Obstacle& oj = s.obstacles[j];
            const double dij = (oi.center - oj.center).norm();
            if (!(dij > oi.safety_radius() + oj.safety_radius())) {
                std::ostringstream msg;
                msg << "distance " << dij << " <= " << oi.safety_radius() + oj.safety_radius();
                add("pairwise separation", {i, j}, msg.str());
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const Obstacle& oj = s.obstacles[j];
            const double upper = (oi.center - oj.center).norm() - oj.safety_radius();
            if (!(oi.activation_radius < upper)) {
                std::ostringstream msg;
                msg << "lambda " << oi.activation_radius << " >= " << upper << " (obstacle " << j << ")";
                add("activation radius interval", {i, j}, msg.str());
            }
        }
    }
    return out;
}

std::string describe(const Violation& v)
{
    std::ostringstream os;
    os << v.assumption;
    if (!v.obstacles.empty()) {
        os << " [obstacles";
        for (auto i : v.obstacles) {
            os << ' ' << i;
        }
        os << ']';
    }
    if (!v.detail.empty()) {
        os << ": " << v.detail;
    }
    return os.str();
}

} // namespace rah
