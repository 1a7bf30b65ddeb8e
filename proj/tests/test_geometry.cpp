#include "common.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rah;
using rah::testing::obstacle;
using rah::testing::vec;

TEST(QHalfspace, HandEvaluatedExamples)
{
    EXPECT_TRUE(q_halfspace_membership(vec({4, 0}), vec({2, 0}), Relation::greater_equal));
    EXPECT_TRUE(q_halfspace_membership(vec({0, 0}), vec({2, 0}), Relation::less_equal));
    EXPECT_FALSE(q_halfspace_membership(vec({1, 0}), vec({2, 0}), Relation::greater));
    EXPECT_TRUE(q_halfspace_membership(vec({1, 0}), vec({2, 0}), Relation::less));
}

TEST(QHalfspace, DimensionMismatchThrows)
{
    EXPECT_THROW(q_halfspace_membership(vec({1, 0}), vec({1, 0, 0}), Relation::equal), std::invalid_argument);
}

TEST(QHalfspace, EqualityHoldsOnCircleThroughOriginAndQ)
{
    // <a, a - q> = 0 is the circle with diameter [0, q].
    const Vector q = vec({2.0, 1.0});
    const Vector m = 0.5 * q;
    const double rad = 0.5 * q.norm();
    for (int k = 0; k < 360; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 360.0;
        const Vector pt = m + rad * vec({std::cos(a), std::sin(a)});
        EXPECT_NEAR(pt.dot(pt - q), 0.0, 1e-12);
    }
}

TEST(Cone, Examples)
{
    const Vector q = vec({3, 0});
    EXPECT_TRUE(cone_membership(vec({3.5, 0}), std::numbers::pi / 6, q, 2.0));
    EXPECT_FALSE(cone_membership(vec({3, 1}), std::numbers::pi / 6, q, 2.0));
    EXPECT_FALSE(cone_membership(vec({6, 0}), std::numbers::pi / 6, q, 2.0));
    EXPECT_FALSE(cone_membership(q, std::numbers::pi / 6, q, 2.0)) << "vertex is a non-member";
}

TEST(Cone, RejectsZeroAxisAndBadEta)
{
    EXPECT_THROW(cone_membership(vec({1, 0}), 0.3, vec({0, 0}), 1.0), std::invalid_argument);
    EXPECT_THROW(cone_membership(vec({1, 0}), 0.3, vec({1, 1}), 0.0), std::invalid_argument);
}

TEST(Cone, MonotoneInAngleAndRadius)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 6.0);
    const Vector q = vec({2.0, 0.5});
    for (int k = 0; k < 20000; ++k) {
        const Vector z = vec({u(rng), u(rng)});
        if (cone_membership(z, 0.2, q, 1.5)) {
            EXPECT_TRUE(cone_membership(z, 0.5, q, 1.5));
            EXPECT_TRUE(cone_membership(z, 0.2, q, 2.5));
        }
    }
}

TEST(MSets, Examples)
{
    const Obstacle m1obs = obstacle(vec({3, 0}), 1.0, 2.0, std::numbers::pi / 6, std::numbers::pi / 5, 0.5);
    EXPECT_TRUE(m1_membership(vec({4.5, 0}), m1obs));
    EXPECT_FALSE(m1_membership(vec({3.5, 0}), m1obs));
    EXPECT_FALSE(m1_membership(vec({1.5, 0}), m1obs));

    const Obstacle m0obs = obstacle(vec({3, 0}), 1.0, 2.0, std::numbers::pi / 12, std::numbers::pi / 5, 0.5);
    EXPECT_TRUE(m0_membership(vec({1.5, 0}), m0obs));
    EXPECT_FALSE(m0_membership(vec({4.5, 0}), m0obs));
    EXPECT_FALSE(m0_membership(vec({3.5, 0}), m0obs));
}

TEST(MSets, HysteresisDisjointnessDenseSampling)
{
    std::mt19937_64 rng(2024);
    const std::vector<Obstacle> obs = {
        obstacle(vec({3, 0}), 1.0, 2.0),
        obstacle(vec({-1, 4}), 0.6, 1.1, 0.05, 0.1, 0.01),
        make_obstacle(vec({7.0, 0.0}), 1.0, 0.5, 2.5, std::nullopt, std::nullopt, 0.25),
    };
    for (const Obstacle& o : obs) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double span = 1.5 * (o.activation_radius + o.eps);
        long checked = 0;
        while (checked < 100000) {
            const Vector xi = o.center + span * vec({u(rng), u(rng)});
            if ((xi - o.center).norm() < o.safety_radius()) {
                continue;
            }
            ++checked;
            ASSERT_FALSE(m1_membership(xi, o) && m0_membership(xi, o)) << xi.transpose();
        }
    }
}

TEST(MSets, InteriorsAreSubsets)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    const Obstacle o = obstacle(vec({3, 0}), 1.0, 2.0);
    for (int k = 0; k < 20000; ++k) {
        const Vector xi = vec({u(rng), u(rng) - 3.0});
        if (m1_interior_membership(xi, o)) {
            EXPECT_TRUE(m1_membership(xi, o));
        }
        if (m0_interior_membership(xi, o)) {
            EXPECT_TRUE(m0_membership(xi, o));
        }
    }
}

namespace {

Scenario single()
{
    Scenario s;
    s.dimension = 2;
    s.c = 1.0;
    s.target = vec({0, 0});
    s.obstacles.push_back(make_obstacle(vec({3, 0}), 0.5, 0.5, 1.5));
    return s;
}

bool names(const std::vector<Violation>& v, const std::string& what)
{
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.assumption == what; });
}

} // namespace

TEST(Validate, ValidSingleObstacle)
{
    EXPECT_TRUE(validate_scenario(single()).empty());
}

TEST(Validate, PairwiseSeparation)
{
    Scenario s;
    s.dimension = 2;
    s.target = vec({0, 0});
    s.c = 0.5;
    s.obstacles.push_back(make_obstacle(vec({3, 0}), 0.5, 0.5, 1.2));
    s.obstacles.push_back(make_obstacle(vec({4, 0}), 0.5, 0.5, 1.2));
    const auto v = validate_scenario(s);
    ASSERT_TRUE(names(v, "pairwise separation"));
    for (const auto& x : v) {
        if (x.assumption == "pairwise separation") {
            EXPECT_EQ(x.obstacles, (std::vector<std::size_t>{0, 1}));
        }
    }
}

TEST(Validate, LambdaEqualDeltaRejected)
{
    Scenario s = single();
    s.obstacles[0].activation_radius = s.obstacles[0].safety_radius();
    EXPECT_TRUE(names(validate_scenario(s), "activation radius interval"));
}

TEST(Validate, EachSinglePerturbationIsRejected)
{
    const Scenario base = single();
    const auto bad = [&](auto mutate, const std::string& what) {
        Scenario s = base;
        mutate(s);
        EXPECT_TRUE(names(validate_scenario(s), what)) << what;
    };
    bad([](Scenario& s) { s.obstacles[0].radius = 0.0; }, "obstacle radii");
    bad([](Scenario& s) { s.obstacles[0].safety_margin = -0.1; }, "obstacle radii");
    bad([](Scenario& s) { s.obstacles[0].activation_radius = 0.9; }, "activation radius interval");
    bad([](Scenario& s) { s.obstacles[0].theta1 = s.obstacles[0].theta0; }, "hysteresis angles");
    bad([](Scenario& s) { s.obstacles[0].theta0 = std::numbers::pi / 4; }, "hysteresis angles");
    bad([](Scenario& s) { s.obstacles[0].theta1 = 0.0; }, "hysteresis angles");
    bad([](Scenario& s) { s.obstacles[0].eps = 0.0; }, "hysteresis gap");
    bad([](Scenario& s) { s.c = 2.5; }, "target clearance");
    bad([](Scenario& s) { s.target = vec({1.5, 0}); }, "target clearance");
    bad([](Scenario& s) { s.c = 0.0; }, "stabilizer radius");
    bad([](Scenario& s) { s.ell = 0.0; }, "gate gain");
}

TEST(Validate, ActivationUpperEnd)
{
    Scenario s;
    s.dimension = 2;
    s.target = vec({0, 0});
    s.c = 0.5;
    s.obstacles.push_back(make_obstacle(vec({3, 0}), 0.5, 0.5, 2.0));
    s.obstacles.push_back(make_obstacle(vec({3, 4}), 0.5, 0.5, 2.0));
    EXPECT_TRUE(validate_scenario(s).empty());
    s.obstacles[0].activation_radius = 3.0; // 4 - 1 = 3 is excluded
    EXPECT_TRUE(names(validate_scenario(s), "activation radius interval"));
}

TEST(MakeObstacle, Defaults)
{
    const Obstacle o = make_obstacle(vec({3, 0}), 2.0);
    EXPECT_DOUBLE_EQ(o.safety_margin, 0.5);
    EXPECT_DOUBLE_EQ(o.activation_radius, 5.0);
    EXPECT_DOUBLE_EQ(o.theta1, std::numbers::pi / 12);
    EXPECT_DOUBLE_EQ(o.theta0, std::numbers::pi / 6);
    EXPECT_DOUBLE_EQ(o.eps, 0.5);
}
