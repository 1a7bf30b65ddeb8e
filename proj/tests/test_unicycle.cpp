#include "common.hpp"

#include "rah/oracles.hpp"
#include "rah/unicycle.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <random>

using namespace rah;
using rah::testing::vec;

TEST(Unicycle, DynamicsExample)
{
    const Vector dx = unicycle::dynamics(vec({1.0, 2.0, std::numbers::pi / 2, 3.0, 0.5}), vec({-1.0, 2.0}));
    EXPECT_NEAR(dx(0), 0.0, 1e-15);
    EXPECT_NEAR(dx(1), 3.0, 1e-15);
    EXPECT_EQ(dx(2), 0.5);
    EXPECT_EQ(dx(3), -1.0);
    EXPECT_EQ(dx(4), 2.0);
}

TEST(Unicycle, BodyFrameError)
{
    const Eigen::Vector2d e = unicycle::body_frame_error(vec({1.0, 1.0, std::numbers::pi / 2, 0.0, 0.0}), vec({1.0, 3.0}));
    EXPECT_NEAR(e(0), 2.0, 1e-15);
    EXPECT_NEAR(e(1), 0.0, 1e-15);
}

TEST(Unicycle, VProfileExample)
{
    const Eigen::Vector2d v = unicycle::v_profile({1.0, 1.0});
    EXPECT_EQ(v(0), 65.0);
    EXPECT_EQ(v(1), 20.0);
}

TEST(Unicycle, LyapunovExamples)
{
    const Vector ze = vec({1.0, 0.0});
    EXPECT_DOUBLE_EQ(unicycle::lyapunov(vec({0.0, 0.0, 0.0, 25.0, 0.0}), ze), 0.75);
    EXPECT_EQ(unicycle::lyapunov(vec({1.0, 0.0, 2.0, 0.0, 0.0}), ze), 0.0);
    const Vector u = unicycle::feedback(vec({1.0, 0.0, 2.0, 0.0, 0.0}), ze);
    EXPECT_EQ(u, vec({0.0, 0.0}));
}

TEST(Unicycle, LambdaMinMatchesEigensolver)
{
    Eigen::Matrix2d P;
    P << 1.0, 1.0, 1.0, 2.0;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(P);
    EXPECT_NEAR(unicycle::lambda_min, es.eigenvalues().minCoeff(), 1e-15);
}

namespace {

Vector random_state(std::mt19937_64& rng, double box)
{
    std::uniform_real_distribution<double> u(-box, box);
    return vec({u(rng), u(rng), u(rng), u(rng), u(rng)});
}

} // namespace

TEST(Unicycle, GradientMatchesFiniteDifferences)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 10000; ++k) {
        const Vector x = random_state(rng, 3.0);
        const Vector ze = vec({u(rng), u(rng)});
        const Vector g = unicycle::lyapunov_grad(x, ze);
        const Vector fd = oracles::fd_gradient([&](const Vector& y) { return unicycle::lyapunov(y, ze); }, x, 1e-4);
        ASSERT_LE((g - fd).norm(), 1e-5 * std::max(1.0, g.norm())) << x.transpose();
    }
}

TEST(Unicycle, LyapunovNonnegative)
{
    std::mt19937_64 rng(19);
    for (int k = 0; k < 1000000; ++k) {
        const Vector x = random_state(rng, 5.0);
        ASSERT_GE(unicycle::lyapunov(x, Vector::Zero(2)), 0.0);
    }
}

TEST(Unicycle, RotationInvariance)
{
    // Rotating positions, heading and target together leaves V unchanged.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 1000; ++k) {
        const Vector x = random_state(rng, 2.0);
        const Vector ze = vec({u(rng), u(rng)});
        const double a = u(rng);
        Eigen::Matrix2d R;
        R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        Vector xr = x;
        xr.head(2) = R * x.head(2);
        xr(2) += a;
        const Vector zer = R * ze;
        EXPECT_NEAR(unicycle::lyapunov(xr, zer), unicycle::lyapunov(x, ze), 1e-9 * (1.0 + unicycle::lyapunov(x, ze)));
    }
}

TEST(Unicycle, RadialLevelBoundsLyapunov)
{
    // V(x) >= radial_level(|p - ze|) for every state.
    std::mt19937_64 rng(29);
    for (int k = 0; k < 100000; ++k) {
        const Vector x = random_state(rng, 3.0);
        const double s = x.head(2).norm();
        ASSERT_GE(unicycle::lyapunov(x, Vector::Zero(2)), unicycle::radial_level(s) - 1e-12);
    }
}

TEST(Unicycle, DecreaseAwayFromEquilibriumSet)
{
    // The printed feedback violates decrease close to the equilibrium set;
    // assert for V >= 0.05 and record the margin per level band.
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> lg(-6.0, 3.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Vector ze = Vector::Zero(2);
    const double bands[] = {1e-6, 1e-4, 1e-2, 5e-2, 1.0, 1e3};
    std::array<int, 5> bad{}, total{};
    int asserted = 0;
    for (int k = 0; k < 100000; ++k) {
        Vector x = vec({u(rng), u(rng), std::numbers::pi * u(rng), u(rng), u(rng)});
        x *= std::pow(10.0, lg(rng) / 2.0);
        const double v = unicycle::lyapunov(x, ze);
        if (v < bands[0] || v > bands[5]) {
            continue;
        }
        const double vdot = unicycle::lyapunov_grad(x, ze).dot(unicycle::dynamics(x, unicycle::feedback(x, ze)));
        int b = 0;
        while (v > bands[b + 1]) {
            ++b;
        }
        ++total[static_cast<std::size_t>(b)];
        if (!(vdot < 0.0)) {
            ++bad[static_cast<std::size_t>(b)];
        }
        if (v >= 0.05) {
            ++asserted;
            ASSERT_LT(vdot, 0.0) << x.transpose();
        }
    }
    EXPECT_GT(asserted, 1000);
    for (std::size_t b = 0; b < bad.size(); ++b) {
        RecordProperty("band_" + std::to_string(b) + "_violations", std::to_string(bad[b]) + "/" + std::to_string(total[b]));
    }
}

TEST(Unicycle, PrintedFeedbackWitnessNearEquilibrium)
{
    // Pinned witness of a positive derivative for the printed feedback.
    const Vector x = vec({-0.029, 0.02, -1.019, -0.022, 0.004});
    const Vector ze = Vector::Zero(2);
    const double vdot = unicycle::lyapunov_grad(x, ze).dot(unicycle::dynamics(x, unicycle::feedback(x, ze)));
    EXPECT_GT(vdot, 0.0);
    EXPECT_LT(unicycle::lyapunov(x, ze), 0.05);
}

TEST(Unicycle, ClosedFormMarginMatchesDiscretization)
{
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    std::uniform_real_distribution<double> ru(0.3, 1.5);
    const auto ctrl = unicycle::controller();
    for (int k = 0; k < 100; ++k) {
        std::vector<Obstacle> obs;
        for (int i = 0; i < 1 + k % 3; ++i) {
            obs.push_back(make_obstacle(vec({u(rng), u(rng)}), ru(rng)));
        }
        const Vector ze = vec({u(rng), u(rng)});
        const double closed = unicycle::d_closed_form(ze, obs);
        const double disc = oracles::d_discretized(ze, obs, ctrl.output_level, 200000);
        EXPECT_NEAR(closed, disc, 1e-6) << "case " << k;
        EXPECT_LE(closed, disc + 1e-15);
    }
}
