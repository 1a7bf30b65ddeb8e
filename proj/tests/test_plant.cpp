#include "common.hpp"

#include "rah/oracles.hpp"
#include "rah/plant.hpp"
#include "rah/unicycle.hpp"
#include "rah/virtual_control.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

using namespace rah;
using rah::testing::vec;

TEST(Shift, MovesTargetToOrigin)
{
    Scenario s;
    s.dimension = 2;
    s.target = vec({1.0, -2.0});
    s.obstacles.push_back(make_obstacle(vec({4.0, -2.0}), 1.0));
    s.initial.xi = vec({6.0, 0.0});
    const Scenario sh = shift_to_origin(s);
    EXPECT_EQ(sh.target, vec({0.0, 0.0}));
    EXPECT_EQ(sh.obstacles[0].center, vec({3.0, 0.0}));
    EXPECT_EQ(sh.initial.xi, vec({5.0, 2.0}));
    EXPECT_EQ(unshift(sh.initial.xi, s.target), s.initial.xi);
}

TEST(Shift, RoundTripIsExactOnRepresentablePoints)
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> u(-4096, 4096);
    for (int k = 0; k < 1000; ++k) {
        const Vector t = vec({u(rng) / 64.0, u(rng) / 64.0});
        const Vector pt = vec({u(rng) / 64.0, u(rng) / 64.0});
        EXPECT_EQ(unshift(pt - t, t), pt);
    }
}

TEST(DBound, WorkedValueAndBoundary)
{
    const auto ctrl = unicycle::controller();
    const std::vector<Obstacle> obs = {make_obstacle(vec({3.0, 0.0}), 1.0)};
    const DBound d = d_bound(vec({0.0, 0.0}), obs, ctrl.output_level, 0.0, 720);
    EXPECT_NEAR(d.value, 2.7639320, 1e-7);
    EXPECT_LT(d.error_estimate, 1e-6);
    EXPECT_NEAR(unicycle::d_closed_form(vec({0.0, 0.0}), obs), 2.7639320, 1e-7);

    EXPECT_NEAR(d_bound(vec({2.0, 0.0}), obs, ctrl.output_level, 0.0, 720).value, 0.0, 1e-12);
    EXPECT_EQ(d_bound(vec({3.0, 0.2}), obs, ctrl.output_level, 0.0, 720).value, 0.0);
    EXPECT_NEAR(d_bound(vec({0.0, 0.0}), obs, ctrl.output_level, 0.25, 720).value, 2.7639320 - 0.25, 1e-7);
}

TEST(DBound, NoObstaclesIsInfinite)
{
    const auto ctrl = unicycle::controller();
    EXPECT_EQ(d_bound(vec({0.0, 0.0}), {}, ctrl.output_level, 0.0, 720).value,
              std::numeric_limits<double>::infinity());
}

TEST(DBound, ThreeDimensionalSphere)
{
    // Level |z - ze|^2: nearest boundary point of the unit sphere at (3,0,0) is at distance 2.
    const auto level = [](const Vector& z, const Vector& ze) { return (z - ze).squaredNorm(); };
    Obstacle o = make_obstacle(vec({3.0, 0.0, 0.0}), 1.0);
    const DBound d = d_bound(vec({0.0, 0.0, 0.0}), {o}, level, 0.0, 4000);
    EXPECT_NEAR(d.value, 4.0, 5e-3);
    EXPECT_GE(d.value, 4.0);
}

TEST(DBound, RejectsMissingLevelAndTooFewPoints)
{
    const std::vector<Obstacle> obs = {make_obstacle(vec({3.0, 0.0}), 1.0)};
    EXPECT_THROW(d_bound(vec({0.0, 0.0}), obs, {}, 0.0, 720), std::invalid_argument);
    EXPECT_THROW(d_bound(vec({0.0, 0.0}), obs, unicycle::controller().output_level, 0.0, 1), std::invalid_argument);
}

namespace {

CoupledParams single_params(double ell = 1.0)
{
    Scenario s;
    s.dimension = 2;
    s.c = 1.0;
    s.ell = ell;
    s.target = vec({0.0, 0.0});
    s.obstacles.push_back(make_obstacle(vec({7.0, 0.0}), 1.0, 0.5, 2.5));
    return make_coupled_params(s);
}

Vector state(const Vector& x, const Vector& zeta, double rho)
{
    Vector s(x.size() + zeta.size() + 1);
    s << x, zeta, rho;
    return s;
}

} // namespace

TEST(CoupledFlow, FrozenWhenGateClosed)
{
    const auto plant = unicycle::plant();
    const auto ctrl = unicycle::controller();
    const CoupledParams params = single_params();
    const Vector zeta = vec({11.0, 0.0});
    const Vector x = vec({11.0, 3.0, 0.0, 0.0, 0.0});
    ASSERT_GE(ctrl.V(x, zeta), safety_margin(zeta, ctrl, params));
    const Vector ds = coupled_flow(state(x, zeta, 0.0), plant, ctrl, params);
    EXPECT_EQ(ds.segment(5, 2), Vector::Zero(2));
    EXPECT_EQ(ds(7), 0.0);
    EXPECT_EQ(ds.head(5), plant.f(x, ctrl.u(x, zeta)));
}

TEST(CoupledFlow, EquilibriumFollowsGatedStabilizer)
{
    const auto plant = unicycle::plant();
    const auto ctrl = unicycle::controller();
    const CoupledParams params = single_params(0.5);
    const Vector zeta = vec({-3.0, 4.0}); // far from the obstacle: mu_bar = nu_s
    const Vector x = vec({-3.0, 4.0, 0.3, 0.0, 0.0});
    EXPECT_EQ(ctrl.V(x, zeta), 0.0);
    const double d = safety_margin(zeta, ctrl, params);
    const Vector ds = coupled_flow(state(x, zeta, 0.0), plant, ctrl, params);
    const Vector expected = 0.5 * d * nu_s(zeta, 1.0);
    EXPECT_NEAR((ds.segment(5, 2) - expected).norm(), 0.0, 1e-12);
    EXPECT_EQ(ds.head(5), Vector::Zero(5));
}

TEST(CoupledFlow, SafetyMarginIsCapped)
{
    const auto ctrl = unicycle::controller();
    CoupledParams params = single_params();
    params.obstacles.clear();
    params.virtual_params.obstacles.clear();
    EXPECT_EQ(safety_margin(vec({1.0, 1.0}), ctrl, params), params.d_cap);
}

TEST(CoupledFlow, RhoFlipLeavesPlantDerivativeUnchanged)
{
    const auto plant = unicycle::plant();
    const auto ctrl = unicycle::controller();
    const CoupledParams params = single_params();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const Vector zeta = vec({9.0 + u(rng), 1.5 * u(rng)});
        const Vector x = vec({zeta(0) + 0.1 * u(rng), zeta(1) + 0.1 * u(rng), 3.0 * u(rng), u(rng), u(rng)});
        const Vector a = coupled_flow(state(x, zeta, 0.0), plant, ctrl, params);
        const Vector b = coupled_flow(state(x, zeta, 1.0), plant, ctrl, params);
        EXPECT_EQ(a.head(5), b.head(5));
    }
}

TEST(CoupledSystem, JumpTouchesOnlyRho)
{
    const auto plant = unicycle::plant();
    const auto ctrl = unicycle::controller();
    const HybridSystemDef def = make_coupled_system(plant, ctrl, single_params(), 1e-3);
    const Vector s = state(vec({1.0, 2.0, 3.0, 4.0, 5.0}), vec({6.0, 7.0}), 0.0);
    const Vector g = def.jump(s);
    EXPECT_EQ(g.head(7), s.head(7));
    EXPECT_EQ(g(7), 1.0);
    EXPECT_EQ(def.jump(g)(7), 0.0);
}

TEST(ClosedLoop, NoObstacleRunConverges)
{
    Scenario s;
    s.dimension = 2;
    s.c = 1.0;
    s.target = vec({1.0, 1.0});
    s.stop.t_max = 1e5;
    s.integrator.sample_interval = 1.0;
    s.integrator.max_step = 1.0;
    const Vector x0 = vec({3.0, 1.0, std::numbers::pi, 0.0, 0.0});
    const ClosedLoopRun run =
        simulate_closed_loop(s, unicycle::plant(), unicycle::controller(), x0, vec({3.0, 1.0}), 0);
    EXPECT_EQ(run.solution.termination, Termination::converged);
    EXPECT_TRUE(run.solution.jumps.empty());
    EXPECT_LE((run.solution.final_state().head(2) - s.target).norm(), s.stop.z_tol);
    EXPECT_TRUE(run.initial_gate_ok);
}

TEST(ClosedLoop, GateClosedStartKeepsZetaFixedUntilOpen)
{
    const Scenario s = rah::testing::course_scenario();
    const Vector x0 = vec({11.0, 1.5, std::numbers::pi, 0.0, 0.0});
    const ClosedLoopRun run =
        simulate_closed_loop(s, unicycle::plant(), unicycle::controller(), x0, vec({11.0, 0.0}), 0);
    ASSERT_FALSE(run.initial_gate_ok);
    ASSERT_TRUE(run.gate_open_time.has_value());
    for (const Sample& smp : run.solution.samples) {
        if (smp.time.t < *run.gate_open_time) {
            EXPECT_EQ(smp.state.segment(5, 2), vec({11.0, 0.0}));
        }
    }
    EXPECT_EQ(run.solution.termination, Termination::converged);
    EXPECT_GE(run.min_gate, -1e-6);
}
