#include "commands.hpp"

#include "rah/output.hpp"
#include "rah/scenario_io.hpp"
#include "rah/unicycle.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

namespace rah::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<PlantEntry> find_plant(const std::string& name)
{
    if (name == "unicycle") {
        return PlantEntry{unicycle::plant(), unicycle::controller()};
    }
    return std::nullopt;
}

std::vector<std::string> plant_names()
{
    return {"virtual-only", "unicycle"};
}

Scenario prepare_scenario(const RunConfig& cfg)
{
    Scenario s = load_scenario(cfg.scenario);
    if (cfg.ell) {
        s.ell = *cfg.ell;
    }
    if (cfg.c) {
        s.c = *cfg.c;
    }
    if (cfg.qbar) {
        for (Obstacle& o : s.obstacles) {
            o.qbar = *cfg.qbar;
        }
    }
    if (cfg.dt_sample) {
        if (!(*cfg.dt_sample > 0.0)) {
            throw ScenarioParseError("--dt-sample: must be positive");
        }
        s.integrator.sample_interval = *cfg.dt_sample;
    }
    if (cfg.rtol) {
        s.integrator.rtol = *cfg.rtol;
    }
    if (cfg.atol) {
        s.integrator.atol = *cfg.atol;
    }
    if (cfg.t_max) {
        s.stop.t_max = *cfg.t_max;
    }
    return s;
}

oracles::TrajectoryChecks virtual_checks(const Scenario& s)
{
    oracles::TrajectoryChecks chk;
    chk.obstacles = shift_to_origin(s).obstacles;
    chk.dimension = s.dimension;
    chk.zeno_window = s.stop.zeno_window;
    chk.zeno_burst = s.stop.zeno_burst;
    return chk;
}

oracles::TrajectoryChecks closed_loop_checks(const Scenario& s, const PlantModel& plant, const ClosedLoopRun& run)
{
    oracles::TrajectoryChecks chk;
    chk.obstacles = s.obstacles;
    chk.dimension = s.dimension;
    chk.xi_offset = plant.n;
    chk.target = s.target;
    chk.gate = true;
    chk.output_safety = true;
    chk.gate_from = run.initial_gate_ok ? std::nullopt : run.gate_open_time;
    if (!run.initial_gate_ok && !run.gate_open_time) {
        chk.gate = false;
    }
    chk.zeno_window = s.stop.zeno_window;
    chk.zeno_burst = s.stop.zeno_burst;
    return chk;
}

namespace {

void print_violations(const std::vector<Violation>& v, std::ostream& out)
{
    for (const Violation& x : v) {
        out << "violation: " << describe(x) << '\n';
    }
}

struct RunOutput {
    json summary;
    std::string csv;
    bool checks_passed = false;
};

// Simulate one scenario with the configured plant; nothing is written to disk.
RunOutput run_scenario(const Scenario& s, const std::string& plant_name)
{
    RunOutput out;
    std::ostringstream csv;
    if (plant_name == "virtual-only") {
        if (s.initial.xi.size() != s.dimension) {
            throw ScenarioParseError("initial.xi: required for virtual-only runs");
        }
        const VirtualRun run = simulate_virtual(s);
        const auto checks = oracles::check_trajectory(run.solution, virtual_checks(s));
        write_virtual_csv(csv, run);
        out.summary = virtual_summary(s, run, checks);
        out.checks_passed = oracles::all_passed(checks);
    } else {
        const auto entry = find_plant(plant_name);
        if (!entry) {
            throw std::invalid_argument("unknown plant '" + plant_name + "'");
        }
        const PlantModel& plant = entry->model;
        if (s.initial.x.size() != plant.n) {
            throw ScenarioParseError("initial.x: required with " + std::to_string(plant.n) + " entries for plant " +
                                     plant.name);
        }
        const Vector zeta0 = s.initial.xi.size() == s.dimension ? s.initial.xi : plant.h(s.initial.x);
        const ClosedLoopRun run =
            simulate_closed_loop(s, plant, entry->controller, s.initial.x, zeta0, s.initial.rho);
        const auto checks = oracles::check_trajectory(run.solution, closed_loop_checks(s, plant, run));
        write_closed_loop_csv(csv, run, plant);
        out.summary = closed_loop_summary(s, run, plant, checks);
        out.checks_passed = oracles::all_passed(checks);
    }
    out.csv = csv.str();
    return out;
}

void write_run(const fs::path& dir, const RunOutput& r)
{
    fs::create_directories(dir);
    std::ofstream(dir / "trajectory.csv") << r.csv;
    std::ofstream(dir / "summary.json") << r.summary.dump(2) << '\n';
}

// Wraps a command body with the shared exit-code mapping.
template <typename F>
int guarded(std::ostream& out, F&& body)
{
    try {
        return body();
    } catch (const ScenarioParseError& e) {
        out << "malformed scenario: " << e.what() << '\n';
        return Exit::malformed;
    } catch (const SimulationError& e) {
        out << "simulation failed: " << e.what() << '\n';
        return Exit::failed;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << '\n';
        return Exit::failed;
    }
}

} // namespace

int cmd_validate(const fs::path& scenario, std::ostream& out)
{
    Scenario s;
    try {
        s = load_scenario(scenario);
    } catch (const std::exception& e) {
        out << "malformed scenario: " << e.what() << '\n';
        return Exit::malformed;
    }
    const auto violations = validate_scenario(s);
    if (violations.empty()) {
        out << "valid: " << s.obstacles.size() << " obstacle(s), dimension " << s.dimension << '\n';
        return Exit::ok;
    }
    print_violations(violations, out);
    return Exit::invalid;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out)
{
    return guarded(out, [&]() -> int {
        const Scenario s = prepare_scenario(cfg);
        const auto violations = validate_scenario(s);
        if (!violations.empty()) {
            print_violations(violations, out);
            return Exit::invalid;
        }
        spdlog::info("simulating {} with plant {}", cfg.scenario.string(), cfg.plant);
        const RunOutput r = run_scenario(s, cfg.plant);
        write_run(cfg.out, r);
        out << "termination: " << r.summary["termination"].get<std::string>() << ", T = " << r.summary["T"]
            << ", jumps = " << r.summary["jumps"] << ", checks " << (r.checks_passed ? "passed" : "FAILED") << '\n';
        out << "wrote " << (cfg.out / "trajectory.csv").string() << " and " << (cfg.out / "summary.json").string()
            << '\n';
        return Exit::ok;
    });
}

int cmd_plot(const fs::path& csv, const RunConfig& cfg, std::ostream& out)
{
    return guarded(out, [&]() -> int {
        const Scenario s = prepare_scenario(cfg);
        const TrajectoryTable table = read_trajectory_csv(csv);
        const auto entry = find_plant(cfg.plant);
        if (s.dimension != 2) {
            out << "notice: plane plot skipped for dimension " << s.dimension << '\n';
        }
        for (const auto& p : write_plots(table, s, cfg.out, entry ? &entry->controller : nullptr)) {
            out << "wrote " << p.string() << '\n';
        }
        return Exit::ok;
    });
}

int cmd_verify(const RunConfig& cfg, std::ostream& out)
{
    return guarded(out, [&]() -> int {
        const Scenario s = prepare_scenario(cfg);
        const auto violations = validate_scenario(s);
        if (!violations.empty()) {
            print_violations(violations, out);
            return Exit::invalid;
        }
        bool all = true;
        const RunOutput r = run_scenario(s, cfg.plant);
        for (const auto& c : r.summary["checks"]) {
            const bool passed = c["passed"].get<bool>();
            all = all && passed;
            out << (passed ? "PASS " : "FAIL ") << c["name"].get<std::string>() << ": "
                << c["detail"].get<std::string>() << '\n';
        }

        if (const auto entry = find_plant(cfg.plant)) {
            // Gradient and safety-margin oracles around the scenario's initial state.
            std::mt19937_64 rng(cfg.seed);
            std::uniform_real_distribution<double> box(-3.0, 3.0);
            const TrackingController& ctrl = entry->controller;
            double worst_grad = 0.0;
            for (int k = 0; k < 1000; ++k) {
                Vector x(entry->model.n);
                for (Eigen::Index i = 0; i < x.size(); ++i) {
                    x(i) = box(rng);
                }
                Vector ze(entry->model.p);
                for (Eigen::Index i = 0; i < ze.size(); ++i) {
                    ze(i) = box(rng);
                }
                const Vector g = ctrl.grad_V(x, ze);
                const Vector fd =
                    oracles::fd_gradient([&](const Vector& y) { return ctrl.V(y, ze); }, x, 1e-5);
                worst_grad = std::max(worst_grad, (g - fd).cwiseAbs().maxCoeff() / std::max(1.0, g.cwiseAbs().maxCoeff()));
            }
            const bool grad_ok = worst_grad <= 1e-5;
            all = all && grad_ok;
            out << (grad_ok ? "PASS " : "FAIL ") << "gradient vs finite differences: max rel error " << worst_grad
                << '\n';
            if (ctrl.d_closed_form && ctrl.output_level && s.dimension == 2 && !s.obstacles.empty()) {
                const Vector ze = s.initial.xi.size() == 2 ? s.initial.xi : entry->model.h(s.initial.x);
                const double closed = ctrl.d_closed_form(ze, s.obstacles);
                const double disc = oracles::d_discretized(ze, s.obstacles, ctrl.output_level, 10000);
                const bool d_ok = std::abs(closed - disc) <= 1e-6;
                all = all && d_ok;
                out << (d_ok ? "PASS " : "FAIL ") << "safety margin closed form " << closed << " vs discretized "
                    << disc << '\n';
            }
        }
        return all ? Exit::ok : Exit::failed;
    });
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out)
{
    return guarded(out, [&]() -> int {
        const Scenario base = prepare_scenario(cfg);
        const auto violations = validate_scenario(base);
        if (!violations.empty()) {
            print_violations(violations, out);
            return Exit::invalid;
        }
        if (cfg.runs < 1) {
            throw std::invalid_argument("sweep: --runs must be positive");
        }
        const auto entry = find_plant(cfg.plant);
        if (!entry && cfg.plant != "virtual-only") {
            throw std::invalid_argument("unknown plant '" + cfg.plant + "'");
        }

        // Sampling box: target and obstacles, padded.
        Vector lo = base.target.array() - 5.0;
        Vector hi = base.target.array() + 5.0;
        for (const Obstacle& o : base.obstacles) {
            lo = lo.cwiseMin(o.center - Vector::Constant(o.center.size(), 2.0 * o.activation_radius));
            hi = hi.cwiseMax(o.center + Vector::Constant(o.center.size(), 2.0 * o.activation_radius));
        }

        std::vector<json> results(static_cast<std::size_t>(cfg.runs));
        std::atomic<int> next{0};
        std::mutex log_mutex;
        const auto worker = [&]() {
            for (int k = next++; k < cfg.runs; k = next++) {
                // Per-run stream: results do not depend on the thread schedule.
                std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(k));
                Scenario s = base;
                Vector xi(base.dimension);
                do {
                    for (Eigen::Index i = 0; i < xi.size(); ++i) {
                        xi(i) = std::uniform_real_distribution<double>(lo(i), hi(i))(rng);
                    }
                } while (!in_state_space(xi, base.obstacles));
                s.initial.xi = xi;
                s.initial.rho = 0;
                if (entry) {
                    // Start at rest on the reference with a random heading (gate open).
                    Vector x = Vector::Zero(entry->model.n);
                    x.head(base.dimension) = xi;
                    if (entry->model.n > base.dimension) {
                        x(base.dimension) = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng);
                    }
                    s.initial.x = x;
                }
                char name[32];
                std::snprintf(name, sizeof(name), "run_%04d", k);
                json row = {{"run", k}, {"dir", name}, {"xi0", std::vector<double>(xi.data(), xi.data() + xi.size())}};
                try {
                    const RunOutput r = run_scenario(s, cfg.plant);
                    write_run(cfg.out / name, r);
                    row["termination"] = r.summary["termination"];
                    row["jumps"] = r.summary["jumps"];
                    row["checks_passed"] = r.checks_passed;
                } catch (const std::exception& e) {
                    row["error"] = e.what();
                    row["checks_passed"] = false;
                }
                {
                    std::lock_guard lock(log_mutex);
                    spdlog::info("sweep run {} done", k);
                }
                results[static_cast<std::size_t>(k)] = std::move(row);
            }
        };
        const int threads = cfg.threads > 0 ? cfg.threads
                                             : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        {
            std::vector<std::jthread> pool;
            for (int t = 0; t < std::min(threads, cfg.runs); ++t) {
                pool.emplace_back(worker);
            }
        }
        fs::create_directories(cfg.out);
        json summary = {{"seed", cfg.seed}, {"plant", cfg.plant}, {"runs", results}};
        std::ofstream(cfg.out / "sweep.json") << summary.dump(2) << '\n';
        const auto passed = std::count_if(results.begin(), results.end(),
                                          [](const json& r) { return r["checks_passed"].get<bool>(); });
        out << passed << "/" << cfg.runs << " runs passed all checks; wrote " << (cfg.out / "sweep.json").string()
            << '\n';
        return passed == cfg.runs ? Exit::ok : Exit::failed;
    });
}

} // namespace rah::cli
