#include "rah/output.hpp"

#include "rah/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace rah {

using nlohmann::json;

std::size_t TrajectoryTable::column(const std::string& name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw std::invalid_argument("trajectory has no column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

bool TrajectoryTable::has(const std::string& name) const
{
    return std::find(header.begin(), header.end(), name) != header.end();
}

int TrajectoryTable::count_prefixed(const std::string& prefix) const
{
    int k = 0;
    while (has(prefix + "_" + std::to_string(k + 1))) {
        ++k;
    }
    return k;
}

std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

void write_header(std::ostream& os, const std::vector<std::string>& cols)
{
    for (std::size_t k = 0; k < cols.size(); ++k) {
        os << (k ? "," : "") << cols[k];
    }
    os << '\n';
}

void push_names(std::vector<std::string>& cols, const std::string& prefix, Eigen::Index count)
{
    for (Eigen::Index k = 0; k < count; ++k) {
        cols.push_back(prefix + "_" + std::to_string(k + 1));
    }
}

json vec_json(const Vector& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

json jumps_json(const HybridSolution& sol, Eigen::Index rho_index)
{
    json arr = json::array();
    for (const JumpRecord& r : sol.jumps) {
        json j = {{"t", r.time.t}, {"j", r.time.j}, {"rho_before", r.pre(rho_index)}, {"rho_after", r.post(rho_index)}};
        j["obstacle"] = r.trigger ? json(*r.trigger) : json(nullptr);
        arr.push_back(std::move(j));
    }
    return arr;
}

} // namespace

void write_virtual_csv(std::ostream& os, const VirtualRun& run)
{
    const Eigen::Index p = run.target.size();
    std::vector<std::string> cols{"t", "j", "rho"};
    push_names(cols, "xi", p);
    write_header(os, cols);
    for (const Sample& s : run.solution.samples) {
        os << format_number(s.time.t) << ',' << s.time.j << ',' << format_number(s.state(p));
        for (Eigen::Index k = 0; k < p; ++k) {
            os << ',' << format_number(s.state(k) + run.target(k));
        }
        os << '\n';
    }
}

void write_closed_loop_csv(std::ostream& os, const ClosedLoopRun& run, const PlantModel& plant)
{
    const Eigen::Index n = plant.n;
    const Eigen::Index p = plant.p;
    std::vector<std::string> cols{"t", "j", "rho"};
    push_names(cols, "xi", p);
    push_names(cols, "x", n);
    push_names(cols, "z", p);
    cols.insert(cols.end(), {"V", "d", "gate"});
    write_header(os, cols);

    const auto& names = run.solution.diagnostic_names;
    const auto at = [&names](const std::string& key) {
        return static_cast<std::size_t>(std::find(names.begin(), names.end(), key) - names.begin());
    };
    const std::size_t iv = at("V");
    const std::size_t id = at("d");
    const std::size_t ig = at("gate");
    for (const Sample& s : run.solution.samples) {
        os << format_number(s.time.t) << ',' << s.time.j << ',' << format_number(s.state(n + p));
        for (Eigen::Index k = 0; k < p; ++k) {
            os << ',' << format_number(s.state(n + k));
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            os << ',' << format_number(s.state(k));
        }
        const Vector z = plant.h(s.state.head(n));
        for (Eigen::Index k = 0; k < p; ++k) {
            os << ',' << format_number(z(k));
        }
        const auto diag = [&s](std::size_t i) {
            return i < s.diagnostics.size() ? s.diagnostics[i] : std::numeric_limits<double>::quiet_NaN();
        };
        os << ',' << format_number(diag(iv)) << ',' << format_number(diag(id)) << ',' << format_number(diag(ig))
           << '\n';
    }
}

TrajectoryTable read_trajectory_csv(std::istream& is)
{
    TrajectoryTable t;
    std::string line;
    if (!std::getline(is, line) || line.empty()) {
        throw std::runtime_error("trajectory CSV: missing header");
    }
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            t.header.push_back(cell);
        }
    }
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
                if (cell == "nan" || cell == "-nan") {
                    v = std::numeric_limits<double>::quiet_NaN();
                } else {
                    throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) + ": bad number '" + cell +
                                             "'");
                }
            }
            row.push_back(v);
        }
        if (row.size() != t.header.size()) {
            throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) + ": wrong column count");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

TrajectoryTable read_trajectory_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return read_trajectory_csv(in);
}

json report_to_json(const oracles::PropertyReport& r)
{
    json j = {{"name", r.name}, {"passed", r.passed}, {"tolerance", r.tolerance}, {"detail", r.detail}};
    if (r.witness) {
        j["witness"] = {{"t", r.witness->time.t},
                        {"j", r.witness->time.j},
                        {"value", r.witness->value},
                        {"state", vec_json(r.witness->state)}};
    }
    return j;
}

namespace {

json checks_json(const std::vector<oracles::PropertyReport>& checks)
{
    json arr = json::array();
    for (const auto& r : checks) {
        arr.push_back(report_to_json(r));
    }
    return arr;
}

} // namespace

json virtual_summary(const Scenario& scenario, const VirtualRun& run,
                     const std::vector<oracles::PropertyReport>& checks)
{
    const Eigen::Index p = run.target.size();
    const Sample& last = run.solution.samples.back();
    json s;
    s["mode"] = "virtual-only";
    s["termination"] = to_string(run.solution.termination);
    s["T"] = last.time.t;
    s["jumps"] = run.solution.jumps.size();
    s["jump_records"] = jumps_json(run.solution, p);
    s["final_xi"] = vec_json(last.state.head(p) + run.target);
    s["final_rho"] = last.state(p);
    json dist = json::array();
    for (std::size_t i = 0; i < run.min_distance.size(); ++i) {
        dist.push_back({{"obstacle", i},
                        {"min_virtual_distance", run.min_distance[i]},
                        {"safety_radius", scenario.obstacles[i].safety_radius()}});
    }
    s["distances"] = dist;
    s["checks"] = checks_json(checks);
    s["all_checks_passed"] = oracles::all_passed(checks);
    s["parameters"] = scenario_to_json(scenario);
    return s;
}

json closed_loop_summary(const Scenario& scenario, const ClosedLoopRun& run, const PlantModel& plant,
                         const std::vector<oracles::PropertyReport>& checks)
{
    const Eigen::Index n = plant.n;
    const Eigen::Index p = plant.p;
    const Sample& last = run.solution.samples.back();
    json s;
    s["mode"] = "closed-loop";
    s["plant"] = plant.name;
    s["termination"] = to_string(run.solution.termination);
    s["T"] = last.time.t;
    s["jumps"] = run.solution.jumps.size();
    s["jump_records"] = jumps_json(run.solution, n + p);
    s["final_x"] = vec_json(last.state.head(n));
    s["final_zeta"] = vec_json(last.state.segment(n, p));
    s["final_rho"] = last.state(n + p);
    s["final_output_error"] = (plant.h(last.state.head(n)) - run.params.target).norm();
    json dist = json::array();
    for (std::size_t i = 0; i < scenario.obstacles.size(); ++i) {
        dist.push_back({{"obstacle", i},
                        {"min_virtual_distance", run.min_virtual_distance[i]},
                        {"min_output_distance", run.min_output_distance[i]},
                        {"radius", scenario.obstacles[i].radius},
                        {"safety_radius", scenario.obstacles[i].safety_radius()}});
    }
    s["distances"] = dist;
    json gate;
    gate["initial"] = run.initial_gate;
    gate["initially_open"] = run.initial_gate_ok;
    gate["open_time"] = run.gate_open_time ? json(*run.gate_open_time) : json(nullptr);
    gate["min_after_open"] = std::isfinite(run.min_gate) ? json(run.min_gate) : json(nullptr);
    gate["invariant_holds"] = std::isfinite(run.min_gate) && run.min_gate >= -1e-6;
    s["gate"] = gate;
    s["checks"] = checks_json(checks);
    s["all_checks_passed"] = oracles::all_passed(checks);
    s["parameters"] = scenario_to_json(scenario);
    return s;
}

namespace {

// Minimal SVG canvas with a data-to-pixel transform.
class Svg {
public:
    Svg(double width, double height) : w_(width), h_(height) {}

    void frame(double x0, double x1, double y0, double y1, double left, double top, double pw, double ph)
    {
        x0_ = x0;
        x1_ = x1;
        y0_ = y0;
        y1_ = y1;
        left_ = left;
        top_ = top;
        pw_ = pw;
        ph_ = ph;
        os_ << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
            << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"0.8\"/>\n";
    }

    double px(double x) const { return left_ + (x - x0_) / (x1_ - x0_) * pw_; }
    double py(double y) const { return top_ + (y1_ - y) / (y1_ - y0_) * ph_; }
    double scale() const { return pw_ / (x1_ - x0_); }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& color,
                  double width = 1.2, const std::string& dash = "")
    {
        if (xs.empty()) {
            return;
        }
        os_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"";
        if (!dash.empty()) {
            os_ << " stroke-dasharray=\"" << dash << "\"";
        }
        os_ << " points=\"";
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (std::isfinite(xs[k]) && std::isfinite(ys[k])) {
                os_ << px(xs[k]) << ',' << py(ys[k]) << ' ';
            }
        }
        os_ << "\"/>\n";
    }

    void polygon(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& fill,
                 double opacity, const std::string& stroke = "none", const std::string& dash = "")
    {
        os_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\" stroke=\"" << stroke << "\"";
        if (!dash.empty()) {
            os_ << " stroke-dasharray=\"" << dash << "\"";
        }
        os_ << " points=\"";
        for (std::size_t k = 0; k < xs.size(); ++k) {
            os_ << px(xs[k]) << ',' << py(ys[k]) << ' ';
        }
        os_ << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& stroke, const std::string& fill,
                const std::string& dash = "")
    {
        os_ << "<circle cx=\"" << px(cx) << "\" cy=\"" << py(cy) << "\" r=\"" << r * scale() << "\" stroke=\""
            << stroke << "\" fill=\"" << fill << "\"";
        if (!dash.empty()) {
            os_ << " stroke-dasharray=\"" << dash << "\"";
        }
        os_ << "/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12)
    {
        os_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"" << size << "\">" << s
            << "</text>\n";
    }

    void save(const std::filesystem::path& path) const
    {
        std::ofstream out(path);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_ << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << os_.str() << "</svg>\n";
    }

private:
    double w_, h_;
    double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
    double left_ = 0, top_ = 0, pw_ = 1, ph_ = 1;
    std::ostringstream os_;
};

const char* palette(std::size_t k)
{
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return colors[k % 6];
}

// Sector of the cone with vertex q, axis `axis`, half-angle theta, radii [r0, r1].
void cone_sector(const Vector& q, double axis, double theta, double r0, double r1, std::vector<double>& xs,
                 std::vector<double>& ys)
{
    const int m = 24;
    for (int k = 0; k <= m; ++k) {
        const double a = axis - theta + 2.0 * theta * k / m;
        xs.push_back(q(0) + r1 * std::cos(a));
        ys.push_back(q(1) + r1 * std::sin(a));
    }
    for (int k = m; k >= 0; --k) {
        const double a = axis - theta + 2.0 * theta * k / m;
        xs.push_back(q(0) + r0 * std::cos(a));
        ys.push_back(q(1) + r0 * std::sin(a));
    }
}

std::vector<double> col(const TrajectoryTable& t, std::size_t c)
{
    std::vector<double> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        out.push_back(r[c]);
    }
    return out;
}

void plane_plot(const TrajectoryTable& t, const Scenario& sc, const std::filesystem::path& path)
{
    const std::vector<double> xi1 = col(t, t.column("xi_1"));
    const std::vector<double> xi2 = col(t, t.column("xi_2"));
    const bool coupled = t.has("z_1");
    std::vector<double> z1, z2;
    if (coupled) {
        z1 = col(t, t.column("z_1"));
        z2 = col(t, t.column("z_2"));
    }

    double x0 = sc.target(0), x1 = sc.target(0), y0 = sc.target(1), y1 = sc.target(1);
    const auto grow = [&](double x, double y) {
        if (std::isfinite(x) && std::isfinite(y)) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    };
    for (std::size_t k = 0; k < xi1.size(); ++k) {
        grow(xi1[k], xi2[k]);
        if (coupled) {
            grow(z1[k], z2[k]);
        }
    }
    for (const Obstacle& o : sc.obstacles) {
        const double r = o.activation_radius + o.eps;
        grow(o.center(0) - r, o.center(1) - r);
        grow(o.center(0) + r, o.center(1) + r);
    }
    const double pad = 0.05 * std::max({x1 - x0, y1 - y0, 1.0});
    x0 -= pad;
    x1 += pad;
    y0 -= pad;
    y1 += pad;
    const double span = std::max(x1 - x0, y1 - y0);
    const double cx = 0.5 * (x0 + x1);
    const double cy = 0.5 * (y0 + y1);

    const double side = 640.0;
    Svg svg(side + 80.0, side + 80.0);
    svg.frame(cx - span / 2, cx + span / 2, cy - span / 2, cy + span / 2, 40.0, 40.0, side, side);

    for (const Obstacle& o : sc.obstacles) {
        const Vector rel = o.center - sc.target;
        if (rel.norm() > 0.0) {
            const double axis = std::atan2(rel(1), rel(0));
            std::vector<double> xs, ys;
            cone_sector(o.center, axis, o.theta0, 0.0, o.activation_radius + o.eps, xs, ys);
            svg.polygon(xs, ys, "#999", 0.0, "#777", "4 3");
            xs.clear();
            ys.clear();
            cone_sector(o.center, axis, o.theta1, o.safety_radius(), o.activation_radius, xs, ys);
            svg.polygon(xs, ys, "#f0a030", 0.35);
        }
        svg.circle(o.center(0), o.center(1), o.activation_radius, "#888", "none", "2 3");
        svg.circle(o.center(0), o.center(1), o.safety_radius(), "#c55", "none", "5 3");
        svg.circle(o.center(0), o.center(1), o.radius, "#333", "#bbb");
    }
    if (coupled) {
        svg.polyline(z1, z2, "#d62728", 1.6);
    }
    svg.polyline(xi1, xi2, "#1f77b4", 1.2, coupled ? "6 3" : "");
    svg.circle(sc.target(0), sc.target(1), 0.01 * span, "black", "black");
    svg.text(40, 24, coupled ? "output z (solid), virtual reference (dashed)" : "virtual state");
    svg.save(path);
}

void time_plot(const TrajectoryTable& t, const Scenario& sc, const std::filesystem::path& path,
               const TrackingController* ctrl)
{
    const int p = t.count_prefixed("xi");
    const int n = t.count_prefixed("x");
    const std::vector<double> time = col(t, t.column("t"));
    const std::vector<double> rho = col(t, t.column("rho"));

    const Scenario shifted = [&sc] {
        Scenario s = sc;
        for (Obstacle& o : s.obstacles) {
            o.center -= sc.target;
        }
        return s;
    }();
    VirtualControllerParams vp{sc.c, shifted.obstacles};

    std::vector<std::vector<double>> mu(static_cast<std::size_t>(p));
    std::vector<std::vector<double>> u;
    for (const auto& row : t.rows) {
        Vector xi(p);
        for (int k = 0; k < p; ++k) {
            xi(k) = row[t.column("xi_" + std::to_string(k + 1))] - sc.target(k);
        }
        Vector m = Vector::Constant(p, std::numeric_limits<double>::quiet_NaN());
        try {
            m = mu_bar(xi, static_cast<int>(row[t.column("rho")]), vp);
        } catch (const std::exception&) {
        }
        for (int k = 0; k < p; ++k) {
            mu[static_cast<std::size_t>(k)].push_back(m(k));
        }
        if (ctrl != nullptr && n > 0) {
            Vector x(n);
            for (int k = 0; k < n; ++k) {
                x(k) = row[t.column("x_" + std::to_string(k + 1))];
            }
            const Vector uu = ctrl->u(x, xi + sc.target);
            u.resize(static_cast<std::size_t>(uu.size()));
            for (Eigen::Index k = 0; k < uu.size(); ++k) {
                u[static_cast<std::size_t>(k)].push_back(uu(k));
            }
        }
    }

    struct Panel {
        std::string title;
        std::vector<std::vector<double>> series;
    };
    std::vector<Panel> panels;
    if (!u.empty()) {
        panels.push_back({"inputs u", u});
    }
    panels.push_back({"virtual law components", mu});
    std::vector<double> neg_rho(rho.size());
    std::transform(rho.begin(), rho.end(), neg_rho.begin(), [](double r) { return -r; });
    panels.push_back({"-rho", {neg_rho}});

    const double pw = 720.0;
    const double ph = 180.0;
    const double gap = 50.0;
    Svg svg(pw + 80.0, static_cast<double>(panels.size()) * (ph + gap) + 30.0);
    // Long tracking tails would flatten the interesting part: stop at 1.5x the arrival of the reference.
    const double t0 = time.empty() ? 0.0 : time.front();
    double t_end = time.empty() ? 1.0 : time.back();
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        bool arrived = true;
        for (int i = 0; i < p; ++i) {
            arrived = arrived && t.rows[k][t.column("xi_" + std::to_string(i + 1))] == sc.target(i);
        }
        if (arrived) {
            t_end = std::min(t_end, std::max(1.5 * time[k], t0 + 1.0));
            break;
        }
    }
    const double t1 = std::max(t_end, t0 + 1e-12);
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < time.size(); ++k) {
        if (time[k] <= t1) {
            keep.push_back(k);
        }
    }
    const auto clip = [&keep](const std::vector<double>& v) {
        std::vector<double> out;
        out.reserve(keep.size());
        for (std::size_t k : keep) {
            out.push_back(v[k]);
        }
        return out;
    };
    const std::vector<double> tt = clip(time);
    for (Panel& panel : panels) {
        for (auto& s : panel.series) {
            s = clip(s);
        }
    }
    for (std::size_t k = 0; k < panels.size(); ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& s : panels[k].series) {
            for (double v : s) {
                if (std::isfinite(v)) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
        }
        if (!std::isfinite(lo)) {
            lo = -1.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double pad = 0.05 * (hi - lo);
        const double top = 30.0 + static_cast<double>(k) * (ph + gap);
        svg.frame(t0, t1, lo - pad, hi + pad, 50.0, top, pw, ph);
        std::ostringstream label;
        label << panels[k].title << ", t in [0, " << format_number(t1) << "]  range [" << format_number(lo) << ", " << format_number(hi) << "]";
        svg.text(50.0, top - 8.0, label.str());
        for (std::size_t s = 0; s < panels[k].series.size(); ++s) {
            svg.polyline(tt, panels[k].series[s], palette(s));
        }
    }
    svg.save(path);
}

} // namespace

std::vector<std::filesystem::path> write_plots(const TrajectoryTable& table, const Scenario& scenario,
                                               const std::filesystem::path& out_dir,
                                               const TrackingController* controller)
{
    if (table.rows.empty()) {
        throw std::runtime_error("write_plots: empty trajectory");
    }
    const int p = table.count_prefixed("xi");
    if (p != scenario.dimension) {
        throw std::runtime_error("write_plots: trajectory dimension differs from the scenario");
    }
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    if (p == 2) {
        plane_plot(table, scenario, out_dir / "plane.svg");
        written.push_back(out_dir / "plane.svg");
    }
    time_plot(table, scenario, out_dir / "time.svg", controller);
    written.push_back(out_dir / "time.svg");
    return written;
}

} // namespace rah
