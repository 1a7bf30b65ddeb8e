#include "rah/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace rah {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what)
{
    throw ScenarioParseError("field '" + field + "': " + what);
}

double number(const json& j, const std::string& field)
{
    if (!j.is_number()) {
        fail(field, "expected a number");
    }
    return j.get<double>();
}

long integer(const json& j, const std::string& field)
{
    if (!j.is_number_integer()) {
        fail(field, "expected an integer");
    }
    return j.get<long>();
}

Vector point(const json& j, const std::string& field)
{
    if (!j.is_array()) {
        fail(field, "expected an array of numbers");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        v(static_cast<Eigen::Index>(k)) = number(j[k], field + "[" + std::to_string(k) + "]");
    }
    return v;
}

std::optional<double> opt_number(const json& obj, const char* key, const std::string& field)
{
    if (!obj.contains(key) || obj[key].is_null()) {
        return std::nullopt;
    }
    return number(obj[key], field + "." + key);
}

template <typename T>
void read_into(const json& obj, const char* key, T& dst, const std::string& field)
{
    if (!obj.contains(key)) {
        return;
    }
    const std::string name = field + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
        if (!obj[key].is_boolean()) {
            fail(name, "expected true or false");
        }
        dst = obj[key].get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
        dst = static_cast<T>(integer(obj[key], name));
    } else {
        dst = number(obj[key], name);
    }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& field)
{
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&key](const char* a) { return key == a; })) {
            fail(field.empty() ? key : field + "." + key, "unknown key");
        }
    }
}

// Midpoint of (Delta_i, min_j |q_i - q_j| - Delta_j), no larger than 2 Delta_i.
double default_lambda(std::size_t i, const std::vector<Obstacle>& obs)
{
    const double delta = obs[i].safety_radius();
    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < obs.size(); ++j) {
        if (j != i) {
            upper = std::min(upper, (obs[i].center - obs[j].center).norm() - obs[j].safety_radius());
        }
    }
    if (!std::isfinite(upper)) {
        return 2.0 * delta;
    }
    return std::min(2.0 * delta, 0.5 * (delta + upper));
}

} // namespace

const char* to_string(QbarConvention q)
{
    return q == QbarConvention::clockwise ? "cw" : "ccw";
}

QbarConvention parse_qbar(const std::string& name)
{
    if (name == "ccw" || name == "counterclockwise") {
        return QbarConvention::counterclockwise;
    }
    if (name == "cw" || name == "clockwise") {
        return QbarConvention::clockwise;
    }
    throw ScenarioParseError("qbar: expected 'cw' or 'ccw', got '" + name + "'");
}

Scenario scenario_from_json(const json& doc)
{
    if (!doc.is_object()) {
        throw ScenarioParseError("scenario: expected a JSON object at the top level");
    }
    check_keys(doc,
               {"dimension", "c", "ell", "target", "obstacles", "integrator", "stop", "initial", "eps_tilde",
                "d_points", "d_cap", "name", "description"},
               "");
    Scenario s;
    if (!doc.contains("dimension")) {
        fail("dimension", "missing");
    }
    s.dimension = static_cast<int>(integer(doc["dimension"], "dimension"));
    if (s.dimension < 1) {
        fail("dimension", "must be positive");
    }
    read_into(doc, "c", s.c, "");
    read_into(doc, "ell", s.ell, "");
    read_into(doc, "eps_tilde", s.eps_tilde, "");
    read_into(doc, "d_points", s.d_points, "");
    read_into(doc, "d_cap", s.d_cap, "");
    s.target = doc.contains("target") ? point(doc["target"], "target") : Vector::Zero(s.dimension);
    if (s.target.size() != s.dimension) {
        fail("target", "length differs from dimension");
    }

    std::vector<std::optional<double>> lambdas;
    if (doc.contains("obstacles")) {
        const json& arr = doc["obstacles"];
        if (!arr.is_array()) {
            fail("obstacles", "expected an array");
        }
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string f = "obstacles[" + std::to_string(i) + "]";
            const json& o = arr[i];
            if (!o.is_object()) {
                fail(f, "expected an object");
            }
            check_keys(o, {"center", "radius", "delta", "lambda", "theta0", "theta1", "eps", "qbar"}, f);
            if (!o.contains("center") || !o.contains("radius")) {
                fail(f, "center and radius are required");
            }
            Vector center = point(o["center"], f + ".center");
            if (center.size() != s.dimension) {
                fail(f + ".center", "length differs from dimension");
            }
            QbarConvention qb = QbarConvention::counterclockwise;
            if (o.contains("qbar")) {
                if (!o["qbar"].is_string()) {
                    fail(f + ".qbar", "expected \"cw\" or \"ccw\"");
                }
                try {
                    qb = parse_qbar(o["qbar"].get<std::string>());
                } catch (const ScenarioParseError& e) {
                    fail(f + ".qbar", e.what());
                }
            }
            const auto lambda = opt_number(o, "lambda", f);
            lambdas.push_back(lambda);
            // eps defaults from lambda, so it is resolved after lambda below.
            Obstacle ob = make_obstacle(std::move(center), number(o["radius"], f + ".radius"),
                                        opt_number(o, "delta", f), lambda.value_or(1.0), opt_number(o, "theta1", f),
                                        opt_number(o, "theta0", f), 1.0, qb);
            ob.eps = opt_number(o, "eps", f).value_or(-1.0);
            s.obstacles.push_back(std::move(ob));
        }
        for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
            Obstacle& ob = s.obstacles[i];
            ob.activation_radius = lambdas[i] ? *lambdas[i] : default_lambda(i, s.obstacles);
        }
        for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
            Obstacle& ob = s.obstacles[i];
            if (ob.eps < 0.0 && !arr[i].contains("eps")) {
                ob.eps = 0.1 * ob.activation_radius;
            }
        }
    }

    if (doc.contains("integrator")) {
        const json& in = doc["integrator"];
        if (!in.is_object()) {
            fail("integrator", "expected an object");
        }
        check_keys(in,
                   {"rtol", "atol", "initial_step", "min_step", "max_step", "event_tol", "sample_interval",
                    "guard_subsamples", "fixed_step", "fixed_step_size"},
                   "integrator");
        IntegratorSettings& g = s.integrator;
        read_into(in, "rtol", g.rtol, "integrator");
        read_into(in, "atol", g.atol, "integrator");
        read_into(in, "initial_step", g.initial_step, "integrator");
        read_into(in, "min_step", g.min_step, "integrator");
        read_into(in, "max_step", g.max_step, "integrator");
        read_into(in, "event_tol", g.event_tol, "integrator");
        read_into(in, "sample_interval", g.sample_interval, "integrator");
        read_into(in, "guard_subsamples", g.guard_subsamples, "integrator");
        read_into(in, "fixed_step", g.fixed_step, "integrator");
        read_into(in, "fixed_step_size", g.fixed_step_size, "integrator");
        if (!(g.sample_interval > 0.0)) {
            fail("integrator.sample_interval", "must be positive");
        }
    }
    if (doc.contains("stop")) {
        const json& st = doc["stop"];
        if (!st.is_object()) {
            fail("stop", "expected an object");
        }
        check_keys(st, {"t_max", "j_max", "eps_stop", "z_tol", "zeno_max_jumps", "zeno_window", "zeno_burst"},
                   "stop");
        StopSettings& g = s.stop;
        read_into(st, "t_max", g.t_max, "stop");
        read_into(st, "j_max", g.j_max, "stop");
        read_into(st, "eps_stop", g.eps_stop, "stop");
        read_into(st, "z_tol", g.z_tol, "stop");
        read_into(st, "zeno_max_jumps", g.zeno_max_jumps, "stop");
        read_into(st, "zeno_window", g.zeno_window, "stop");
        read_into(st, "zeno_burst", g.zeno_burst, "stop");
    }
    if (doc.contains("initial")) {
        const json& in = doc["initial"];
        if (!in.is_object()) {
            fail("initial", "expected an object");
        }
        check_keys(in, {"xi", "rho", "x"}, "initial");
        if (in.contains("xi")) {
            s.initial.xi = point(in["xi"], "initial.xi");
            if (s.initial.xi.size() != s.dimension) {
                fail("initial.xi", "length differs from dimension");
            }
        }
        if (in.contains("rho")) {
            const long rho = integer(in["rho"], "initial.rho");
            if (rho != 0 && rho != 1) {
                fail("initial.rho", "must be 0 or 1");
            }
            s.initial.rho = static_cast<int>(rho);
        }
        if (in.contains("x")) {
            s.initial.x = point(in["x"], "initial.x");
        }
    }
    return s;
}

Scenario parse_scenario(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line number.
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ScenarioParseError("line " + std::to_string(line) + ": " + e.what());
    }
    return scenario_from_json(doc);
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scenario file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

json scenario_to_json(const Scenario& s)
{
    const auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    json doc;
    doc["dimension"] = s.dimension;
    doc["c"] = s.c;
    doc["ell"] = s.ell;
    doc["target"] = vec(s.target);
    doc["eps_tilde"] = s.eps_tilde;
    doc["d_points"] = s.d_points;
    doc["d_cap"] = s.d_cap;
    doc["obstacles"] = json::array();
    for (const Obstacle& o : s.obstacles) {
        doc["obstacles"].push_back({{"center", vec(o.center)},
                                    {"radius", o.radius},
                                    {"delta", o.safety_margin},
                                    {"lambda", o.activation_radius},
                                    {"theta1", o.theta1},
                                    {"theta0", o.theta0},
                                    {"eps", o.eps},
                                    {"qbar", to_string(o.qbar)}});
    }
    const IntegratorSettings& g = s.integrator;
    doc["integrator"] = {{"rtol", g.rtol},
                         {"atol", g.atol},
                         {"initial_step", g.initial_step},
                         {"min_step", g.min_step},
                         {"max_step", g.max_step},
                         {"event_tol", g.event_tol},
                         {"sample_interval", g.sample_interval},
                         {"guard_subsamples", g.guard_subsamples},
                         {"fixed_step", g.fixed_step},
                         {"fixed_step_size", g.fixed_step_size}};
    const StopSettings& st = s.stop;
    doc["stop"] = {{"t_max", st.t_max},
                   {"j_max", st.j_max},
                   {"eps_stop", st.eps_stop},
                   {"z_tol", st.z_tol},
                   {"zeno_max_jumps", st.zeno_max_jumps},
                   {"zeno_window", st.zeno_window},
                   {"zeno_burst", st.zeno_burst}};
    json init = json::object();
    if (s.initial.xi.size() > 0) {
        init["xi"] = vec(s.initial.xi);
    }
    init["rho"] = s.initial.rho;
    if (s.initial.x.size() > 0) {
        init["x"] = vec(s.initial.x);
    }
    doc["initial"] = init;
    return doc;
}

} // namespace rah
