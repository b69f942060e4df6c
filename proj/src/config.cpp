#include "ostop/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ostop/errors.hpp"

namespace ostop {

using nlohmann::json;

namespace {

std::map<std::string, CustomDiffusionFactory>& registry() {
    static std::map<std::string, CustomDiffusionFactory> r;
    return r;
}

[[noreturn]] void config_error(const std::string& msg) {
    throw InvalidParameterError("config: " + msg);
}

double get_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        config_error(std::string(key) + " must be a number");
    return j.at(key).get<double>();
}

/// Endpoint values accept numbers or the sentinels "-inf"/"inf".
double parse_extended(const json& j, const char* what) {
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
    }
    config_error(std::string(what) + " must be a number or \"-inf\"/\"inf\"");
}

Interval parse_interval(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        config_error(std::string(what) + " must be a two-element array");
    return {parse_extended(j[0], what), parse_extended(j[1], what)};
}

// ---- polynomial helpers (ascending coefficients) ----

double poly_eval(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;)
        v = v * x + c[i];
    return v;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t i = 1; i < c.size(); ++i)
        d.push_back(c[i] * static_cast<double>(i));
    if (d.empty())
        d.push_back(0.0);
    return d;
}

std::vector<double> parse_coefficients(const json& j, const char* what) {
    if (!j.is_array() || j.empty())
        config_error(std::string(what) + " must be a nonempty array");
    std::vector<double> c;
    for (const auto& v : j) {
        if (!v.is_number() || !std::isfinite(v.get<double>()))
            config_error(std::string(what) + " entries must be finite numbers");
        c.push_back(v.get<double>());
    }
    return c;
}

// ---- piecewise-linear rewards ----

struct PiecewiseLinear {
    std::vector<double> xs, ys, slopes; // slopes[i] on (xs[i], xs[i+1])

    double operator()(double x) const {
        if (x <= xs.front())
            return ys.front() + slopes.front() * (x - xs.front());
        if (x >= xs.back())
            return ys.back() + slopes.back() * (x - xs.back());
        std::size_t i = 0;
        while (x > xs[i + 1])
            ++i;
        return ys[i] + slopes[i] * (x - xs[i]);
    }

    double slope_at(double x) const {
        if (x < xs.front())
            return slopes.front();
        if (x > xs.back())
            return slopes.back();
        std::size_t i = 0;
        while (i + 1 < xs.size() && x > xs[i + 1])
            ++i;
        return slopes[std::min(i, slopes.size() - 1)];
    }
};

PiecewiseLinear parse_knots(const json& j) {
    if (!j.is_array() || j.size() < 2)
        config_error("knots must list at least two [x, y] pairs");
    PiecewiseLinear pw;
    for (const auto& k : j) {
        if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
            config_error("each knot must be an [x, y] pair of numbers");
        pw.xs.push_back(k[0].get<double>());
        pw.ys.push_back(k[1].get<double>());
    }
    for (std::size_t i = 0; i + 1 < pw.xs.size(); ++i) {
        if (!(pw.xs[i] < pw.xs[i + 1]))
            config_error("knot x-coordinates must be strictly increasing");
        pw.slopes.push_back((pw.ys[i + 1] - pw.ys[i]) / (pw.xs[i + 1] - pw.xs[i]));
    }
    return pw;
}

DiffusionModel parse_diffusion(const json& j) {
    if (!j.is_object())
        config_error("diffusion block missing or not an object");
    const std::string family = j.value("family", "");
    const double alpha = get_number(j, "alpha", 0.0);
    if (!(alpha > 0.0))
        config_error("diffusion.alpha must be positive");
    if (family == "brownian") {
        return DiffusionModel::brownian(alpha, get_number(j, "drift", 0.0),
                                        get_number(j, "volatility", 1.0));
    }
    if (family == "custom") {
        const std::string name = j.value("name", "");
        auto it = registry().find(name);
        if (it == registry().end())
            config_error("unknown custom diffusion \"" + name + "\"");
        std::map<std::string, double> params;
        if (j.contains("params"))
            for (const auto& [key, value] : j.at("params").items()) {
                if (!value.is_number())
                    config_error("diffusion.params values must be numbers");
                params[key] = value.get<double>();
            }
        return it->second(alpha, params);
    }
    config_error("diffusion.family must be \"brownian\" or \"custom\"");
}

/// Representing measure of a piecewise-linear reward on the Brownian
/// family: density (speed density)*(alpha*g - drift*g'), one atom per kink
/// with mass -(slope jump)/(scale density).
MeasureSpec derive_nu(const DiffusionModel& model, const PiecewiseLinear& pw,
                      const std::vector<double>& kinks) {
    MeasureSpec nu;
    nu.density = [pw, model](double x) {
        const double drift = model.brownian_params()->drift;
        return model.speed_density(x) * (model.alpha() * pw(x) - drift * pw.slope_at(x));
    };
    for (std::size_t i = 1; i < pw.slopes.size(); ++i) {
        const double jump = pw.slopes[i] - pw.slopes[i - 1];
        if (jump != 0.0)
            nu.atoms.push_back({pw.xs[i], -jump / model.scale_density(pw.xs[i])});
    }
    nu.breakpoints = kinks;
    return nu;
}

RewardSpec parse_reward(const json& j, const DiffusionModel& model) {
    if (!j.is_object())
        config_error("reward block missing or not an object");
    const std::string kind = j.value("kind", "");

    if (kind == "polynomial") {
        const auto coeffs = parse_coefficients(j.at("coefficients"), "reward.coefficients");
        RealFn g = [coeffs](double x) { return poly_eval(coeffs, x); };
        std::vector<double> alg_coeffs;
        if (j.contains("alg_coefficients")) {
            alg_coeffs = parse_coefficients(j.at("alg_coefficients"), "reward.alg_coefficients");
        } else {
            if (!model.brownian_params())
                config_error("polynomial rewards on a custom diffusion need alg_coefficients");
            const double drift = model.brownian_params()->drift;
            const double vol = model.brownian_params()->volatility;
            const auto d1 = poly_derivative(coeffs);
            const auto d2 = poly_derivative(d1);
            alg_coeffs.assign(coeffs.size(), 0.0);
            for (std::size_t i = 0; i < coeffs.size(); ++i)
                alg_coeffs[i] = model.alpha() * coeffs[i];
            for (std::size_t i = 0; i < d1.size(); ++i)
                alg_coeffs[i] -= drift * d1[i];
            for (std::size_t i = 0; i < d2.size(); ++i)
                alg_coeffs[i] -= 0.5 * vol * vol * d2[i];
        }
        RealFn alg = [alg_coeffs](double x) { return poly_eval(alg_coeffs, x); };
        return RewardSpec::smooth(std::move(g), std::move(alg));
    }

    if (kind == "piecewise_linear" || kind == "represented") {
        if (!model.brownian_params())
            config_error("piecewise rewards are derived for the brownian family only");
        const PiecewiseLinear pw = parse_knots(j.at("knots"));
        std::vector<double> kinks;
        for (std::size_t i = 1; i < pw.slopes.size(); ++i)
            if (pw.slopes[i] != pw.slopes[i - 1])
                kinks.push_back(pw.xs[i]);
        MeasureSpec nu = derive_nu(model, pw, kinks);
        if (kind == "represented" && j.contains("atoms")) {
            nu.atoms.clear();
            for (const auto& a : j.at("atoms")) {
                if (!a.is_array() || a.size() != 2)
                    config_error("reward.atoms must be [location, mass] pairs");
                nu.atoms.push_back({a[0].get<double>(), a[1].get<double>()});
            }
        }
        RealFn g = [pw](double x) { return pw(x); };
        return RewardSpec::represented(std::move(g), std::move(nu), kinks);
    }

    config_error("reward.kind must be polynomial, piecewise_linear or represented");
}

void parse_solver(const json& j, SolverOptions& s) {
    if (j.contains("work_window"))
        s.work_window = parse_interval(j.at("work_window"), "solver.work_window");
    s.scan_points = static_cast<int>(get_number(j, "scan_points", s.scan_points));
    s.root_tol = get_number(j, "root_tol", s.root_tol);
    s.enlarge_tol = get_number(j, "enlarge_tol", s.enlarge_tol);
    s.max_enlarge_iters = static_cast<int>(get_number(j, "max_enlarge_iters", s.max_enlarge_iters));
    s.gap_tol = get_number(j, "gap_tol", s.gap_tol);
    s.condition_grid = static_cast<int>(get_number(j, "condition_grid", s.condition_grid));
    if (j.contains("quadrature")) {
        const json& q = j.at("quadrature");
        s.quadrature.rel_tol = get_number(q, "rel_tol", s.quadrature.rel_tol);
        s.quadrature.abs_tol = get_number(q, "abs_tol", s.quadrature.abs_tol);
        s.quadrature.max_subdivisions =
            static_cast<int>(get_number(q, "max_subdivisions", s.quadrature.max_subdivisions));
        s.quadrature.tail_epsilon = get_number(q, "tail_epsilon", s.quadrature.tail_epsilon);
        s.quadrature.tail_hard_limit =
            get_number(q, "tail_hard_limit", s.quadrature.tail_hard_limit);
    }
}

void parse_oracle(const json& j, OracleConfig& o) {
    if (j.contains("brute_force")) {
        const json& b = j.at("brute_force");
        o.run_brute_force = true;
        if (b.contains("gap_counts")) {
            o.gap_counts.clear();
            for (const auto& v : b.at("gap_counts"))
                o.gap_counts.push_back(v.get<int>());
        }
        if (b.contains("window"))
            o.bf_window = parse_interval(b.at("window"), "oracle.brute_force.window");
        o.bf_grid_step = get_number(b, "grid_step", o.bf_grid_step);
        if (b.contains("eval_points"))
            for (const auto& v : b.at("eval_points"))
                o.eval_points.push_back(v.get<double>());
    }
    if (j.contains("monte_carlo")) {
        const json& m = j.at("monte_carlo");
        o.run_monte_carlo = true;
        o.mc_paths = static_cast<int>(get_number(m, "paths", o.mc_paths));
        o.mc_dt = get_number(m, "dt", o.mc_dt);
        o.mc_seed = static_cast<std::uint64_t>(get_number(m, "seed", 12345.0));
        if (m.contains("points"))
            for (const auto& v : m.at("points"))
                o.mc_points.push_back(v.get<double>());
    }
}

} // namespace

void register_custom_diffusion(const std::string& name, CustomDiffusionFactory factory) {
    registry()[name] = std::move(factory);
}

ProblemConfig parse_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        config_error(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object())
        config_error("top-level document must be an object");
    const std::string schema = j.value("schema", "ostop-config/1");
    if (schema != "ostop-config/1")
        config_error("unsupported schema \"" + schema + "\"");
    if (!j.contains("diffusion") || !j.contains("reward"))
        config_error("exactly one diffusion and one reward block are required");

    ProblemConfig cfg{.model = parse_diffusion(j.at("diffusion")),
                      .reward = RewardSpec{},
                      .solver = {},
                      .sample_range = {-5.0, 5.0},
                      .sample_count = 1001,
                      .oracle = {}};
    cfg.reward = parse_reward(j.at("reward"), cfg.model);
    if (j.contains("solver"))
        parse_solver(j.at("solver"), cfg.solver);
    if (j.contains("output")) {
        const json& out = j.at("output");
        if (out.contains("sample_range"))
            cfg.sample_range = parse_interval(out.at("sample_range"), "output.sample_range");
        cfg.sample_count = static_cast<int>(get_number(out, "sample_count", cfg.sample_count));
        if (cfg.sample_count < 2)
            config_error("output.sample_count must be at least 2");
    }
    if (j.contains("oracle"))
        parse_oracle(j.at("oracle"), cfg.oracle);
    return cfg;
}

ProblemConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        config_error("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace ostop
