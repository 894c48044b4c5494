#pragma once

// JSON scenario configuration.  Parsing is strict: unknown keys anywhere in
// the document are hard errors, as are type mismatches.  `c` may be given
// as a number or as an exact rational string "p/q" (used for exact
// frequency-collision detection).

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <set>

#include "errors.hpp"
#include "global_steer.hpp"
#include "model.hpp"
#include "moment_system.hpp"
#include "random.hpp"

namespace kdvbbm {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace cfg {

inline void require_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + where + "." + item.key() + "'");
}

inline double get_number(const json& obj, const std::string& where, const std::string& key,
                         double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number())
        throw ConfigError(where + "." + key + ": expected a number");
    return obj.at(key).get<double>();
}

inline int get_int(const json& obj, const std::string& where, const std::string& key,
                   int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number_integer())
        throw ConfigError(where + "." + key + ": expected an integer");
    return obj.at(key).get<int>();
}

inline bool get_bool(const json& obj, const std::string& where, const std::string& key,
                     bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean())
        throw ConfigError(where + "." + key + ": expected a boolean");
    return obj.at(key).get<bool>();
}

inline std::string get_string(const json& obj, const std::string& where, const std::string& key,
                              const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string())
        throw ConfigError(where + "." + key + ": expected a string");
    return obj.at(key).get<std::string>();
}

} // namespace cfg

struct FieldSpec {
    std::string type = "zero"; // zero|constant|cosine|sine|random|gaussian_bump|file
    double amplitude = 1.0;
    double value = 0.0;        // constant
    int mode = 1;              // cosine/sine
    double center = std::numbers::pi;   // gaussian_bump
    double sharpness = 10.0;            // gaussian_bump
    double norm = -1.0;        // rescale to this H^s norm when >= 0
    double norm_order = 1.0;
    double decay = 1.0;        // random spectral decay
    std::string path;          // file

    static FieldSpec parse(const json& j, const std::string& where) {
        cfg::require_keys(j, where,
                          {"type", "amplitude", "value", "mode", "center", "sharpness", "norm",
                           "norm_order", "decay", "path"});
        FieldSpec fs;
        fs.type = cfg::get_string(j, where, "type", "zero");
        const std::set<std::string> types{"zero",   "constant",      "cosine", "sine",
                                          "random", "gaussian_bump", "file"};
        if (!types.count(fs.type)) throw ConfigError(where + ".type: unknown field type '" + fs.type + "'");
        fs.amplitude = cfg::get_number(j, where, "amplitude", 1.0);
        fs.value = cfg::get_number(j, where, "value", 0.0);
        fs.mode = cfg::get_int(j, where, "mode", 1);
        fs.center = cfg::get_number(j, where, "center", std::numbers::pi);
        fs.sharpness = cfg::get_number(j, where, "sharpness", 10.0);
        fs.norm = cfg::get_number(j, where, "norm", -1.0);
        fs.norm_order = cfg::get_number(j, where, "norm_order", 1.0);
        fs.decay = cfg::get_number(j, where, "decay", 1.0);
        fs.path = cfg::get_string(j, where, "path", "");
        if (fs.type == "file" && fs.path.empty())
            throw ConfigError(where + ": field type 'file' needs a path");
        return fs;
    }
};

struct ProfileSpec {
    std::string type = "gaussian_bump"; // constant|gaussian_bump|raised_cosine|file
    double value = 1.0;                 // constant
    double amplitude = 1.0;
    double center = std::numbers::pi;
    double sharpness = 10.0;
    double mean = 1.0; // raised_cosine: mean + amplitude cos(mode x)
    int mode = 1;
    std::string path;

    static ProfileSpec parse(const json& j, const std::string& where) {
        cfg::require_keys(j, where,
                          {"type", "value", "amplitude", "center", "sharpness", "mean", "mode",
                           "path"});
        ProfileSpec ps;
        ps.type = cfg::get_string(j, where, "type", "gaussian_bump");
        const std::set<std::string> types{"constant", "gaussian_bump", "raised_cosine", "file"};
        if (!types.count(ps.type))
            throw ConfigError(where + ".type: unknown profile type '" + ps.type + "'");
        ps.value = cfg::get_number(j, where, "value", 1.0);
        ps.amplitude = cfg::get_number(j, where, "amplitude", 1.0);
        ps.center = cfg::get_number(j, where, "center", std::numbers::pi);
        ps.sharpness = cfg::get_number(j, where, "sharpness", 10.0);
        ps.mean = cfg::get_number(j, where, "mean", 1.0);
        ps.mode = cfg::get_int(j, where, "mode", 1);
        ps.path = cfg::get_string(j, where, "path", "");
        if (ps.type == "file" && ps.path.empty())
            throw ConfigError(where + ": profile type 'file' needs a path");
        return ps;
    }
};

struct ScenarioConfig {
    std::string scenario;

    // model
    double c = 0.0;
    std::optional<Rational> c_rational;
    Nonlinearity nonlinearity = Nonlinearity::drift_dispersion;
    std::string flux_name;
    double lambda = 1.0;
    DampingType damping = DampingType::none;
    ProfileSpec profile;
    bool has_profile = false;

    // numerics
    int order = 32;
    double dt = 1e-3;
    int sample_every = 10;
    std::vector<double> sobolev_orders = {1.0};
    double blowup_factor = 1e6;
    double invariant_tol = 1e-6;

    // fields
    FieldSpec initial;
    FieldSpec target;
    bool has_target = false;

    double horizon = 10.0;

    // control
    double control_s = 1.0;
    double control_tol = 1e-10;
    int control_max_iter = 25;
    int control_samples = 2048;
    double condition_cap = 1e12;
    int control_times = 129; // control.csv sampling
    double target_residual = 1e-5;

    // stabilize
    double fit_t_min = 1.0;
    double ledger_tol = 1e-5;
    bool compute_abscissa = true;

    // moving frame
    bool frame_with_control = false;

    // taylor
    int taylor_n_max = 20;
    double taylor_eval_time = -1.0; // < 0: half the estimated radius
    double taylor_compare_dt = 1e-4;

    // global steer
    GlobalSteerOptions global;

    // ucp probe
    int ucp_batch = 50;
    double ucp_amplitude = 1.0;

    std::uint64_t seed = 1;
    std::string output_dir = "out";
    bool emit_plots = false;

    json raw;
};

namespace cfg {

inline std::pair<double, std::optional<Rational>> parse_c(const json& model,
                                                          const std::string& where) {
    if (!model.contains("c")) return {0.0, std::nullopt};
    const json& jc = model.at("c");
    if (jc.is_number()) {
        const double c = jc.get<double>();
        return {c, rational_from_double(c)};
    }
    if (jc.is_string()) {
        const std::string s = jc.get<std::string>();
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) {
                const long long p = std::stoll(s);
                return {static_cast<double>(p), reduced(p, 1)};
            }
            const long long p = std::stoll(s.substr(0, slash));
            const long long q = std::stoll(s.substr(slash + 1));
            if (q == 0) throw ConfigError(where + ".c: zero denominator");
            const Rational r = reduced(p, q);
            return {static_cast<double>(r.num) / static_cast<double>(r.den), r};
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError(where + ".c: cannot parse rational '" + s + "'");
        }
    }
    throw ConfigError(where + ".c: expected a number or rational string \"p/q\"");
}

inline Nonlinearity parse_nonlinearity(const std::string& s, const std::string& where) {
    if (s == "linear") return Nonlinearity::linear;
    if (s == "drift_dispersion") return Nonlinearity::drift_dispersion;
    if (s == "pointwise_flux") return Nonlinearity::pointwise_flux;
    if (s == "nonlocal_quadratic") return Nonlinearity::nonlocal_quadratic;
    throw ConfigError(where + ": unknown nonlinearity '" + s + "'");
}

inline DampingType parse_damping(const std::string& s, const std::string& where) {
    if (s == "none") return DampingType::none;
    if (s == "feedback") return DampingType::feedback;
    if (s == "multiplicative") return DampingType::multiplicative;
    throw ConfigError(where + ": unknown damping type '" + s + "'");
}

} // namespace cfg

inline ScenarioConfig parse_config(const json& root) {
    cfg::require_keys(root, "config",
                      {"scenario", "model", "numerics", "initial", "target", "horizon",
                       "control", "stabilize", "moving_frame", "taylor", "global", "ucp",
                       "seed", "output"});
    ScenarioConfig sc;
    sc.raw = root;
    if (!root.contains("scenario") || !root.at("scenario").is_string())
        throw ConfigError("config.scenario: a scenario name string is required");
    sc.scenario = root.at("scenario").get<std::string>();
    const std::set<std::string> scenarios{"simulate",        "taylor",
                                          "control_linear",  "control_nonlinear",
                                          "stabilize",       "moving_frame_check",
                                          "global_steer",    "ucp_probe"};
    if (!scenarios.count(sc.scenario))
        throw ConfigError("config.scenario: unknown scenario '" + sc.scenario + "'");

    if (root.contains("model")) {
        const json& m = root.at("model");
        cfg::require_keys(m, "model", {"c", "nonlinearity", "flux", "lambda", "damping", "profile"});
        std::tie(sc.c, sc.c_rational) = cfg::parse_c(m, "model");
        sc.nonlinearity = cfg::parse_nonlinearity(
            cfg::get_string(m, "model", "nonlinearity", "drift_dispersion"), "model.nonlinearity");
        sc.flux_name = cfg::get_string(m, "model", "flux", "");
        sc.lambda = cfg::get_number(m, "model", "lambda", 1.0);
        sc.damping = cfg::parse_damping(cfg::get_string(m, "model", "damping", "none"),
                                        "model.damping");
        if (m.contains("profile")) {
            sc.profile = ProfileSpec::parse(m.at("profile"), "model.profile");
            sc.has_profile = true;
        }
        if (sc.damping != DampingType::none && !sc.has_profile)
            throw ConfigError("model.damping set but model.profile is missing");
        if (sc.nonlinearity == Nonlinearity::pointwise_flux && sc.flux_name.empty())
            throw ConfigError("model.flux is required for pointwise_flux");
    }

    if (root.contains("numerics")) {
        const json& n = root.at("numerics");
        cfg::require_keys(n, "numerics",
                          {"order", "dt", "sample_every", "sobolev_orders", "blowup_factor",
                           "invariant_tol"});
        sc.order = cfg::get_int(n, "numerics", "order", sc.order);
        sc.dt = cfg::get_number(n, "numerics", "dt", sc.dt);
        sc.sample_every = cfg::get_int(n, "numerics", "sample_every", sc.sample_every);
        sc.blowup_factor = cfg::get_number(n, "numerics", "blowup_factor", sc.blowup_factor);
        sc.invariant_tol = cfg::get_number(n, "numerics", "invariant_tol", sc.invariant_tol);
        if (n.contains("sobolev_orders")) {
            if (!n.at("sobolev_orders").is_array())
                throw ConfigError("numerics.sobolev_orders: expected an array of numbers");
            sc.sobolev_orders.clear();
            for (const auto& v : n.at("sobolev_orders")) {
                if (!v.is_number())
                    throw ConfigError("numerics.sobolev_orders: expected an array of numbers");
                sc.sobolev_orders.push_back(v.get<double>());
            }
        }
        if (sc.order < 1) throw ConfigError("numerics.order must be >= 1");
        if (!(sc.dt > 0.0)) throw ConfigError("numerics.dt must be positive");
        if (sc.sample_every < 1) throw ConfigError("numerics.sample_every must be >= 1");
    }

    if (root.contains("initial")) sc.initial = FieldSpec::parse(root.at("initial"), "initial");
    if (root.contains("target")) {
        sc.target = FieldSpec::parse(root.at("target"), "target");
        sc.has_target = true;
    }
    if (root.contains("horizon")) {
        if (!root.at("horizon").is_number()) throw ConfigError("horizon: expected a number");
        sc.horizon = root.at("horizon").get<double>();
        if (!(sc.horizon > 0.0)) throw ConfigError("horizon must be positive");
    }

    if (root.contains("control")) {
        const json& c = root.at("control");
        cfg::require_keys(c, "control",
                          {"s", "tol", "max_iter", "samples", "condition_cap", "times",
                           "target_residual"});
        sc.control_s = cfg::get_number(c, "control", "s", sc.control_s);
        sc.control_tol = cfg::get_number(c, "control", "tol", sc.control_tol);
        sc.control_max_iter = cfg::get_int(c, "control", "max_iter", sc.control_max_iter);
        sc.control_samples = cfg::get_int(c, "control", "samples", sc.control_samples);
        sc.condition_cap = cfg::get_number(c, "control", "condition_cap", sc.condition_cap);
        sc.control_times = cfg::get_int(c, "control", "times", sc.control_times);
        sc.target_residual = cfg::get_number(c, "control", "target_residual", sc.target_residual);
    }

    if (root.contains("stabilize")) {
        const json& s = root.at("stabilize");
        cfg::require_keys(s, "stabilize", {"t_min", "ledger_tol", "abscissa"});
        sc.fit_t_min = cfg::get_number(s, "stabilize", "t_min", sc.fit_t_min);
        sc.ledger_tol = cfg::get_number(s, "stabilize", "ledger_tol", sc.ledger_tol);
        sc.compute_abscissa = cfg::get_bool(s, "stabilize", "abscissa", sc.compute_abscissa);
    }

    if (root.contains("moving_frame")) {
        const json& mf = root.at("moving_frame");
        cfg::require_keys(mf, "moving_frame", {"control"});
        sc.frame_with_control = cfg::get_bool(mf, "moving_frame", "control", false);
    }

    if (root.contains("taylor")) {
        const json& t = root.at("taylor");
        cfg::require_keys(t, "taylor", {"n_max", "eval_time", "compare_dt"});
        sc.taylor_n_max = cfg::get_int(t, "taylor", "n_max", sc.taylor_n_max);
        sc.taylor_eval_time = cfg::get_number(t, "taylor", "eval_time", sc.taylor_eval_time);
        sc.taylor_compare_dt = cfg::get_number(t, "taylor", "compare_dt", sc.taylor_compare_dt);
    }

    if (root.contains("global")) {
        const json& g = root.at("global");
        cfg::require_keys(g, "global",
                          {"delta_local", "t_cap", "sample_every", "check_every", "local_tol",
                           "local_max_iter", "local_samples"});
        sc.global.delta_local = cfg::get_number(g, "global", "delta_local", sc.global.delta_local);
        sc.global.t_cap = cfg::get_number(g, "global", "t_cap", sc.global.t_cap);
        sc.global.sample_every = cfg::get_int(g, "global", "sample_every", sc.global.sample_every);
        sc.global.check_every = cfg::get_number(g, "global", "check_every", sc.global.check_every);
        sc.global.local.tol = cfg::get_number(g, "global", "local_tol", sc.global.local.tol);
        sc.global.local.max_iter = cfg::get_int(g, "global", "local_max_iter", sc.global.local.max_iter);
        sc.global.local.n_samples = cfg::get_int(g, "global", "local_samples", sc.global.local.n_samples);
    }

    if (root.contains("ucp")) {
        const json& u = root.at("ucp");
        cfg::require_keys(u, "ucp", {"batch", "amplitude"});
        sc.ucp_batch = cfg::get_int(u, "ucp", "batch", sc.ucp_batch);
        sc.ucp_amplitude = cfg::get_number(u, "ucp", "amplitude", sc.ucp_amplitude);
        if (sc.ucp_batch < 1) throw ConfigError("ucp.batch must be >= 1");
    }

    if (root.contains("seed")) {
        if (!root.at("seed").is_number_integer())
            throw ConfigError("seed: expected an integer");
        sc.seed = root.at("seed").get<std::uint64_t>();
    }

    if (root.contains("output")) {
        const json& o = root.at("output");
        cfg::require_keys(o, "output", {"dir", "plots"});
        sc.output_dir = cfg::get_string(o, "output", "dir", sc.output_dir);
        sc.emit_plots = cfg::get_bool(o, "output", "plots", sc.emit_plots);
    }

    return sc;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(root);
}

} // namespace kdvbbm
