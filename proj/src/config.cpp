#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

#include "ipp/errors.hpp"
#include "ipp/harness.hpp"

namespace ipp {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
}

std::string join(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

double get_number(const json& obj, const std::string& where, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(join(where, key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(join(where, key), "must be finite");
    return d;
}

long long get_integer(const json& obj, const std::string& where, const char* key, long long fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(where, key), "expected an integer");
    return v.get<long long>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(join(where, key), "expected a boolean");
    return v.get<bool>();
}

Location get_location(const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
        throw ConfigError(key, "expected [x, y] integer pair");
    }
    return {v[0].get<int>(), v[1].get<int>()};
}

FieldConfig parse_field(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("field", "expected an object");
    FieldConfig f;
    if (!j.contains("type") || !j.at("type").is_string()) throw ConfigError("field.type", "expected \"mixture\" or \"raster\"");
    const auto type = j.at("type").get<std::string>();
    if (type == "mixture") {
        check_keys(j, "field", {"type", "components", "min_components", "max_components", "min_amplitude",
                                "max_amplitude", "min_spread", "max_spread"});
        f.kind = FieldConfig::Kind::mixture;
        auto& m = f.mixture;
        m.min_components = static_cast<int>(get_integer(j, "field", "min_components", m.min_components));
        m.max_components = static_cast<int>(get_integer(j, "field", "max_components", m.max_components));
        m.min_amplitude = get_number(j, "field", "min_amplitude", m.min_amplitude);
        m.max_amplitude = get_number(j, "field", "max_amplitude", m.max_amplitude);
        m.min_spread = get_number(j, "field", "min_spread", m.min_spread);
        m.max_spread = get_number(j, "field", "max_spread", m.max_spread);
        if (j.contains("components")) {
            const auto& comps = j.at("components");
            if (!comps.is_array()) throw ConfigError("field.components", "expected an array");
            for (std::size_t i = 0; i < comps.size(); ++i) {
                const std::string where = "field.components[" + std::to_string(i) + "]";
                check_keys(comps[i], where, {"cx", "cy", "amplitude", "spread"});
                GaussianComponent c;
                c.cx = get_number(comps[i], where, "cx", 0.0);
                c.cy = get_number(comps[i], where, "cy", 0.0);
                c.amplitude = get_number(comps[i], where, "amplitude", 1.0);
                c.spread = get_number(comps[i], where, "spread", 1.0);
                if (!(c.spread > 0.0)) throw ConfigError(where + ".spread", "must be > 0");
                f.components.push_back(c);
            }
            if (f.components.empty()) throw ConfigError("field.components", "must not be empty");
        }
    } else if (type == "raster") {
        check_keys(j, "field", {"type", "path", "zscore"});
        f.kind = FieldConfig::Kind::raster;
        if (!j.contains("path") || !j.at("path").is_string()) throw ConfigError("field.path", "expected a file path");
        f.raster_path = j.at("path").get<std::string>();
        if (f.raster_path.is_relative() && !base_dir.empty()) f.raster_path = base_dir / f.raster_path;
        f.zscore = get_bool(j, "field", "zscore", false);
        if (!std::filesystem::exists(f.raster_path)) {
            throw ConfigError("field.path", "raster file not found: " + f.raster_path.string());
        }
        try {
            auto raster = load_grid_field(f.raster_path);
            f.raster = f.zscore ? zscore(raster) : raster;
        } catch (const FormatError& e) {
            throw ConfigError("field.path", f.raster_path.string() + ": " + e.what());
        }
    } else {
        throw ConfigError("field.type", "expected \"mixture\" or \"raster\", got \"" + type + "\"");
    }
    return f;
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    check_keys(doc, "", {"field", "grid", "n_locations", "robots", "budget", "method", "planner", "cost", "gp",
                         "resample", "noise_sd", "shared_gp", "runs", "base_seed"});
    for (const char* required : {"field", "robots", "budget"}) {
        if (!doc.contains(required)) throw ConfigError(required, "missing required key");
    }
    ExperimentConfig c;
    c.field = parse_field(doc.at("field"), base_dir);

    int width = 30, height = 30;
    if (c.field.raster) {
        width = c.field.raster->grid().width;
        height = c.field.raster->grid().height;
    }
    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        check_keys(g, "grid", {"width", "height"});
        width = static_cast<int>(get_integer(g, "grid", "width", width));
        height = static_cast<int>(get_integer(g, "grid", "height", height));
    }
    if (width < 2 || height < 2) throw ConfigError("grid", "width and height must be >= 2");
    c.grid = GridSpec(width, height);
    if (c.field.raster && !(c.field.raster->grid() == c.grid)) {
        throw ConfigError("grid", "does not match the raster dimensions");
    }

    const long long n_loc = get_integer(doc, "", "n_locations", 100);
    if (n_loc < 1) throw ConfigError("n_locations", "must be >= 1");
    c.n_locations = static_cast<std::size_t>(n_loc);

    const auto& robots = doc.at("robots");
    const Location default_start{0, 0};
    const Location default_final{width - 1, height - 1};
    if (robots.is_number_integer()) {
        const auto count = robots.get<long long>();
        if (count < 1) throw ConfigError("robots", "team size must be >= 1");
        c.robots.assign(static_cast<std::size_t>(count), RobotSpec{default_start, default_final});
    } else if (robots.is_array()) {
        for (std::size_t i = 0; i < robots.size(); ++i) {
            const std::string where = "robots[" + std::to_string(i) + "]";
            check_keys(robots[i], where, {"start", "final"});
            RobotSpec r{default_start, default_final};
            if (robots[i].contains("start")) r.start = get_location(robots[i].at("start"), where + ".start");
            if (robots[i].contains("final")) r.final = get_location(robots[i].at("final"), where + ".final");
            c.robots.push_back(r);
        }
    } else {
        throw ConfigError("robots", "expected a team size or a list of {start, final}");
    }

    c.budget = get_number(doc, "", "budget", 0.0);
    if (doc.contains("method")) {
        if (!doc.at("method").is_string()) throw ConfigError("method", "expected a string");
        c.method = parse_method(doc.at("method").get<std::string>());
    }

    if (doc.contains("planner")) {
        const auto& p = doc.at("planner");
        check_keys(p, "planner", {"branching", "exploration", "discount", "iterations"});
        c.planner.branching = static_cast<int>(get_integer(p, "planner", "branching", c.planner.branching));
        c.planner.exploration = get_number(p, "planner", "exploration", c.planner.exploration);
        c.planner.discount = get_number(p, "planner", "discount", c.planner.discount);
        c.planner.iterations = static_cast<int>(get_integer(p, "planner", "iterations", c.planner.iterations));
    }
    if (doc.contains("cost")) {
        const auto& p = doc.at("cost");
        check_keys(p, "cost", {"alpha", "lambda_max"});
        c.cost.alpha = get_number(p, "cost", "alpha", c.cost.alpha);
        c.cost.lambda_max = get_number(p, "cost", "lambda_max", c.cost.lambda_max);
    }
    if (doc.contains("gp")) {
        const auto& p = doc.at("gp");
        check_keys(p, "gp", {"length_scale", "signal_variance", "jitter"});
        c.kernel.length_scale = get_number(p, "gp", "length_scale", c.kernel.length_scale);
        c.kernel.signal_variance = get_number(p, "gp", "signal_variance", c.kernel.signal_variance);
        c.kernel.jitter = get_number(p, "gp", "jitter", c.kernel.jitter);
    }
    if (doc.contains("resample")) {
        const auto& p = doc.at("resample");
        check_keys(p, "resample", {"size", "period"});
        const auto size = get_integer(p, "resample", "size", static_cast<long long>(c.resample.size));
        if (size < 1) throw ConfigError("resample.size", "must be >= 1");
        c.resample.size = static_cast<std::size_t>(size);
        c.resample.period = static_cast<int>(get_integer(p, "resample", "period", c.resample.period));
    }
    c.noise_sd = get_number(doc, "", "noise_sd", c.noise_sd);
    c.shared_gp = get_bool(doc, "", "shared_gp", c.shared_gp);
    c.runs = static_cast<int>(get_integer(doc, "", "runs", c.runs));
    if (doc.contains("base_seed")) {
        const auto& v = doc.at("base_seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            throw ConfigError("base_seed", "expected a non-negative integer");
        }
        c.base_seed = v.get<std::uint64_t>();
    }
    c.validate();
    return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + ": invalid JSON: " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

void ExperimentConfig::validate() const {
    if (n_locations > grid.cell_count()) throw ConfigError("n_locations", "exceeds the number of grid cells");
    if (robots.empty()) throw ConfigError("robots", "team size must be >= 1");
    if (!(budget > 0.0)) throw ConfigError("budget", "must be > 0");
    if (planner.branching < 2 || planner.branching % 2 != 0) {
        throw ConfigError("planner.branching", "must be an even integer >= 2");
    }
    if (!(planner.exploration >= 0.0)) throw ConfigError("planner.exploration", "must be >= 0");
    if (!(planner.discount >= 0.0 && planner.discount <= 1.0)) throw ConfigError("planner.discount", "must lie in [0, 1]");
    if (planner.iterations < 1) throw ConfigError("planner.iterations", "must be >= 1");
    if (!(cost.alpha > 0.0)) throw ConfigError("cost.alpha", "must be > 0");
    if (!(cost.lambda_max >= 0.0)) throw ConfigError("cost.lambda_max", "must be >= 0");
    if (!(kernel.length_scale > 0.0)) throw ConfigError("gp.length_scale", "must be > 0");
    if (!(kernel.signal_variance > 0.0)) throw ConfigError("gp.signal_variance", "must be > 0");
    if (!(kernel.jitter >= 0.0)) throw ConfigError("gp.jitter", "must be >= 0");
    if (resample.size < 1) throw ConfigError("resample.size", "must be >= 1");
    if (resample.period < 1) throw ConfigError("resample.period", "must be >= 1");
    if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd", "must be >= 0");
    if (runs < 1) throw ConfigError("runs", "must be >= 1");
    if (field.kind == FieldConfig::Kind::mixture) {
        const auto& m = field.mixture;
        if (m.min_components < 1 || m.max_components < m.min_components) {
            throw ConfigError("field.min_components", "invalid component count range");
        }
        if (!(m.min_spread > 0.0) || m.max_spread < m.min_spread) throw ConfigError("field.min_spread", "invalid spread range");
        if (m.max_amplitude < m.min_amplitude) throw ConfigError("field.min_amplitude", "invalid amplitude range");
    } else if (!field.raster) {
        throw ConfigError("field.path", "raster not loaded");
    }
    for (std::size_t i = 0; i < robots.size(); ++i) {
        const std::string where = "robots[" + std::to_string(i) + "]";
        if (!grid.contains(robots[i].start)) throw ConfigError(where + ".start", "outside the grid");
        if (!grid.contains(robots[i].final)) throw ConfigError(where + ".final", "outside the grid");
        if (worst_cost(robots[i].start, robots[i].final, cost) > budget) {
            throw ConfigError("budget", "worst-case cost from start to final of " + where + " exceeds the budget");
        }
    }
}

MissionConfig ExperimentConfig::mission() const {
    MissionConfig m;
    m.grid = grid;
    m.robots = robots;
    m.budget = budget;
    m.method = method;
    m.planner = planner;
    m.cost = cost;
    m.kernel = kernel;
    m.resample = resample;
    m.noise_sd = noise_sd;
    m.shared_gp = shared_gp;
    return m;
}

}  // namespace ipp
