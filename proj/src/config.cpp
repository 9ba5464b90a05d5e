#include "hypequil/config.hpp"

#include <cmath>
#include <sstream>

namespace hypequil {

namespace {

template <class T>
T wrap(const std::string& path, auto&& fn) {
    try {
        return fn();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(path, e.what());
    }
}

HPoint point_in_dim(const json& j, std::size_t dimension, const std::string& path) {
    HPoint p = point_from_json(j, path);
    if (p.dim() != dimension) {
        throw ParseError(path, "expected " + std::to_string(dimension + 1) + " coordinates, got " +
                                   std::to_string(p.ambient_dim()));
    }
    return p;
}

std::size_t count_at(const json& j, const std::string& path, bool positive) {
    const std::uint64_t v = integer_at(j, path);
    if (positive && v == 0) throw ParseError(path, "must be positive");
    return static_cast<std::size_t>(v);
}

double positive_at(const json& j, const std::string& path) {
    const double v = number_at(j, path);
    if (!(v > 0.0)) throw ParseError(path, "must be positive");
    return v;
}

SolverOptions solver_from_json(const json& j, const std::string& path) {
    SolverOptions o;
    if (!j.is_object()) throw ParseError(path, "expected an object");
    reject_unknown_keys(j, path, {"tol", "max_iters", "grid_spacing", "bounding_radius"});
    if (j.contains("tol")) o.tol = positive_at(j["tol"], path + ".tol");
    if (j.contains("max_iters")) o.max_iters = count_at(j["max_iters"], path + ".max_iters", true);
    if (j.contains("grid_spacing")) o.grid_spacing = positive_at(j["grid_spacing"], path + ".grid_spacing");
    if (j.contains("bounding_radius")) {
        o.bounding_radius = positive_at(j["bounding_radius"], path + ".bounding_radius");
    }
    return o;
}

PpaConfig ppa_from_json(const json& j, std::size_t dimension, const std::string& path) {
    PpaConfig c;
    if (!j.is_object()) throw ParseError(path, "expected an object");
    reject_unknown_keys(j, path, {"x0", "lambda", "stop_tol", "max_steps", "timing"});
    if (j.contains("x0")) c.x0 = point_in_dim(j["x0"], dimension, path + ".x0");
    if (j.contains("lambda")) {
        const json& l = j["lambda"];
        const std::string lp = path + ".lambda";
        if (!l.is_object()) throw ParseError(lp, "expected an object");
        reject_unknown_keys(l, lp, {"initial", "ratio"});
        if (l.contains("initial")) c.lambdas.initial = positive_at(l["initial"], lp + ".initial");
        if (l.contains("ratio")) c.lambdas.ratio = positive_at(l["ratio"], lp + ".ratio");
    }
    if (j.contains("stop_tol")) c.stop_tol = positive_at(j["stop_tol"], path + ".stop_tol");
    if (j.contains("max_steps")) c.max_steps = count_at(j["max_steps"], path + ".max_steps", true);
    if (j.contains("timing")) c.timing = bool_at(j["timing"], path + ".timing");
    return c;
}

VerifyConfig verify_from_json(const json& j, const std::string& path) {
    VerifyConfig c;
    if (!j.is_object()) throw ParseError(path, "expected an object");
    reject_unknown_keys(j, path,
                        {"suite", "geometry_trials", "condition_samples", "instances", "firm_pairs", "kkm_families",
                         "kkm_family_size", "ppa_steps"});
    if (j.contains("suite")) {
        c.suite = string_at(j["suite"], path + ".suite");
        if (c.suite != "catalog" && c.suite != "config") {
            throw ParseError(path + ".suite", "expected \"catalog\" or \"config\"");
        }
    }
    const std::pair<const char*, std::size_t*> counts[] = {
        {"geometry_trials", &c.geometry_trials}, {"condition_samples", &c.condition_samples},
        {"instances", &c.instances},             {"firm_pairs", &c.firm_pairs},
        {"kkm_families", &c.kkm_families},       {"kkm_family_size", &c.kkm_family_size},
        {"ppa_steps", &c.ppa_steps},
    };
    for (const auto& [key, dst] : counts) {
        if (j.contains(key)) *dst = count_at(j[key], path + "." + key, true);
    }
    return c;
}

}  // namespace

std::string to_string(Task t) {
    switch (t) {
        case Task::resolve: return "resolve";
        case Task::ppa: return "ppa";
        case Task::verify: return "verify";
        case Task::grid_oracle: return "grid-oracle";
    }
    return "?";
}

Task task_from_string(const std::string& s, const std::string& path) {
    if (s == "resolve") return Task::resolve;
    if (s == "ppa") return Task::ppa;
    if (s == "verify") return Task::verify;
    if (s == "grid-oracle") return Task::grid_oracle;
    throw ParseError(path, "unknown task \"" + s + "\" (resolve, ppa, verify, grid-oracle)");
}

ConvexRegion region_from_json(const json& j, std::size_t dimension, const std::string& path) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
    if (!j.contains("type")) throw ParseError(path + ".type", "missing");
    const std::string type = string_at(j["type"], path + ".type");
    if (type == "ball") {
        reject_unknown_keys(j, path, {"type", "center", "radius"});
        HPoint center = j.contains("center") ? point_in_dim(j["center"], dimension, path + ".center")
                                             : HPoint::origin(dimension);
        if (!j.contains("radius")) throw ParseError(path + ".radius", "missing");
        const double r = number_at(j["radius"], path + ".radius");
        if (!(r > 0.0)) throw ParseError(path + ".radius", "must be positive");
        return wrap<ConvexRegion>(path, [&] { return ConvexRegion::ball(center, r); });
    }
    if (type == "halfspace") {
        reject_unknown_keys(j, path, {"type", "normal"});
        if (!j.contains("normal")) throw ParseError(path + ".normal", "missing");
        const json& n = j["normal"];
        const std::string np = path + ".normal";
        if (!n.is_array() || n.size() != dimension + 1) {
            throw ParseError(np, "expected " + std::to_string(dimension + 1) + " coordinates");
        }
        Vec v(dimension + 1);
        for (std::size_t i = 0; i < n.size(); ++i) v[i] = number_at(n[i], np + "[" + std::to_string(i) + "]");
        const double q = minkowski_form_unchecked(v, v);
        if (!(q > 0.0)) throw ParseError(np, "must be spacelike (<n,n> > 0)");
        if (std::abs(q - 1.0) > 1e-9) v = (1.0 / std::sqrt(q)) * v;
        return wrap<ConvexRegion>(path, [&] { return ConvexRegion::halfspace(v); });
    }
    if (type == "intersection") {
        reject_unknown_keys(j, path, {"type", "members"});
        if (!j.contains("members") || !j["members"].is_array() || j["members"].empty()) {
            throw ParseError(path + ".members", "expected a non-empty array");
        }
        std::vector<ConvexRegion> members;
        for (std::size_t i = 0; i < j["members"].size(); ++i) {
            members.push_back(
                region_from_json(j["members"][i], dimension, path + ".members[" + std::to_string(i) + "]"));
        }
        return wrap<ConvexRegion>(path, [&] { return ConvexRegion::intersection(std::move(members)); });
    }
    if (type == "whole") {
        reject_unknown_keys(j, path, {"type"});
        return ConvexRegion::whole(dimension);
    }
    throw ParseError(path + ".type", "unknown region type \"" + type + "\" (ball, halfspace, intersection, whole)");
}

json region_to_json(const ConvexRegion& region) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConvexRegion::Ball>) {
                return json{{"type", "ball"}, {"center", point_to_json(s.center)}, {"radius", s.radius}};
            } else if constexpr (std::is_same_v<T, ConvexRegion::HalfSpace>) {
                json n = json::array();
                for (std::size_t i = 0; i < s.normal.size(); ++i) n.push_back(s.normal[i]);
                return json{{"type", "halfspace"}, {"normal", n}};
            } else if constexpr (std::is_same_v<T, ConvexRegion::Intersection>) {
                json m = json::array();
                for (const ConvexRegion& r : s.members) m.push_back(region_to_json(r));
                return json{{"type", "intersection"}, {"members", m}};
            } else {
                return json{{"type", "whole"}};
            }
        },
        region.shape());
}

HPoint ExperimentConfig::query_point() const { return x ? *x : region.witness(); }

HPoint ExperimentConfig::ppa_start() const { return ppa.x0 ? *ppa.x0 : region.witness(); }

json ExperimentConfig::to_json() const {
    json out;
    out["dimension"] = dimension;
    out["region"] = region_to_json(region);
    out["bifunction"] = bifunction.to_json();
    out["task"] = to_string(task);
    out["solver"] = json{{"tol", solver.tol},
                         {"max_iters", solver.max_iters},
                         {"grid_spacing", solver.grid_spacing},
                         {"bounding_radius", solver.bounding_radius}};
    out["output"] = output;
    out["seed"] = seed;
    out["plot"] = plot;
    out["x"] = point_to_json(query_point());
    out["ppa"] = json{{"x0", point_to_json(ppa_start())},
                      {"lambda", json{{"initial", ppa.lambdas.initial}, {"ratio", ppa.lambdas.ratio}}},
                      {"stop_tol", ppa.stop_tol},
                      {"max_steps", ppa.max_steps},
                      {"timing", ppa.timing}};
    out["verify"] = json{{"suite", verify.suite},
                         {"geometry_trials", verify.geometry_trials},
                         {"condition_samples", verify.condition_samples},
                         {"instances", verify.instances},
                         {"firm_pairs", verify.firm_pairs},
                         {"kkm_families", verify.kkm_families},
                         {"kkm_family_size", verify.kkm_family_size},
                         {"ppa_steps", verify.ppa_steps}};
    return out;
}

ExperimentConfig parse_config(const json& doc, std::optional<Task> fallback_task) {
    if (!doc.is_object()) throw ParseError("(root)", "expected a JSON object");
    reject_unknown_keys(doc, "",
                        {"dimension", "region", "bifunction", "task", "solver", "output", "seed", "plot", "x", "ppa",
                         "verify"});

    if (!doc.contains("dimension")) throw ParseError("dimension", "missing");
    const std::uint64_t dim = integer_at(doc["dimension"], "dimension");
    if (dim < 2 || dim + 1 > kMaxAmbient) {
        throw ParseError("dimension", "must lie in [2, " + std::to_string(kMaxAmbient - 1) + "]");
    }
    const std::size_t n = static_cast<std::size_t>(dim);

    if (!doc.contains("region")) throw ParseError("region", "missing");
    ConvexRegion region = region_from_json(doc["region"], n, "region");

    Bifunction f = doc.contains("bifunction") ? bifunction_from_json(doc["bifunction"], "bifunction")
                                              : Bifunction(ObjectiveDiff{}, 1.0);
    // Anchors of the wrong dimension surface on the first evaluation.
    wrap<double>("bifunction", [&] { return f(region.witness(), region.witness()); });

    Task task;
    if (doc.contains("task")) {
        task = task_from_string(string_at(doc["task"], "task"));
    } else if (fallback_task) {
        task = *fallback_task;
    } else {
        throw ParseError("task", "missing");
    }

    SolverOptions solver = doc.contains("solver") ? solver_from_json(doc["solver"], "solver") : SolverOptions{};

    ExperimentConfig cfg{n, std::move(region), std::move(f), task, solver, "out", 0, false, std::nullopt, {}, {}};
    if (doc.contains("output")) {
        cfg.output = string_at(doc["output"], "output");
        if (cfg.output.empty()) throw ParseError("output", "must not be empty");
    }
    if (doc.contains("seed")) cfg.seed = integer_at(doc["seed"], "seed");
    cfg.solver.seed = cfg.seed;
    if (doc.contains("plot")) cfg.plot = bool_at(doc["plot"], "plot");
    if (doc.contains("x")) cfg.x = point_in_dim(doc["x"], n, "x");
    if (doc.contains("ppa")) cfg.ppa = ppa_from_json(doc["ppa"], n, "ppa");
    if (doc.contains("verify")) cfg.verify = verify_from_json(doc["verify"], "verify");
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& text, std::optional<Task> fallback_task) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("(document)", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc, fallback_task);
}

}  // namespace hypequil
