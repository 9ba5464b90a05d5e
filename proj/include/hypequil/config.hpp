#pragma once

// Experiment config: a JSON document describing space, region, bifunction,
// solver options and task. Parsing is strict (unknown keys are errors) and
// every default is materialized in the echo, so echo -> parse is lossless.
//
//   {
//     "dimension": 2,
//     "region": {"type": "ball", "center": [1,0,0], "radius": 2},
//     "bifunction": {"type": "zero"},
//     "task": "resolve",
//     "solver": {"tol": 1e-8, "max_iters": 10000, "grid_spacing": 0.05, "bounding_radius": 6},
//     "seed": 0, "output": "out", "plot": false,
//     "x": [1,0,0],
//     "ppa": {"x0": [...], "lambda": {"initial": 1, "ratio": 1}, "stop_tol": 1e-12,
//             "max_steps": 200, "timing": false},
//     "verify": {"suite": "catalog", "geometry_trials": 10000, ...}
//   }

#include <cstdint>
#include <optional>
#include <string>

#include "hypequil/bifunction.hpp"
#include "hypequil/harness.hpp"
#include "hypequil/io.hpp"
#include "hypequil/ppa.hpp"
#include "hypequil/region.hpp"
#include "hypequil/resolvent.hpp"

namespace hypequil {

enum class Task { resolve, ppa, verify, grid_oracle };

std::string to_string(Task t);

/// Throws ParseError at `path` for anything but resolve / ppa / verify / grid-oracle.
Task task_from_string(const std::string& s, const std::string& path = "task");

struct PpaConfig {
    /// Starting point; the region witness when absent.
    std::optional<HPoint> x0;
    LambdaSchedule lambdas;
    double stop_tol = 1e-12;
    std::size_t max_steps = 200;
    /// Write measured per-step microseconds (otherwise 0, byte-stable).
    bool timing = false;
};

struct VerifyConfig {
    /// "catalog": the built-in test matrix. "config": the configured f and region.
    std::string suite = "catalog";
    std::size_t geometry_trials = 10000;
    std::size_t condition_samples = 1000;
    std::size_t instances = 20;
    std::size_t firm_pairs = 200;
    std::size_t kkm_families = 50;
    std::size_t kkm_family_size = 8;
    std::size_t ppa_steps = 200;
};

struct ExperimentConfig {
    std::size_t dimension;
    ConvexRegion region;
    Bifunction bifunction;
    Task task;
    SolverOptions solver;
    std::string output = "out";
    std::uint64_t seed = 0;
    bool plot = false;
    /// Query point of resolve / grid-oracle; the region witness when absent.
    std::optional<HPoint> x;
    PpaConfig ppa;
    VerifyConfig verify;

    /// The effective config with every default written out.
    json to_json() const;

    /// x, or the region witness.
    HPoint query_point() const;
    HPoint ppa_start() const;
};

/// `fallback_task` is used when the document has no "task" key (the CLI passes
/// its positional task). Errors are ParseErrors naming the offending path.
ExperimentConfig parse_config(const json& doc, std::optional<Task> fallback_task = std::nullopt);
ExperimentConfig parse_config_text(const std::string& text, std::optional<Task> fallback_task = std::nullopt);

ConvexRegion region_from_json(const json& j, std::size_t dimension, const std::string& path);
json region_to_json(const ConvexRegion& region);

}  // namespace hypequil
