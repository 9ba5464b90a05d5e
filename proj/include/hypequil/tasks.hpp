#pragma once

// Task runner behind the CLI. Every task writes into cfg.output:
//   effective_config.json        always (the echoed config)
//   resolve      -> resolvent.json
//   ppa          -> trace.csv, ppa_summary.json
//   verify       -> verdicts.jsonl (one verdict per line)
//   grid-oracle  -> oracle.json, merit_table.csv
//   plot.svg when plot is set and dimension is 2
// On failure, partial outputs stay and error.txt carries the message.

#include <ostream>
#include <string>
#include <vector>

#include "hypequil/config.hpp"

namespace hypequil {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitError = 2;

/// Returns kExitOk, kExitCheckFailed (verify found a failing verdict) or
/// kExitError (an inner error; error.txt written). Progress goes to `log`.
int run_task(const ExperimentConfig& cfg, std::ostream& log);

/// Poincare-disk SVG of a 2-d region with an optional path and labelled points.
struct PlotPoint {
    HPoint p;
    std::string label;
    std::string color;
};
std::string poincare_svg(const ConvexRegion& region, const std::vector<HPoint>& path,
                         const std::vector<PlotPoint>& points);

}  // namespace hypequil
