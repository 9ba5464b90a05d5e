#include "hypequil/tasks.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hypequil {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + p.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write to " + p.string() + " failed");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// Disk coordinates to SVG pixels: 420x420 canvas, unit disk of radius 200.
std::pair<double, double> px(const std::vector<double>& d) { return {210.0 + 200.0 * d[0], 210.0 - 200.0 * d[1]}; }

// Boundary of a 2-d convex region seen from its witness, by bisection on rays.
std::vector<HPoint> region_outline(const ConvexRegion& region, std::size_t rays) {
    const HPoint& w = region.witness();
    const std::vector<Vec> basis = tangent_basis(w);
    const double rmax = std::min(region.extent(), 12.0);
    std::vector<HPoint> out;
    out.reserve(rays);
    for (std::size_t k = 0; k < rays; ++k) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(rays);
        const Vec u = std::cos(th) * basis[0] + std::sin(th) * basis[1];
        double lo = 0.0, hi = rmax;
        if (!contains(region, exp_map_trusted(w, hi * u), 0.0)) {
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (contains(region, exp_map_trusted(w, mid * u), 0.0) ? lo : hi) = mid;
            }
        } else {
            lo = hi;
        }
        out.push_back(exp_map_trusted(w, lo * u));
    }
    return out;
}

void maybe_plot(const ExperimentConfig& cfg, const fs::path& dir, const std::vector<HPoint>& path,
                const std::vector<PlotPoint>& points, std::ostream& log) {
    if (!cfg.plot) return;
    if (cfg.dimension != 2) {
        log << "plot skipped: only dimension 2 is drawn\n";
        return;
    }
    write_file(dir / "plot.svg", poincare_svg(cfg.region, path, points));
}

int task_resolve(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
    const HPoint x = cfg.query_point();
    const ResolventOutcome out = resolve(cfg.bifunction, cfg.region, x, cfg.solver);
    json j = out.to_json();
    j["x"] = point_to_json(x);
    write_file(dir / "resolvent.json", dump_json(j) + "\n");
    log << "resolve: solver " << to_string(out.solver) << ", " << out.iterations << " iterations, merit "
        << format_double(out.merit) << "\n";
    maybe_plot(cfg, dir, {}, {{x, "x", "#1f77b4"}, {out.z, "z", "#d62728"}}, log);
    return kExitOk;
}

int task_ppa(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
    const HPoint x0 = cfg.ppa_start();
    const IterTrace trace =
        run_ppa(cfg.bifunction, cfg.region, x0, cfg.ppa.lambdas, cfg.ppa.stop_tol, cfg.ppa.max_steps, cfg.solver);
    write_file(dir / "trace.csv", trace.to_csv(cfg.ppa.timing));
    json summary{{"status", to_string(trace.status)},
                 {"steps", trace.size()},
                 {"start", point_to_json(trace.start)}};
    if (!trace.iterates.empty()) {
        summary["final"] = point_to_json(trace.iterates.back());
        summary["final_residual"] = trace.residuals.back();
    }
    if (!trace.error.empty()) summary["error"] = trace.error;
    write_file(dir / "ppa_summary.json", dump_json(summary) + "\n");
    log << "ppa: " << to_string(trace.status) << " after " << trace.size() << " steps\n";

    std::vector<HPoint> path{trace.start};
    path.insert(path.end(), trace.iterates.begin(), trace.iterates.end());
    std::vector<PlotPoint> pts{{trace.start, "x0", "#1f77b4"}};
    if (!trace.iterates.empty()) pts.push_back({trace.iterates.back(), "x_k", "#d62728"});
    maybe_plot(cfg, dir, path, pts, log);

    if (trace.status == TraceStatus::solver_error) throw Error("ppa: " + trace.error);
    return kExitOk;
}

int task_grid_oracle(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
    const HPoint x = cfg.query_point();
    const PointGrid grid = build_grid(cfg.region, cfg.solver.grid_spacing, effective_radius(cfg.region, cfg.solver));
    const OracleResult best = oracle_search(cfg.bifunction, x, grid);
    const std::vector<double> table = merit_table(cfg.bifunction, x, grid);

    json j{{"x", point_to_json(x)},
           {"index", best.index},
           {"z", point_to_json(grid[best.index])},
           {"value", best.value},
           {"grid_size", grid.size()},
           {"grid_spacing", grid.spacing()}};
    write_file(dir / "oracle.json", dump_json(j) + "\n");

    std::string csv = "index";
    for (std::size_t c = 0; c < x.ambient_dim(); ++c) csv += ",coord_" + std::to_string(c);
    csv += ",merit\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv += std::to_string(i);
        for (std::size_t c = 0; c < x.ambient_dim(); ++c) csv += "," + format_double(grid[i].coords()[c]);
        csv += "," + format_double(table[i]) + "\n";
    }
    write_file(dir / "merit_table.csv", csv);
    log << "grid-oracle: " << grid.size() << " grid points, oracle index " << best.index << "\n";
    maybe_plot(cfg, dir, {}, {{x, "x", "#1f77b4"}, {grid[best.index], "oracle", "#d62728"}}, log);
    return kExitOk;
}

int task_verify(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
    std::vector<CatalogEntry> entries;
    if (cfg.verify.suite == "catalog") {
        entries = default_catalog();
    } else {
        entries.push_back(CatalogEntry{"config", cfg.bifunction, cfg.region, std::nullopt, false});
    }
    SuiteOptions so;
    so.seed = cfg.seed;
    so.geometry_trials = cfg.verify.geometry_trials;
    so.condition_samples = cfg.verify.condition_samples;
    so.instances = cfg.verify.instances;
    so.firm_pairs = cfg.verify.firm_pairs;
    so.kkm_families = cfg.verify.kkm_families;
    so.kkm_family_size = cfg.verify.kkm_family_size;
    so.ppa_steps = cfg.verify.ppa_steps;
    so.solver = cfg.solver;

    const std::vector<PropertyVerdict> verdicts = run_suite(entries, so);
    std::string lines;
    bool all_pass = true;
    for (const PropertyVerdict& v : verdicts) {
        lines += dump_json(v.to_json()) + "\n";
        all_pass = all_pass && v.pass;
        log << (v.pass ? "PASS " : "FAIL ") << v.name << "  trials=" << v.trials
            << " inconclusive=" << v.inconclusive << " worst_slack=" << format_double(v.worst_slack) << "\n";
    }
    write_file(dir / "verdicts.jsonl", lines);
    if (cfg.plot && cfg.dimension == 2 && cfg.verify.suite == "config") maybe_plot(cfg, dir, {}, {}, log);
    return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

std::string poincare_svg(const ConvexRegion& region, const std::vector<HPoint>& path,
                         const std::vector<PlotPoint>& points) {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"420\" height=\"420\" viewBox=\"0 0 420 420\">\n";
    s << "<rect width=\"420\" height=\"420\" fill=\"white\"/>\n";
    s << "<circle cx=\"210\" cy=\"210\" r=\"200\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

    s << "<polygon fill=\"#cfe3f5\" fill-opacity=\"0.6\" stroke=\"#3b6ea5\" stroke-width=\"1\" points=\"";
    bool first = true;
    for (const HPoint& p : region_outline(region, 360)) {
        const auto [x, y] = px(to_poincare(p));
        s << (first ? "" : " ") << fmt(x) << "," << fmt(y);
        first = false;
    }
    s << "\"/>\n";

    if (path.size() > 1) {
        // Each leg drawn as a sampled geodesic (circular arcs in the disk).
        s << "<polyline fill=\"none\" stroke=\"#555555\" stroke-width=\"1\" points=\"";
        first = true;
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            for (int i = 0; i <= 16; ++i) {
                if (k > 0 && i == 0) continue;
                const HPoint q = geodesic_point(path[k], path[k + 1], 1.0 - i / 16.0);
                const auto [x, y] = px(to_poincare(q));
                s << (first ? "" : " ") << fmt(x) << "," << fmt(y);
                first = false;
            }
        }
        s << "\"/>\n";
        for (const HPoint& p : path) {
            const auto [x, y] = px(to_poincare(p));
            s << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"1.5\" fill=\"#555555\"/>\n";
        }
    }
    for (const PlotPoint& pt : points) {
        const auto [x, y] = px(to_poincare(pt.p));
        s << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"3.5\" fill=\"" << pt.color << "\"/>\n";
        s << "<text x=\"" << fmt(x + 5) << "\" y=\"" << fmt(y - 5) << "\" font-family=\"sans-serif\" font-size=\"12\">"
          << pt.label << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

int run_task(const ExperimentConfig& cfg, std::ostream& log) {
    const fs::path dir(cfg.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        log << "error: cannot create output directory " << dir.string() << ": " << ec.message() << "\n";
        return kExitError;
    }
    fs::remove(dir / "error.txt", ec);

    try {
        write_file(dir / "effective_config.json", dump_json(cfg.to_json()) + "\n");
        switch (cfg.task) {
            case Task::resolve: return task_resolve(cfg, dir, log);
            case Task::ppa: return task_ppa(cfg, dir, log);
            case Task::verify: return task_verify(cfg, dir, log);
            case Task::grid_oracle: return task_grid_oracle(cfg, dir, log);
        }
        throw Error("unknown task");
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        std::ofstream marker(dir / "error.txt", std::ios::trunc);
        marker << "task " << to_string(cfg.task) << " failed: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace hypequil
