// Acceptance run: one PASS/FAIL line per criterion, with timings.
//
//   acceptance --cli <hypequil binary> --work <dir> [--known-failing 3,...] [--only N]
//
// Exit status is 0 when every criterion passes or every failing one is listed
// in --known-failing. Listed criteria still print FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hypequil/harness.hpp"
#include "hypequil/random.hpp"

using namespace hypequil;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string sci(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3e", v);
    return b;
}

// Folds a list of verdicts into one outcome; the detail names the worst one.
Outcome fold(const std::vector<PropertyVerdict>& vs) {
    Outcome o;
    const PropertyVerdict* worst = nullptr;
    std::size_t failing = 0;
    for (const PropertyVerdict& v : vs) {
        if (!v.pass) ++failing;
        if (!worst || (v.worst_slack + v.tolerance) < (worst->worst_slack + worst->tolerance)) worst = &v;
    }
    o.pass = failing == 0;
    if (worst) {
        o.detail = std::to_string(vs.size() - failing) + "/" + std::to_string(vs.size()) + " verdicts pass; tightest " +
                   worst->name + " worst_slack " + sci(worst->worst_slack) + " (tol " + sci(worst->tolerance) + ")";
    }
    for (const PropertyVerdict& v : vs) {
        if (!v.pass) o.detail += "\n      failing: " + v.name + " worst_slack " + sci(v.worst_slack);
        if (v.inconclusive > 0) o.detail += "\n      " + v.name + ": " + std::to_string(v.inconclusive) + " inconclusive";
    }
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::uint64_t entry_seed(std::size_t k) { return 101 * (k + 1); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string cli_path;
    std::string work = (fs::temp_directory_path() / "hypequil_acceptance").string();
    std::vector<int> known_failing;
    std::vector<int> only;
    app.add_option("--cli", cli_path, "hypequil binary (criterion 10)");
    app.add_option("--work", work, "scratch directory");
    app.add_option("--known-failing", known_failing, "criteria allowed to fail without failing the run")->delimiter(',');
    app.add_option("--only", only, "run just these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::set<int> known(known_failing.begin(), known_failing.end());
    const std::set<int> selected(only.begin(), only.end());
    const std::vector<CatalogEntry> catalog = default_catalog();
    const SolverOptions solver;  // tol 1e-8, spacing 0.05, radius 6

    // Criteria 3, 5 and 6 share the same solves.
    std::vector<InstanceVerdicts> instances;
    double instances_seconds = 0.0;
    auto ensure_instances = [&] {
        if (!instances.empty()) return;
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t k = 0; k < catalog.size(); ++k) {
            instances.push_back(check_resolvent_instances(catalog[k], entry_seed(k) + 1, 20, solver));
        }
        instances_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    struct Criterion {
        int id;
        std::string what;
        double budget_seconds;  // 0: none
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria;

    criteria.push_back({1, "Stewart identity, 1e4 triples, relative error <= 1e-9", 1.0, [] {
                            return fold({check_stewart(0, 10000)});
                        }});
    criteria.push_back({2, "cosh convexity, 1e4 triples, slack >= -1e-10", 1.0, [] {
                            return fold({check_cosh_convexity(1, 10000)});
                        }});
    criteria.push_back({3, "solver-oracle agreement, 20 instances per catalog entry", 120.0, [&] {
                            ensure_instances();
                            std::vector<PropertyVerdict> vs;
                            for (const InstanceVerdicts& iv : instances) vs.push_back(iv.agreement);
                            return fold(vs);
                        }});
    criteria.push_back({4, "firmly nonspreading, 200 solver pairs per entry, slack >= -1e-6", 0.0, [&] {
                            std::vector<PropertyVerdict> vs;
                            for (std::size_t k = 0; k < catalog.size(); ++k) {
                                PropertyVerdict v = check_firmly_nonspreading(catalog[k].f, catalog[k].K,
                                                                              entry_seed(k) + 2, 200, solver);
                                v.name = catalog[k].name + "/" + v.name;
                                vs.push_back(std::move(v));
                            }
                            return fold(vs);
                        }});
    criteria.push_back({5, "single-valuedness under reseeded, rephased re-solves", 0.0, [&] {
                            ensure_instances();
                            std::vector<PropertyVerdict> vs;
                            for (const InstanceVerdicts& iv : instances) vs.push_back(iv.single_valued);
                            return fold(vs);
                        }});
    criteria.push_back({6, "both resolvent inequality families >= -1e-5 at every solver output", 0.0, [&] {
                            ensure_instances();
                            std::vector<PropertyVerdict> vs;
                            for (const InstanceVerdicts& iv : instances) vs.push_back(iv.resolvent_forms);
                            return fold(vs);
                        }});
    criteria.push_back({7, "fixed points: d(L p*, p*) <= 1e-6, residual >= -1e-5", 0.0, [&] {
                            std::vector<PropertyVerdict> vs;
                            for (const CatalogEntry& e : catalog) {
                                if (e.equilibrium) vs.push_back(check_fixed_point(e, solver));
                            }
                            return fold(vs);
                        }});
    criteria.push_back({8, "KKM: 50 families of size <= 8 per entry, hull coverage and common point", 60.0, [&] {
                            std::vector<PropertyVerdict> vs;
                            for (std::size_t k = 0; k < catalog.size(); ++k) {
                                const CatalogEntry& e = catalog[k];
                                Rng rng = Rng::stream(entry_seed(k) + 3, 0);
                                const HPoint x = random_point_in_ball(rng, e.K.witness(), 2.5);
                                PropertyVerdict v = check_kkm(e.f, x, e.K, 8, entry_seed(k) + 4, 50);
                                v.name = e.name + "/" + v.name;
                                vs.push_back(std::move(v));
                            }
                            return fold(vs);
                        }});
    criteria.push_back({9, "PPA with lambda = 1: Fejer (1e-6) and d(x_k, p*) < 1e-4 within 200 steps", 0.0, [&] {
                            std::vector<PropertyVerdict> vs;
                            for (std::size_t k = 0; k < catalog.size(); ++k) {
                                const CatalogEntry& e = catalog[k];
                                if (e.equilibrium && e.unique_equilibrium) {
                                    vs.push_back(check_ppa(e, entry_seed(k) + 5, 200, solver));
                                }
                            }
                            return fold(vs);
                        }});
    criteria.push_back({10, "repeated CLI verify runs give byte-identical verdict files", 0.0, [&] {
                            Outcome o;
                            if (cli_path.empty()) return Outcome{false, "no --cli given"};
                            const fs::path dir(work);
                            fs::create_directories(dir);
                            const fs::path cfg = dir / "verify_catalog.json";
                            std::ofstream(cfg) << R"({"dimension": 2, "region": {"type": "ball", "radius": 2},)"
                                               << R"( "task": "verify", "seed": 3, "verify": {"suite": "catalog"}})";
                            std::vector<std::string> files;
                            for (const char* threads : {"1", "3"}) {
                                const fs::path out = dir / (std::string("run_threads") + threads);
                                fs::remove_all(out);
                                const std::string cmd = std::string("HYPEQUIL_THREADS=") + threads + " \"" + cli_path +
                                                        "\" verify --config \"" + cfg.string() + "\" --out \"" +
                                                        out.string() + "\" 2>/dev/null";
                                const int rc = std::system(cmd.c_str());
                                if (!fs::exists(out / "verdicts.jsonl")) {
                                    return Outcome{false, "verify wrote no verdicts (status " + std::to_string(rc) + ")"};
                                }
                                files.push_back(slurp(out / "verdicts.jsonl"));
                            }
                            o.pass = files[0] == files[1] && !files[0].empty();
                            o.detail = std::to_string(files[0].size()) + " bytes, runs with 1 and 3 threads " +
                                       (o.pass ? "identical" : "differ");
                            return o;
                        }});

    int unexpected = 0;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o = c.run();
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.id == 3 || c.id == 5 || c.id == 6) seconds = instances_seconds;  // shared solves
        if (c.budget_seconds > 0.0 && seconds >= c.budget_seconds) {
            o.pass = false;
            o.detail += "; over the " + sci(c.budget_seconds) + " s budget";
        }
        const bool excused = !o.pass && known.count(c.id);
        if (!o.pass && !excused) ++unexpected;
        std::printf("criterion %2d %s  %s  [%.2f s]%s\n      %s\n", c.id, o.pass ? "PASS" : "FAIL", c.what.c_str(),
                    seconds, excused ? "  (known failure)" : "", o.detail.c_str());
        std::fflush(stdout);
    }
    return unexpected == 0 ? 0 : 1;
}
