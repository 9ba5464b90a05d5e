// hypequil <task> --config <path> [--seed N] [--out DIR] [--plot]

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hypequil/tasks.hpp"

int main(int argc, char** argv) {
    using namespace hypequil;
    CLI::App app{"Resolvents and proximal point iterations for equilibrium problems on hyperbolic space"};
    std::string task_name;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool plot = false;
    app.add_option("task", task_name, "resolve | ppa | verify | grid-oracle")
        ->required()
        ->check(CLI::IsMember({"resolve", "ppa", "verify", "grid-oracle"}));
    app.add_option("--config", config_path, "JSON experiment config")->required();
    app.add_option("--seed", seed, "overrides the config seed");
    app.add_option("--out", out_dir, "overrides the config output directory");
    app.add_flag("--plot", plot, "write plot.svg (dimension 2 only)");
    CLI11_PARSE(app, argc, argv);

    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read config " << config_path << "\n";
        return kExitError;
    }
    std::stringstream text;
    text << in.rdbuf();

    try {
        json doc;
        try {
            doc = json::parse(text.str());
        } catch (const json::parse_error& e) {
            throw ParseError("(document)", std::string("invalid JSON: ") + e.what());
        }
        // Command-line values win over the document.
        if (doc.is_object()) {
            doc["task"] = task_name;
            if (seed) doc["seed"] = *seed;
            if (out_dir) doc["output"] = *out_dir;
            if (plot) doc["plot"] = true;
        }
        const ExperimentConfig cfg = parse_config(doc);
        return run_task(cfg, std::cerr);
    } catch (const ParseError& e) {
        std::cerr << "config error at " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
