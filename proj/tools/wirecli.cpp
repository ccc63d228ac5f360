// Batch front end: parse a run configuration, execute the selected
// pipelines, and emit CSV/JSON artifacts plus a manifest.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lqw/config.hpp"
#include "lqw/report.hpp"

namespace {

int run_with(lqw::config::RunConfig cfg,
             const std::vector<std::string>& selection) {
    if (!selection.empty()) cfg.pipelines = selection;
    if (cfg.pipelines.empty()) cfg.pipelines = lqw::config::pipeline_order();
    cfg.validate();
    auto result = lqw::report::run_pipelines(cfg);
    for (const auto& p : result.pipelines)
        std::printf("%-14s %s  %s\n", p.name.c_str(),
                    p.ok ? "ok  " : "FAIL", p.detail.c_str());
    std::printf("artifacts: %zu file(s) in %s (see manifest.json)\n",
                result.artifacts.size() + 1, cfg.out_dir.c_str());
    return result.all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"leaky-wire spectral toolkit"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir;
    double alpha = -1.0, truncation = -1.0;
    int grid_n = -1;
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--alpha", alpha, "coupling override, > 0");
    app.add_option("--grid-n", grid_n, "Nystrom node count override");
    app.add_option("--truncation", truncation, "grid half-window override");

    const std::vector<std::string> names = {
        "curve-check",  "spectrum",  "asymptotics", "lap-scan",
        "quasimode",    "scatter-checks"};
    std::vector<CLI::App*> subs;
    for (const auto& n : names)
        subs.push_back(app.add_subcommand(n, "run the " + n + " pipeline"));
    CLI::App* all = app.add_subcommand("all", "run every pipeline");

    CLI11_PARSE(app, argc, argv);

    try {
        lqw::config::RunConfig cfg;
        if (!config_path.empty())
            cfg = lqw::config::parse_config_file(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (alpha > 0.0) cfg.alpha = alpha;
        if (grid_n > 0) cfg.grid_n = grid_n;
        if (truncation > 0.0) cfg.truncation = truncation;

        std::vector<std::string> selection;
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) selection.push_back(names[i]);
        if (all->parsed()) selection = lqw::config::pipeline_order();
        return run_with(cfg, selection);
    } catch (const std::exception& e) {
        nlohmann::json diag = {{"error", e.what()}};
        std::fprintf(stderr, "%s\n", diag.dump().c_str());
        return 2;
    }
}
