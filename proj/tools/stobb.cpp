#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stobb/cli.hpp"

namespace {

void add_common(CLI::App* cmd, stobb::cli::RunConfig& cfg, bool needs_oracle) {
    cmd->add_option("--state", cfg.state_path, "state file path")->required();
    if (needs_oracle) {
        cmd->add_option("--weights", cfg.weights_path, "network weights file");
        cmd->add_option("--lookup", cfg.lookup_path, "lookup oracle CSV");
    }
}

void add_explainer(CLI::App* cmd, stobb::cli::RunConfig& cfg) {
    cmd->add_option("--seed", cfg.seed, "explainer seed");
    cmd->add_option("--bandwidth", cfg.bandwidth, "kernel bandwidth (0: 0.75*sqrt(d))");
    cmd->add_option("--perturbations", cfg.n_perturbations, "perturbations per attribution");
    cmd->add_option("--ridge", cfg.ridge, "ridge strength");
    cmd->add_option("--attributions", cfg.attributions_path,
                    "fixed attribution CSV, row-aligned with --data");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stobb: rule-based surrogate engine for a fixed classifier"};
    app.require_subcommand(1);
    stobb::cli::RunConfig cfg;

    CLI::App* build = app.add_subcommand("build", "construct a state from a data file");
    add_common(build, cfg, true);
    add_explainer(build, cfg);
    build->add_option("--data", cfg.data_path, "headerless CSV of feature rows")->required();
    build->add_option("--k", cfg.initial_k, "initial max subspace size");
    build->add_option("--out", cfg.out_prefix, "output prefix for artifacts");
    build->add_flag("--dedup", cfg.dedup, "skip exact duplicate observations");
    build->add_flag("--full-snapshots", cfg.full_snapshots,
                    "snapshot every boxsystem on each update");

    CLI::App* update = app.add_subcommand("update", "process new rows into an existing state");
    add_common(update, cfg, true);
    add_explainer(update, cfg);
    update->add_option("--data", cfg.data_path, "headerless CSV of new feature rows")->required();
    update->add_option("--out", cfg.out_prefix, "output prefix for artifacts");

    CLI::App* qlocal = app.add_subcommand("query-local", "local rule explanation for one input");
    add_common(qlocal, cfg, true);
    add_explainer(qlocal, cfg);
    qlocal->add_option("--x", cfg.query_x, "comma-separated feature values")->required();
    qlocal->add_option("--data", cfg.data_path, "data rows backing --attributions");

    CLI::App* qcontrast =
        app.add_subcommand("query-contrastive", "rule plus nearest other-label rule");
    add_common(qcontrast, cfg, true);
    add_explainer(qcontrast, cfg);
    qcontrast->add_option("--x", cfg.query_x, "comma-separated feature values")->required();
    qcontrast->add_option("--data", cfg.data_path, "data rows backing --attributions");
    qcontrast->add_option("--target-class", cfg.target_class, "restrict contrast to this class");

    CLI::App* global = app.add_subcommand("global", "2-D projection of the observation base");
    add_common(global, cfg, false);
    global->add_option("--out", cfg.out_prefix, "output prefix for artifacts");

    CLI::App* diag = app.add_subcommand("diag", "export the diagnostics series");
    add_common(diag, cfg, false);
    diag->add_option("--out", cfg.out_prefix, "output prefix for artifacts");

    CLI::App* doc = app.add_subcommand("doc", "generate the documentation sheet");
    add_common(doc, cfg, false);
    doc->add_option("--out", cfg.out_prefix, "output prefix for artifacts");

    CLI::App* check = app.add_subcommand("check", "verify empirical adequacy of a state file");
    add_common(check, cfg, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return stobb::cli::cmd_build(cfg);
        if (update->parsed()) return stobb::cli::cmd_update(cfg);
        if (qlocal->parsed()) return stobb::cli::cmd_query(cfg, false);
        if (qcontrast->parsed()) return stobb::cli::cmd_query(cfg, true);
        if (global->parsed()) return stobb::cli::cmd_global(cfg);
        if (diag->parsed()) return stobb::cli::cmd_diag(cfg);
        if (doc->parsed()) return stobb::cli::cmd_doc(cfg);
        if (check->parsed()) return stobb::cli::cmd_check(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
