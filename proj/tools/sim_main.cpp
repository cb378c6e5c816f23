// sim - command-line front end for the ion-mirror toolkit.
//
//   sim spectrum    --config cfg.json --out dir   probe-detuning sweep
//   sim scan        --config cfg.json --out dir   mirror-position sweep
//   sim equivalence --config cfg.json --out dir   cross-check transmission routes
//   sim aberration  --config cfg.json --out dir   wavefront-error ensembles
//
// Exit codes: 0 success, 1 runtime failure, 2 bad usage.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ionmirror/commands.hpp"

namespace {

struct Sub {
    CLI::App* cmd = nullptr;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int points = 0;
    bool svg = false;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* points_opt = nullptr;
    int (*run)(const ionmirror::cli::CommandOptions&) = nullptr;
};

void attach(CLI::App& app, Sub& sub, const char* name, const char* help,
            int (*run)(const ionmirror::cli::CommandOptions&)) {
    sub.cmd = app.add_subcommand(name, help);
    sub.run = run;
    sub.cmd->add_option("--config", sub.config, "run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub.cmd->add_option("--out", sub.out, "output directory (created if missing)")->required();
    sub.seed_opt = sub.cmd->add_option("--seed", sub.seed, "override the config seed");
    sub.points_opt =
        sub.cmd->add_option("--points", sub.points, "override the command's main grid size")
            ->check(CLI::PositiveNumber);
    sub.cmd->add_flag("--svg", sub.svg, "also write an SVG plot");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-atom cavity-mirror simulator"};
    app.require_subcommand(1);

    Sub subs[4];
    attach(app, subs[0], "spectrum", "probe-detuning sweep at fixed mirror position",
           &ionmirror::cli::run_spectrum);
    attach(app, subs[1], "scan", "mirror-position sweep at fixed probe detuning",
           &ionmirror::cli::run_scan);
    attach(app, subs[2], "equivalence", "cross-check the transmission formulations on a grid",
           &ionmirror::cli::run_equivalence);
    attach(app, subs[3], "aberration", "wavefront-error ensemble averages and Monte Carlo",
           &ionmirror::cli::run_aberration);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // help/version exit clean, usage errors exit 2
    }

    for (const Sub& sub : subs) {
        if (!sub.cmd->parsed()) continue;
        ionmirror::cli::CommandOptions opt;
        opt.config_path = sub.config;
        opt.out_dir = sub.out;
        if (sub.seed_opt->count() > 0) opt.seed = sub.seed;
        if (sub.points_opt->count() > 0) opt.points = sub.points;
        opt.svg = sub.svg;
        try {
            return sub.run(opt);
        } catch (const std::exception& e) {
            std::cerr << "sim: " << e.what() << '\n';
            return 1;
        }
    }
    std::cerr << "sim: no subcommand selected\n";
    return 2;
}
