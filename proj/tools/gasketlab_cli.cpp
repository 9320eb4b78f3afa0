#include "gasketlab/harness.hpp"

#include "CLI11.hpp"

#include <iostream>

using gasketlab::harness::ExperimentConfig;

int main(int argc, char** argv) {
    CLI::App app{"finite-stage builder and verifier for the gasket collapse, "
                 "folding, and flap-plane constructions"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string action;

    auto add_common = [&](CLI::App* sub, bool with_action) {
        sub->add_option("--level", cfg.level, "subdivision level");
        sub->add_option("--epsilon", cfg.epsilon, "energy budget");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--resolution", cfg.resolution, "estimator resolution");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--format", cfg.format, "json | csv | svg");
        sub->add_option("--point", cfg.point, "lattice point a,b (rational tokens)");
        if (with_action) sub->add_option("action", action, "subcommand action");
    };

    for (const char* name : {"gasket", "witness", "collapse", "fold", "flap", "phi"}) {
        add_common(app.add_subcommand(name), true);
    }
    add_common(app.add_subcommand("all", "full battery with coverage assertion"), false);

    CLI11_PARSE(app, argc, argv);

    std::string command = app.get_subcommands().front()->get_name();
    try {
        return gasketlab::harness::run(command, action, cfg);
    } catch (const gasketlab::harness::AssertionFailure& e) {
        std::cerr << "assertion failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
