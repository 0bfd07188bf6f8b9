#include "gibbslab/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace gibbslab;

int main(int argc, char** argv)
{
    CLI::App app{"gibbslab: spectral and sampling experiments for Gibbs measures whose minima "
                 "form a manifold"};
    app.set_help_flag("--help", "print usage");  // frees -h/--h for the spacing flag
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string config_file;
    std::string eps_csv, radii_csv;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--potential", cfg.potential,
                        "catalog potential (circle2d|quadratic|doublewell1d|torus3d|...)");
        sub->add_option("--manifold", cfg.manifold, "catalog manifold (circle|circleR|sphere|torus)");
        sub->add_option("--eps", eps_csv, "comma-separated temperature list");
        sub->add_option("--radii", radii_csv, "comma-separated tube radii");
        sub->add_option("--h", cfg.h, "grid spacing override");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--config", config_file, "key = value config file (flags win)");
    };

    const std::vector<std::string> experiments = {"certify", "ledger", "lyapunov", "spectrum",
                                                  "tube",    "lb-gap", "sweep",    "weyl",
                                                  "report"};
    for (const auto& name : experiments) add_common(app.add_subcommand(name));

    CLI11_PARSE(app, argc, argv);
    cfg.experiment = app.get_subcommands().at(0)->get_name();

    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) {
            std::cerr << "cannot open config file " << config_file << "\n";
            return 2;
        }
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        ConfigParse cp = validate_config(text);
        if (!cp.ok()) {
            for (const auto& e : cp.errors) std::cerr << "config error: " << e << "\n";
            return 2;
        }
        // file provides defaults; explicit flags below override
        std::string exp = cfg.experiment;
        ExperimentConfig merged = cp.config;
        merged.experiment = exp;
        if (cfg.h > 0) merged.h = cfg.h;
        if (cfg.seed != 1) merged.seed = cfg.seed;
        if (cfg.out_dir != "out") merged.out_dir = cfg.out_dir;
        if (cfg.potential != "circle2d") merged.potential = cfg.potential;
        if (cfg.manifold != "circle") merged.manifold = cfg.manifold;
        cfg = merged;
    }
    try {
        if (!eps_csv.empty()) {
            ConfigParse cp = validate_config("eps = " + eps_csv);
            if (!cp.ok()) {
                for (const auto& e : cp.errors) std::cerr << "config error: " << e << "\n";
                return 2;
            }
            cfg.eps_list = cp.config.eps_list;
        }
        if (!radii_csv.empty()) {
            ConfigParse cp = validate_config("radii = " + radii_csv);
            if (!cp.ok()) {
                for (const auto& e : cp.errors) std::cerr << "config error: " << e << "\n";
                return 2;
            }
            cfg.radii = cp.config.radii;
        }

        RunReport rep = run(cfg);
        write_report(rep, cfg);

        std::cout << "experiment " << rep.experiment_id << " (" << rep.wall_seconds << " s)\n";
        for (const auto& a : rep.assertions)
            std::cout << "  [" << (a.pass ? "PASS" : "FAIL") << "] " << a.name << ": " << a.detail
                      << "\n";
        std::cout << "artifacts in " << cfg.out_dir << "/\n";
        return rep.all_pass() ? 0 : 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
