// Command-line front end: generate snapshot sets, run latent-dimension
// sweeps, reproduce the summary error table, and run the built-in checks.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "romlab/errors.hpp"
#include "romlab/gradcheck.hpp"
#include "romlab/selftest.hpp"
#include "romlab/study.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int jobs = 1;
    std::string out_dir;
};

romlab::StudyConfig resolve_config(const CommonFlags& flags) {
    if (flags.config_path.empty()) throw romlab::config_error("--config PATH is required");
    romlab::StudyConfig cfg = romlab::load_config(flags.config_path);
    if (flags.seed_given) {
        cfg.seed = flags.seed;
        cfg.seed_set = true;
    }
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    cfg.jobs = flags.jobs;
    return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "study configuration file");
    cmd->add_option("--seed", flags.seed, "override the config seed")
        ->each([&flags](const std::string&) { flags.seed_given = true; });
    cmd->add_option("--jobs", flags.jobs, "worker count (default 1, reproducibility baseline)");
    cmd->add_option("--out", flags.out_dir, "override the output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"romlab: full-order solvers, spectral reduction, and autoencoder studies"};
    app.require_subcommand(1);

    CommonFlags flags;
    CLI::App* generate = app.add_subcommand("generate", "run the solver and write snapshot files");
    CLI::App* sweep = app.add_subcommand("sweep", "train autoencoders over the latent dimensions");
    CLI::App* table1 = app.add_subcommand("table1", "full three-network training at one latent dimension");
    CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suite");
    CLI::App* selftest = app.add_subcommand("selftest", "fast oracle battery");
    add_common(generate, flags);
    add_common(sweep, flags);
    add_common(table1, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            romlab::run_generate(resolve_config(flags), std::cout);
        } else if (sweep->parsed()) {
            romlab::run_sweep(resolve_config(flags), std::cout);
        } else if (table1->parsed()) {
            romlab::run_table1(resolve_config(flags), std::cout);
        } else if (gradcheck->parsed()) {
            bool all_pass = true;
            for (const auto& r : romlab::gradcheck_suite()) {
                std::printf("%-24s max rel err %.3e  %s\n", r.name.c_str(), r.max_rel_error,
                            r.pass ? "pass" : "FAIL");
                all_pass = all_pass && r.pass;
            }
            if (!all_pass) return 3;
        } else if (selftest->parsed()) {
            if (!romlab::run_selftest(std::cout)) return 3;
        }
    } catch (const romlab::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const romlab::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
