#include <fstream>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "mckv/scenario.hpp"

namespace {

struct CommonOpts {
    std::string config;
    std::string out = "out";
    int threads = 0;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "scenario config file (JSON)")->required();
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--threads", o.threads, "worker thread count (0 = default)");
    cmd->add_option("--seed", o.seed, "override the particle RNG seed");
}

void apply_threads(int threads) {
    if (threads <= 0) {
        if (const char* env = std::getenv("MCKV_THREADS")) threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);
}

int run_with(const CommonOpts& o, unsigned components) {
    apply_threads(o.threads);
    try {
        mckv::scenario::Scenario sc = mckv::scenario::load_scenario(o.config);
        if (o.seed >= 0) sc.particle_cfg.seed = static_cast<std::uint64_t>(o.seed);
        const auto outcome = mckv::scenario::run_scenario(sc, o.out, components);
        for (const auto& n : outcome.notes) std::cout << n << '\n';
        return outcome.exit_code;
    } catch (const mckv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

std::vector<double> parse_values(const std::string& csv_list) {
    std::vector<double> vals;
    std::stringstream ss(csv_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        vals.push_back(std::stod(tok));
    }
    return vals;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for hitting-time McKean-Vlasov dynamics"};
    app.require_subcommand(1);

    using mckv::scenario::kCompare;
    using mckv::scenario::kCriteria;
    using mckv::scenario::kParticles;
    using mckv::scenario::kSolver;

    CommonOpts o_criteria, o_lin, o_log, o_part, o_cmp, o_sweep;
    auto* c_criteria = app.add_subcommand("criteria", "evaluate blow-up criteria");
    add_common(c_criteria, o_criteria);
    auto* c_lin = app.add_subcommand("solve-linear", "run the free-boundary solver");
    add_common(c_lin, o_lin);
    auto* c_log = app.add_subcommand("solve-log", "run the non-local solver");
    add_common(c_log, o_log);
    auto* c_part = app.add_subcommand("particles", "run the particle ensemble");
    add_common(c_part, o_part);
    auto* c_cmp = app.add_subcommand("compare", "run solver + particles and compare");
    add_common(c_cmp, o_cmp);
    auto* c_sweep = app.add_subcommand("sweep", "run a scenario across parameter values");
    add_common(c_sweep, o_sweep);
    std::string sweep_param, sweep_values;
    c_sweep->add_option("--param", sweep_param, "dotted config path, e.g. model.alpha")
        ->required();
    c_sweep->add_option("--values", sweep_values, "comma-separated numeric values")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (c_criteria->parsed()) return run_with(o_criteria, kCriteria);
    if (c_lin->parsed()) return run_with(o_lin, kCriteria | kSolver);
    if (c_log->parsed()) return run_with(o_log, kCriteria | kSolver);
    if (c_part->parsed()) return run_with(o_part, kParticles);
    if (c_cmp->parsed()) return run_with(o_cmp, kSolver | kParticles | kCompare);
    if (c_sweep->parsed()) {
        apply_threads(o_sweep.threads);
        try {
            std::ifstream in(o_sweep.config);
            if (!in) {
                std::cerr << "config error: cannot open " << o_sweep.config << '\n';
                return 1;
            }
            nlohmann::json base;
            in >> base;
            const auto vals = parse_values(sweep_values);
            return mckv::scenario::sweep_scenario(base, sweep_param, vals, o_sweep.out,
                                                  kCriteria | kSolver);
        } catch (const mckv::ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 1;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
    }
    return 1;
}
