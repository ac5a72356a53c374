#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mckv/criteria.hpp"
#include "mckv/density.hpp"
#include "mckv/fp_linear.hpp"
#include "mckv/fp_log.hpp"
#include "mckv/particles.hpp"

namespace mckv::scenario {

enum class InitialKind { Exponential, Gamma2, NarrowGaussian, Tabulated, Delta, Selfsim };

struct InitialSpec {
    InitialKind kind = InitialKind::Gamma2;
    double rate = 1.0;
    double center = 1.0;
    double sigma = -1.0;
    double x0 = 1.0;
    double t0 = 0.5;
    double ss_beta = 1.0;
    std::filesystem::path table_path;

    bool is_density() const {
        return kind != InitialKind::Delta && kind != InitialKind::Selfsim;
    }
    Density make_density() const;
};

struct ExpectSpec {
    std::optional<bool> blowup;
    std::optional<double> blowup_before;
    std::optional<double> selfsim_boundary_sup_tol;
};

/// One scenario: model parameters, initial condition, solver grid, optional
/// particle ensemble, optional criteria request, expectations.
struct Scenario {
    std::string name = "scenario";
    ModelParams params;
    InitialSpec initial;
    LogGridConfig grid; // superset of GridConfig; lambda cap used by fp_log
    double t_end = 1.0;
    bool has_grid = false;

    bool criteria_enabled = false;
    std::vector<double> mu_grid = default_mu_grid();

    bool particles_enabled = false;
    SimulateConfig particle_cfg;

    bool compare_enabled = false;
    double compare_calibration = 1.0;

    ExpectSpec expect;

    nlohmann::json raw;
};

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& config_path);

enum Component : unsigned {
    kCriteria = 1u,
    kSolver = 2u,
    kParticles = 4u,
    kCompare = 8u,
};

struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> notes;
    std::optional<BlowupEvent> event;
    double sup_error = std::numeric_limits<double>::quiet_NaN();
    std::optional<Verdict> verdict;
};

/// Executes the selected components (criteria -> solver -> particles ->
/// comparison), writes artifacts under out_dir, evaluates expectations.
/// Exit codes: 0 ok, 2 blow-up detected as expected, 3 tolerance failure.
/// Configuration problems throw ConfigError (callers map them to exit 1).
RunOutcome run_scenario(const Scenario& sc, const std::filesystem::path& out_dir,
                        unsigned components);

/// Runs the scenario once per value of the dotted numeric field param_path
/// (e.g. "model.alpha"), in parallel across values, and writes
/// sweep.csv (value, verdict, event_time, sup_error) under out_dir.
int sweep_scenario(const nlohmann::json& base, const std::string& param_path,
                   const std::vector<double>& values,
                   const std::filesystem::path& out_dir, unsigned components);

} // namespace mckv::scenario
