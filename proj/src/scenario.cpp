#include "mckv/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mckv/csv.hpp"

namespace mckv::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& require(const json& j, const std::string& parent, const std::string& key) {
    if (!j.contains(key)) fail(parent.empty() ? key : parent + "." + key, "missing required field");
    return j.at(key);
}

double get_num(const json& j, const std::string& parent, const std::string& key) {
    const json& v = require(j, parent, key);
    if (!v.is_number()) fail(parent + "." + key, "must be a number");
    return v.get<double>();
}

double opt_num(const json& j, const std::string& parent, const std::string& key,
               double def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number()) fail(parent + "." + key, "must be a number");
    return v.get<double>();
}

bool opt_bool(const json& j, const std::string& parent, const std::string& key, bool def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_boolean()) fail(parent + "." + key, "must be a boolean");
    return v.get<bool>();
}

std::string get_str(const json& j, const std::string& parent, const std::string& key) {
    const json& v = require(j, parent, key);
    if (!v.is_string()) fail(parent + "." + key, "must be a string");
    return v.get<std::string>();
}

std::string fmt_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", t);
    return buf;
}

double exact_selfsim_loss(const InitialSpec& init, double alpha, double t) {
    return init.ss_beta * (std::sqrt(2.0 * (init.t0 + t)) - std::sqrt(2.0 * init.t0)) /
           alpha;
}

void write_linear_artifacts(const LinearSolution& sol, const Scenario& sc,
                            const std::filesystem::path& dir) {
    csv::Writer w(dir / "series.csv", "t,N,s,mass,jump_indicator");
    for (std::size_t i = 0; i < sol.flux.size(); ++i)
        w.row(sol.flux.times[i], sol.flux.values[i], sol.loss.values[i],
              sol.mass_ts.values[i], sol.jump.values[i]);
    for (const auto& sn : sol.snapshots) {
        csv::Writer s(dir / ("snapshot_" + fmt_time(sn.t) + ".csv"), "x,p");
        for (std::size_t i = 0; i < sn.values.size(); ++i)
            s.row(static_cast<double>(i) * sol.h, sn.values[i]);
    }
    json meta;
    meta["scenario"] = sc.name;
    meta["model"] = to_string(sc.params.model);
    meta["alpha"] = sc.params.alpha;
    meta["beta"] = sc.params.beta;
    meta["grid"] = {{"h", sol.h}, {"dt", sol.dt_nominal}, {"x_max", sol.x_max}};
    meta["mass0"] = sol.mass0;
    if (sol.blowup) {
        meta["blowup"] = {{"time", sol.blowup->time}, {"trigger", sol.blowup->trigger}};
    }
    std::ofstream(dir / "meta.json") << meta.dump(2) << '\n';
}

void write_log_artifacts(const LogSolution& sol, const Scenario& sc,
                         const std::filesystem::path& dir) {
    csv::Writer w(dir / "series.csv", "t,lambda,qbar,I,J,lambda_l2_cum");
    for (std::size_t i = 0; i < sol.lambda_ts.size(); ++i)
        w.row(sol.lambda_ts.times[i], sol.lambda_ts.values[i], sol.qbar_ts.values[i],
              sol.I_ts.values[i], sol.J_ts.values[i], sol.lambda_l2_cum.values[i]);
    for (const auto& sn : sol.snapshots) {
        csv::Writer s(dir / ("snapshot_" + fmt_time(sn.t) + ".csv"), "x,r,q");
        for (std::size_t i = 0; i < sn.r.size(); ++i)
            s.row(static_cast<double>(i) * sol.h, sn.r[i], sn.r[i] * sn.qbar);
    }
    json meta;
    meta["scenario"] = sc.name;
    meta["model"] = to_string(sc.params.model);
    meta["alpha"] = sc.params.alpha;
    meta["beta"] = sc.params.beta;
    meta["kappa"] = sc.params.kappa;
    meta["grid"] = {{"h", sol.h}, {"dt", sol.dt_nominal}, {"x_max", sol.x_max}};
    meta["lambda_l2_cap"] = sc.grid.lambda_l2_cap;
    meta["max_mass_drift_per_step"] = sol.max_mass_drift_per_step;
    if (sol.blowup)
        meta["blowup"] = {{"time", sol.blowup->time}, {"trigger", sol.blowup->trigger}};
    if (sol.stop_reason) meta["stop_reason"] = *sol.stop_reason;
    std::ofstream(dir / "meta.json") << meta.dump(2) << '\n';
}

} // namespace

Density InitialSpec::make_density() const {
    switch (kind) {
        case InitialKind::Exponential: return Density::exponential(rate);
        case InitialKind::Gamma2: return Density::gamma_shape2(rate);
        case InitialKind::NarrowGaussian: return Density::narrow_gaussian(center, sigma);
        case InitialKind::Tabulated: return Density::read_csv(table_path);
        default: break;
    }
    throw ConfigError("initial: not a density kind");
}

Scenario parse_scenario(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    Scenario sc;
    sc.raw = j;
    const int version = static_cast<int>(opt_num(j, "", "version", 1));
    if (version != 1) fail("version", "unsupported schema version");
    if (j.contains("name")) sc.name = get_str(j, "", "name");

    const json& jm = require(j, "", "model");
    const std::string kind = get_str(jm, "model", "kind");
    if (kind == "linear") sc.params.model = FeedbackModel::Linear;
    else if (kind == "log") sc.params.model = FeedbackModel::Log;
    else fail("model.kind", "must be 'linear' or 'log'");
    sc.params.alpha = get_num(jm, "model", "alpha");
    sc.params.beta = opt_num(jm, "model", "beta", 0.0);
    sc.params.kappa = opt_num(jm, "model", "kappa", 0.125);
    sc.params.validate();

    const json& ji = require(j, "", "initial");
    const std::string ik = get_str(ji, "initial", "kind");
    if (ik == "exponential") {
        sc.initial.kind = InitialKind::Exponential;
        sc.initial.rate = get_num(ji, "initial", "rate");
    } else if (ik == "gamma2") {
        sc.initial.kind = InitialKind::Gamma2;
        sc.initial.rate = get_num(ji, "initial", "rate");
    } else if (ik == "narrow_gaussian") {
        sc.initial.kind = InitialKind::NarrowGaussian;
        sc.initial.center = get_num(ji, "initial", "center");
        sc.initial.sigma = opt_num(ji, "initial", "sigma", -1.0);
    } else if (ik == "tabulated") {
        sc.initial.kind = InitialKind::Tabulated;
        sc.initial.table_path = get_str(ji, "initial", "path");
    } else if (ik == "delta") {
        sc.initial.kind = InitialKind::Delta;
        sc.initial.x0 = get_num(ji, "initial", "x0");
    } else if (ik == "selfsim") {
        sc.initial.kind = InitialKind::Selfsim;
        sc.initial.t0 = get_num(ji, "initial", "t0");
        sc.initial.ss_beta = get_num(ji, "initial", "beta");
    } else {
        fail("initial.kind", "unknown initial kind '" + ik + "'");
    }

    if (j.contains("grid")) {
        const json& jg = j.at("grid");
        sc.grid.h = get_num(jg, "grid", "h");
        sc.grid.dt = get_num(jg, "grid", "dt");
        if (jg.contains("x_max")) {
            sc.grid.x_max = get_num(jg, "grid", "x_max");
        } else if (sc.initial.is_density()) {
            sc.grid.x_max = 40.0 * sc.initial.make_density().length_scale();
        } else if (sc.initial.kind == InitialKind::Delta) {
            sc.grid.x_max = 40.0 * sc.initial.x0;
        } else {
            fail("grid.x_max", "required for self-similar initial data");
        }
        sc.t_end = get_num(jg, "grid", "t_end");
        sc.grid.record_stride = static_cast<int>(opt_num(jg, "grid", "record_stride", 100));
        if (jg.contains("snapshot_times")) {
            const json& st = jg.at("snapshot_times");
            if (!st.is_array()) fail("grid.snapshot_times", "must be an array");
            for (const auto& v : st) sc.grid.snapshot_times.push_back(v.get<double>());
        }
        sc.grid.lambda_l2_cap = opt_num(j, "", "lambda_l2_cap", 25.0);
        sc.grid.validate();
        sc.has_grid = true;
    }

    if (j.contains("criteria")) {
        const json& jc = j.at("criteria");
        sc.criteria_enabled = opt_bool(jc, "criteria", "enabled", true);
        if (jc.contains("extra_mu")) {
            for (const auto& v : jc.at("extra_mu")) sc.mu_grid.push_back(v.get<double>());
        }
    }

    if (j.contains("particles")) {
        const json& jp = j.at("particles");
        sc.particles_enabled = opt_bool(jp, "particles", "enabled", true);
        sc.particle_cfg.n = static_cast<std::size_t>(get_num(jp, "particles", "n"));
        sc.particle_cfg.dt = get_num(jp, "particles", "dt");
        sc.particle_cfg.T = opt_num(jp, "particles", "T", sc.t_end);
        sc.particle_cfg.bridge = opt_bool(jp, "particles", "bridge", true);
        sc.particle_cfg.seed =
            static_cast<std::uint64_t>(opt_num(jp, "particles", "seed", 1.0));
        sc.particle_cfg.record_stride =
            static_cast<int>(opt_num(jp, "particles", "record_stride", 1));
        if (jp.contains("snapshot_times")) {
            const json& st = jp.at("snapshot_times");
            if (!st.is_array()) fail("particles.snapshot_times", "must be an array");
            for (const auto& v : st)
                sc.particle_cfg.snapshot_times.push_back(v.get<double>());
        }
    }

    if (j.contains("compare")) {
        const json& jc = j.at("compare");
        sc.compare_enabled = opt_bool(jc, "compare", "enabled", true);
        sc.compare_calibration = opt_num(jc, "compare", "calibration", 1.0);
    }

    if (j.contains("expect")) {
        const json& je = j.at("expect");
        if (je.contains("blowup")) sc.expect.blowup = opt_bool(je, "expect", "blowup", false);
        if (je.contains("blowup_before"))
            sc.expect.blowup_before = get_num(je, "expect", "blowup_before");
        if (je.contains("selfsim_boundary_sup_tol"))
            sc.expect.selfsim_boundary_sup_tol =
                get_num(je, "expect", "selfsim_boundary_sup_tol");
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& config_path) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config: " + config_path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    return parse_scenario(j);
}

RunOutcome run_scenario(const Scenario& sc, const std::filesystem::path& out_dir,
                        unsigned components) {
    std::filesystem::create_directories(out_dir);
    RunOutcome out;

    if ((components & kCriteria) && sc.criteria_enabled) {
        Verdict v;
        if (sc.initial.kind == InitialKind::Delta) {
            v = delta_verdict(sc.initial.x0, sc.params.alpha);
        } else if (sc.initial.is_density()) {
            const Density d = sc.initial.make_density();
            v = sc.params.model == FeedbackModel::Linear
                    ? blowup_linear(d, sc.params.alpha, sc.mu_grid)
                    : blowup_log(d, sc.params.alpha, sc.params.beta, sc.mu_grid);
        } else {
            throw ConfigError("criteria: initial condition must be a density or delta");
        }
        out.verdict = v;
        csv::Writer w(out_dir / "verdict.csv",
                      "model,alpha,beta,kind,T_bound,witness_mu,witness_x");
        w.raw_line(v.csv_record(sc.params.model, sc.params.alpha, sc.params.beta));
        out.notes.push_back("criteria: " + to_string(v.kind));
    }

    std::optional<TimeSeries> pde_aggregate;
    if (components & kSolver) {
        if (!sc.has_grid) throw ConfigError("grid: required for solver runs");
        if (sc.params.model == FeedbackModel::Linear) {
            const LinearInitial init =
                sc.initial.kind == InitialKind::Selfsim
                    ? LinearInitial(SelfsimInitial{sc.initial.t0, sc.initial.ss_beta})
                    : (sc.initial.kind == InitialKind::Delta
                           ? LinearInitial(Density::narrow_gaussian(sc.initial.x0))
                           : LinearInitial(sc.initial.make_density()));
            const LinearSolution sol = solve_linear(init, sc.params, sc.t_end, sc.grid);
            write_linear_artifacts(sol, sc, out_dir);
            out.event = sol.blowup;
            pde_aggregate = sol.loss;
            if (sc.initial.kind == InitialKind::Selfsim) {
                double sup = 0.0;
                for (std::size_t i = 0; i < sol.loss.size(); ++i)
                    sup = std::max(sup, std::abs(sol.loss.values[i] -
                                                 exact_selfsim_loss(sc.initial,
                                                                    sc.params.alpha,
                                                                    sol.loss.times[i])));
                out.sup_error = sup;
                out.notes.push_back("selfsim boundary sup error " + csv::format_number(sup));
            }
        } else {
            if (!sc.initial.is_density())
                throw ConfigError("solve-log: initial condition must be a density");
            const LogSolution sol =
                solve_log(sc.initial.make_density(), sc.params, sc.t_end, sc.grid);
            write_log_artifacts(sol, sc, out_dir);
            out.event = sol.blowup;
            pde_aggregate = sol.qbar_ts;
        }
        if (out.event)
            out.notes.push_back("blow-up trigger '" + out.event->trigger + "' at t=" +
                                csv::format_number(out.event->time));
    }

    std::optional<TimeSeries> empirical;
    if ((components & kParticles) && sc.particles_enabled) {
        ParticleInit pinit;
        if (sc.initial.kind == InitialKind::Delta) pinit.delta_x0 = sc.initial.x0;
        else if (sc.initial.is_density()) pinit.density = sc.initial.make_density();
        else throw ConfigError("particles: initial condition must be a density or delta");
        const SimulateResult r = simulate(pinit, sc.params, sc.particle_cfg);
        write_empirical_csv(r, out_dir / "empirical.csv");
        json meta;
        meta["n"] = sc.particle_cfg.n;
        meta["dt"] = sc.particle_cfg.dt;
        meta["seed"] = sc.particle_cfg.seed;
        meta["bridge"] = sc.particle_cfg.bridge;
        meta["stream_layout"] = "philox4x64-10 keyed (seed, particle, step)";
        meta["max_single_step_loss_fraction"] = r.max_single_step_loss_fraction;
        meta["terminated_early"] = r.terminated_early;
        std::ofstream(out_dir / "particles_meta.json") << meta.dump(2) << '\n';
        empirical = r.aggregate;
        out.notes.push_back("particles: max single-step loss fraction " +
                            csv::format_number(r.max_single_step_loss_fraction));
    }

    if (components & kCompare) {
        if (!sc.compare_enabled)
            throw ConfigError("compare: not enabled in this scenario");
        if (!pde_aggregate || !empirical)
            throw ConfigError("compare: needs both solver and particle runs");
        const CompareReport rep =
            compare_to_pde(*empirical, *pde_aggregate, sc.particle_cfg.n, sc.grid.h,
                           sc.particle_cfg.dt, sc.compare_calibration);
        csv::Writer w(out_dir / "compare.csv", "sup_distance,tolerance,pass");
        w.row(rep.sup_distance, rep.tolerance, std::string(rep.pass ? "true" : "false"));
        out.sup_error = rep.sup_distance;
        out.notes.push_back("compare: sup distance " + csv::format_number(rep.sup_distance) +
                            " vs tolerance " + csv::format_number(rep.tolerance));
        if (!rep.pass) out.exit_code = 3;
    }

    // expectations decide the final exit status; event expectations only
    // make sense when a solver actually ran
    if (sc.expect.blowup.has_value() && (components & kSolver)) {
        if (*sc.expect.blowup) {
            if (!out.event) {
                out.exit_code = 3;
                out.notes.push_back("expected a blow-up event, none detected");
            } else if (sc.expect.blowup_before &&
                       out.event->time >= *sc.expect.blowup_before) {
                out.exit_code = 3;
                out.notes.push_back("blow-up detected later than expected bound");
            } else if (out.exit_code == 0) {
                out.exit_code = 2;
            }
        } else if (out.event) {
            out.exit_code = 3;
            out.notes.push_back("unexpected blow-up event");
        }
    }
    if (sc.expect.selfsim_boundary_sup_tol && components & kSolver) {
        if (!(out.sup_error < *sc.expect.selfsim_boundary_sup_tol)) {
            out.exit_code = 3;
            out.notes.push_back("self-similar boundary error above tolerance");
        }
    }
    return out;
}

int sweep_scenario(const json& base, const std::string& param_path,
                   const std::vector<double>& values,
                   const std::filesystem::path& out_dir, unsigned components) {
    if (values.empty()) throw ConfigError("sweep: empty value list");
    if (param_path.empty()) throw ConfigError("sweep: parameter path required");
    // validate the path against the base config before launching anything
    {
        std::vector<std::string> keys;
        std::size_t start = 0;
        while (start <= param_path.size()) {
            const std::size_t dot = param_path.find('.', start);
            keys.push_back(param_path.substr(start, dot == std::string::npos
                                                        ? std::string::npos
                                                        : dot - start));
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
        const json* cur = &base;
        for (const auto& k : keys) {
            if (!cur->is_object() || !cur->contains(k))
                throw ConfigError("sweep: parameter path '" + param_path +
                                  "' not found in config");
            cur = &cur->at(k);
        }
        if (!cur->is_number())
            throw ConfigError("sweep: parameter '" + param_path + "' is not numeric");
    }
    std::filesystem::create_directories(out_dir);

    struct Row {
        double value;
        std::string verdict = "";
        double event_time = std::numeric_limits<double>::quiet_NaN();
        double sup_error = std::numeric_limits<double>::quiet_NaN();
        int exit_code = 0;
        std::string error;
    };
    std::vector<Row> rows(values.size());

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t vi = 0; vi < static_cast<std::ptrdiff_t>(values.size()); ++vi) {
        Row& row = rows[vi];
        row.value = values[vi];
        try {
            json cfg = base;
            json* cur = &cfg;
            std::string rest = param_path;
            for (;;) {
                const std::size_t dot = rest.find('.');
                const std::string key = rest.substr(0, dot);
                if (dot == std::string::npos) {
                    (*cur)[key] = values[vi];
                    break;
                }
                cur = &(*cur)[key];
                rest = rest.substr(dot + 1);
            }
            const Scenario sc = parse_scenario(cfg);
            const std::filesystem::path sub =
                out_dir / (param_path + "=" + csv::format_number(values[vi]));
            const RunOutcome oc = run_scenario(sc, sub, components);
            row.exit_code = oc.exit_code;
            if (oc.verdict) row.verdict = to_string(oc.verdict->kind);
            if (oc.event) row.event_time = oc.event->time;
            row.sup_error = oc.sup_error;
        } catch (const std::exception& e) {
            row.exit_code = 1;
            row.error = e.what();
        }
    }

    csv::Writer w(out_dir / "sweep.csv", "value,verdict,event_time,sup_error");
    for (const auto& r : rows)
        w.row(r.value, r.verdict, r.event_time, r.sup_error);
    for (const auto& r : rows)
        if (r.exit_code == 1) throw ConfigError("sweep: run failed: " + r.error);
    return 0;
}

} // namespace mckv::scenario
