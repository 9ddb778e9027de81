// Command-line surface for the platoon-formation toolkit.
//
// Exit codes: 0 success, 1 infeasible plan / formation not reached,
// 2 invalid input (syntax, validation, bad flags), 3 internal error or
// collision.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "platoon/controller.hpp"
#include "platoon/core.hpp"
#include "platoon/io.hpp"
#include "platoon/metrics.hpp"
#include "platoon/sim.hpp"
#include "platoon/sweep.hpp"

namespace {

namespace fs = std::filesystem;

std::string g9(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.9g", v);
    return b;
}

double interior_rho_sum(const platoon::ScenarioConfig& cfg) {
    double c1 = 0.0;
    for (std::size_t j = 1; j + 1 < cfg.vehicles.size(); ++j) c1 += cfg.vehicles[j].first.rho;
    return c1;
}

int cmd_simulate(const std::string& cfg_path, const std::optional<double>& t_p_override,
                 const std::string& out_dir) {
    platoon::ScenarioConfig cfg = platoon::load_scenario(cfg_path);
    if (t_p_override) {
        cfg.t_p = *t_p_override;
        platoon::validate_config(cfg);
    }
    const platoon::FleetSnapshot ss = platoon::make_steady_state_fleet(cfg);
    const platoon::ControlPlan cp = platoon::plan(cfg, ss, cfg.t_p);
    const platoon::Trajectory traj = platoon::run(cfg, cp, platoon::default_horizon(cfg, cp));
    const platoon::FormationReport rep =
        platoon::detect_formation(traj, cfg.tolerances, cfg.t_p, cfg.road.control_length);
    const platoon::RunSummary summary = platoon::make_summary(cfg, cp, rep);
    std::cout << platoon::summary_json(summary);
    if (!out_dir.empty()) {
        platoon::write_trajectory(traj, cfg, fs::path(out_dir) / "trajectory.csv");
        platoon::write_summary(summary, fs::path(out_dir) / "summary.json");
    }
    if (!rep.t_ap) {
        std::cerr << "formation not reached: " << rep.not_reached_reason << "\n";
        return 1;
    }
    if (!rep.in_zone) {
        std::cerr << "formation completed past the control zone end\n";
        return 1;
    }
    return 0;
}

int cmd_feasible(const std::string& cfg_path, const std::optional<double>& t_p_override) {
    platoon::ScenarioConfig cfg = platoon::load_scenario(cfg_path);
    if (t_p_override) {
        cfg.t_p = *t_p_override;
        platoon::validate_config(cfg);
    }
    const platoon::FleetSnapshot ss = platoon::make_steady_state_fleet(cfg);
    const double tau_s = platoon::stabilization_duration(cfg.eta_bar, cfg.tau_r);
    const double tau_t = cfg.t_p - cfg.t_c - tau_s;

    platoon::FeasibilityInputs fin;
    fin.delta_or_Delta = platoon::cumulative_gap(ss, cfg);
    fin.v1_tc = ss.states.front().speed;
    fin.rho_sum = interior_rho_sum(cfg);
    fin.L_c = cfg.road.control_length - ss.states.front().position;
    fin.u_min = cfg.road.u_min;
    fin.v_min = cfg.road.v_min;
    fin.tau_s = tau_s;

    std::cout << "cumulative_gap " << g9(fin.delta_or_Delta) << "\n";
    std::cout << "rho_sum " << g9(fin.rho_sum) << "\n";
    std::cout << "tau_s " << g9(tau_s) << "\n";
    std::cout << "tau_t " << g9(tau_t) << "\n";

    std::pair<double, double> range;
    try {
        range = platoon::feasible_range_multi(fin);
    } catch (const std::domain_error&) {
        std::cout << "tau_lo nan\ntau_hi nan\nverdict infeasible\n";
        return 1;
    }
    std::cout << "tau_lo " << g9(range.first) << "\n";
    std::cout << "tau_hi " << g9(range.second) << "\n";
    const bool ok = range.first <= range.second && tau_t >= range.first && tau_t <= range.second;
    if (ok) {
        const double u_p = platoon::solve_up_multi(fin.delta_or_Delta, tau_t, fin.rho_sum);
        std::cout << "u_p " << g9(u_p) << "\n";
    }
    std::cout << "verdict " << (ok ? "feasible" : "infeasible") << "\n";
    return ok ? 0 : 1;
}

int cmd_solve(const std::string& cfg_path, double tau_t) {
    platoon::ScenarioConfig cfg = platoon::load_scenario(cfg_path);
    const platoon::FleetSnapshot ss = platoon::make_steady_state_fleet(cfg);
    const double d = platoon::cumulative_gap(ss, cfg);
    const double c1 = interior_rho_sum(cfg);
    const double u_p = cfg.fleet_size() == 2 ? platoon::solve_up_two(d, tau_t)
                                             : platoon::solve_up_multi(d, tau_t, c1);
    std::cout << "u_p " << g9(u_p) << "\n";
    return 0;
}

int cmd_sweep(const std::string& cfg_path, const std::string& axis_str,
              const std::vector<int>& fleet_sizes, int samples, std::uint64_t seed,
              double jitter, const std::optional<double>& lo, const std::optional<double>& hi,
              const std::string& out_dir) {
    platoon::SweepSpec spec;
    spec.base = platoon::load_scenario(cfg_path);
    if (axis_str == "tau")
        spec.axis = platoon::SweepAxis::TauT;
    else if (axis_str == "eta")
        spec.axis = platoon::SweepAxis::Eta;
    else if (axis_str == "rho")
        spec.axis = platoon::SweepAxis::Rho;
    else
        spec.axis = platoon::SweepAxis::Alpha;
    spec.samples = samples;
    spec.fleet_sizes = fleet_sizes;
    spec.seed = seed;
    spec.jitter = jitter;

    // Default ranges: tau spans each fleet's feasibility interval; plant
    // axes span a band around the fixture's nominal value.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    switch (spec.axis) {
        case platoon::SweepAxis::TauT:
            spec.lo = -kInf;
            spec.hi = kInf;
            break;
        case platoon::SweepAxis::Eta:
            spec.lo = 0.0;
            spec.hi = spec.base.eta_bar;
            break;
        case platoon::SweepAxis::Rho:
            spec.lo = 0.5;
            spec.hi = 1.5;
            break;
        case platoon::SweepAxis::Alpha:
            spec.lo = 1.0;
            spec.hi = 2.0;
            break;
    }
    if (lo) spec.lo = *lo;
    if (hi) spec.hi = *hi;

    const std::vector<platoon::SweepRecord> records = platoon::run_sweep(spec);
    if (out_dir.empty()) {
        std::cout << platoon::plot_data_text(records);
    } else {
        platoon::emit_plot_data(records,
                                fs::path(out_dir) / ("sweep_" + axis_str + ".csv"));
    }

    const platoon::SweepSummary agg = platoon::aggregate(spec.axis, records);
    std::cerr << "axis " << platoon::axis_name(spec.axis) << ": records " << agg.n_records
              << ", feasible " << agg.n_feasible << ", reached " << agg.n_reached;
    if (agg.n_reached > 0) {
        std::cerr << ", deviation_pct [" << g9(agg.dev_min) << ", " << g9(agg.dev_max)
                  << "] mean " << g9(agg.dev_mean) << ", worst " << g9(agg.worst_deviation)
                  << " at " << platoon::axis_name(spec.axis) << "=" << g9(agg.worst_axis_value)
                  << " N=" << agg.worst_N;
    }
    std::cerr << "\n";
    return 0;
}

int cmd_validate(const std::string& cfg_path) {
    const platoon::ScenarioConfig cfg = platoon::load_scenario(cfg_path);
    std::cout << "valid: " << cfg.name << " (N=" << cfg.fleet_size() << ", hash "
              << platoon::scenario_hash(cfg) << ")\n";
    for (const std::string& w : platoon::config_warnings(cfg))
        std::cout << "warning: " << w << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed-traffic platoon formation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", platoon::kVersion);

    std::string cfg_path;
    std::optional<double> t_p_override;
    std::string out_dir;
    double tau_t = 0.0;
    std::string axis_str;
    std::vector<int> fleet_sizes = {2, 3, 4};
    int samples = 50;
    std::uint64_t seed = 0;
    double jitter = 0.0;
    std::optional<double> lo, hi;

    CLI::App* c_sim = app.add_subcommand("simulate", "run a scenario and report the formation");
    c_sim->add_option("cfg", cfg_path, "scenario file")->required();
    c_sim->add_option("--t-p", t_p_override, "override the requested formation time [s]");
    c_sim->add_option("--out", out_dir, "directory for trajectory.csv and summary.json");

    CLI::App* c_feas = app.add_subcommand("feasible", "print the feasibility interval + verdict");
    c_feas->add_option("cfg", cfg_path, "scenario file")->required();
    c_feas->add_option("--t-p", t_p_override, "override the requested formation time [s]");

    CLI::App* c_solve = app.add_subcommand("solve", "print the closed-form control input");
    c_solve->add_option("cfg", cfg_path, "scenario file")->required();
    c_solve->add_option("--tau-t", tau_t, "transition duration [s]")->required();

    CLI::App* c_sweep = app.add_subcommand("sweep", "run a robustness sweep, emit plot CSV");
    c_sweep->add_option("cfg", cfg_path, "scenario file")->required();
    c_sweep->add_option("--axis", axis_str, "sweep axis")
        ->required()
        ->check(CLI::IsMember({"tau", "eta", "rho", "alpha"}));
    c_sweep->add_option("--n", fleet_sizes, "fleet sizes (comma separated)")->delimiter(',');
    c_sweep->add_option("--samples", samples, "samples per fleet size");
    c_sweep->add_option("--seed", seed, "RNG seed for per-vehicle jitter");
    c_sweep->add_option("--jitter", jitter, "per-vehicle half-width around the axis value");
    c_sweep->add_option("--lo", lo, "axis range start (default: per-axis)");
    c_sweep->add_option("--hi", hi, "axis range end (default: per-axis)");
    c_sweep->add_option("--out", out_dir, "directory for sweep_<axis>.csv (default: stdout)");

    CLI::App* c_val = app.add_subcommand("validate", "parse + validate a scenario file");
    c_val->add_option("cfg", cfg_path, "scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_sim) return cmd_simulate(cfg_path, t_p_override, out_dir);
        if (*c_feas) return cmd_feasible(cfg_path, t_p_override);
        if (*c_solve) return cmd_solve(cfg_path, tau_t);
        if (*c_sweep)
            return cmd_sweep(cfg_path, axis_str, fleet_sizes, samples, seed, jitter, lo, hi,
                             out_dir);
        if (*c_val) return cmd_validate(cfg_path);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const platoon::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 1;
    } catch (const platoon::CollisionError& e) {
        std::cerr << "collision: " << e.what() << "\n";
        return 3;
    } catch (const platoon::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
