#pragma once

// Scenario file ingestion and result serialization: scenario configs
// (flat key-value sections), trajectory CSV, run-summary JSON, and
// plot-ready sweep CSV. All writes are atomic (write to a temporary file in
// the target directory, then rename).
//
// Scenario grammar (documented in README.md):
//   - '#' starts a comment (to end of line); blank lines ignored.
//   - section headers: [road] [sim] [tolerances] (each at most once) and
//     [vehicle] (once per vehicle, in front-to-rear order).
//   - entries: `key value` (whitespace separated), one per line.
//   - unknown sections/keys are errors; missing keys take defaults;
//     `position` (and `kind`) are required in every [vehicle] section.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "platoon/controller.hpp"
#include "platoon/core.hpp"
#include "platoon/metrics.hpp"
#include "platoon/sim.hpp"
#include "platoon/sweep.hpp"

namespace platoon {

inline constexpr const char* kVersion = "0.1.0";

// Scenario file syntax/semantic error; message carries path and line number.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses and fully validates a scenario file (all model invariants checked).
ScenarioConfig load_scenario(const std::filesystem::path& path);

// Canonical serialized form (every key explicit, 17 significant digits so
// values survive a round-trip bit-for-bit).
std::string scenario_text(const ScenarioConfig& config);

// load -> write -> load yields an identical config.
void write_scenario(const ScenarioConfig& config, const std::filesystem::path& path);

// FNV-1a (64-bit) over the canonical serialized form, as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& config);

struct RunSummary {
    std::string version = kVersion;
    std::string scenario_name;
    std::string scenario_hash_hex;
    double dt = 0.0;  // s
    ControlPlan plan;
    FormationTolerances tolerances;
    FormationReport formation;
};

RunSummary make_summary(const ScenarioConfig& config, const ControlPlan& plan,
                        const FormationReport& formation);

// JSON text (2-space indent, trailing newline); parse_summary inverts it
// losslessly.
std::string summary_json(const RunSummary& summary);
RunSummary parse_summary(const std::string& json_text);
void write_summary(const RunSummary& summary, const std::filesystem::path& path);

// CSV `t,vehicle_id,kind,p,v,u,s_i,delta_i,headway,phase`, one row per
// vehicle per step (vehicle_id is 1-based, front to rear); the lead row
// leaves delta_i/headway empty. Numbers use 9 significant digits.
void write_trajectory(const Trajectory& traj, const ScenarioConfig& config,
                      const std::filesystem::path& path);

// CSV `axis_value,N,deviation_pct,feasible`; deviation_pct is empty when the
// record has none, feasible is 1/0.
std::string plot_data_text(const std::vector<SweepRecord>& records);
void emit_plot_data(const std::vector<SweepRecord>& records,
                    const std::filesystem::path& path);

// Shared atomic text write; throws std::runtime_error with path context.
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace platoon
