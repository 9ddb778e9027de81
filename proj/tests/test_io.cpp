#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "platoon/io.hpp"

using namespace platoon;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(PLATOON_SOURCE_DIR) / "scenarios" / "n3_default.cfg";

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "platoon_io_tests";
    fs::create_directories(dir);
    return dir;
}

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path p = work_dir() / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

// Minimal valid scenario text for error-injection tests.
std::string tiny_cfg(const std::string& mutate_from = "", const std::string& mutate_to = "") {
    std::string text =
        "[road]\n"
        "v_min 1\n"
        "v_max 20\n"
        "[sim]\n"
        "t_p 47.2\n"
        "[vehicle]\n"
        "kind CAV\n"
        "position 0\n"
        "[vehicle]\n"
        "kind HDV\n"
        "position -137.55\n";
    if (!mutate_from.empty()) {
        const auto at = text.find(mutate_from);
        REQUIRE(at != std::string::npos);
        text.replace(at, mutate_from.size(), mutate_to);
    }
    return text;
}

}  // namespace

TEST_CASE("the shipped scenario loads with its documented values") {
    const ScenarioConfig cfg = load_scenario(kFixture);
    CHECK(cfg.name == "n3_default");
    REQUIRE(cfg.fleet_size() == 3);
    CHECK(cfg.road.v_max == 20.0);
    CHECK(cfg.road.v_min == 8.0);
    CHECK(cfg.road.u_min == -6.0);
    CHECK(cfg.road.control_length == 1500.0);
    CHECK(cfg.t_p == 47.2);
    CHECK(cfg.dt == 0.01);
    CHECK(cfg.vehicles[0].first.kind == VehicleKind::CAV);
    CHECK(cfg.vehicles[1].first.kind == VehicleKind::HDV);
    CHECK(cfg.vehicles[1].first.eta == 0.03);
    CHECK(cfg.vehicles[2].second.position == -275.1);
    CHECK(cfg.vehicles[0].second.speed == 20.0);  // scenarios start in steady flow
}

TEST_CASE("load - write - load is the identity") {
    const ScenarioConfig cfg = load_scenario(kFixture);
    const fs::path out = work_dir() / "roundtrip.cfg";
    write_scenario(cfg, out);
    const ScenarioConfig again = load_scenario(out);
    CHECK(scenario_text(cfg) == scenario_text(again));
    CHECK(scenario_hash(cfg) == scenario_hash(again));
    CHECK(again.vehicles[1].second.position == cfg.vehicles[1].second.position);
    CHECK(again.t_p == cfg.t_p);
    // Writing is deterministic byte-for-byte.
    const fs::path out2 = work_dir() / "roundtrip2.cfg";
    write_scenario(cfg, out2);
    CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("the hash tracks content, not identity") {
    ScenarioConfig cfg = load_scenario(kFixture);
    const std::string h1 = scenario_hash(cfg);
    CHECK(h1.size() == 16);
    CHECK(scenario_hash(cfg) == h1);
    cfg.t_p += 0.1;
    CHECK(scenario_hash(cfg) != h1);
}

TEST_CASE("parse errors carry line numbers") {
    auto expect_error = [](const std::string& name, const std::string& text,
                           const std::string& needle) {
        const fs::path p = write_temp(name, text);
        try {
            load_scenario(p);
            FAIL("expected a parse error for ", name);
        } catch (const ParseError& e) {
            const std::string msg = e.what();
            INFO(msg);
            CHECK(msg.find(needle) != std::string::npos);
        }
    };
    expect_error("unknown_key.cfg", tiny_cfg("v_min 1", "speed_floor 1"), ":2: unknown key");
    expect_error("unknown_section.cfg", tiny_cfg("[road]", "[boost]"), ":1: unknown section");
    expect_error("dup_key.cfg", tiny_cfg("v_max 20", "v_max 20\nv_max 21"), "duplicate key");
    expect_error("dup_section.cfg", tiny_cfg("[sim]", "[road]"), "duplicate section");
    expect_error("orphan.cfg", "v_min 1\n", ":1: entry before any section");
    expect_error("bad_number.cfg", tiny_cfg("v_max 20", "v_max twenty"), "cannot parse number");
    expect_error("bad_kind.cfg", tiny_cfg("kind CAV", "kind cav"), "kind must be CAV or HDV");
    expect_error("no_position.cfg", tiny_cfg("position -137.55\n", ""), "missing required key");
    expect_error("no_value.cfg", tiny_cfg("v_min 1", "v_min"), "expected 'key value'");
}

TEST_CASE("an empty file fails semantic validation, not parsing") {
    const fs::path p = write_temp("empty.cfg", "");
    CHECK_THROWS_AS(load_scenario(p), std::invalid_argument);
}

TEST_CASE("an empty or absent file does not load") {
    CHECK_THROWS_AS(load_scenario(work_dir() / "does_not_exist.cfg"), ParseError);
}

TEST_CASE("semantic validation runs after parsing") {
    const fs::path p = write_temp("inverted.cfg", tiny_cfg("v_min 1", "v_min 30"));
    CHECK_THROWS_AS(load_scenario(p), std::invalid_argument);
}

TEST_CASE("trajectory CSV layout") {
    ScenarioConfig cfg = load_scenario(kFixture);
    cfg.vehicles.pop_back();  // two vehicles suffice

    Trajectory traj;
    traj.dt = 0.5;
    traj.t = {0.0, 0.5, 1.0};
    traj.phase = {Phase::Transition, Phase::Transition, Phase::Stabilization};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    traj.p = {{0.0, 9.0, 17.0}, {-137.55, -127.0, -117.0}};
    traj.v = {{20.0, 19.0, 18.0}, {20.0, 20.0, 20.0}};
    traj.u = {{-2.0, -2.0, 0.0}, {0.0, 0.0, 0.0}};
    traj.s = {{22.0, 21.0, 20.0}, {22.0, 22.0, 22.0}};
    traj.delta = {{nan, nan, nan}, {110.55, 109.0, 107.0}};
    traj.headway = {{nan, nan, nan}, {137.55, 136.0, 134.0}};

    const fs::path out = work_dir() / "traj.csv";
    write_trajectory(traj, cfg, out);
    const auto lines = split_lines(slurp(out));
    REQUIRE(lines.size() == 7);  // header + one row per vehicle per step
    CHECK(lines[0] == "t,vehicle_id,kind,p,v,u,s_i,delta_i,headway,phase");

    const auto cav = split_fields(lines[1]);
    REQUIRE(cav.size() == 10);
    CHECK(cav[0] == "0");
    CHECK(cav[1] == "1");
    CHECK(cav[2] == "CAV");
    CHECK(cav[3] == "0");
    CHECK(cav[4] == "20");
    CHECK(cav[5] == "-2");
    CHECK(cav[6] == "22");
    CHECK(cav[7].empty());  // no predecessor: empty gap column
    CHECK(cav[8].empty());
    CHECK(cav[9] == "Transition");

    const auto hdv = split_fields(lines[2]);
    CHECK(hdv[1] == "2");
    CHECK(hdv[2] == "HDV");
    CHECK(hdv[7] == "110.55");
    CHECK(hdv[8] == "137.55");
    const auto last = split_fields(lines[6]);
    CHECK(last[0] == "1");
    CHECK(last[9] == "Stabilization");

    // Byte-stable across repeated writes.
    const fs::path out2 = work_dir() / "traj2.csv";
    write_trajectory(traj, cfg, out2);
    CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("plot data CSV layout") {
    SweepRecord a;
    a.axis_value = 0.5;
    a.N = 2;
    a.verdict = "feasible";
    a.deviation_pct = -1.25;
    SweepRecord b;
    b.axis_value = 0.7;
    b.N = 3;
    b.verdict = "infeasible";
    CHECK(plot_data_text({a, b}) ==
          "axis_value,N,deviation_pct,feasible\n"
          "0.5,2,-1.25,1\n"
          "0.7,3,,0\n");
    const fs::path out = work_dir() / "plot.csv";
    emit_plot_data({a, b}, out);
    CHECK(slurp(out) == plot_data_text({a, b}));
}

TEST_CASE("summary JSON round-trips losslessly") {
    const ScenarioConfig cfg = load_scenario(kFixture);
    ControlPlan cp;
    cp.u_p = -0.2606630001650515;
    cp.t_c = 0.0;
    cp.t_s = 42.2;
    cp.t_f = 140.9;
    cp.tau_t = 42.2;
    cp.tau_s = 5.0;
    cp.feasible_interval = {38.85, 57.36};
    cp.gap_solved = 221.1;
    cp.rho_sum = 1.0;
    cp.v_eq_planned = 9.0;
    FormationReport rep;
    rep.t_s_actual = 42.37;
    rep.t_ap = 47.0;
    rep.deviation_pct = -0.4237;
    rep.v_eq_observed = 9.0004;
    rep.in_zone = true;

    const RunSummary s = make_summary(cfg, cp, rep);
    const std::string text = summary_json(s);
    const RunSummary back = parse_summary(text);
    CHECK(back.version == s.version);
    CHECK(back.scenario_name == "n3_default");
    CHECK(back.scenario_hash_hex == s.scenario_hash_hex);
    CHECK(back.dt == s.dt);
    CHECK(back.plan.u_p == cp.u_p);
    CHECK(back.plan.t_f == cp.t_f);
    CHECK(back.plan.feasible_interval.first == cp.feasible_interval.first);
    CHECK(back.plan.v_eq_planned == cp.v_eq_planned);
    CHECK(back.tolerances.eps_v == cfg.tolerances.eps_v);
    CHECK(back.formation.t_ap.value() == rep.t_ap.value());
    CHECK(back.formation.v_eq_observed.value() == rep.v_eq_observed.value());
    CHECK(back.formation.in_zone == rep.in_zone);
    CHECK(summary_json(back) == text);

    // NotReached summaries serialize their nulls symmetrically.
    FormationReport miss;
    miss.t_s_actual.reset();
    miss.not_reached_reason = "gap condition failed longest";
    const RunSummary s2 = make_summary(cfg, cp, miss);
    const RunSummary back2 = parse_summary(summary_json(s2));
    CHECK(!back2.formation.t_ap.has_value());
    CHECK(!back2.formation.t_s_actual.has_value());
    CHECK(back2.formation.not_reached_reason == "gap condition failed longest");

    const fs::path out = work_dir() / "summary.json";
    write_summary(s, out);
    CHECK(slurp(out) == text);
}

TEST_CASE("atomic writes leave no temp file behind") {
    const fs::path out = work_dir() / "atomic.txt";
    atomic_write_text(out, "hello\n");
    CHECK(slurp(out) == "hello\n");
    CHECK(!fs::exists(out.string() + ".tmp"));
}
