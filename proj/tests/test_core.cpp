#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>
#include <string>

#include "platoon/core.hpp"

using namespace platoon;

namespace {

VehicleParams hdv(double rho = 1.0, double len = 5.0) {
    VehicleParams p;
    p.kind = VehicleKind::HDV;
    p.rho = rho;
    p.length = len;
    return p;
}

ScenarioConfig fixture_like() {
    ScenarioConfig cfg;  // defaults = shipped scenario values
    VehicleParams cav;
    cav.kind = VehicleKind::CAV;
    VehicleState s0{0.0, 20.0, 0.0};
    VehicleState s1{-137.55, 20.0, 0.0};
    VehicleState s2{-275.10, 20.0, 0.0};
    VehicleParams h = hdv();
    h.eta = 0.03;
    cfg.vehicles = {{cav, s0}, {h, s1}, {h, s2}};
    return cfg;
}

}  // namespace

TEST_CASE("dynamic spacing is rho*v + s0") {
    CHECK(dynamic_spacing(10.0, hdv(1.0), 2.0) == doctest::Approx(12.0));
    CHECK(dynamic_spacing(0.0, hdv(1.0), 2.0) == doctest::Approx(2.0));
    CHECK(dynamic_spacing(30.0, hdv(0.5), 1.0) == doctest::Approx(16.0));
}

TEST_CASE("platoon gap subtracts spacing and length from the headway") {
    VehicleState pred{100.0, 10.0, 0.0};
    VehicleState self{70.0, 10.0, 0.0};
    // headway 30, spacing 12, length 5 -> 13
    CHECK(platoon_gap(pred, self, hdv(), 2.0) == doctest::Approx(13.0));
    pred.position = 80.0;  // headway 10 -> gap -7 (coupled regime)
    CHECK(platoon_gap(pred, self, hdv(), 2.0) == doctest::Approx(-7.0));
}

TEST_CASE("platoon gap requires the predecessor strictly ahead") {
    VehicleState pred{70.0, 10.0, 0.0};
    VehicleState self{70.0, 10.0, 0.0};
    CHECK_THROWS_AS(platoon_gap(pred, self, hdv(), 2.0), std::invalid_argument);
    pred.position = 60.0;
    CHECK_THROWS_AS(platoon_gap(pred, self, hdv(), 2.0), std::invalid_argument);
}

TEST_CASE("cumulative gap telescopes the per-pair gaps") {
    ScenarioConfig cfg;
    cfg.road.v_max = 30.0;
    cfg.road.v_min = 1.0;
    cfg.road.s0 = 2.0;
    VehicleParams cav;
    cav.kind = VehicleKind::CAV;
    cfg.vehicles = {{cav, {200.0, 30.0, 0.0}},
                    {hdv(), {150.0, 30.0, 0.0}},
                    {hdv(), {100.0, 30.0, 0.0}}};
    FleetSnapshot snap;
    snap.time = 0.0;
    for (const auto& [p, s] : cfg.vehicles) snap.states.push_back(s);
    // p1 - pN = 100; two followers each need rho*v + s0 + l = 37 -> 26
    CHECK(cumulative_gap(snap, cfg) == doctest::Approx(26.0));

    // Equals the sum of the per-pair gaps.
    double sum = 0.0;
    for (std::size_t i = 1; i < cfg.vehicles.size(); ++i)
        sum += platoon_gap(snap.states[i - 1], snap.states[i], cfg.vehicles[i].first,
                           cfg.road.s0);
    CHECK(cumulative_gap(snap, cfg) == doctest::Approx(sum));

    snap.states.pop_back();
    FleetSnapshot single;
    single.states.push_back(snap.states[0]);
    CHECK_THROWS_AS(cumulative_gap(single, cfg), std::invalid_argument);
}

TEST_CASE("steady-state fleet starts everyone at v_max with the configured layout") {
    const ScenarioConfig cfg = fixture_like();
    const FleetSnapshot snap = make_steady_state_fleet(cfg);
    REQUIRE(snap.states.size() == 3);
    for (const VehicleState& s : snap.states) {
        CHECK(s.speed == doctest::Approx(cfg.road.v_max));
        CHECK(s.accel == doctest::Approx(0.0));
    }
    CHECK(snap.states[0].position == doctest::Approx(0.0));
    CHECK(snap.states[2].position == doctest::Approx(-275.10));
    // Fixture geometry: per-pair gap 110.55, cumulative 221.1.
    CHECK(platoon_gap(snap.states[0], snap.states[1], cfg.vehicles[1].first, cfg.road.s0) ==
          doctest::Approx(110.55));
    CHECK(cumulative_gap(snap, cfg) == doctest::Approx(221.1));
}

TEST_CASE("validation rejects inverted speed bounds") {
    ScenarioConfig cfg = fixture_like();
    cfg.road.v_min = cfg.road.v_max;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
}

TEST_CASE("validation rejects non-decreasing positions") {
    ScenarioConfig cfg = fixture_like();
    cfg.vehicles[2].second.position = cfg.vehicles[1].second.position + 1.0;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
}

TEST_CASE("validation rejects an already-coupled fleet") {
    ScenarioConfig cfg = fixture_like();
    // Shrink every headway to exactly spacing + length: all gaps zero.
    cfg.vehicles[1].second.position = -27.0;
    cfg.vehicles[2].second.position = -54.0;
    try {
        validate_config(cfg);
        FAIL("expected a validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("already platooned") != std::string::npos);
    }
}

TEST_CASE("validation rejects a lead HDV and follower CAVs") {
    ScenarioConfig cfg = fixture_like();
    cfg.vehicles[0].first.kind = VehicleKind::HDV;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
    ScenarioConfig cfg2 = fixture_like();
    cfg2.vehicles[1].first.kind = VehicleKind::CAV;
    CHECK_THROWS_AS(validate_config(cfg2), std::invalid_argument);
}

TEST_CASE("validation rejects delays above the planning bound") {
    ScenarioConfig cfg = fixture_like();
    cfg.vehicles[1].first.eta = cfg.eta_bar + 0.1;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
}

TEST_CASE("validation rejects a formation deadline at or before entry") {
    ScenarioConfig cfg = fixture_like();
    cfg.t_p = cfg.t_c;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
}

TEST_CASE("warnings flag heterogeneous lengths but do not reject") {
    ScenarioConfig cfg = fixture_like();
    cfg.vehicles[2].first.length = 12.0;
    cfg.vehicles[2].second.position = -280.0;
    CHECK_NOTHROW(validate_config(cfg));
    CHECK(!config_warnings(cfg).empty());
    CHECK(config_warnings(fixture_like()).empty());
}
