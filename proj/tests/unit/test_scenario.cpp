#include <doctest.h>

#include <filesystem>
#include <random>

#include "fixtures.hpp"
#include "tacsim/json_io.hpp"

using namespace tacsim;
namespace ts = tacsim::testsupport;

namespace {

std::string write_temp(const std::string& name, const std::string& contents) {
    const auto path = std::filesystem::temp_directory_path() / name;
    write_file(path.string(), contents);
    return path.string();
}

const char* kMinimalScenario = R"({
  "core_target_id": "CC-01",
  "entities": [
    {"id": "CC-01", "side": "Opponent", "class": "CommandCenter",
     "position": [230, 80], "speed_max": 0, "health": 10},
    {"id": "B-01", "side": "PlanExecuting", "class": "Bomber",
     "position": [40, 80], "speed_max": 14, "health": 10,
     "weapon": {"name": "m", "p_base": 0.9, "range": 24, "rof_base": 1.0,
                "damage": 10, "ammo_capacity": 6},
     "ammo": 6}
  ]
})";

}  // namespace

TEST_CASE("minimal scenario loads with defaults") {
    const std::string path = write_temp("tacsim_minimal.json", kMinimalScenario);
    const Scenario s = load_scenario(path);
    CHECK(s.sim_config.dt == doctest::Approx(0.1));
    CHECK(s.sim_config.horizon == doctest::Approx(20.0));
    CHECK(s.sim_config.mc_repetitions == 100);
    CHECK(s.sim_config.seed_list.size() == 100);
    CHECK(s.sim_config.seed_list.front() == 1);
    CHECK(s.sim_config.seed_list.back() == 100);
    CHECK(s.map_width == doctest::Approx(260.0));
    CHECK(s.map_height == doctest::Approx(160.0));
    // Default value-class mapping.
    CHECK(s.find_entity("B-01")->value_class == ValueClass::HighValue);
    CHECK(s.find_entity("CC-01")->value_class == ValueClass::HighValue);
}

TEST_CASE("alpha+beta must equal one at load") {
    json j = json::parse(kMinimalScenario);
    j["sim_config"] = json{{"alpha", 0.5}, {"beta", 0.6}};
    const std::string path = write_temp("tacsim_alphabeta.json", j.dump());
    CHECK_THROWS_WITH_AS(load_scenario(path), "alpha+beta must equal 1 (sim_config.alpha)",
                         InvariantError);
}

TEST_CASE("exactly one command center required") {
    json j = json::parse(kMinimalScenario);
    j["entities"][0]["class"] = "AntiAirThreat";
    const std::string path = write_temp("tacsim_nocc.json", j.dump());
    CHECK_THROWS_AS(load_scenario(path), InvariantError);

    json j2 = json::parse(kMinimalScenario);
    json extra = j2["entities"][0];
    extra["id"] = "CC-02";
    j2["entities"].push_back(extra);
    const std::string path2 = write_temp("tacsim_twocc.json", j2.dump());
    CHECK_THROWS_AS(load_scenario(path2), InvariantError);
}

TEST_CASE("malformed and unknown-field files are rejected") {
    const std::string bad = write_temp("tacsim_bad.json", "{ not json");
    CHECK_THROWS_AS(load_scenario(bad), ParseError);

    json j = json::parse(kMinimalScenario);
    j["surprise_field"] = 1;
    const std::string unknown = write_temp("tacsim_unknown.json", j.dump());
    CHECK_THROWS_AS(load_scenario(unknown), SchemaError);

    json j2 = json::parse(kMinimalScenario);
    j2.erase("core_target_id");
    const std::string missing = write_temp("tacsim_missing.json", j2.dump());
    CHECK_THROWS_AS(load_scenario(missing), SchemaError);
}

TEST_CASE("scenario serialization round-trips canonically") {
    const Scenario s = ts::template_scenario();
    const json j = scenario_to_json(s);
    const std::string bytes = canonical_dump(j);
    const Scenario s2 = scenario_from_json(json::parse(bytes));
    CHECK(canonical_dump(scenario_to_json(s2)) == bytes);
    // Entity ordering is stable under the round trip.
    REQUIRE(s2.entities.size() == s.entities.size());
    for (std::size_t i = 0; i < s.entities.size(); ++i) {
        CHECK(s2.entities[i].id == s.entities[i].id);
    }
    CHECK(json_digest(scenario_to_json(s2)) == json_digest(j));
}

TEST_CASE("canonical floats render with 17 significant digits") {
    const json j{{"x", 0.1}};
    CHECK(canonical_dump(j) == "{\"x\":0.10000000000000001}");
    const json sorted{{"b", 1}, {"a", 2}};
    CHECK(canonical_dump(sorted) == "{\"a\":2,\"b\":1}");
}

TEST_CASE("plan files round-trip and reject unknown fields") {
    const Scenario s = ts::duel_scenario();
    const CandidatePlan p = ts::straight_plan(s);
    const std::string bytes = canonical_dump(plan_to_json(p));
    const CandidatePlan p2 = plan_from_json(json::parse(bytes));
    CHECK(canonical_dump(plan_to_json(p2)) == bytes);
    CHECK(p2.actions.size() == p.actions.size());

    json j = json::parse(bytes);
    j["actions"][0]["mystery"] = true;
    CHECK_THROWS_AS(plan_from_json(j), SchemaError);
}

TEST_CASE("validate_plan_shape flags structural defects") {
    const Scenario s = ts::duel_scenario();
    CandidatePlan good = ts::straight_plan(s);
    CHECK(validate_plan_shape(good, s).empty());

    SUBCASE("unknown actor") {
        CandidatePlan p = good;
        p.actions.push_back({"B-99", 1.0, LaunchAction{"m", "CC-01"}});
        std::stable_sort(p.actions.begin(), p.actions.end(), action_order_less);
        const auto defects = validate_plan_shape(p, s);
        REQUIRE(defects.size() == 1);
        CHECK(defects[0].code == PlanDefectCode::UnknownActor);
        CHECK(defects[0].detail == "B-99");
    }
    SUBCASE("action beyond horizon") {
        CandidatePlan p = good;
        p.actions.push_back({"B-01", 25.0, LaunchAction{"m", "CC-01"}});
        const auto defects = validate_plan_shape(p, s);
        REQUIRE(defects.size() == 1);
        CHECK(defects[0].code == PlanDefectCode::ActionBeyondHorizon);
    }
    SUBCASE("unsorted actions") {
        CandidatePlan p = good;
        std::reverse(p.actions.begin(), p.actions.end());
        const auto defects = validate_plan_shape(p, s);
        CHECK(!defects.empty());
        bool unsorted = false;
        for (const auto& d : defects) unsorted |= d.code == PlanDefectCode::ActionsUnsorted;
        CHECK(unsorted);
    }
    SUBCASE("trajectory coverage") {
        CandidatePlan p = good;
        p.planned_trajectories["B-01"].pop_back();
        auto defects = validate_plan_shape(p, s);
        REQUIRE(defects.size() == 1);
        CHECK(defects[0].code == PlanDefectCode::TrajectoryIncomplete);
        p.planned_trajectories.erase("B-01");
        defects = validate_plan_shape(p, s);
        REQUIRE(defects.size() == 1);
        CHECK(defects[0].code == PlanDefectCode::TrajectoryMissing);
    }
}

TEST_CASE("intent validation and constraint overrides") {
    Intent i = ts::template_intent();
    i.validate("intent");

    Intent zero = i;
    zero.priority_weights = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(zero.validate("intent"), InvariantError);

    ConstraintSet base;
    base.min_launch_standoff = 10.0;
    base.ammo_budget["B-01"] = 4;
    ConstraintOverrides o;
    o.min_launch_standoff = 5.0;
    o.ammo_budget["B-01"] = 2;
    o.extra_no_fly_zones.push_back({{10.0, 10.0}, 3.0});
    const ConstraintSet merged = apply_overrides(base, o);
    CHECK(merged.min_launch_standoff == doctest::Approx(5.0));
    CHECK(merged.ammo_budget.at("B-01") == 2);
    CHECK(merged.no_fly_zones.size() == 1);
}

TEST_CASE("entity invariants are enforced") {
    Scenario s = ts::duel_scenario();
    s.entities[0].ammo = 99;  // above capacity
    CHECK_THROWS_AS(s.validate(), InvariantError);

    Scenario s2 = ts::duel_scenario();
    s2.entities[0].position = {-5.0, 0.0};
    CHECK_THROWS_AS(s2.validate(), InvariantError);

    Scenario s3 = ts::duel_scenario();
    s3.entities[0].weapon.reset();
    s3.entities[0].ammo = 1;
    CHECK_THROWS_AS(s3.validate(), InvariantError);
}

TEST_CASE("randomized plans round-trip to stable canonical bytes") {
    const Scenario s = ts::template_scenario();
    std::mt19937 gen(61);
    std::uniform_real_distribution<double> coord_x(0.0, 260.0);
    std::uniform_real_distribution<double> coord_y(0.0, 160.0);
    std::uniform_real_distribution<double> t_dist(0.0, 20.0);
    std::uniform_int_distribution<int> kind(0, 3);
    const std::vector<std::string> blue{"B-01", "B-02", "F-01", "F-02"};

    for (int trial = 0; trial < 50; ++trial) {
        CandidatePlan p;
        p.plan_id = "rand-" + std::to_string(trial);
        std::uniform_int_distribution<int> n_actions(0, 12);
        const int n = n_actions(gen);
        for (int i = 0; i < n; ++i) {
            AtomicAction a;
            a.actor_id = blue[static_cast<std::size_t>(gen() % blue.size())];
            a.t_start = t_dist(gen);
            switch (kind(gen)) {
                case 0: a.body = MoveToAction{{coord_x(gen), coord_y(gen)}, t_dist(gen)}; break;
                case 1: a.body = LaunchAction{"bomber-missile", "CC-01"}; break;
                case 2: a.body = SuppressAction{"AAT-01", t_dist(gen)}; break;
                default: a.body = EscortAction{"B-01", {coord_x(gen) / 50.0, coord_y(gen) / 50.0}};
            }
            p.actions.push_back(std::move(a));
        }
        std::stable_sort(p.actions.begin(), p.actions.end(), action_order_less);
        p.planned_trajectories =
            integrate_plan_kinematics(p.actions, s, s.sim_config.tick_count());
        p.metadata["trial"] = std::to_string(trial);

        const std::string bytes = canonical_dump(plan_to_json(p));
        const CandidatePlan back = plan_from_json(json::parse(bytes));
        CHECK(canonical_dump(plan_to_json(back)) == bytes);
        CHECK(back.actions.size() == p.actions.size());
    }
}

TEST_CASE("seed range parsing") {
    CHECK(parse_seed_range("1..100").size() == 100);
    CHECK(parse_seed_range("7").size() == 1);
    CHECK(parse_seed_range("3..3") == std::vector<std::uint64_t>{3});
    CHECK_THROWS_AS(parse_seed_range("9..2"), SchemaError);
    CHECK_THROWS_AS(parse_seed_range("abc"), SchemaError);
}
