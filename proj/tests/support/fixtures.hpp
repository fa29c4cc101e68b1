#pragma once

// Shared scenario and plan builders for the unit and acceptance suites.

#include <cstdint>
#include <string>
#include <vector>

#include "tacsim/planner.hpp"
#include "tacsim/sim_engine.hpp"
#include "tacsim/types.hpp"

namespace tacsim::testsupport {

inline WeaponSpec bomber_missile() {
    return {"bomber-missile", 0.9, 24.0, 1.0, 10.0, 6};
}

inline WeaponSpec fighter_missile() {
    return {"fighter-missile", 0.7, 22.0, 1.0, 4.0, 8};
}

inline WeaponSpec sam(double p_base = 0.5, double range = 32.0, double rof = 1.2) {
    return {"sam", p_base, range, rof, 5.0, 40};
}

inline EntityState make_entity(std::string id, Side side, EntityClass cls, Vec2 pos,
                               double speed_max, double health,
                               std::optional<WeaponSpec> weapon = std::nullopt) {
    EntityState e;
    e.id = std::move(id);
    e.side = side;
    e.cls = cls;
    e.position = pos;
    e.speed_max = speed_max;
    e.health = health;
    if (weapon) {
        e.weapon = weapon;
        e.ammo = weapon->ammo_capacity;
    }
    e.value_class = default_value_class(cls);
    return e;
}

inline Scenario base_scenario() {
    Scenario s;
    s.map_width = 260.0;
    s.map_height = 160.0;
    s.core_target_id = "CC-01";
    s.sim_config.dt = 0.1;
    s.sim_config.horizon = 20.0;
    s.sim_config.mc_repetitions = 100;
    for (int i = 1; i <= 100; ++i) s.sim_config.seed_list.push_back(i);
    s.constraint_set.min_launch_standoff = 18.0;
    s.constraint_set.max_plan_duration = 20.0;
    s.constraint_set.max_simultaneous_launches = 2;
    return s;
}

// One bomber against an undefended command center.
inline Scenario duel_scenario() {
    Scenario s = base_scenario();
    s.entities.push_back(
        make_entity("B-01", Side::PlanExecuting, EntityClass::Bomber, {40.0, 80.0}, 14.0, 10.0,
                    bomber_missile()));
    s.entities.push_back(
        make_entity("CC-01", Side::Opponent, EntityClass::CommandCenter, {230.0, 80.0}, 0.0, 10.0));
    s.validate();
    return s;
}

// Bomber plus suppression fighter against a guarded command center.
inline Scenario suppression_scenario() {
    Scenario s = base_scenario();
    s.entities.push_back(
        make_entity("B-01", Side::PlanExecuting, EntityClass::Bomber, {40.0, 80.0}, 14.0, 10.0,
                    bomber_missile()));
    s.entities.push_back(
        make_entity("F-01", Side::PlanExecuting, EntityClass::Fighter, {40.0, 60.0}, 16.0, 8.0,
                    fighter_missile()));
    s.entities.push_back(
        make_entity("CC-01", Side::Opponent, EntityClass::CommandCenter, {230.0, 80.0}, 0.0, 10.0));
    s.entities.push_back(make_entity("AAT-01", Side::Opponent, EntityClass::AntiAirThreat,
                                     {205.0, 80.0}, 0.0, 8.0, sam()));
    s.validate();
    return s;
}

// Appendix-style template: two bombers, two fighters, layered defense.
inline Scenario template_scenario(Difficulty difficulty = Difficulty::Easy) {
    Scenario s = base_scenario();
    s.difficulty = difficulty;
    s.entities.push_back(
        make_entity("B-01", Side::PlanExecuting, EntityClass::Bomber, {40.0, 70.0}, 14.0, 10.0,
                    bomber_missile()));
    s.entities.push_back(
        make_entity("B-02", Side::PlanExecuting, EntityClass::Bomber, {40.0, 90.0}, 14.0, 10.0,
                    bomber_missile()));
    s.entities.push_back(
        make_entity("F-01", Side::PlanExecuting, EntityClass::Fighter, {36.0, 56.0}, 16.0, 8.0,
                    fighter_missile()));
    s.entities.push_back(
        make_entity("F-02", Side::PlanExecuting, EntityClass::Fighter, {36.0, 104.0}, 16.0, 8.0,
                    fighter_missile()));
    s.entities.push_back(
        make_entity("CC-01", Side::Opponent, EntityClass::CommandCenter, {230.0, 80.0}, 0.0, 10.0));
    s.entities.push_back(make_entity("AAT-01", Side::Opponent, EntityClass::AntiAirThreat,
                                     {150.0, 80.0}, 0.0, 8.0, sam(0.5, 32.0)));
    s.entities.push_back(make_entity("AAT-02", Side::Opponent, EntityClass::AntiAirThreat,
                                     {212.0, 78.0}, 0.0, 8.0, sam(0.45, 30.0)));
    if (difficulty == Difficulty::Difficult) {
        s.entities.push_back(make_entity("AAT-03", Side::Opponent, EntityClass::AntiAirThreat,
                                         {180.0, 120.0}, 0.0, 8.0, sam(0.5, 30.0)));
        s.entities.push_back(make_entity("MTR-01", Side::Opponent,
                                         EntityClass::MissileThreatRegion, {180.0, 40.0}, 0.0,
                                         10.0, WeaponSpec{"area-sam", 0.35, 24.0, 2.0, 4.0, 20}));
        EntityState ap = make_entity("AP-01", Side::Opponent, EntityClass::AirPatrol,
                                     {190.0, 50.0}, 15.0, 6.0,
                                     WeaponSpec{"ap-missile", 0.45, 14.0, 1.5, 4.0, 10});
        ap.patrol = {{190.0, 50.0}, {190.0, 110.0}};
        s.entities.push_back(ap);
    }
    s.constraint_set.no_fly_zones.push_back({{120.0, 30.0}, 14.0});
    s.validate();
    return s;
}

inline Intent template_intent() {
    Intent i;
    i.core_target_id = "CC-01";
    i.priority_weights = {1.0, 0.5, 0.2};
    return i;
}

// Fixed evaluation suite used by the directional acceptance checks. The core
// target keeps a point-defense whose coverage no route can avoid, a mid-field
// defense sits on the direct corridor, and a mobile interceptor idles away
// from the action where only a predicting opponent will commit it.
inline Scenario suite_scenario(int i) {
    Scenario s = base_scenario();
    s.difficulty = Difficulty::Easy;
    const double cc_y = 72.0 + 4.0 * (i % 3);
    const Vec2 cc{228.0, cc_y};

    // One defense hit downs a bomber: suppression and decoys decide runs.
    s.entities.push_back(make_entity("B-01", Side::PlanExecuting, EntityClass::Bomber,
                                     {40.0, cc_y - 8.0}, 14.0, 5.0, bomber_missile()));
    s.entities.push_back(make_entity("B-02", Side::PlanExecuting, EntityClass::Bomber,
                                     {40.0, cc_y + 8.0}, 14.0, 5.0, bomber_missile()));
    s.entities.push_back(make_entity("F-01", Side::PlanExecuting, EntityClass::Fighter,
                                     {34.0, cc_y - 22.0}, 16.0, 8.0, fighter_missile()));
    s.entities.push_back(make_entity("F-02", Side::PlanExecuting, EntityClass::Fighter,
                                     {34.0, cc_y + 22.0}, 16.0, 8.0, fighter_missile()));
    s.entities.push_back(
        make_entity("CC-01", Side::Opponent, EntityClass::CommandCenter, cc, 0.0, 10.0));

    // Point defense over the launch pocket: every point within launch range
    // of the target is inside its engagement circle, and its fire rate makes
    // an unsuppressed, undecoyed approach expensive.
    s.entities.push_back(make_entity("AAT-G", Side::Opponent, EntityClass::AntiAirThreat,
                                     {cc.x - 6.0, cc_y + (i % 2 ? 2.0 : -2.0)}, 0.0, 8.0,
                                     sam(0.5, 28.0, 0.8)));
    // Mid-field defense on or near the direct corridor.
    const double mid_x = 128.0 + 6.0 * (i % 4);
    const double mid_y = cc_y + ((i % 2 == 0) ? -8.0 : 12.0);
    s.entities.push_back(make_entity("AAT-01", Side::Opponent, EntityClass::AntiAirThreat,
                                     {mid_x, mid_y}, 0.0, 8.0,
                                     sam(0.45 + 0.02 * (i % 3), 30.0)));
    const double ap_y = (i % 2 == 0) ? 24.0 : 136.0;
    EntityState ap = make_entity("AP-01", Side::Opponent, EntityClass::AirPatrol, {168.0, ap_y},
                                 15.0, 6.0, WeaponSpec{"ap-missile", 0.5, 14.0, 1.5, 5.0, 10});
    ap.patrol = {{168.0, ap_y}, {188.0, ap_y}};
    s.entities.push_back(ap);

    if (i >= 5) {
        s.entities.push_back(make_entity(
            "AAT-03", Side::Opponent, EntityClass::AntiAirThreat,
            {mid_x + 30.0, cc_y - ((i % 2 == 0) ? -14.0 : 10.0)}, 0.0, 8.0, sam(0.45, 26.0)));
    }
    s.validate();
    return s;
}

// Hand-built plan: every bomber flies straight at the core target and fires
// once inside `threshold` (defaults to the standoff rule).
inline CandidatePlan straight_plan(const Scenario& s, double threshold = -1.0) {
    const EntityState& core = s.core_target();
    std::vector<AtomicAction> actions;
    for (const EntityState& e : s.entities) {
        if (e.side != Side::PlanExecuting || e.cls != EntityClass::Bomber) continue;
        actions.push_back({e.id, 0.0, MoveToAction{core.position, e.speed_max}});
    }
    auto traj = integrate_plan_kinematics(actions, s, s.sim_config.tick_count());
    for (const EntityState& e : s.entities) {
        if (e.side != Side::PlanExecuting || e.cls != EntityClass::Bomber || !e.weapon) continue;
        double th = threshold;
        if (th < 0.0) {
            th = s.constraint_set.min_launch_standoff > 0.0
                     ? std::min(e.weapon->range, s.constraint_set.min_launch_standoff)
                     : e.weapon->range;
        }
        const auto& points = traj.at(e.id);
        for (std::size_t t = 0; t < points.size(); ++t) {
            if (distance(points[t], core.position) <= th) {
                actions.push_back({e.id, static_cast<double>(t) * s.sim_config.dt,
                                   LaunchAction{e.weapon->name, core.id}});
                break;
            }
        }
    }
    std::stable_sort(actions.begin(), actions.end(), action_order_less);
    CandidatePlan p;
    p.plan_id = "straight";
    p.actions = std::move(actions);
    p.planned_trajectories = integrate_plan_kinematics(p.actions, s, s.sim_config.tick_count());
    return p;
}

}  // namespace tacsim::testsupport
