#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tacsim/errors.hpp"
#include "tacsim/geometry.hpp"

namespace tacsim {

enum class Side { PlanExecuting, Opponent };
enum class EntityClass { Bomber, Fighter, CommandCenter, AntiAirThreat, MissileThreatRegion, AirPatrol };
enum class ValueClass { HighValue, Ordinary };
enum class Difficulty { Easy, Difficult };

const char* to_string(Side s);
const char* to_string(EntityClass c);
const char* to_string(ValueClass v);
const char* to_string(Difficulty d);
Side side_from_string(const std::string& s);
EntityClass entity_class_from_string(const std::string& s);
ValueClass value_class_from_string(const std::string& s);
Difficulty difficulty_from_string(const std::string& s);

// Bombers and command centers are high-value unless the scenario file says otherwise.
ValueClass default_value_class(EntityClass c);

struct WeaponSpec {
    std::string name;
    double p_base = 0.0;       // base hit probability in [0,1]
    double range = 0.0;        // maximum effective range, map units
    double rof_base = 1.0;     // firing interval, seconds per shot
    double damage = 0.0;       // health points per hit
    int ammo_capacity = 0;

    void validate(const std::string& path) const;
};

// Runtime movement / engagement commands held by the engine between ticks.
struct MoveCommand {
    Vec2 waypoint;
    double speed = 0.0;
};

struct EscortCommand {
    std::string ally_id;
    Vec2 offset;
};

struct SuppressWindow {
    std::string target_id;
    double start = 0.0;
    double until = 0.0;
};

struct EntityState {
    std::string id;
    Side side = Side::PlanExecuting;
    EntityClass cls = EntityClass::Bomber;
    Vec2 position;
    double heading = 0.0;      // radians
    double speed_max = 0.0;    // map units per second
    double health = 1.0;
    std::optional<WeaponSpec> weapon;
    int ammo = 0;
    std::optional<double> suppressed_until;
    std::optional<double> last_fire_time;
    ValueClass value_class = ValueClass::Ordinary;
    std::vector<Vec2> patrol;  // fixed waypoint loop for AirPatrol entities

    // Engine runtime state; never present in scenario files.
    std::optional<MoveCommand> active_move;
    std::optional<EscortCommand> active_escort;
    std::optional<SuppressWindow> active_suppress;

    bool alive() const { return health > 0.0; }
    bool suppressed_at(double now) const {
        return suppressed_until.has_value() && now < *suppressed_until;
    }
    void validate(const std::string& path, const MapBounds& bounds) const;
};

struct ConstraintSet {
    std::map<std::string, int> ammo_budget;            // per entity id
    std::map<EntityClass, double> speed_limits;        // map units per second
    std::vector<Circle> no_fly_zones;
    double min_launch_standoff = 0.0;
    double max_plan_duration = 0.0;                    // 0 = no explicit cap
    int max_simultaneous_launches = 0;                 // 0 = unlimited

    void validate(const std::string& path) const;
    // Effective per-class speed cap: min(entity speed_max, class limit if set).
    double speed_cap(EntityClass cls, double speed_max) const;
};

struct SimConfig {
    double dt = 0.1;             // seconds per tick
    double horizon = 20.0;       // seconds
    int mc_repetitions = 100;
    std::vector<std::uint64_t> seed_list;  // defaults to 1..mc_repetitions
    double alpha = 0.3;          // base hit-retention coefficient
    double beta = 0.7;           // distance-gain coefficient, alpha + beta = 1
    double gamma_rof = 2.0;      // firing-interval multiplier under suppression, > 1
    double lambda_hit = 0.5;     // hit-probability multiplier under suppression, in (0,1)
    double tau_sup = 3.0;        // suppression duration, seconds

    int tick_count() const;      // horizon / dt, validated integral
    void validate(const std::string& path) const;
};

struct PriorityWeights {
    double w_success = 1.0;
    double w_loss = 1.0;
    double w_time = 1.0;
};

// Partial overrides an intent may impose on the scenario constraint set.
struct ConstraintOverrides {
    std::map<std::string, int> ammo_budget;
    std::map<EntityClass, double> speed_limits;
    std::vector<Circle> extra_no_fly_zones;
    std::optional<double> min_launch_standoff;
    std::optional<double> max_plan_duration;
    std::optional<int> max_simultaneous_launches;
};

ConstraintSet apply_overrides(const ConstraintSet& base, const ConstraintOverrides& o);

struct Intent {
    std::string core_target_id;
    std::string objective = "DestroyCoreTarget";
    PriorityWeights priority_weights;
    ConstraintOverrides hard_constraints;

    void validate(const std::string& path) const;
};

struct Scenario {
    double map_width = 260.0;
    double map_height = 160.0;
    Difficulty difficulty = Difficulty::Easy;
    std::vector<EntityState> entities;   // ordering is the tie-break order for the whole rollout
    std::string core_target_id;
    ConstraintSet constraint_set;
    SimConfig sim_config;
    bool suppression_applies_damage = false;

    MapBounds bounds() const { return {map_width, map_height}; }
    // Index into `entities`, or -1 when absent.
    int entity_index(const std::string& id) const;
    const EntityState* find_entity(const std::string& id) const;
    const EntityState& core_target() const;

    void validate() const;
};

}  // namespace tacsim
