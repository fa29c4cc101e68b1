#include "tacsim/types.hpp"

#include <cmath>

namespace tacsim {

const char* to_string(Side s) {
    return s == Side::PlanExecuting ? "PlanExecuting" : "Opponent";
}

const char* to_string(EntityClass c) {
    switch (c) {
        case EntityClass::Bomber: return "Bomber";
        case EntityClass::Fighter: return "Fighter";
        case EntityClass::CommandCenter: return "CommandCenter";
        case EntityClass::AntiAirThreat: return "AntiAirThreat";
        case EntityClass::MissileThreatRegion: return "MissileThreatRegion";
        case EntityClass::AirPatrol: return "AirPatrol";
    }
    return "";
}

const char* to_string(ValueClass v) {
    return v == ValueClass::HighValue ? "HighValue" : "Ordinary";
}

const char* to_string(Difficulty d) {
    return d == Difficulty::Easy ? "Easy" : "Difficult";
}

Side side_from_string(const std::string& s) {
    if (s == "PlanExecuting") return Side::PlanExecuting;
    if (s == "Opponent") return Side::Opponent;
    throw SchemaError("unknown side '" + s + "'");
}

EntityClass entity_class_from_string(const std::string& s) {
    if (s == "Bomber") return EntityClass::Bomber;
    if (s == "Fighter") return EntityClass::Fighter;
    if (s == "CommandCenter") return EntityClass::CommandCenter;
    if (s == "AntiAirThreat") return EntityClass::AntiAirThreat;
    if (s == "MissileThreatRegion") return EntityClass::MissileThreatRegion;
    if (s == "AirPatrol") return EntityClass::AirPatrol;
    throw SchemaError("unknown entity class '" + s + "'");
}

ValueClass value_class_from_string(const std::string& s) {
    if (s == "HighValue") return ValueClass::HighValue;
    if (s == "Ordinary") return ValueClass::Ordinary;
    throw SchemaError("unknown value class '" + s + "'");
}

Difficulty difficulty_from_string(const std::string& s) {
    if (s == "Easy") return Difficulty::Easy;
    if (s == "Difficult") return Difficulty::Difficult;
    throw SchemaError("unknown difficulty '" + s + "'");
}

ValueClass default_value_class(EntityClass c) {
    return (c == EntityClass::Bomber || c == EntityClass::CommandCenter)
               ? ValueClass::HighValue
               : ValueClass::Ordinary;
}

void WeaponSpec::validate(const std::string& path) const {
    if (name.empty()) throw InvariantError("weapon name empty (" + path + ".name)");
    if (!(p_base >= 0.0 && p_base <= 1.0))
        throw InvariantError("p_base must lie in [0,1] (" + path + ".p_base)");
    if (!(range > 0.0)) throw InvariantError("range must be > 0 (" + path + ".range)");
    if (!(rof_base > 0.0)) throw InvariantError("rof_base must be > 0 (" + path + ".rof_base)");
    if (!(damage > 0.0)) throw InvariantError("damage must be > 0 (" + path + ".damage)");
    if (ammo_capacity < 0)
        throw InvariantError("ammo_capacity must be >= 0 (" + path + ".ammo_capacity)");
}

void EntityState::validate(const std::string& path, const MapBounds& bounds) const {
    if (id.empty()) throw InvariantError("entity id empty (" + path + ".id)");
    if (!position.finite()) throw InvariantError("position not finite (" + path + ".position)");
    if (!bounds.contains(position))
        throw InvariantError("position outside map bounds (" + path + ".position)");
    if (!(speed_max >= 0.0)) throw InvariantError("speed_max must be >= 0 (" + path + ".speed_max)");
    if (!(health >= 0.0) || !std::isfinite(health))
        throw InvariantError("health must be a finite non-negative value (" + path + ".health)");
    if (weapon) {
        weapon->validate(path + ".weapon");
        if (ammo < 0 || ammo > weapon->ammo_capacity)
            throw InvariantError("ammo must lie in [0, ammo_capacity] (" + path + ".ammo)");
    } else if (ammo != 0) {
        throw InvariantError("ammo must be 0 without a weapon (" + path + ".ammo)");
    }
    for (const Vec2& p : patrol) {
        if (!p.finite() || !bounds.contains(p))
            throw InvariantError("patrol waypoint outside map bounds (" + path + ".patrol)");
    }
}

void ConstraintSet::validate(const std::string& path) const {
    for (const auto& [id, budget] : ammo_budget) {
        if (budget < 0)
            throw InvariantError("ammo budget must be >= 0 (" + path + ".ammo_budget." + id + ")");
    }
    for (const auto& [cls, limit] : speed_limits) {
        if (!(limit >= 0.0))
            throw InvariantError(std::string("speed limit must be >= 0 (") + path +
                                 ".speed_limits." + to_string(cls) + ")");
    }
    for (std::size_t i = 0; i < no_fly_zones.size(); ++i) {
        if (!(no_fly_zones[i].radius >= 0.0) || !no_fly_zones[i].center.finite())
            throw InvariantError(path + ".no_fly_zones[" + std::to_string(i) + "] malformed");
    }
    if (!(min_launch_standoff >= 0.0))
        throw InvariantError("min_launch_standoff must be >= 0 (" + path + ".min_launch_standoff)");
    if (!(max_plan_duration >= 0.0))
        throw InvariantError("max_plan_duration must be >= 0 (" + path + ".max_plan_duration)");
    if (max_simultaneous_launches < 0)
        throw InvariantError("max_simultaneous_launches must be >= 0 (" + path +
                             ".max_simultaneous_launches)");
}

double ConstraintSet::speed_cap(EntityClass cls, double speed_max) const {
    auto it = speed_limits.find(cls);
    if (it == speed_limits.end()) return speed_max;
    return std::min(speed_max, it->second);
}

int SimConfig::tick_count() const {
    return static_cast<int>(std::llround(horizon / dt));
}

void SimConfig::validate(const std::string& path) const {
    if (!(dt > 0.0)) throw InvariantError("dt must be > 0 (" + path + ".dt)");
    if (!(horizon > 0.0)) throw InvariantError("horizon must be > 0 (" + path + ".horizon)");
    const double ticks = horizon / dt;
    if (std::abs(ticks - std::llround(ticks)) > 1e-9)
        throw InvariantError("horizon/dt must be an integer number of ticks (" + path + ".horizon)");
    if (mc_repetitions < 1)
        throw InvariantError("mc_repetitions must be >= 1 (" + path + ".mc_repetitions)");
    if (std::abs(alpha + beta - 1.0) > 1e-12)
        throw InvariantError("alpha+beta must equal 1 (" + path + ".alpha)");
    if (!(alpha >= 0.0 && beta >= 0.0))
        throw InvariantError("alpha and beta must be >= 0 (" + path + ".alpha)");
    if (!(gamma_rof > 1.0))
        throw InvariantError("gamma_rof must be > 1 (" + path + ".gamma_rof)");
    if (!(lambda_hit > 0.0 && lambda_hit < 1.0))
        throw InvariantError("lambda_hit must lie in (0,1) (" + path + ".lambda_hit)");
    if (!(tau_sup > 0.0)) throw InvariantError("tau_sup must be > 0 (" + path + ".tau_sup)");
}

ConstraintSet apply_overrides(const ConstraintSet& base, const ConstraintOverrides& o) {
    ConstraintSet out = base;
    for (const auto& [id, budget] : o.ammo_budget) out.ammo_budget[id] = budget;
    for (const auto& [cls, limit] : o.speed_limits) out.speed_limits[cls] = limit;
    out.no_fly_zones.insert(out.no_fly_zones.end(), o.extra_no_fly_zones.begin(),
                            o.extra_no_fly_zones.end());
    if (o.min_launch_standoff) out.min_launch_standoff = *o.min_launch_standoff;
    if (o.max_plan_duration) out.max_plan_duration = *o.max_plan_duration;
    if (o.max_simultaneous_launches) out.max_simultaneous_launches = *o.max_simultaneous_launches;
    return out;
}

void Intent::validate(const std::string& path) const {
    if (core_target_id.empty())
        throw InvariantError("core_target_id empty (" + path + ".core_target_id)");
    if (objective != "DestroyCoreTarget")
        throw InvariantError("unknown objective '" + objective + "' (" + path + ".objective)");
    const auto& w = priority_weights;
    if (!(w.w_success >= 0.0 && w.w_loss >= 0.0 && w.w_time >= 0.0))
        throw InvariantError("priority weights must be >= 0 (" + path + ".priority_weights)");
    if (w.w_success == 0.0 && w.w_loss == 0.0 && w.w_time == 0.0)
        throw InvariantError("priority weights must not all be zero (" + path + ".priority_weights)");
}

int Scenario::entity_index(const std::string& id) const {
    for (std::size_t i = 0; i < entities.size(); ++i) {
        if (entities[i].id == id) return static_cast<int>(i);
    }
    return -1;
}

const EntityState* Scenario::find_entity(const std::string& id) const {
    const int i = entity_index(id);
    return i < 0 ? nullptr : &entities[static_cast<std::size_t>(i)];
}

const EntityState& Scenario::core_target() const {
    const EntityState* e = find_entity(core_target_id);
    if (!e) throw InvariantError("core_target_id refers to no entity (core_target_id)");
    return *e;
}

void Scenario::validate() const {
    if (!(map_width > 0.0) || !(map_height > 0.0))
        throw InvariantError("map dimensions must be positive (map_width)");
    sim_config.validate("sim_config");
    constraint_set.validate("constraint_set");

    const MapBounds b = bounds();
    int command_centers = 0;
    std::map<std::string, int> seen;
    for (std::size_t i = 0; i < entities.size(); ++i) {
        const std::string path = "entities[" + std::to_string(i) + "]";
        entities[i].validate(path, b);
        if (++seen[entities[i].id] > 1)
            throw InvariantError("duplicate entity id '" + entities[i].id + "' (" + path + ".id)");
        if (entities[i].cls == EntityClass::CommandCenter &&
            entities[i].side == Side::Opponent) {
            ++command_centers;
        }
    }
    if (command_centers != 1)
        throw InvariantError("exactly one CommandCenter required on the Opponent side (entities)");
    const EntityState* core = find_entity(core_target_id);
    if (!core || core->cls != EntityClass::CommandCenter || core->side != Side::Opponent)
        throw InvariantError("core_target_id must name the opponent CommandCenter (core_target_id)");
}

}  // namespace tacsim
