#include "tacsim/json_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tacsim/sha256.hpp"

namespace tacsim {

namespace {

void dump_into(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out.push_back('{');
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                out += json(it.key()).dump();
                out.push_back(':');
                dump_into(it.value(), out);
            }
            out.push_back('}');
            break;
        }
        case json::value_t::array: {
            out.push_back('[');
            bool first = true;
            for (const auto& v : j) {
                if (!first) out.push_back(',');
                first = false;
                dump_into(v, out);
            }
            out.push_back(']');
            break;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) throw InvariantError("non-finite float in canonical output");
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out += buf;
            break;
        }
        case json::value_t::number_integer: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%" PRId64, j.get<std::int64_t>());
            out += buf;
            break;
        }
        case json::value_t::number_unsigned: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%" PRIu64, j.get<std::uint64_t>());
            out += buf;
            break;
        }
        case json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            break;
        case json::value_t::string:
            out += j.dump();
            break;
        case json::value_t::null:
            out += "null";
            break;
        default:
            throw InvariantError("unsupported JSON value in canonical output");
    }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    if (!j.is_object()) throw SchemaError("expected object (" + path + ")");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw SchemaError("unknown field '" + it.key() + "' (" + path + ")");
    }
}

const json& req(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError("missing field '" + key + "' (" + path + ")");
    return *it;
}

double as_num(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError("expected number (" + path + ")");
    return j.get<double>();
}

std::int64_t as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer() && !j.is_number_unsigned())
        throw SchemaError("expected integer (" + path + ")");
    return j.get<std::int64_t>();
}

std::string as_str(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError("expected string (" + path + ")");
    return j.get<std::string>();
}

Vec2 as_vec2(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2)
        throw SchemaError("expected [x, y] (" + path + ")");
    return {as_num(j[0], path + "[0]"), as_num(j[1], path + "[1]")};
}

json vec2_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

}  // namespace

std::string canonical_dump(const json& j) {
    std::string out;
    out.reserve(256);
    dump_into(j, out);
    return out;
}

std::string json_digest(const json& j) { return sha256_hex(canonical_dump(j)); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write file '" + path + "'");
    out << contents;
}

// --- Weapon ----------------------------------------------------------------

static json weapon_to_json(const WeaponSpec& w) {
    return json{{"name", w.name},         {"p_base", w.p_base},
                {"range", w.range},       {"rof_base", w.rof_base},
                {"damage", w.damage},     {"ammo_capacity", w.ammo_capacity}};
}

static WeaponSpec weapon_from_json(const json& j, const std::string& path) {
    check_keys(j, {"name", "p_base", "range", "rof_base", "damage", "ammo_capacity"}, path);
    WeaponSpec w;
    w.name = as_str(req(j, "name", path), path + ".name");
    w.p_base = as_num(req(j, "p_base", path), path + ".p_base");
    w.range = as_num(req(j, "range", path), path + ".range");
    w.rof_base = as_num(req(j, "rof_base", path), path + ".rof_base");
    w.damage = as_num(req(j, "damage", path), path + ".damage");
    w.ammo_capacity = static_cast<int>(as_int(req(j, "ammo_capacity", path), path + ".ammo_capacity"));
    return w;
}

// --- Entity ----------------------------------------------------------------

static json entity_to_json(const EntityState& e, bool runtime) {
    json j{{"id", e.id},
           {"side", to_string(e.side)},
           {"class", to_string(e.cls)},
           {"position", vec2_to_json(e.position)},
           {"heading", e.heading},
           {"speed_max", e.speed_max},
           {"health", e.health},
           {"weapon", e.weapon ? weapon_to_json(*e.weapon) : json()},
           {"ammo", e.ammo},
           {"value_class", to_string(e.value_class)}};
    if (!e.patrol.empty()) {
        json arr = json::array();
        for (const Vec2& p : e.patrol) arr.push_back(vec2_to_json(p));
        j["patrol"] = arr;
    }
    if (runtime) {
        j["suppressed_until"] = e.suppressed_until ? json(*e.suppressed_until) : json();
        j["last_fire_time"] = e.last_fire_time ? json(*e.last_fire_time) : json();
        j["active_move"] = e.active_move
                               ? json{{"waypoint", vec2_to_json(e.active_move->waypoint)},
                                      {"speed", e.active_move->speed}}
                               : json();
        j["active_escort"] = e.active_escort
                                 ? json{{"ally_id", e.active_escort->ally_id},
                                        {"offset", vec2_to_json(e.active_escort->offset)}}
                                 : json();
        j["active_suppress"] = e.active_suppress
                                   ? json{{"target_id", e.active_suppress->target_id},
                                          {"start", e.active_suppress->start},
                                          {"until", e.active_suppress->until}}
                                   : json();
    }
    return j;
}

static EntityState entity_from_json(const json& j, const std::string& path) {
    check_keys(j,
               {"id", "side", "class", "position", "heading", "speed_max", "health", "weapon",
                "ammo", "value_class", "patrol"},
               path);
    EntityState e;
    e.id = as_str(req(j, "id", path), path + ".id");
    e.side = side_from_string(as_str(req(j, "side", path), path + ".side"));
    e.cls = entity_class_from_string(as_str(req(j, "class", path), path + ".class"));
    e.position = as_vec2(req(j, "position", path), path + ".position");
    if (j.contains("heading")) e.heading = as_num(j["heading"], path + ".heading");
    e.speed_max = as_num(req(j, "speed_max", path), path + ".speed_max");
    e.health = as_num(req(j, "health", path), path + ".health");
    if (j.contains("weapon") && !j["weapon"].is_null())
        e.weapon = weapon_from_json(j["weapon"], path + ".weapon");
    if (j.contains("ammo")) e.ammo = static_cast<int>(as_int(j["ammo"], path + ".ammo"));
    e.value_class = j.contains("value_class")
                        ? value_class_from_string(as_str(j["value_class"], path + ".value_class"))
                        : default_value_class(e.cls);
    if (j.contains("patrol")) {
        for (std::size_t i = 0; i < j["patrol"].size(); ++i)
            e.patrol.push_back(as_vec2(j["patrol"][i], path + ".patrol[" + std::to_string(i) + "]"));
    }
    return e;
}

// --- Constraints -----------------------------------------------------------

static json constraints_to_json(const ConstraintSet& c) {
    json budget = json::object();
    for (const auto& [id, b] : c.ammo_budget) budget[id] = b;
    json limits = json::object();
    for (const auto& [cls, v] : c.speed_limits) limits[to_string(cls)] = v;
    json zones = json::array();
    for (const Circle& z : c.no_fly_zones)
        zones.push_back(json{{"center", vec2_to_json(z.center)}, {"radius", z.radius}});
    return json{{"ammo_budget", budget},
                {"speed_limits", limits},
                {"no_fly_zones", zones},
                {"min_launch_standoff", c.min_launch_standoff},
                {"max_plan_duration", c.max_plan_duration},
                {"max_simultaneous_launches", c.max_simultaneous_launches}};
}

static Circle circle_from_json(const json& j, const std::string& path) {
    check_keys(j, {"center", "radius"}, path);
    return {as_vec2(req(j, "center", path), path + ".center"),
            as_num(req(j, "radius", path), path + ".radius")};
}

static ConstraintSet constraints_from_json(const json& j, const std::string& path) {
    check_keys(j,
               {"ammo_budget", "speed_limits", "no_fly_zones", "min_launch_standoff",
                "max_plan_duration", "max_simultaneous_launches"},
               path);
    ConstraintSet c;
    if (j.contains("ammo_budget")) {
        for (auto it = j["ammo_budget"].begin(); it != j["ammo_budget"].end(); ++it)
            c.ammo_budget[it.key()] =
                static_cast<int>(as_int(it.value(), path + ".ammo_budget." + it.key()));
    }
    if (j.contains("speed_limits")) {
        for (auto it = j["speed_limits"].begin(); it != j["speed_limits"].end(); ++it)
            c.speed_limits[entity_class_from_string(it.key())] =
                as_num(it.value(), path + ".speed_limits." + it.key());
    }
    if (j.contains("no_fly_zones")) {
        for (std::size_t i = 0; i < j["no_fly_zones"].size(); ++i)
            c.no_fly_zones.push_back(circle_from_json(
                j["no_fly_zones"][i], path + ".no_fly_zones[" + std::to_string(i) + "]"));
    }
    if (j.contains("min_launch_standoff"))
        c.min_launch_standoff = as_num(j["min_launch_standoff"], path + ".min_launch_standoff");
    if (j.contains("max_plan_duration"))
        c.max_plan_duration = as_num(j["max_plan_duration"], path + ".max_plan_duration");
    if (j.contains("max_simultaneous_launches"))
        c.max_simultaneous_launches = static_cast<int>(
            as_int(j["max_simultaneous_launches"], path + ".max_simultaneous_launches"));
    return c;
}

// --- SimConfig ---------------------------------------------------------------

static json sim_config_to_json(const SimConfig& c) {
    json seeds = json::array();
    for (std::uint64_t s : c.seed_list) seeds.push_back(s);
    return json{{"dt", c.dt},
                {"horizon", c.horizon},
                {"mc_repetitions", c.mc_repetitions},
                {"seed_list", seeds},
                {"alpha", c.alpha},
                {"beta", c.beta},
                {"gamma_rof", c.gamma_rof},
                {"lambda_hit", c.lambda_hit},
                {"tau_sup", c.tau_sup}};
}

static SimConfig sim_config_from_json(const json& j, const std::string& path) {
    check_keys(j,
               {"dt", "horizon", "mc_repetitions", "seed_list", "alpha", "beta", "gamma_rof",
                "lambda_hit", "tau_sup"},
               path);
    SimConfig c;
    if (j.contains("dt")) c.dt = as_num(j["dt"], path + ".dt");
    if (j.contains("horizon")) c.horizon = as_num(j["horizon"], path + ".horizon");
    if (j.contains("mc_repetitions"))
        c.mc_repetitions = static_cast<int>(as_int(j["mc_repetitions"], path + ".mc_repetitions"));
    if (j.contains("seed_list")) {
        for (std::size_t i = 0; i < j["seed_list"].size(); ++i)
            c.seed_list.push_back(static_cast<std::uint64_t>(
                as_int(j["seed_list"][i], path + ".seed_list[" + std::to_string(i) + "]")));
    }
    if (j.contains("alpha")) c.alpha = as_num(j["alpha"], path + ".alpha");
    if (j.contains("beta")) c.beta = as_num(j["beta"], path + ".beta");
    if (j.contains("gamma_rof")) c.gamma_rof = as_num(j["gamma_rof"], path + ".gamma_rof");
    if (j.contains("lambda_hit")) c.lambda_hit = as_num(j["lambda_hit"], path + ".lambda_hit");
    if (j.contains("tau_sup")) c.tau_sup = as_num(j["tau_sup"], path + ".tau_sup");
    if (c.seed_list.empty()) {
        for (int i = 1; i <= c.mc_repetitions; ++i) c.seed_list.push_back(static_cast<std::uint64_t>(i));
    }
    return c;
}

// --- Scenario -----------------------------------------------------------------

json scenario_to_json(const Scenario& s) {
    json entities = json::array();
    for (const EntityState& e : s.entities) entities.push_back(entity_to_json(e, false));
    return json{{"map_width", s.map_width},
                {"map_height", s.map_height},
                {"difficulty", to_string(s.difficulty)},
                {"core_target_id", s.core_target_id},
                {"entities", entities},
                {"constraint_set", constraints_to_json(s.constraint_set)},
                {"sim_config", sim_config_to_json(s.sim_config)},
                {"suppression_applies_damage", s.suppression_applies_damage}};
}

Scenario scenario_from_json(const json& j) {
    check_keys(j,
               {"map_width", "map_height", "difficulty", "core_target_id", "entities",
                "constraint_set", "sim_config", "suppression_applies_damage"},
               "scenario");
    Scenario s;
    if (j.contains("map_width")) s.map_width = as_num(j["map_width"], "map_width");
    if (j.contains("map_height")) s.map_height = as_num(j["map_height"], "map_height");
    if (j.contains("difficulty"))
        s.difficulty = difficulty_from_string(as_str(j["difficulty"], "difficulty"));
    s.core_target_id = as_str(req(j, "core_target_id", "scenario"), "core_target_id");
    const json& ents = req(j, "entities", "scenario");
    if (!ents.is_array()) throw SchemaError("expected array (entities)");
    for (std::size_t i = 0; i < ents.size(); ++i)
        s.entities.push_back(entity_from_json(ents[i], "entities[" + std::to_string(i) + "]"));
    if (j.contains("constraint_set"))
        s.constraint_set = constraints_from_json(j["constraint_set"], "constraint_set");
    s.sim_config = j.contains("sim_config")
                       ? sim_config_from_json(j["sim_config"], "sim_config")
                       : sim_config_from_json(json::object(), "sim_config");
    if (j.contains("suppression_applies_damage")) {
        if (!j["suppression_applies_damage"].is_boolean())
            throw SchemaError("expected boolean (suppression_applies_damage)");
        s.suppression_applies_damage = j["suppression_applies_damage"].get<bool>();
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const nlohmann::detail::parse_error& e) {
        throw ParseError(std::string("malformed JSON in '") + path + "': " + e.what());
    }
    return scenario_from_json(j);
}

// --- Intent --------------------------------------------------------------------

static json overrides_to_json(const ConstraintOverrides& o) {
    json j = json::object();
    if (!o.ammo_budget.empty()) {
        json b = json::object();
        for (const auto& [id, v] : o.ammo_budget) b[id] = v;
        j["ammo_budget"] = b;
    }
    if (!o.speed_limits.empty()) {
        json l = json::object();
        for (const auto& [cls, v] : o.speed_limits) l[to_string(cls)] = v;
        j["speed_limits"] = l;
    }
    if (!o.extra_no_fly_zones.empty()) {
        json z = json::array();
        for (const Circle& c : o.extra_no_fly_zones)
            z.push_back(json{{"center", vec2_to_json(c.center)}, {"radius", c.radius}});
        j["extra_no_fly_zones"] = z;
    }
    if (o.min_launch_standoff) j["min_launch_standoff"] = *o.min_launch_standoff;
    if (o.max_plan_duration) j["max_plan_duration"] = *o.max_plan_duration;
    if (o.max_simultaneous_launches) j["max_simultaneous_launches"] = *o.max_simultaneous_launches;
    return j;
}

static ConstraintOverrides overrides_from_json(const json& j, const std::string& path) {
    check_keys(j,
               {"ammo_budget", "speed_limits", "extra_no_fly_zones", "min_launch_standoff",
                "max_plan_duration", "max_simultaneous_launches"},
               path);
    ConstraintOverrides o;
    if (j.contains("ammo_budget")) {
        for (auto it = j["ammo_budget"].begin(); it != j["ammo_budget"].end(); ++it)
            o.ammo_budget[it.key()] =
                static_cast<int>(as_int(it.value(), path + ".ammo_budget." + it.key()));
    }
    if (j.contains("speed_limits")) {
        for (auto it = j["speed_limits"].begin(); it != j["speed_limits"].end(); ++it)
            o.speed_limits[entity_class_from_string(it.key())] =
                as_num(it.value(), path + ".speed_limits." + it.key());
    }
    if (j.contains("extra_no_fly_zones")) {
        for (std::size_t i = 0; i < j["extra_no_fly_zones"].size(); ++i)
            o.extra_no_fly_zones.push_back(
                circle_from_json(j["extra_no_fly_zones"][i],
                                 path + ".extra_no_fly_zones[" + std::to_string(i) + "]"));
    }
    if (j.contains("min_launch_standoff"))
        o.min_launch_standoff = as_num(j["min_launch_standoff"], path + ".min_launch_standoff");
    if (j.contains("max_plan_duration"))
        o.max_plan_duration = as_num(j["max_plan_duration"], path + ".max_plan_duration");
    if (j.contains("max_simultaneous_launches"))
        o.max_simultaneous_launches = static_cast<int>(
            as_int(j["max_simultaneous_launches"], path + ".max_simultaneous_launches"));
    return o;
}

json intent_to_json(const Intent& i) {
    return json{{"core_target_id", i.core_target_id},
                {"objective", i.objective},
                {"priority_weights",
                 json{{"w_success", i.priority_weights.w_success},
                      {"w_loss", i.priority_weights.w_loss},
                      {"w_time", i.priority_weights.w_time}}},
                {"hard_constraints", overrides_to_json(i.hard_constraints)}};
}

Intent intent_from_json(const json& j) {
    check_keys(j, {"core_target_id", "objective", "priority_weights", "hard_constraints"},
               "intent");
    Intent i;
    i.core_target_id = as_str(req(j, "core_target_id", "intent"), "core_target_id");
    if (j.contains("objective")) i.objective = as_str(j["objective"], "objective");
    if (j.contains("priority_weights")) {
        const json& w = j["priority_weights"];
        check_keys(w, {"w_success", "w_loss", "w_time"}, "priority_weights");
        if (w.contains("w_success"))
            i.priority_weights.w_success = as_num(w["w_success"], "priority_weights.w_success");
        if (w.contains("w_loss"))
            i.priority_weights.w_loss = as_num(w["w_loss"], "priority_weights.w_loss");
        if (w.contains("w_time"))
            i.priority_weights.w_time = as_num(w["w_time"], "priority_weights.w_time");
    }
    if (j.contains("hard_constraints"))
        i.hard_constraints = overrides_from_json(j["hard_constraints"], "hard_constraints");
    i.validate("intent");
    return i;
}

Intent load_intent(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const nlohmann::detail::parse_error& e) {
        throw ParseError(std::string("malformed JSON in '") + path + "': " + e.what());
    }
    return intent_from_json(j);
}

// --- Plan ------------------------------------------------------------------------

json action_to_json(const AtomicAction& a) {
    json j{{"actor_id", a.actor_id}, {"t_start", a.t_start}};
    if (const auto* m = std::get_if<MoveToAction>(&a.body)) {
        j["kind"] = "MOVE_TO";
        j["waypoint"] = vec2_to_json(m->waypoint);
        j["speed"] = m->speed;
    } else if (const auto* l = std::get_if<LaunchAction>(&a.body)) {
        j["kind"] = "LAUNCH";
        j["weapon"] = l->weapon;
        j["target_id"] = l->target_id;
    } else if (const auto* s = std::get_if<SuppressAction>(&a.body)) {
        j["kind"] = "SUPPRESS";
        j["target_id"] = s->target_id;
        j["duration"] = s->duration;
    } else if (const auto* e = std::get_if<EscortAction>(&a.body)) {
        j["kind"] = "ESCORT";
        j["ally_id"] = e->ally_id;
        j["offset"] = vec2_to_json(e->offset);
    }
    return j;
}

AtomicAction action_from_json(const json& j) {
    const std::string kind = as_str(req(j, "kind", "action"), "action.kind");
    AtomicAction a;
    a.actor_id = as_str(req(j, "actor_id", "action"), "action.actor_id");
    a.t_start = as_num(req(j, "t_start", "action"), "action.t_start");
    if (kind == "MOVE_TO") {
        check_keys(j, {"actor_id", "t_start", "kind", "waypoint", "speed"}, "action");
        a.body = MoveToAction{as_vec2(req(j, "waypoint", "action"), "action.waypoint"),
                              as_num(req(j, "speed", "action"), "action.speed")};
    } else if (kind == "LAUNCH") {
        check_keys(j, {"actor_id", "t_start", "kind", "weapon", "target_id"}, "action");
        a.body = LaunchAction{as_str(req(j, "weapon", "action"), "action.weapon"),
                              as_str(req(j, "target_id", "action"), "action.target_id")};
    } else if (kind == "SUPPRESS") {
        check_keys(j, {"actor_id", "t_start", "kind", "target_id", "duration"}, "action");
        a.body = SuppressAction{as_str(req(j, "target_id", "action"), "action.target_id"),
                                as_num(req(j, "duration", "action"), "action.duration")};
    } else if (kind == "ESCORT") {
        check_keys(j, {"actor_id", "t_start", "kind", "ally_id", "offset"}, "action");
        a.body = EscortAction{as_str(req(j, "ally_id", "action"), "action.ally_id"),
                              as_vec2(req(j, "offset", "action"), "action.offset")};
    } else {
        throw SchemaError("unknown action kind '" + kind + "' (action.kind)");
    }
    return a;
}

json plan_to_json(const CandidatePlan& p) {
    json actions = json::array();
    for (const AtomicAction& a : p.actions) actions.push_back(action_to_json(a));
    json traj = json::object();
    for (const auto& [id, points] : p.planned_trajectories) {
        json arr = json::array();
        for (const Vec2& v : points) arr.push_back(vec2_to_json(v));
        traj[id] = arr;
    }
    json meta = json::object();
    for (const auto& [k, v] : p.metadata) meta[k] = v;
    return json{{"plan_id", p.plan_id},
                {"actions", actions},
                {"trajectories", traj},
                {"metadata", meta}};
}

CandidatePlan plan_from_json(const json& j) {
    check_keys(j, {"plan_id", "actions", "trajectories", "metadata"}, "plan");
    CandidatePlan p;
    p.plan_id = as_str(req(j, "plan_id", "plan"), "plan_id");
    const json& actions = req(j, "actions", "plan");
    if (!actions.is_array()) throw SchemaError("expected array (actions)");
    for (const auto& a : actions) p.actions.push_back(action_from_json(a));
    if (j.contains("trajectories")) {
        for (auto it = j["trajectories"].begin(); it != j["trajectories"].end(); ++it) {
            std::vector<Vec2>& points = p.planned_trajectories[it.key()];
            for (std::size_t i = 0; i < it.value().size(); ++i)
                points.push_back(as_vec2(it.value()[i],
                                         "trajectories." + it.key() + "[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("metadata")) {
        for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it)
            p.metadata[it.key()] = as_str(it.value(), "metadata." + it.key());
    }
    return p;
}

CandidatePlan load_plan(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const nlohmann::detail::parse_error& e) {
        throw ParseError(std::string("malformed JSON in '") + path + "': " + e.what());
    }
    return plan_from_json(j);
}

// --- Events / state -----------------------------------------------------------

json event_to_json(const Event& e) {
    json payload = json::object();
    for (const auto& [k, v] : e.payload) payload[k] = v;
    json j{{"tick", e.tick},
           {"kind", to_string(e.kind)},
           {"actor_id", e.actor_id},
           {"payload", payload}};
    if (!e.target_id.empty()) j["target_id"] = e.target_id;
    return j;
}

Event event_from_json(const json& j) {
    check_keys(j, {"tick", "kind", "actor_id", "target_id", "payload"}, "event");
    Event e;
    e.tick = static_cast<int>(as_int(req(j, "tick", "event"), "event.tick"));
    e.kind = event_kind_from_string(as_str(req(j, "kind", "event"), "event.kind"));
    e.actor_id = as_str(req(j, "actor_id", "event"), "event.actor_id");
    if (j.contains("target_id")) e.target_id = as_str(j["target_id"], "event.target_id");
    if (j.contains("payload")) {
        for (auto it = j["payload"].begin(); it != j["payload"].end(); ++it)
            e.payload[it.key()] = as_num(it.value(), "event.payload." + it.key());
    }
    return e;
}

json state_to_json(const GlobalState& s) {
    json entities = json::array();
    for (const EntityState& e : s.entities) entities.push_back(entity_to_json(e, true));
    json events = json::array();
    for (const Event& e : s.transient_events) events.push_back(event_to_json(e));
    return json{{"tick", s.tick}, {"time", s.time}, {"entities", entities},
                {"transient_events", events}};
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    std::vector<std::uint64_t> seeds;
    try {
        if (dots == std::string::npos) {
            seeds.push_back(std::stoull(text));
            return seeds;
        }
        const std::uint64_t lo = std::stoull(text.substr(0, dots));
        const std::uint64_t hi = std::stoull(text.substr(dots + 2));
        if (hi < lo) throw SchemaError("seed range '" + text + "' is descending");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } catch (const std::invalid_argument&) {
        throw SchemaError("cannot parse seed range '" + text + "'");
    } catch (const std::out_of_range&) {
        throw SchemaError("seed range '" + text + "' out of range");
    }
    return seeds;
}

}  // namespace tacsim
