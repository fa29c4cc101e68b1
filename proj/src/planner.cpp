#include "tacsim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <queue>
#include <set>

#include "tacsim/adapter.hpp"
#include "tacsim/json_io.hpp"
#include "tacsim/opponents.hpp"
#include "tacsim/sim_engine.hpp"

namespace tacsim {

// --- Threat field -------------------------------------------------------------

ThreatField::ThreatField(const Scenario& scenario) {
    for (const EntityState& e : scenario.entities) {
        if (e.side == Side::Opponent && e.weapon) {
            sources_.push_back({e.position, e.weapon->p_base, e.weapon->range});
        }
    }
}

double ThreatField::at(const Vec2& p) const {
    double total = 0.0;
    for (const Source& s : sources_) {
        total += s.p_base * std::max(0.0, 1.0 - distance(p, s.position) / s.range);
    }
    return total;
}

namespace {

double integrate_along(const std::vector<Vec2>& waypoints, double step,
                       const std::function<double(const Vec2&)>& f) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
        const Vec2 a = waypoints[i];
        const Vec2 b = waypoints[i + 1];
        const double seg = distance(a, b);
        if (seg <= 0.0) continue;
        const int slices = std::max(1, static_cast<int>(std::ceil(seg / step)));
        const double ds = seg / slices;
        Vec2 prev = a;
        double prev_v = f(prev);
        for (int k = 1; k <= slices; ++k) {
            const Vec2 cur = a + (b - a) * (static_cast<double>(k) / slices);
            const double cur_v = f(cur);
            total += 0.5 * (prev_v + cur_v) * ds;
            prev_v = cur_v;
        }
    }
    return total;
}

}  // namespace

double polyline_threat_exposure(const std::vector<Vec2>& waypoints, const ThreatField& field,
                                double step) {
    return integrate_along(waypoints, step, [&field](const Vec2& p) { return field.at(p); });
}

double polyline_length(const std::vector<Vec2>& waypoints) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i)
        total += distance(waypoints[i], waypoints[i + 1]);
    return total;
}

// --- Lattice search -----------------------------------------------------------

namespace {

struct Lattice {
    double cell;
    int nx;  // max i index
    int ny;  // max j index

    int count() const { return (nx + 1) * (ny + 1); }
    int id(int i, int j) const { return j * (nx + 1) + i; }
    int ix(int id) const { return id % (nx + 1); }
    int jy(int id) const { return id / (nx + 1); }
    Vec2 pos(int id) const { return {ix(id) * cell, jy(id) * cell}; }
};

Lattice make_lattice(const Scenario& scenario, double cell) {
    return {cell, static_cast<int>(std::floor(scenario.map_width / cell)),
            static_cast<int>(std::floor(scenario.map_height / cell))};
}

// A node is blocked when it sits inside a no-fly zone inflated by half the
// cell diagonal, which keeps every point of any admissible edge clear.
std::vector<char> blocked_nodes(const Lattice& lat, const Scenario& scenario) {
    std::vector<char> blocked(static_cast<std::size_t>(lat.count()), 0);
    const double inflate = lat.cell * M_SQRT1_2 + 1e-9;
    for (int id = 0; id < lat.count(); ++id) {
        const Vec2 p = lat.pos(id);
        for (const Circle& z : scenario.constraint_set.no_fly_zones) {
            if (distance(p, z.center) <= z.radius + inflate) {
                blocked[static_cast<std::size_t>(id)] = 1;
                break;
            }
        }
    }
    return blocked;
}

int nearest_open_node(const Lattice& lat, const std::vector<char>& blocked, const Vec2& p) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int id = 0; id < lat.count(); ++id) {
        if (blocked[static_cast<std::size_t>(id)]) continue;
        const double d = distance(lat.pos(id), p);
        if (d < best_d) {
            best_d = d;
            best = id;
        }
    }
    return best;
}

std::vector<int> astar(const Lattice& lat, const std::vector<char>& blocked,
                       const std::vector<double>& node_threat,
                       const std::vector<double>& node_penalty, double w_threat, int start,
                       int goal) {
    const int n = lat.count();
    std::vector<double> g(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    std::vector<char> closed(static_cast<std::size_t>(n), 0);

    using QItem = std::tuple<double, double, int>;  // (f, h, id) for deterministic ordering
    std::priority_queue<QItem, std::vector<QItem>, std::greater<QItem>> open;

    const Vec2 goal_pos = lat.pos(goal);
    auto heuristic = [&](int id) { return distance(lat.pos(id), goal_pos); };

    g[static_cast<std::size_t>(start)] = 0.0;
    open.emplace(heuristic(start), heuristic(start), start);

    static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

    while (!open.empty()) {
        const auto [f, h, id] = open.top();
        open.pop();
        if (closed[static_cast<std::size_t>(id)]) continue;
        closed[static_cast<std::size_t>(id)] = 1;
        if (id == goal) break;

        const int i = lat.ix(id);
        const int j = lat.jy(id);
        for (int k = 0; k < 8; ++k) {
            const int ni = i + kDx[k];
            const int nj = j + kDy[k];
            if (ni < 0 || ni > lat.nx || nj < 0 || nj > lat.ny) continue;
            const int nid = lat.id(ni, nj);
            if (blocked[static_cast<std::size_t>(nid)] || closed[static_cast<std::size_t>(nid)])
                continue;
            const double len = lat.cell * ((k < 4) ? 1.0 : M_SQRT2);
            const double threat_factor =
                1.0 + w_threat * 0.5 *
                          (node_threat[static_cast<std::size_t>(id)] +
                           node_threat[static_cast<std::size_t>(nid)]);
            const double penalty_factor = 0.5 * (node_penalty[static_cast<std::size_t>(id)] +
                                                 node_penalty[static_cast<std::size_t>(nid)]);
            const double cost = len * threat_factor * penalty_factor;
            const double cand = g[static_cast<std::size_t>(id)] + cost;
            if (cand < g[static_cast<std::size_t>(nid)]) {
                g[static_cast<std::size_t>(nid)] = cand;
                parent[static_cast<std::size_t>(nid)] = id;
                const double nh = heuristic(nid);
                open.emplace(cand + nh, nh, nid);
            }
        }
    }

    if (!closed[static_cast<std::size_t>(goal)]) return {};
    std::vector<int> path;
    for (int id = goal; id != -1; id = parent[static_cast<std::size_t>(id)]) path.push_back(id);
    std::reverse(path.begin(), path.end());
    return path;
}

// Collapse runs of identical lattice moves into corner waypoints.
std::vector<Vec2> simplify_path(const Lattice& lat, const std::vector<int>& path) {
    std::vector<Vec2> out;
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (k > 0 && k + 1 < path.size()) {
            const int di0 = lat.ix(path[k]) - lat.ix(path[k - 1]);
            const int dj0 = lat.jy(path[k]) - lat.jy(path[k - 1]);
            const int di1 = lat.ix(path[k + 1]) - lat.ix(path[k]);
            const int dj1 = lat.jy(path[k + 1]) - lat.jy(path[k]);
            if (di0 == di1 && dj0 == dj1) continue;
        }
        out.push_back(lat.pos(path[k]));
    }
    return out;
}

Vec2 blue_start_centroid(const Scenario& scenario) {
    Vec2 sum{0.0, 0.0};
    int bombers = 0;
    int blue = 0;
    Vec2 blue_sum{0.0, 0.0};
    for (const EntityState& e : scenario.entities) {
        if (e.side != Side::PlanExecuting) continue;
        ++blue;
        blue_sum = blue_sum + e.position;
        if (e.cls == EntityClass::Bomber) {
            ++bombers;
            sum = sum + e.position;
        }
    }
    if (bombers > 0) return sum * (1.0 / bombers);
    if (blue > 0) return blue_sum * (1.0 / blue);
    throw DomainError("scenario has no plan-executing entities");
}

RouteSkeleton finish_route(std::string route_id, std::vector<Vec2> waypoints,
                           const ThreatField& field, const PlannerConfig& config) {
    RouteSkeleton r;
    r.route_id = std::move(route_id);
    r.waypoints = std::move(waypoints);
    r.length = polyline_length(r.waypoints);
    r.threat_exposure = polyline_threat_exposure(r.waypoints, field, config.lattice_cell);
    r.score = -config.route_length_weight * r.length -
              config.route_threat_weight * r.threat_exposure;
    return r;
}

}  // namespace

std::vector<RouteSkeleton> pathfinder_topk(const Intent& intent, const Scenario& scenario, int k,
                                           const PlannerConfig& config) {
    if (k < 1) throw DomainError("pathfinder requires k >= 1");
    const EntityState* core = scenario.find_entity(intent.core_target_id);
    if (!core) throw DomainError("intent core target '" + intent.core_target_id + "' not in scenario");

    const Lattice lat = make_lattice(scenario, config.lattice_cell);
    const std::vector<char> blocked = blocked_nodes(lat, scenario);
    const ThreatField field(scenario);

    std::vector<double> node_threat(static_cast<std::size_t>(lat.count()));
    for (int id = 0; id < lat.count(); ++id)
        node_threat[static_cast<std::size_t>(id)] = field.at(lat.pos(id));

    const int start = nearest_open_node(lat, blocked, blue_start_centroid(scenario));
    const int goal = nearest_open_node(lat, blocked, core->position);
    if (start < 0 || goal < 0) throw Unreachable("no open lattice node for start or target");

    std::vector<double> penalty(static_cast<std::size_t>(lat.count()), 1.0);
    std::vector<RouteSkeleton> routes;
    std::set<std::string> seen;

    auto waypoint_key = [](const std::vector<Vec2>& wps) {
        std::string key;
        for (const Vec2& w : wps) key += std::to_string(w.x) + "," + std::to_string(w.y) + ";";
        return key;
    };

    for (int slot = 0; slot < k; ++slot) {
        bool extracted = false;
        for (int attempt = 0; attempt < 8 && !extracted; ++attempt) {
            const std::vector<int> path =
                astar(lat, blocked, node_threat, penalty, config.route_threat_weight, start, goal);
            if (path.empty()) break;
            for (int id : path) penalty[static_cast<std::size_t>(id)] *= config.diversity_inflation;
            std::vector<Vec2> wps = simplify_path(lat, path);
            const std::string key = waypoint_key(wps);
            if (seen.count(key)) continue;  // inflated; retry for a distinct route
            seen.insert(key);
            routes.push_back(
                finish_route("r" + std::to_string(routes.size()), std::move(wps), field, config));
            extracted = true;
        }
        if (!extracted) break;  // alternatives exhausted; return what we have
    }

    if (routes.empty()) throw Unreachable("no lattice path from start region to target");
    std::sort(routes.begin(), routes.end(), [](const RouteSkeleton& a, const RouteSkeleton& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.route_id < b.route_id;
    });
    return routes;
}

RouteSkeleton direct_route(const Intent& intent, const Scenario& scenario,
                           const PlannerConfig& config) {
    const EntityState* core = scenario.find_entity(intent.core_target_id);
    if (!core) throw DomainError("intent core target '" + intent.core_target_id + "' not in scenario");
    const ThreatField field(scenario);
    const Vec2 start = blue_start_centroid(scenario);
    std::vector<Vec2> wps{start, core->position};
    if (distance(start, core->position) < 1e-9) wps = {start};
    return finish_route("direct", std::move(wps), field, config);
}

// --- Kinematic replay ---------------------------------------------------------

std::map<std::string, std::vector<Vec2>> integrate_plan_kinematics(
    const std::vector<AtomicAction>& actions, const Scenario& scenario, int ticks) {
    // Movement commands only; the engine's own step() does the integration so
    // an undisturbed rollout matches the plan exactly.
    std::map<int, std::vector<AtomicAction>> schedule;
    for (const AtomicAction& a : actions) {
        if (std::holds_alternative<MoveToAction>(a.body) ||
            std::holds_alternative<EscortAction>(a.body)) {
            schedule[schedule_tick(a.t_start, scenario.sim_config.dt)].push_back(a);
        }
    }

    GlobalState st = initial_state(scenario);
    RngStream rng{0, 0, 0};  // movement consumes no draws

    std::map<std::string, std::vector<Vec2>> traj;
    for (const EntityState& e : st.entities) {
        if (e.side == Side::PlanExecuting) traj[e.id].push_back(e.position);
    }
    static const std::vector<AtomicAction> kNone;
    for (int t = 0; t < ticks; ++t) {
        auto it = schedule.find(t);
        const std::vector<AtomicAction>& blue = (it == schedule.end()) ? kNone : it->second;
        st = step(st, blue, kNone, scenario, rng, nullptr);
        for (const EntityState& e : st.entities) {
            if (e.side == Side::PlanExecuting) traj[e.id].push_back(e.position);
        }
    }
    return traj;
}

// --- Draft plans and assessment ------------------------------------------------

namespace {

struct MovementScript {
    std::vector<AtomicAction> actions;
    int arrival_tick = 0;
};

// Route-following commands with arrival-aligned timestamps; mirrors the
// engine arrival rule (ceil of distance over per-tick step). Legs that would
// start past the horizon can never execute and are dropped.
MovementScript route_movements(const EntityState& entity, const std::vector<Vec2>& waypoints,
                               double speed, double dt, int horizon_ticks) {
    MovementScript out;
    Vec2 pos = entity.position;
    int tick = 0;
    for (const Vec2& w : waypoints) {
        const double d = distance(pos, w);
        if (d < 1e-9) continue;
        if (tick > horizon_ticks) break;
        out.actions.push_back({entity.id, tick * dt, MoveToAction{w, speed}});
        tick += static_cast<int>(std::ceil(d / (speed * dt) - 1e-9));
        pos = w;
    }
    out.arrival_tick = tick;
    return out;
}

int launch_budget(const EntityState& e, const ConstraintSet& constraints) {
    if (!e.weapon) return 0;
    int budget = e.ammo;
    auto it = constraints.ammo_budget.find(e.id);
    if (it != constraints.ammo_budget.end()) budget = std::min(budget, it->second);
    return budget;
}

// First tick at which the planned position is within `threshold` of `target`.
int first_tick_within(const std::vector<Vec2>& traj, const Vec2& target, double threshold) {
    for (std::size_t t = 0; t < traj.size(); ++t) {
        if (distance(traj[t], target) <= threshold) return static_cast<int>(t);
    }
    return -1;
}

void append_bomber_launches(std::vector<AtomicAction>& actions, const Scenario& scenario,
                            const std::map<std::string, std::vector<Vec2>>& traj) {
    const EntityState& core = scenario.core_target();
    const double standoff = scenario.constraint_set.min_launch_standoff;
    const int salvo_cap = scenario.constraint_set.max_simultaneous_launches;
    const double dt = scenario.sim_config.dt;

    std::map<int, int> launches_per_tick;
    for (const AtomicAction& a : actions) {
        if (std::holds_alternative<LaunchAction>(a.body))
            ++launches_per_tick[schedule_tick(a.t_start, dt)];
    }

    for (const EntityState& e : scenario.entities) {
        if (e.side != Side::PlanExecuting || e.cls != EntityClass::Bomber) continue;
        if (launch_budget(e, scenario.constraint_set) < 1) continue;
        auto it = traj.find(e.id);
        if (it == traj.end()) continue;
        const double threshold =
            standoff > 0.0 ? std::min(e.weapon->range, standoff) : e.weapon->range;
        int tick = first_tick_within(it->second, core.position, threshold);
        if (tick < 0) continue;
        if (salvo_cap > 0) {
            while (launches_per_tick[tick] >= salvo_cap &&
                   tick + 1 < static_cast<int>(it->second.size())) {
                ++tick;  // stagger within the approach
            }
        }
        ++launches_per_tick[tick];
        actions.push_back({e.id, tick * dt, LaunchAction{e.weapon->name, core.id}});
    }
}

CandidatePlan finish_plan(std::string plan_id, std::vector<AtomicAction> actions,
                          const Scenario& scenario) {
    std::stable_sort(actions.begin(), actions.end(), action_order_less);
    CandidatePlan p;
    p.plan_id = std::move(plan_id);
    p.actions = std::move(actions);
    p.planned_trajectories =
        integrate_plan_kinematics(p.actions, scenario, scenario.sim_config.tick_count());
    return p;
}

}  // namespace

CandidatePlan draft_route_plan(const RouteSkeleton& route, const Scenario& scenario,
                               const PlannerConfig& config) {
    (void)config;
    const double dt = scenario.sim_config.dt;
    std::vector<AtomicAction> actions;
    for (const EntityState& e : scenario.entities) {
        if (e.side != Side::PlanExecuting || e.cls != EntityClass::Bomber) continue;
        const double speed = scenario.constraint_set.speed_cap(e.cls, e.speed_max);
        if (speed <= 0.0) continue;
        MovementScript script =
            route_movements(e, route.waypoints, speed, dt, scenario.sim_config.tick_count());
        for (AtomicAction& a : script.actions) actions.push_back(std::move(a));
    }
    auto traj = integrate_plan_kinematics(actions, scenario, scenario.sim_config.tick_count());
    append_bomber_launches(actions, scenario, traj);

    CandidatePlan p = finish_plan("draft-" + route.route_id, std::move(actions), scenario);
    p.metadata["generator"] = "analyst-draft";
    p.metadata["route_id"] = route.route_id;
    return p;
}

AssessmentVector analyst_assess(const RouteSkeleton& route, const Scenario& scenario, int n_fast,
                                const PlannerConfig& config) {
    if (n_fast < 1) throw DomainError("analyst requires n_fast >= 1");
    const CandidatePlan draft = draft_route_plan(route, scenario, config);

    AssessmentVector e;
    e.rollouts = n_fast;
    NoBrainPolicy opponent;
    for (int i = 1; i <= n_fast; ++i) {
        const RolloutRecord rec =
            run_rollout(scenario, draft, opponent, {static_cast<std::uint64_t>(i), 0});
        e.expected_success += rec.outcome == Outcome::Success ? 1.0 : 0.0;
        e.expected_loss += rec.lost_blue;
        e.expected_time += rec.end_tick * rec.dt;
    }
    e.expected_success /= n_fast;
    e.expected_loss /= n_fast;
    e.expected_time /= n_fast;
    return e;
}

double global_utility(const AssessmentVector& e, const PriorityWeights& w,
                      const Scenario& scenario) {
    int blue = 0;
    for (const EntityState& ent : scenario.entities)
        if (ent.side == Side::PlanExecuting) ++blue;
    const double loss_norm = blue > 0 ? e.expected_loss / blue : e.expected_loss;
    return w.w_success * e.expected_success - w.w_loss * loss_norm -
           w.w_time * e.expected_time / scenario.sim_config.horizon;
}

// --- Composition ----------------------------------------------------------------

namespace {

struct DefenseSite {
    int entity_index;
    double contribution;  // exposure share along the route
    double entry_time;    // first time a bomber's planned path is inside range
    double exit_time;
};

double source_exposure(const std::vector<Vec2>& waypoints, const Vec2& pos, double p_base,
                       double range, double step) {
    return integrate_along(waypoints, step, [&](const Vec2& p) {
        return p_base * std::max(0.0, 1.0 - distance(p, pos) / range);
    });
}

}  // namespace

CandidatePlan planner_compose(std::span<const RouteSkeleton> routes,
                              std::span<const AssessmentVector> assessments, const Intent& intent,
                              const Scenario& scenario, const PlannerConfig& config) {
    if (routes.empty()) throw DomainError("planner requires at least one route");
    if (routes.size() != assessments.size())
        throw DomainError("route and assessment counts differ");

    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < routes.size(); ++i) {
        const double v = global_utility(assessments[i], intent.priority_weights, scenario);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    if (best_v < config.utility_floor)
        throw NoFeasibleRoute("all route utilities below the configured floor");

    const RouteSkeleton& route = routes[best];
    const SimConfig& cfg = scenario.sim_config;
    const double dt = cfg.dt;
    const MapBounds bounds = scenario.bounds();

    std::vector<AtomicAction> actions;

    // Bombers follow the route at their capped speed.
    std::vector<const EntityState*> bombers;
    std::vector<const EntityState*> fighters;
    for (const EntityState& e : scenario.entities) {
        if (e.side != Side::PlanExecuting) continue;
        if (e.cls == EntityClass::Bomber) bombers.push_back(&e);
        if (e.cls == EntityClass::Fighter) fighters.push_back(&e);
    }
    for (const EntityState* b : bombers) {
        const double speed = scenario.constraint_set.speed_cap(b->cls, b->speed_max);
        if (speed <= 0.0) continue;
        MovementScript script = route_movements(*b, route.waypoints, speed, dt, cfg.tick_count());
        for (AtomicAction& a : script.actions) actions.push_back(std::move(a));
    }

    auto bomber_traj = integrate_plan_kinematics(actions, scenario, cfg.tick_count());

    // Static defenses whose engagement circle intersects the route, ranked by
    // how much of the route's threat exposure they own.
    std::vector<DefenseSite> sites;
    for (std::size_t i = 0; i < scenario.entities.size(); ++i) {
        const EntityState& d = scenario.entities[i];
        if (d.side != Side::Opponent || !d.weapon) continue;
        if (d.cls != EntityClass::AntiAirThreat && d.cls != EntityClass::MissileThreatRegion)
            continue;
        double min_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k + 1 < route.waypoints.size(); ++k)
            min_d = std::min(min_d, point_segment_distance(d.position, route.waypoints[k],
                                                           route.waypoints[k + 1]));
        if (route.waypoints.size() == 1)
            min_d = distance(d.position, route.waypoints.front());
        if (min_d > d.weapon->range) continue;

        int entry = -1;
        int exit = -1;
        for (const EntityState* b : bombers) {
            auto it = bomber_traj.find(b->id);
            if (it == bomber_traj.end()) continue;
            for (std::size_t t = 0; t < it->second.size(); ++t) {
                if (distance(it->second[t], d.position) <= d.weapon->range) {
                    if (entry < 0 || static_cast<int>(t) < entry) entry = static_cast<int>(t);
                    if (static_cast<int>(t) > exit) exit = static_cast<int>(t);
                }
            }
        }
        if (entry < 0) continue;  // never actually entered
        sites.push_back({static_cast<int>(i),
                         source_exposure(route.waypoints, d.position, d.weapon->p_base,
                                         d.weapon->range, config.lattice_cell),
                         entry * dt, exit * dt});
    }
    std::sort(sites.begin(), sites.end(), [](const DefenseSite& a, const DefenseSite& b) {
        if (a.contribution != b.contribution) return a.contribution > b.contribution;
        return a.entity_index < b.entity_index;
    });

    const double lead =
        config.suppress_lead_seconds >= 0.0 ? config.suppress_lead_seconds : cfg.tau_sup;

    std::size_t next_site = 0;
    int escort_ordinal = 0;
    for (const EntityState* f : fighters) {
        const double speed = scenario.constraint_set.speed_cap(f->cls, f->speed_max);
        bool assigned = false;
        if (f->weapon && next_site < sites.size()) {
            const DefenseSite& site = sites[next_site++];
            const EntityState& aat = scenario.entities[static_cast<std::size_t>(site.entity_index)];

            const Vec2 away = f->position - aat.position;
            const double away_n = away.norm();
            const Vec2 dir = away_n > 1e-9 ? away * (1.0 / away_n) : Vec2{1.0, 0.0};
            const Vec2 station =
                bounds.clamp(aat.position + dir * (config.standoff_fraction * f->weapon->range));
            if (speed > 0.0 && distance(f->position, station) > 1e-9)
                actions.push_back({f->id, 0.0, MoveToAction{station, speed}});

            const double start = std::max(0.0, site.entry_time - lead);
            double duration = std::max(site.exit_time - start, cfg.tau_sup);
            duration = std::min(duration, cfg.horizon - start);
            if (duration > 0.0)
                actions.push_back({f->id, start, SuppressAction{aat.id, duration}});
            assigned = true;
        }
        if (!assigned && !bombers.empty()) {
            const EntityState* ally = bombers[escort_ordinal % bombers.size()];
            Vec2 offset = config.escort_offset;
            if (escort_ordinal % 2 == 1) offset.y = -offset.y;
            if ((escort_ordinal / 2) % 2 == 1) offset.x = -offset.x;
            actions.push_back({f->id, 0.0, EscortAction{ally->id, offset}});
            ++escort_ordinal;
        }
    }

    append_bomber_launches(actions, scenario, bomber_traj);

    CandidatePlan p = finish_plan("mpha-" + route.route_id, std::move(actions), scenario);
    p.metadata["generator"] = "mpha";
    p.metadata["route_id"] = route.route_id;
    {
        // Full precision so the utility is recomputable from the provenance.
        char buf[40];
        auto put = [&](const char* key, double v) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            p.metadata[key] = buf;
        };
        put("v_global", best_v);
        put("exp_success", assessments[best].expected_success);
        put("exp_loss", assessments[best].expected_loss);
        put("exp_time", assessments[best].expected_time);
    }
    return p;
}

// --- Validator -------------------------------------------------------------------

const char* to_string(ViolationCode c) {
    switch (c) {
        case ViolationCode::AmmoExceeded: return "AmmoExceeded";
        case ViolationCode::OutOfRangeLaunch: return "OutOfRangeLaunch";
        case ViolationCode::SpeedExceeded: return "SpeedExceeded";
        case ViolationCode::NoFlyIncursion: return "NoFlyIncursion";
        case ViolationCode::TimestampDisorder: return "TimestampDisorder";
        case ViolationCode::SalvoLimit: return "SalvoLimit";
        case ViolationCode::DurationExceeded: return "DurationExceeded";
    }
    return "";
}

std::vector<Violation> validator_check(const CandidatePlan& plan, const Scenario& scenario) {
    std::vector<Violation> out;
    const SimConfig& cfg = scenario.sim_config;
    const ConstraintSet& cs = scenario.constraint_set;
    const auto traj = integrate_plan_kinematics(plan.actions, scenario, cfg.tick_count());

    auto entity_order = [&scenario](const std::string& id) {
        const int i = scenario.entity_index(id);
        return i < 0 ? std::numeric_limits<int>::max() : i;
    };

    // AmmoExceeded: cumulative launches per entity vs budget.
    {
        std::map<std::string, std::vector<double>> launch_times;
        for (const AtomicAction& a : plan.actions)
            if (std::holds_alternative<LaunchAction>(a.body))
                launch_times[a.actor_id].push_back(a.t_start);
        std::vector<std::pair<int, Violation>> found;
        for (const auto& [actor, times] : launch_times) {
            const EntityState* e = scenario.find_entity(actor);
            if (!e) continue;
            const int budget = launch_budget(*e, cs);
            if (static_cast<int>(times.size()) > budget) {
                found.push_back({entity_order(actor),
                                 {ViolationCode::AmmoExceeded, actor,
                                  times[static_cast<std::size_t>(budget)],
                                  static_cast<double>(static_cast<int>(times.size()) - budget)}});
            }
        }
        std::sort(found.begin(), found.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [idx, v] : found) out.push_back(v);
    }

    // OutOfRangeLaunch: planned shooter position vs target at the scheduled tick.
    for (const AtomicAction& a : plan.actions) {
        const auto* launch = std::get_if<LaunchAction>(&a.body);
        if (!launch) continue;
        const EntityState* shooter = scenario.find_entity(a.actor_id);
        const EntityState* target = scenario.find_entity(launch->target_id);
        if (!shooter || !target) continue;
        auto it = traj.find(a.actor_id);
        if (it == traj.end()) continue;
        const int tick =
            std::min(schedule_tick(a.t_start, cfg.dt), static_cast<int>(it->second.size()) - 1);
        if (tick < 0) continue;
        const double d = distance(it->second[static_cast<std::size_t>(tick)], target->position);
        const double range = shooter->weapon ? shooter->weapon->range : 0.0;
        if (d > range) {
            out.push_back({ViolationCode::OutOfRangeLaunch, a.actor_id, a.t_start, d - range});
        }
    }

    // SpeedExceeded: commanded speed vs platform/class cap.
    for (const AtomicAction& a : plan.actions) {
        const auto* move = std::get_if<MoveToAction>(&a.body);
        if (!move) continue;
        const EntityState* e = scenario.find_entity(a.actor_id);
        if (!e) continue;
        const double cap = cs.speed_cap(e->cls, e->speed_max);
        if (move->speed > cap + 1e-9) {
            out.push_back({ViolationCode::SpeedExceeded, a.actor_id, a.t_start, move->speed - cap});
        }
    }

    // NoFlyIncursion: tick-sampled planned trajectory segments vs zones.
    for (const EntityState& e : scenario.entities) {
        if (e.side != Side::PlanExecuting) continue;
        auto it = traj.find(e.id);
        if (it == traj.end()) continue;
        double worst = 0.0;
        double when = 0.0;
        for (const Circle& z : cs.no_fly_zones) {
            for (std::size_t t = 0; t + 1 < it->second.size(); ++t) {
                const double d =
                    point_segment_distance(z.center, it->second[t], it->second[t + 1]);
                if (d < z.radius && z.radius - d > worst) {
                    worst = z.radius - d;
                    when = static_cast<double>(t) * cfg.dt;
                }
            }
        }
        if (worst > 0.0)
            out.push_back({ViolationCode::NoFlyIncursion, e.id, when, worst});
    }

    // TimestampDisorder: per-actor non-monotone timestamps or globally
    // unsorted action lists.
    {
        std::map<std::string, double> last_t;
        bool disorder = false;
        double at = 0.0;
        std::string who;
        double gap = 0.0;
        for (std::size_t i = 0; i < plan.actions.size(); ++i) {
            const AtomicAction& a = plan.actions[i];
            auto it = last_t.find(a.actor_id);
            if (it != last_t.end() && a.t_start < it->second - 1e-12) {
                disorder = true;
                at = a.t_start;
                who = a.actor_id;
                gap = it->second - a.t_start;
                break;
            }
            last_t[a.actor_id] = std::max(a.t_start, it == last_t.end() ? a.t_start : it->second);
            if (i > 0 && action_order_less(a, plan.actions[i - 1]) && !disorder) {
                disorder = true;
                at = a.t_start;
                who = a.actor_id;
                gap = plan.actions[i - 1].t_start - a.t_start;
                break;
            }
        }
        if (disorder) out.push_back({ViolationCode::TimestampDisorder, who, at, gap});
    }

    // SalvoLimit: launches per tick vs cap.
    if (cs.max_simultaneous_launches > 0) {
        std::map<int, std::vector<const AtomicAction*>> per_tick;
        for (const AtomicAction& a : plan.actions)
            if (std::holds_alternative<LaunchAction>(a.body))
                per_tick[schedule_tick(a.t_start, cfg.dt)].push_back(&a);
        for (const auto& [tick, list] : per_tick) {
            if (static_cast<int>(list.size()) > cs.max_simultaneous_launches) {
                out.push_back({ViolationCode::SalvoLimit,
                               list[static_cast<std::size_t>(cs.max_simultaneous_launches)]->actor_id,
                               tick * cfg.dt,
                               static_cast<double>(static_cast<int>(list.size()) -
                                                   cs.max_simultaneous_launches)});
            }
        }
    }

    // DurationExceeded: latest action start vs the plan duration cap.
    if (cs.max_plan_duration > 0.0) {
        double latest = 0.0;
        std::string who;
        for (const AtomicAction& a : plan.actions) {
            if (a.t_start > latest) {
                latest = a.t_start;
                who = a.actor_id;
            }
        }
        if (latest > cs.max_plan_duration + 1e-9) {
            out.push_back({ViolationCode::DurationExceeded, who, latest,
                           latest - cs.max_plan_duration});
        }
    }

    std::stable_sort(out.begin(), out.end(), [&](const Violation& a, const Violation& b) {
        if (a.code != b.code) return static_cast<int>(a.code) < static_cast<int>(b.code);
        const int oa = entity_order(a.actor_id);
        const int ob = entity_order(b.actor_id);
        if (oa != ob) return oa < ob;
        return a.t < b.t;
    });
    return out;
}

// --- Repair ------------------------------------------------------------------------

namespace {

double move_travel_time(const Vec2& from, const Vec2& to, double speed) {
    if (speed <= 0.0) return 0.0;
    return distance(from, to) / speed;
}

}  // namespace

CandidatePlan repair_plan(const CandidatePlan& plan, const std::vector<Violation>& violations,
                          const Scenario& scenario) {
    if (violations.empty()) throw DomainError("repair requires at least one violation");
    const SimConfig& cfg = scenario.sim_config;
    const ConstraintSet& cs = scenario.constraint_set;
    std::vector<AtomicAction> actions = plan.actions;

    auto recompute = [&]() { return integrate_plan_kinematics(actions, scenario, cfg.tick_count()); };

    std::vector<Violation> ordered = violations;
    std::stable_sort(ordered.begin(), ordered.end(), [](const Violation& a, const Violation& b) {
        return static_cast<int>(a.code) < static_cast<int>(b.code);
    });

    for (const Violation& v : ordered) {
        switch (v.code) {
            case ViolationCode::AmmoExceeded: {
                // Drop the latest excess launches of the offending actor.
                std::vector<std::size_t> launch_idx;
                for (std::size_t i = 0; i < actions.size(); ++i)
                    if (actions[i].actor_id == v.actor_id &&
                        std::holds_alternative<LaunchAction>(actions[i].body))
                        launch_idx.push_back(i);
                const int excess = static_cast<int>(v.detail);
                if (launch_idx.empty() || excess <= 0)
                    throw IrreparableViolation("AmmoExceeded repair has nothing to drop for '" +
                                               v.actor_id + "'");
                std::sort(launch_idx.begin(), launch_idx.end(),
                          [&actions](std::size_t a, std::size_t b) {
                              return actions[a].t_start < actions[b].t_start;
                          });
                std::vector<std::size_t> to_drop(
                    launch_idx.end() - std::min<std::size_t>(launch_idx.size(),
                                                             static_cast<std::size_t>(excess)),
                    launch_idx.end());
                std::sort(to_drop.rbegin(), to_drop.rend());
                for (std::size_t i : to_drop) actions.erase(actions.begin() + static_cast<long>(i));
                break;
            }
            case ViolationCode::OutOfRangeLaunch: {
                auto it = std::find_if(actions.begin(), actions.end(), [&](const AtomicAction& a) {
                    return a.actor_id == v.actor_id && std::abs(a.t_start - v.t) < 1e-9 &&
                           std::holds_alternative<LaunchAction>(a.body);
                });
                if (it == actions.end())
                    throw IrreparableViolation("OutOfRangeLaunch repair cannot locate the launch");
                const auto& launch = std::get<LaunchAction>(it->body);
                const EntityState* shooter = scenario.find_entity(v.actor_id);
                const EntityState* target = scenario.find_entity(launch.target_id);
                const auto traj = recompute();
                const auto tit = traj.find(v.actor_id);
                int tick = -1;
                if (shooter && shooter->weapon && target && tit != traj.end())
                    tick = first_tick_within(tit->second, target->position, shooter->weapon->range);
                if (tick >= 0) {
                    it->t_start = tick * cfg.dt;  // delay to the first in-range planned tick
                } else {
                    actions.erase(it);  // never in range: drop
                }
                break;
            }
            case ViolationCode::SpeedExceeded: {
                auto it = std::find_if(actions.begin(), actions.end(), [&](const AtomicAction& a) {
                    return a.actor_id == v.actor_id && std::abs(a.t_start - v.t) < 1e-9 &&
                           std::holds_alternative<MoveToAction>(a.body);
                });
                if (it == actions.end())
                    throw IrreparableViolation("SpeedExceeded repair cannot locate the move");
                auto& move = std::get<MoveToAction>(it->body);
                const EntityState* e = scenario.find_entity(v.actor_id);
                if (!e) throw IrreparableViolation("SpeedExceeded repair on unknown actor");
                const double cap = cs.speed_cap(e->cls, e->speed_max);
                if (move.speed <= cap)
                    throw IrreparableViolation("SpeedExceeded repair would be a no-op");
                const auto traj = recompute();
                const auto tit = traj.find(v.actor_id);
                Vec2 from = e->position;
                if (tit != traj.end()) {
                    const int tick = std::min(schedule_tick(it->t_start, cfg.dt),
                                              static_cast<int>(tit->second.size()) - 1);
                    if (tick >= 0) from = tit->second[static_cast<std::size_t>(tick)];
                }
                const double delta = move_travel_time(from, move.waypoint, cap) -
                                     move_travel_time(from, move.waypoint, move.speed);
                move.speed = cap;
                for (AtomicAction& a : actions) {
                    if (&a != &*it && a.actor_id == v.actor_id && a.t_start > v.t &&
                        std::holds_alternative<MoveToAction>(a.body)) {
                        a.t_start = std::min(a.t_start + delta, cfg.horizon);
                    }
                }
                break;
            }
            case ViolationCode::NoFlyIncursion: {
                const auto traj = recompute();
                const auto tit = traj.find(v.actor_id);
                if (tit == traj.end())
                    throw IrreparableViolation("NoFlyIncursion repair on actor with no trajectory");
                // Deepest incursion point and its zone.
                const Circle* zone = nullptr;
                double worst = 0.0;
                std::size_t worst_tick = 0;
                for (const Circle& z : cs.no_fly_zones) {
                    for (std::size_t t = 0; t < tit->second.size(); ++t) {
                        const double depth = z.radius - distance(tit->second[t], z.center);
                        if (depth > worst) {
                            worst = depth;
                            worst_tick = t;
                            zone = &z;
                        }
                    }
                }
                if (!zone) throw IrreparableViolation("NoFlyIncursion repair finds no incursion");
                const Vec2 p = tit->second[worst_tick];
                // Detour sideways: perpendicular to the approach direction,
                // on whichever side of the zone the path already leans.
                Vec2 approach =
                    worst_tick > 0 ? p - tit->second[worst_tick - 1] : Vec2{1.0, 0.0};
                if (approach.norm() < 1e-9) approach = {1.0, 0.0};
                Vec2 dir{-approach.y, approach.x};
                dir = dir * (1.0 / dir.norm());
                const Vec2 radial = p - zone->center;
                if (dir.x * radial.x + dir.y * radial.y < 0.0) dir = dir * -1.0;
                const Vec2 detour =
                    scenario.bounds().clamp(zone->center + dir * (zone->radius * 1.1));

                // The move command active at the incursion time gets a detour
                // waypoint inserted ahead of it.
                auto active = actions.end();
                for (auto it2 = actions.begin(); it2 != actions.end(); ++it2) {
                    if (it2->actor_id != v.actor_id ||
                        !std::holds_alternative<MoveToAction>(it2->body))
                        continue;
                    if (schedule_tick(it2->t_start, cfg.dt) <= static_cast<int>(worst_tick)) {
                        if (active == actions.end() || it2->t_start >= active->t_start) active = it2;
                    }
                }
                if (active == actions.end())
                    throw IrreparableViolation("NoFlyIncursion repair finds no active move");
                const auto& move = std::get<MoveToAction>(active->body);
                const double t0 = active->t_start;
                const double speed = move.speed;
                const Vec2 w = move.waypoint;
                Vec2 from = scenario.find_entity(v.actor_id)->position;
                const int t0_tick = std::min(schedule_tick(t0, cfg.dt),
                                             static_cast<int>(tit->second.size()) - 1);
                if (t0_tick >= 0) from = tit->second[static_cast<std::size_t>(t0_tick)];

                const double leg1 = move_travel_time(from, detour, speed);
                const double added = leg1 + move_travel_time(detour, w, speed) -
                                     move_travel_time(from, w, speed);
                active->body = MoveToAction{detour, speed};
                AtomicAction resume{v.actor_id, std::min(t0 + leg1, cfg.horizon),
                                    MoveToAction{w, speed}};
                for (AtomicAction& a : actions) {
                    if (a.actor_id == v.actor_id && a.t_start > t0 &&
                        std::holds_alternative<MoveToAction>(a.body)) {
                        a.t_start = std::min(a.t_start + added, cfg.horizon);
                    }
                }
                actions.push_back(std::move(resume));
                break;
            }
            case ViolationCode::TimestampDisorder: {
                std::stable_sort(actions.begin(), actions.end(), action_order_less);
                break;
            }
            case ViolationCode::SalvoLimit: {
                if (cs.max_simultaneous_launches <= 0) break;
                std::map<int, int> per_tick;
                std::vector<AtomicAction*> launches;
                for (AtomicAction& a : actions)
                    if (std::holds_alternative<LaunchAction>(a.body)) launches.push_back(&a);
                std::stable_sort(launches.begin(), launches.end(),
                                 [](const AtomicAction* a, const AtomicAction* b) {
                                     return a->t_start < b->t_start;
                                 });
                const int max_tick = cfg.tick_count();
                for (AtomicAction* a : launches) {
                    int tick = schedule_tick(a->t_start, cfg.dt);
                    while (per_tick[tick] >= cs.max_simultaneous_launches && tick <= max_tick)
                        ++tick;
                    if (tick > max_tick)
                        throw IrreparableViolation("SalvoLimit repair runs past the horizon");
                    ++per_tick[tick];
                    a->t_start = tick * cfg.dt;
                }
                break;
            }
            case ViolationCode::DurationExceeded: {
                if (cs.max_plan_duration <= 0.0) break;
                const std::size_t before = actions.size();
                actions.erase(std::remove_if(actions.begin(), actions.end(),
                                             [&](const AtomicAction& a) {
                                                 return a.t_start > cs.max_plan_duration + 1e-9;
                                             }),
                              actions.end());
                if (actions.size() == before)
                    throw IrreparableViolation("DurationExceeded repair would be a no-op");
                break;
            }
        }
    }

    CandidatePlan out = finish_plan(plan.plan_id, std::move(actions), scenario);
    out.metadata = plan.metadata;
    int rounds = 0;
    auto it = out.metadata.find("repair_rounds");
    if (it != out.metadata.end()) rounds = std::stoi(it->second);
    out.metadata["repair_rounds"] = std::to_string(rounds + 1);
    return out;
}

// --- Candidate generation --------------------------------------------------------

const char* to_string(Ablation a) {
    switch (a) {
        case Ablation::None: return "none";
        case Ablation::Single: return "single";
        case Ablation::NoPathfinder: return "no_pf";
        case Ablation::NoAnalyst: return "no_an";
        case Ablation::NoPlanner: return "no_pl";
    }
    return "";
}

Ablation ablation_from_string(const std::string& s) {
    if (s.empty() || s == "none") return Ablation::None;
    if (s == "single") return Ablation::Single;
    if (s == "no_pf") return Ablation::NoPathfinder;
    if (s == "no_an") return Ablation::NoAnalyst;
    if (s == "no_pl") return Ablation::NoPlanner;
    throw SchemaError("unknown ablation '" + s + "'");
}

namespace {

bool same_violations(const std::vector<Violation>& a, const std::vector<Violation>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].code != b[i].code || a[i].actor_id != b[i].actor_id ||
            std::abs(a[i].t - b[i].t) > 1e-9)
            return false;
    }
    return true;
}

// Check/repair loop; returns the final plan and whether it came out clean.
std::pair<CandidatePlan, bool> repair_loop(CandidatePlan plan, const Scenario& scenario,
                                           int r_max) {
    std::vector<Violation> v = validator_check(plan, scenario);
    int rounds = 0;
    while (!v.empty() && rounds < r_max) {
        plan = repair_plan(plan, v, scenario);
        std::vector<Violation> next = validator_check(plan, scenario);
        if (same_violations(next, v))
            throw IrreparableViolation("repair made no progress on " +
                                       std::string(to_string(v.front().code)));
        v = std::move(next);
        ++rounds;
    }
    return {std::move(plan), v.empty()};
}

}  // namespace

std::vector<CandidatePlan> generate_candidates(const Intent& intent, const Scenario& scenario,
                                               int n, const PlannerConfig& config,
                                               Ablation ablation) {
    if (n < 1) throw DomainError("candidate generation requires n >= 1");

    if (ablation == Ablation::Single) {
        CandidatePlan raw;
        if (!config.external_plan_endpoint.empty()) {
            raw = request_external_plan(intent, scenario, config.external_plan_endpoint,
                                        config.external_timeout_seconds);
        } else {
            // No generator adapter configured: one-shot naive plan, no route
            // search, no assessment, no coordination.
            raw = draft_route_plan(direct_route(intent, scenario, config), scenario, config);
        }
        try {
            auto [fixed, ok] = repair_loop(std::move(raw), scenario, config.max_repair_rounds);
            if (!ok) throw NoValidCandidate("single-shot plan still invalid after repair");
            fixed.plan_id = "single-direct";
            fixed.metadata["generator"] = "single";
            fixed.metadata["ablation"] = to_string(ablation);
            return {std::move(fixed)};
        } catch (const IrreparableViolation& e) {
            throw NoValidCandidate(std::string("single-shot plan irreparable: ") + e.what());
        }
    }

    std::vector<RouteSkeleton> routes;
    if (ablation == Ablation::NoPathfinder) {
        routes.push_back(direct_route(intent, scenario, config));
    } else {
        routes = pathfinder_topk(intent, scenario, n, config);
    }

    std::vector<AssessmentVector> assessments(routes.size());
    if (ablation != Ablation::NoAnalyst) {
        for (std::size_t i = 0; i < routes.size(); ++i)
            assessments[i] = analyst_assess(routes[i], scenario, config.analyst_rollouts, config);
    }

    struct Candidate {
        CandidatePlan plan;
        double utility;
        double route_score;
        std::string route_id;
    };
    std::vector<Candidate> candidates;

    for (std::size_t i = 0; i < routes.size(); ++i) {
        CandidatePlan plan;
        try {
            if (ablation == Ablation::NoPlanner) {
                plan = draft_route_plan(routes[i], scenario, config);
            } else {
                plan = planner_compose({&routes[i], 1}, {&assessments[i], 1}, intent, scenario,
                                       config);
            }
            auto [fixed, ok] = repair_loop(std::move(plan), scenario, config.max_repair_rounds);
            if (!ok) continue;
            plan = std::move(fixed);
        } catch (const NoFeasibleRoute&) {
            continue;
        } catch (const IrreparableViolation&) {
            continue;
        }
        candidates.push_back({std::move(plan),
                              global_utility(assessments[i], intent.priority_weights, scenario),
                              routes[i].score, routes[i].route_id});
    }

    if (candidates.empty()) throw NoValidCandidate("all generated candidates were discarded");

    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.utility != b.utility) return a.utility > b.utility;
        if (a.route_score != b.route_score) return a.route_score > b.route_score;
        return a.route_id < b.route_id;
    });

    std::vector<CandidatePlan> out;
    const std::string tag = ablation == Ablation::None ? "mpha" : to_string(ablation);
    for (std::size_t i = 0; i < candidates.size() && static_cast<int>(i) < n; ++i) {
        CandidatePlan p = std::move(candidates[i].plan);
        p.plan_id = tag + "-" + candidates[i].route_id;
        p.metadata["generator"] = tag;
        p.metadata["ablation"] = to_string(ablation);
        p.metadata["route_id"] = candidates[i].route_id;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace tacsim
