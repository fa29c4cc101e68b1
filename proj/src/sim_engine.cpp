#include "tacsim/sim_engine.hpp"

#include <algorithm>
#include <cmath>

#include "tacsim/json_io.hpp"
#include "tacsim/opponents.hpp"
#include "tacsim/sha256.hpp"

namespace tacsim {

namespace {
// Tolerance for ROF and suppression-window gates; keeps k*dt arithmetic from
// leaking into gameplay decisions.
constexpr double kTimeEps = 1e-9;
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Continue: return "Continue";
        case Outcome::Success: return "Success";
        case Outcome::Failure: return "Failure";
    }
    return "";
}

const char* to_string(FailureReason r) {
    switch (r) {
        case FailureReason::None: return "None";
        case FailureReason::AllFriendlyLost: return "AllFriendlyLost";
        case FailureReason::HorizonExceeded: return "HorizonExceeded";
    }
    return "";
}

double effective_hit_probability(double p_base, double d, double range, double alpha,
                                 double beta) {
    if (!(p_base >= 0.0 && p_base <= 1.0))
        throw DomainError("p_base must lie in [0,1]");
    if (!(range > 0.0)) throw DomainError("range must be > 0");
    if (!(d >= 0.0)) throw DomainError("distance must be >= 0");
    if (std::abs(alpha + beta - 1.0) > 1e-12)
        throw DomainError("alpha+beta must equal 1");
    if (d > range) return 0.0;
    const double p = p_base * (alpha + beta * (1.0 - d / range));
    return std::clamp(p, 0.0, 1.0);
}

SuppressedFireParams suppressed_fire_params(double rof_base, double p_eff, double gamma_rof,
                                            double lambda_hit) {
    if (!(rof_base > 0.0)) throw DomainError("rof_base must be > 0");
    if (!(p_eff >= 0.0 && p_eff <= 1.0)) throw DomainError("p_eff must lie in [0,1]");
    if (!(gamma_rof > 1.0)) throw DomainError("gamma_rof must be > 1");
    if (!(lambda_hit > 0.0 && lambda_hit < 1.0)) throw DomainError("lambda_hit must lie in (0,1)");
    return {rof_base * gamma_rof, p_eff * lambda_hit};
}

bool resolve_fire(EntityState& shooter, EntityState& target, const Scenario& scenario,
                  const FireContext& ctx, RngStream& rng, std::vector<Event>& events) {
    if (!shooter.alive() || !shooter.weapon || shooter.ammo <= 0) return false;
    if (!target.alive()) return false;

    const SimConfig& cfg = scenario.sim_config;
    const WeaponSpec& w = *shooter.weapon;
    const bool shooter_suppressed = shooter.suppressed_at(ctx.now);

    double interval = w.rof_base;
    double p = effective_hit_probability(w.p_base, distance(shooter.position, target.position),
                                         w.range, cfg.alpha, cfg.beta);
    if (shooter_suppressed) {
        const SuppressedFireParams sp =
            suppressed_fire_params(w.rof_base, p, cfg.gamma_rof, cfg.lambda_hit);
        interval = sp.rof_eff;
        p = sp.p_eff;
    }
    if (shooter.last_fire_time && ctx.now - *shooter.last_fire_time < interval - kTimeEps)
        return false;

    const double d = distance(shooter.position, target.position);
    if (d > w.range) return false;

    shooter.ammo -= 1;
    shooter.last_fire_time = ctx.now;
    events.push_back({ctx.tick,
                      EventKind::Fire,
                      shooter.id,
                      target.id,
                      {{"distance", d},
                       {"p", p},
                       {"suppressed", shooter_suppressed ? 1.0 : 0.0},
                       {"ammo_left", static_cast<double>(shooter.ammo)}}});

    const double roll = rng.next_uniform();
    if (roll < p) {
        if (ctx.mode == FireMode::Suppress) {
            const double until = ctx.now + cfg.tau_sup;
            const bool was_suppressed = target.suppressed_at(ctx.now);
            target.suppressed_until = until;  // re-hits refresh, not stack
            events.push_back({ctx.tick,
                              EventKind::Hit,
                              shooter.id,
                              target.id,
                              {{"p", p}, {"roll", roll}, {"suppress_until", until}}});
            if (!was_suppressed) {
                events.push_back(
                    {ctx.tick, EventKind::SuppressStart, target.id, "", {{"until", until}}});
            }
            if (scenario.suppression_applies_damage) {
                target.health = std::max(0.0, target.health - w.damage);
                if (!target.alive()) events.push_back({ctx.tick, EventKind::Destroyed, target.id, "", {}});
            }
        } else {
            target.health = std::max(0.0, target.health - w.damage);
            events.push_back({ctx.tick,
                              EventKind::Hit,
                              shooter.id,
                              target.id,
                              {{"p", p}, {"roll", roll}, {"damage", w.damage}}});
            if (!target.alive()) events.push_back({ctx.tick, EventKind::Destroyed, target.id, "", {}});
        }
    } else {
        events.push_back(
            {ctx.tick, EventKind::Miss, shooter.id, target.id, {{"p", p}, {"roll", roll}}});
    }
    return true;
}

namespace {

void note_dropped(std::vector<std::string>* dropped, const AtomicAction& a, const char* why) {
    if (!dropped) return;
    dropped->push_back(std::string("StaleAction: ") + action_kind_name(a.body) + " by '" +
                       a.actor_id + "' dropped (" + why + ")");
}

// Advance one entity toward a target point; returns true on arrival.
bool advance_toward(EntityState& e, const Vec2& target, double speed, double dt,
                    const MapBounds& bounds) {
    const Vec2 delta = target - e.position;
    const double dist = delta.norm();
    const double step_len = speed * dt;
    bool arrived = false;
    if (dist <= step_len || dist < 1e-12) {
        e.position = target;
        arrived = true;
    } else {
        e.position = e.position + delta * (step_len / dist);
    }
    if (dist > 1e-12) e.heading = std::atan2(delta.y, delta.x);
    e.position = bounds.clamp(e.position);
    return arrived;
}

}  // namespace

GlobalState step(const GlobalState& state, std::span<const AtomicAction> blue_actions,
                 std::span<const AtomicAction> red_actions, const Scenario& scenario,
                 RngStream& rng, std::vector<std::string>* dropped) {
    GlobalState st = state;
    st.transient_events.clear();
    const double now = state.time;
    const int tick = state.tick;
    const SimConfig& cfg = scenario.sim_config;
    const MapBounds bounds = scenario.bounds();
    std::vector<Event>& ev = st.transient_events;

    // Pending launches keyed by (entity index, arrival order) so phase 4 can
    // run in stored entity order.
    std::vector<std::pair<int, LaunchAction>> launches;

    auto ingest = [&](std::span<const AtomicAction> actions, Side expected) {
        for (const AtomicAction& a : actions) {
            EntityState* actor = st.find_entity(a.actor_id);
            if (!actor) {
                note_dropped(dropped, a, "unknown actor");
                continue;
            }
            if (!actor->alive()) {
                note_dropped(dropped, a, "actor dead");
                continue;
            }
            if (actor->side != expected) {
                note_dropped(dropped, a, "actor on wrong side");
                continue;
            }
            if (const auto* m = std::get_if<MoveToAction>(&a.body)) {
                // Commanded speed is capped at the platform limit; the plan
                // validator reports the violation, the engine stays lenient.
                actor->active_move =
                    MoveCommand{m->waypoint, std::clamp(m->speed, 0.0, actor->speed_max)};
                actor->active_escort.reset();
            } else if (const auto* e = std::get_if<EscortAction>(&a.body)) {
                if (!st.find_entity(e->ally_id)) {
                    note_dropped(dropped, a, "unknown escort ally");
                    continue;
                }
                actor->active_escort = EscortCommand{e->ally_id, e->offset};
                actor->active_move.reset();
            } else if (const auto* s = std::get_if<SuppressAction>(&a.body)) {
                actor->active_suppress = SuppressWindow{s->target_id, now, now + s->duration};
            } else if (const auto* l = std::get_if<LaunchAction>(&a.body)) {
                launches.emplace_back(st.entity_index(a.actor_id), *l);
            }
        }
    };
    ingest(blue_actions, Side::PlanExecuting);
    ingest(red_actions, Side::Opponent);

    // (1) suppression expiry
    for (EntityState& e : st.entities) {
        if (e.alive() && e.suppressed_until && now >= *e.suppressed_until - kTimeEps) {
            e.suppressed_until.reset();
            ev.push_back({tick, EventKind::SuppressEnd, e.id, "", {}});
        }
    }

    // (2) movement integration, stored entity order
    for (EntityState& e : st.entities) {
        if (!e.alive()) continue;
        if (e.active_move) {
            const MoveCommand cmd = *e.active_move;
            if (advance_toward(e, cmd.waypoint, cmd.speed, cfg.dt, bounds)) {
                ev.push_back({tick,
                              EventKind::MoveCompleted,
                              e.id,
                              "",
                              {{"x", e.position.x}, {"y", e.position.y}}});
                e.active_move.reset();
            }
        } else if (e.active_escort) {
            const EntityState* ally = st.find_entity(e.active_escort->ally_id);
            if (!ally || !ally->alive()) {
                e.active_escort.reset();
                continue;
            }
            const Vec2 station = bounds.clamp(ally->position + e.active_escort->offset);
            advance_toward(e, station, e.speed_max, cfg.dt, bounds);
        }
    }

    // (3) active suppression fire, stored entity order of the suppressor
    for (EntityState& e : st.entities) {
        if (!e.alive() || !e.active_suppress) continue;
        if (now > e.active_suppress->until + kTimeEps) {
            e.active_suppress.reset();
            continue;
        }
        EntityState* target = st.find_entity(e.active_suppress->target_id);
        if (!target || !target->alive()) {
            e.active_suppress.reset();
            continue;
        }
        resolve_fire(e, *target, scenario, {now, tick, FireMode::Suppress}, rng, ev);
    }

    // (4) launch resolution, stored entity order of the shooter
    std::stable_sort(launches.begin(), launches.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [idx, launch] : launches) {
        EntityState& shooter = st.entities[static_cast<std::size_t>(idx)];
        EntityState* target = st.find_entity(launch.target_id);
        if (!target) {
            if (dropped)
                dropped->push_back("StaleAction: LAUNCH by '" + shooter.id +
                                   "' dropped (unknown target '" + launch.target_id + "')");
            continue;
        }
        if (!target->alive()) {
            if (dropped)
                dropped->push_back("StaleAction: LAUNCH by '" + shooter.id +
                                   "' dropped (target '" + launch.target_id + "' dead)");
            continue;
        }
        resolve_fire(shooter, *target, scenario, {now, tick, FireMode::Damage}, rng, ev);
    }

    // (5) advance the clock
    st.tick = tick + 1;
    st.time = st.tick * cfg.dt;
    return st;
}

Termination check_termination(const GlobalState& state, const Scenario& scenario) {
    const EntityState* core = state.find_entity(scenario.core_target_id);
    if (core && !core->alive()) return {Outcome::Success, FailureReason::None};

    bool any_friendly_alive = false;
    for (const EntityState& e : state.entities) {
        if (e.side == Side::PlanExecuting && e.alive()) {
            any_friendly_alive = true;
            break;
        }
    }
    if (!any_friendly_alive) return {Outcome::Failure, FailureReason::AllFriendlyLost};
    if (state.tick >= scenario.sim_config.tick_count())
        return {Outcome::Failure, FailureReason::HorizonExceeded};
    return {Outcome::Continue, FailureReason::None};
}

GlobalState initial_state(const Scenario& scenario) {
    GlobalState st;
    st.tick = 0;
    st.time = 0.0;
    st.entities = scenario.entities;
    for (EntityState& e : st.entities) {
        e.suppressed_until.reset();
        e.last_fire_time.reset();
        e.active_move.reset();
        e.active_escort.reset();
        e.active_suppress.reset();
    }
    return st;
}

std::string event_log_lines(std::span<const Event> events) {
    std::string out;
    for (const Event& e : events) {
        out += canonical_dump(event_to_json(e));
        out.push_back('\n');
    }
    return out;
}

RolloutRecord run_rollout(const Scenario& scenario, const CandidatePlan& plan,
                          OpponentPolicy& opponent, const SeedInfo& seed) {
    const std::vector<PlanDefect> defects = validate_plan_shape(plan, scenario);
    if (!defects.empty()) {
        throw InvariantError("plan '" + plan.plan_id + "' fails shape validation: " +
                             std::string(to_string(defects.front().code)) + " " +
                             defects.front().detail);
    }

    const SimConfig& cfg = scenario.sim_config;
    RngStream rng{seed.base_seed, seed.rollout_index, 0};
    opponent.reset(seed);

    // Blue actions bucketed by execution tick; the plan executes verbatim.
    std::map<int, std::vector<AtomicAction>> schedule;
    for (const AtomicAction& a : plan.actions) {
        schedule[schedule_tick(a.t_start, cfg.dt)].push_back(a);
    }

    RolloutRecord rec;
    rec.algorithm_id = RngStream::kAlgorithmId;
    rec.base_seed = seed.base_seed;
    rec.rollout_index = seed.rollout_index;
    rec.plan_id = plan.plan_id;
    rec.opponent_id = opponent.id();
    rec.core_target_id = scenario.core_target_id;
    rec.dt = cfg.dt;

    std::map<std::string, int> initial_ammo;
    for (const EntityState& e : scenario.entities) {
        rec.entities.push_back({e.id, e.side, e.cls, e.value_class});
        initial_ammo[e.id] = e.ammo;
    }

    std::vector<GlobalState> history;
    history.push_back(initial_state(scenario));

    auto sample = [&rec](const GlobalState& st) {
        for (const EntityState& e : st.entities) {
            rec.trajectories[e.id].push_back(
                {e.position, e.health, e.ammo, e.suppressed_at(st.time)});
        }
    };
    sample(history.back());

    Termination term = check_termination(history.back(), scenario);
    while (term.outcome == Outcome::Continue) {
        const GlobalState& cur = history.back();
        std::vector<AtomicAction> red;
        try {
            red = opponent.decide(history, scenario);
        } catch (const Error& e) {
            throw OpponentFault("opponent '" + opponent.id() + "' failed at tick " +
                                std::to_string(cur.tick) + ": " + e.name() + ": " + e.what());
        }
        static const std::vector<AtomicAction> kNone;
        auto it = schedule.find(cur.tick);
        const std::vector<AtomicAction>& blue = (it == schedule.end()) ? kNone : it->second;

        GlobalState next = step(cur, blue, red, scenario, rng, &rec.dropped_actions);
        for (const Event& e : next.transient_events) rec.events.push_back(e);
        sample(next);
        history.push_back(std::move(next));
        term = check_termination(history.back(), scenario);
    }

    rec.outcome = term.outcome;
    rec.failure_reason = term.reason;
    rec.end_tick = history.back().tick;
    rec.draw_count = rng.draw_counter;

    for (const EntityState& e : history.back().entities) {
        const int spent = initial_ammo[e.id] - e.ammo;
        if (e.side == Side::PlanExecuting) {
            rec.ammo_spent_blue += spent;
            if (!e.alive()) ++rec.lost_blue;
        } else {
            rec.ammo_spent_opponent += spent;
            if (!e.alive()) ++rec.lost_opponent;
        }
    }
    rec.log_hash = sha256_hex(event_log_lines(rec.events));
    return rec;
}

}  // namespace tacsim
