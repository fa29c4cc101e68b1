#include "tacsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tacsim/planner.hpp"

namespace tacsim {

void MetricWeights::validate() const {
    if (!(eta1 >= 0.0 && eta2 >= 0.0 && lambda1 > 0.0 && lambda2 >= 0.0 && lambda3 >= 0.0 &&
          norm_x0 > 0.0))
        throw DomainError("metric weights must be non-negative with lambda1 > 0 and norm_x0 > 0");
}

double default_norm_scale(const Scenario& scenario) {
    return std::hypot(scenario.map_width, scenario.map_height) / 10.0;
}

double compute_msr(std::span<const RolloutRecord> records) {
    if (records.empty()) throw EmptyInput("msr over zero records");
    double successes = 0.0;
    for (const RolloutRecord& r : records)
        if (r.outcome == Outcome::Success) successes += 1.0;
    return successes / static_cast<double>(records.size());
}

double compute_cla(std::span<const RolloutRecord> records, const MetricWeights& weights) {
    if (records.empty()) throw EmptyInput("cla over zero records");
    double total = 0.0;
    for (const RolloutRecord& r : records)
        total += weights.eta1 * r.lost_blue + weights.eta2 * r.ammo_spent_blue;
    return total / static_cast<double>(records.size());
}

DisplacementSummary compute_ade(std::span<const RolloutRecord> records,
                                const CandidatePlan& plan) {
    if (records.empty()) throw EmptyInput("ade over zero records");

    double sum = 0.0;
    std::size_t samples = 0;
    double final_sum = 0.0;
    std::size_t final_samples = 0;

    for (const RolloutRecord& r : records) {
        for (const EntitySummary& e : r.entities) {
            if (e.side != Side::PlanExecuting) continue;
            auto pit = plan.planned_trajectories.find(e.id);
            if (pit == plan.planned_trajectories.end())
                throw MissingPlannedTrajectory("plan lacks a trajectory for '" + e.id + "'");
            auto sit = r.trajectories.find(e.id);
            if (sit == r.trajectories.end())
                throw MissingPlannedTrajectory("record lacks a trajectory for '" + e.id + "'");
            const auto& planned = pit->second;
            const auto& simulated = sit->second;
            for (int t = 1; t <= r.end_tick; ++t) {
                const Vec2 sim_pos = simulated[static_cast<std::size_t>(
                    std::min<int>(t, static_cast<int>(simulated.size()) - 1))].position;
                const Vec2 plan_pos = planned[static_cast<std::size_t>(
                    std::min<int>(t, static_cast<int>(planned.size()) - 1))];
                const double d = distance(sim_pos, plan_pos);
                sum += d;
                ++samples;
                if (t == r.end_tick) {
                    final_sum += d;
                    ++final_samples;
                }
            }
        }
    }
    DisplacementSummary out;
    if (samples > 0) out.ade = sum / static_cast<double>(samples);
    if (final_samples > 0) out.fde = final_sum / static_cast<double>(final_samples);
    return out;
}

double compute_pqs(double msr, double cla, double ade, const MetricWeights& weights) {
    const double phi = ade / (ade + weights.norm_x0);
    return weights.lambda1 * msr - weights.lambda2 * cla - weights.lambda3 * phi;
}

std::pair<double, double> success_aggregates(double easy_msr, double difficult_msr) {
    return {(easy_msr + difficult_msr) / 2.0, std::min(easy_msr, difficult_msr)};
}

double suppression_rate_outcome(double msr) { return 1.0 - msr; }

ProcessMetrics process_metrics(std::span<const RolloutRecord> records) {
    if (records.empty()) throw EmptyInput("process metrics over zero records");

    ProcessMetrics pm;
    double blue_fires = 0.0, blue_hits = 0.0, blue_misses = 0.0;
    double opp_fires = 0.0, opp_hits = 0.0;
    double lost = 0.0;
    double ttk_sum = 0.0;
    int ttk_count = 0;
    int friendly = 0;

    for (const RolloutRecord& r : records) {
        std::map<std::string, Side> side_of;
        for (const EntitySummary& e : r.entities) side_of[e.id] = e.side;

        int record_friendly = 0;
        for (const EntitySummary& e : r.entities)
            if (e.side == Side::PlanExecuting) ++record_friendly;
        friendly = record_friendly;

        lost += r.lost_blue;
        for (const Event& e : r.events) {
            const bool blue = side_of[e.actor_id] == Side::PlanExecuting;
            switch (e.kind) {
                case EventKind::Fire:
                    (blue ? blue_fires : opp_fires) += 1.0;
                    break;
                case EventKind::Hit:
                    (blue ? blue_hits : opp_hits) += 1.0;
                    break;
                case EventKind::Miss:
                    if (blue) blue_misses += 1.0;
                    break;
                default:
                    break;
            }
        }
        if (r.outcome == Outcome::Success) {
            for (const Event& e : r.events) {
                if (e.kind == EventKind::Destroyed && e.actor_id == r.core_target_id) {
                    ttk_sum += e.tick * r.dt;
                    ++ttk_count;
                    break;
                }
            }
        }
    }

    const double n = static_cast<double>(records.size());
    pm.attrition_mean = lost / n;
    pm.attrition_fraction = friendly > 0 ? pm.attrition_mean / friendly : 0.0;
    pm.opponent_fire_hits = opp_hits / n;
    pm.opponent_fire_fired = opp_fires / n;
    pm.missiles_launched = blue_fires / n;
    pm.missile_hits = blue_hits / n;
    pm.missile_misses = blue_misses / n;
    if (ttk_count > 0) pm.ttk_mean = ttk_sum / ttk_count;
    if (blue_fires > 0.0) pm.sr_process_blue = blue_hits / blue_fires;
    if (opp_fires > 0.0) pm.sr_process_opponent = opp_hits / opp_fires;
    return pm;
}

namespace {

// Threshold tables for the static rubric; documented in the README.
int score_smoothness(double total_turn_deg) {
    if (total_turn_deg <= 10.0) return 5;
    if (total_turn_deg <= 30.0) return 4;
    if (total_turn_deg <= 60.0) return 3;
    if (total_turn_deg <= 120.0) return 2;
    return 1;
}

int score_threat(double ratio) {
    if (ratio <= 0.25) return 5;
    if (ratio <= 0.5) return 4;
    if (ratio <= 0.75) return 3;
    if (ratio <= 1.0) return 2;
    return 1;
}

int score_resources(double fraction) {
    if (fraction >= 1.0) return 1;
    if (fraction <= 0.25) return 5;
    if (fraction <= 0.5) return 4;
    if (fraction <= 0.75) return 3;
    return 2;
}

int score_coordination(double coverage, bool any_sites) {
    if (!any_sites) return 5;  // nothing to coordinate against
    if (coverage >= 1.0) return 5;
    if (coverage >= 0.75) return 4;
    if (coverage >= 0.5) return 3;
    if (coverage > 0.0) return 2;
    return 1;
}

int score_feasibility(bool valid, double margin_fraction, bool any_launch) {
    if (!valid || !any_launch) return 1;
    if (margin_fraction >= 0.5) return 5;
    if (margin_fraction >= 0.25) return 4;
    if (margin_fraction >= 0.1) return 3;
    return 2;
}

}  // namespace

StaticScore static_score(const CandidatePlan& plan, const Scenario& scenario) {
    StaticScore s;
    const SimConfig& cfg = scenario.sim_config;

    // Path smoothness: mean total turning angle over bomber waypoint chains.
    double turn_sum = 0.0;
    int turn_entities = 0;
    for (const EntityState& e : scenario.entities) {
        if (e.side != Side::PlanExecuting || e.cls != EntityClass::Bomber) continue;
        std::vector<Vec2> chain{e.position};
        for (const AtomicAction& a : plan.actions) {
            if (a.actor_id != e.id) continue;
            if (const auto* m = std::get_if<MoveToAction>(&a.body)) chain.push_back(m->waypoint);
        }
        double total = 0.0;
        for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
            const Vec2 u = chain[i] - chain[i - 1];
            const Vec2 v = chain[i + 1] - chain[i];
            if (u.norm() < 1e-9 || v.norm() < 1e-9) continue;
            const double c =
                std::clamp((u.x * v.x + u.y * v.y) / (u.norm() * v.norm()), -1.0, 1.0);
            total += std::acos(c) * 180.0 / M_PI;
        }
        turn_sum += total;
        ++turn_entities;
    }
    s.path_smoothness = score_smoothness(turn_entities > 0 ? turn_sum / turn_entities : 0.0);

    // Threat avoidance: bomber exposure along the planned trajectory relative
    // to the straight start-to-target line.
    const ThreatField field(scenario);
    const EntityState& core = scenario.core_target();
    double plan_exposure = 0.0;
    double direct_exposure = 0.0;
    int exposure_entities = 0;
    for (const EntityState& e : scenario.entities) {
        if (e.side != Side::PlanExecuting || e.cls != EntityClass::Bomber) continue;
        auto it = plan.planned_trajectories.find(e.id);
        if (it == plan.planned_trajectories.end()) continue;
        plan_exposure += polyline_threat_exposure(it->second, field, 2.0);
        direct_exposure +=
            polyline_threat_exposure({e.position, core.position}, field, 2.0);
        ++exposure_entities;
    }
    double ratio = 0.0;
    if (exposure_entities > 0) {
        ratio = direct_exposure > 1e-9 ? plan_exposure / direct_exposure
                                       : (plan_exposure > 1e-9 ? 2.0 : 0.0);
    }
    s.threat_avoidance = score_threat(ratio);

    // Resource consumption: planned launches vs total ammo budget.
    int launches = 0;
    for (const AtomicAction& a : plan.actions)
        if (std::holds_alternative<LaunchAction>(a.body)) ++launches;
    int budget = 0;
    for (const EntityState& e : scenario.entities) {
        if (e.side != Side::PlanExecuting || !e.weapon) continue;
        int b = e.ammo;
        auto it = scenario.constraint_set.ammo_budget.find(e.id);
        if (it != scenario.constraint_set.ammo_budget.end()) b = std::min(b, it->second);
        budget += b;
    }
    s.resource_consumption =
        score_resources(budget > 0 ? static_cast<double>(launches) / budget : 1.0);

    // Tactical coordination: fraction of threatened range entries covered by a
    // suppression window starting no later than the entry.
    int entries = 0;
    int covered = 0;
    for (const EntityState& d : scenario.entities) {
        if (d.side != Side::Opponent || !d.weapon) continue;
        if (d.cls != EntityClass::AntiAirThreat && d.cls != EntityClass::MissileThreatRegion)
            continue;
        int entry_tick = -1;
        for (const EntityState& b : scenario.entities) {
            if (b.side != Side::PlanExecuting || b.cls != EntityClass::Bomber) continue;
            auto it = plan.planned_trajectories.find(b.id);
            if (it == plan.planned_trajectories.end()) continue;
            for (std::size_t t = 0; t < it->second.size(); ++t) {
                if (distance(it->second[t], d.position) <= d.weapon->range) {
                    if (entry_tick < 0 || static_cast<int>(t) < entry_tick)
                        entry_tick = static_cast<int>(t);
                    break;
                }
            }
        }
        if (entry_tick < 0) continue;
        ++entries;
        const double entry_time = entry_tick * cfg.dt;
        for (const AtomicAction& a : plan.actions) {
            const auto* sup = std::get_if<SuppressAction>(&a.body);
            if (!sup || sup->target_id != d.id) continue;
            if (a.t_start <= entry_time + 1e-9 && a.t_start + sup->duration >= entry_time) {
                ++covered;
                break;
            }
        }
    }
    s.tactical_coordination = score_coordination(
        entries > 0 ? static_cast<double>(covered) / entries : 0.0, entries > 0);

    // Engagement feasibility: validator verdict plus worst-case launch margin.
    const bool valid = validator_check(plan, scenario).empty();
    const auto traj = integrate_plan_kinematics(plan.actions, scenario, cfg.tick_count());
    double margin = 1.0;
    bool any_launch = false;
    for (const AtomicAction& a : plan.actions) {
        const auto* launch = std::get_if<LaunchAction>(&a.body);
        if (!launch) continue;
        const EntityState* shooter = scenario.find_entity(a.actor_id);
        const EntityState* target = scenario.find_entity(launch->target_id);
        if (!shooter || !shooter->weapon || !target) continue;
        auto it = traj.find(a.actor_id);
        if (it == traj.end()) continue;
        any_launch = true;
        const int tick = std::min(schedule_tick(a.t_start, cfg.dt),
                                  static_cast<int>(it->second.size()) - 1);
        const double d = distance(it->second[static_cast<std::size_t>(tick)], target->position);
        margin = std::min(margin, (shooter->weapon->range - d) / shooter->weapon->range);
    }
    s.engagement_feasibility = score_feasibility(valid, margin, any_launch);

    s.total = (s.path_smoothness + s.threat_avoidance + s.resource_consumption +
               s.tactical_coordination + s.engagement_feasibility) /
              5.0;
    return s;
}

}  // namespace tacsim
