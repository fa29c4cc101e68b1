#include "tacsim/plan.hpp"

#include <cmath>

namespace tacsim {

const char* action_kind_name(const ActionBody& body) {
    if (std::holds_alternative<MoveToAction>(body)) return "MOVE_TO";
    if (std::holds_alternative<LaunchAction>(body)) return "LAUNCH";
    if (std::holds_alternative<SuppressAction>(body)) return "SUPPRESS";
    return "ESCORT";
}

bool action_order_less(const AtomicAction& a, const AtomicAction& b) {
    if (a.t_start != b.t_start) return a.t_start < b.t_start;
    return a.actor_id < b.actor_id;
}

const char* to_string(PlanDefectCode c) {
    switch (c) {
        case PlanDefectCode::UnknownActor: return "UnknownActor";
        case PlanDefectCode::UnknownTarget: return "UnknownTarget";
        case PlanDefectCode::ActorNotPlanExecuting: return "ActorNotPlanExecuting";
        case PlanDefectCode::ActionsUnsorted: return "ActionsUnsorted";
        case PlanDefectCode::ActionBeyondHorizon: return "ActionBeyondHorizon";
        case PlanDefectCode::TrajectoryMissing: return "TrajectoryMissing";
        case PlanDefectCode::TrajectoryIncomplete: return "TrajectoryIncomplete";
    }
    return "";
}

int schedule_tick(double t_start, double dt) {
    // First tick whose time is >= t_start; exact multiples of dt map to themselves.
    return static_cast<int>(std::ceil(t_start / dt - 1e-9));
}

std::vector<PlanDefect> validate_plan_shape(const CandidatePlan& plan, const Scenario& scenario) {
    std::vector<PlanDefect> defects;
    const double horizon = scenario.sim_config.horizon;

    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
        const AtomicAction& a = plan.actions[i];
        const EntityState* actor = scenario.find_entity(a.actor_id);
        if (!actor) {
            defects.push_back({PlanDefectCode::UnknownActor, a.actor_id});
        } else if (actor->side != Side::PlanExecuting) {
            defects.push_back({PlanDefectCode::ActorNotPlanExecuting, a.actor_id});
        }
        if (a.t_start < 0.0 || a.t_start > horizon) {
            defects.push_back({PlanDefectCode::ActionBeyondHorizon,
                               a.actor_id + " t_start=" + std::to_string(a.t_start)});
        }
        if (i > 0 && action_order_less(a, plan.actions[i - 1])) {
            defects.push_back({PlanDefectCode::ActionsUnsorted,
                               "index " + std::to_string(i)});
        }
        const std::string* referenced = nullptr;
        if (const auto* launch = std::get_if<LaunchAction>(&a.body)) referenced = &launch->target_id;
        if (const auto* sup = std::get_if<SuppressAction>(&a.body)) referenced = &sup->target_id;
        if (const auto* esc = std::get_if<EscortAction>(&a.body)) referenced = &esc->ally_id;
        if (referenced && !scenario.find_entity(*referenced)) {
            defects.push_back({PlanDefectCode::UnknownTarget, *referenced});
        }
    }

    const std::size_t want = static_cast<std::size_t>(scenario.sim_config.tick_count()) + 1;
    for (const EntityState& e : scenario.entities) {
        if (e.side != Side::PlanExecuting) continue;
        auto it = plan.planned_trajectories.find(e.id);
        if (it == plan.planned_trajectories.end()) {
            defects.push_back({PlanDefectCode::TrajectoryMissing, e.id});
        } else if (it->second.size() != want) {
            defects.push_back({PlanDefectCode::TrajectoryIncomplete,
                               e.id + " has " + std::to_string(it->second.size()) + " of " +
                                   std::to_string(want) + " samples"});
        }
    }
    return defects;
}

}  // namespace tacsim
