#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "tacsim/geometry.hpp"
#include "tacsim/types.hpp"

namespace tacsim {

struct MoveToAction {
    Vec2 waypoint;
    double speed = 0.0;
};

struct LaunchAction {
    std::string weapon;
    std::string target_id;
};

struct SuppressAction {
    std::string target_id;
    double duration = 0.0;  // how long the actor keeps the target under suppression fire
};

struct EscortAction {
    std::string ally_id;
    Vec2 offset;
};

using ActionBody = std::variant<MoveToAction, LaunchAction, SuppressAction, EscortAction>;

const char* action_kind_name(const ActionBody& body);

struct AtomicAction {
    std::string actor_id;
    double t_start = 0.0;
    ActionBody body;
};

// Sort key used everywhere a plan's action list must be ordered.
bool action_order_less(const AtomicAction& a, const AtomicAction& b);

struct CandidatePlan {
    std::string plan_id;
    std::vector<AtomicAction> actions;  // sorted by (t_start, actor_id)
    // Per plan-executing entity: position at every tick 0..horizon.
    std::map<std::string, std::vector<Vec2>> planned_trajectories;
    std::map<std::string, std::string> metadata;
};

enum class PlanDefectCode {
    UnknownActor,
    UnknownTarget,
    ActorNotPlanExecuting,
    ActionsUnsorted,
    ActionBeyondHorizon,
    TrajectoryMissing,
    TrajectoryIncomplete,
};

const char* to_string(PlanDefectCode c);

struct PlanDefect {
    PlanDefectCode code;
    std::string detail;
};

// Structural pre-filter: ids resolve, actions sorted, timestamps within the
// horizon, trajectories complete. Defects are data, not errors.
std::vector<PlanDefect> validate_plan_shape(const CandidatePlan& plan, const Scenario& scenario);

// Tick at which an action with the given start time is executed.
int schedule_tick(double t_start, double dt);

}  // namespace tacsim
