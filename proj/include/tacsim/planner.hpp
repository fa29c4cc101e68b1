#pragma once

#include <span>
#include <string>
#include <vector>

#include "tacsim/plan.hpp"
#include "tacsim/types.hpp"

namespace tacsim {

struct PlannerConfig {
    double lattice_cell = 4.0;        // route search lattice spacing, map units
    double diversity_inflation = 2.0; // cost multiplier on nodes of extracted routes
    double route_length_weight = 1.0;
    double route_threat_weight = 50.0;
    int analyst_rollouts = 10;        // fast rollouts per route
    int max_repair_rounds = 3;
    double suppress_lead_seconds = -1.0;  // < 0: use tau_sup from the scenario
    Vec2 escort_offset{-6.0, 6.0};
    double utility_floor = -1e18;         // NoFeasibleRoute below this
    double standoff_fraction = 0.75;      // suppressor holds at this fraction of own range
    std::string external_plan_endpoint;   // one-shot generation adapter, used by Ablation::Single
    double external_timeout_seconds = 10.0;
};

// Static threat intensity: sum over opponent weapon entities of
// p_base * max(0, 1 - d/R). Continuous and deterministic in the query point.
class ThreatField {
public:
    explicit ThreatField(const Scenario& scenario);
    double at(const Vec2& p) const;

private:
    struct Source {
        Vec2 position;
        double p_base;
        double range;
    };
    std::vector<Source> sources_;
};

// Trapezoid-rule integral of the threat field along a polyline, sampled at
// most `step` apart.
double polyline_threat_exposure(const std::vector<Vec2>& waypoints, const ThreatField& field,
                                double step);

double polyline_length(const std::vector<Vec2>& waypoints);

struct RouteSkeleton {
    std::string route_id;
    std::vector<Vec2> waypoints;  // consecutive points distinct; avoids all no-fly zones
    double length = 0.0;
    double threat_exposure = 0.0;
    double score = 0.0;  // -w_len * length - w_threat * exposure, recomputable
};

// K diverse lattice routes from the bomber start region to the core target,
// best score first. Diversity comes from inflating costs along already
// extracted routes; exhausted alternatives yield fewer than K routes.
std::vector<RouteSkeleton> pathfinder_topk(const Intent& intent, const Scenario& scenario, int k,
                                           const PlannerConfig& config);

// Straight start-to-target route used by ablations.
RouteSkeleton direct_route(const Intent& intent, const Scenario& scenario,
                           const PlannerConfig& config);

struct AssessmentVector {
    double expected_success = 0.0;  // in [0,1]
    double expected_loss = 0.0;     // friendly platforms lost
    double expected_time = 0.0;     // seconds, <= horizon
    int rollouts = 0;
};

// Draft plan: bombers follow the route at max speed and launch on entering
// range; fighters hold position.
CandidatePlan draft_route_plan(const RouteSkeleton& route, const Scenario& scenario,
                               const PlannerConfig& config);

// Fast assessment: n_fast seeded draft rollouts against the static opponent.
AssessmentVector analyst_assess(const RouteSkeleton& route, const Scenario& scenario, int n_fast,
                                const PlannerConfig& config);

double global_utility(const AssessmentVector& e, const PriorityWeights& w,
                      const Scenario& scenario);

// Selects the best-utility route and composes the full multi-platform plan:
// route-following bombers, fighters assigned to suppression of the
// highest-threat defenses intersecting the route (lead time before range
// entry) or to escort, launches scheduled at range entry under the salvo cap.
CandidatePlan planner_compose(std::span<const RouteSkeleton> routes,
                              std::span<const AssessmentVector> assessments, const Intent& intent,
                              const Scenario& scenario, const PlannerConfig& config);

enum class ViolationCode {
    AmmoExceeded,
    OutOfRangeLaunch,
    SpeedExceeded,
    NoFlyIncursion,
    TimestampDisorder,
    SalvoLimit,
    DurationExceeded,
};

const char* to_string(ViolationCode c);

struct Violation {
    ViolationCode code;
    std::string actor_id;
    double t = 0.0;
    double detail = 0.0;  // violation margin (overshoot distance, excess count, ...)
};

// Movement-only kinematic replay of a plan's actions; positions for every
// plan-executing entity at ticks 0..ticks. Uses the same integrator as the
// engine, so an undisturbed rollout reproduces it exactly.
std::map<std::string, std::vector<Vec2>> integrate_plan_kinematics(
    const std::vector<AtomicAction>& actions, const Scenario& scenario, int ticks);

// Rule-based semantic check over the plan's own kinematics. Empty result
// means the plan is valid.
std::vector<Violation> validator_check(const CandidatePlan& plan, const Scenario& scenario);

// One deterministic edit per violation, applied in ViolationCode order;
// regenerates planned trajectories. Raises IrreparableViolation when an edit
// rule cannot apply.
CandidatePlan repair_plan(const CandidatePlan& plan, const std::vector<Violation>& violations,
                          const Scenario& scenario);

enum class Ablation { None, Single, NoPathfinder, NoAnalyst, NoPlanner };

const char* to_string(Ablation a);
Ablation ablation_from_string(const std::string& s);

// Full pipeline: route search, assessment, composition, check/repair loop.
// Returns up to n valid candidates ordered by the generator's own utility.
std::vector<CandidatePlan> generate_candidates(const Intent& intent, const Scenario& scenario,
                                               int n, const PlannerConfig& config,
                                               Ablation ablation = Ablation::None);

}  // namespace tacsim
