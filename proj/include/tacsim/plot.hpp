#pragma once

#include <string>

#include "tacsim/plan.hpp"
#include "tacsim/sim_engine.hpp"

namespace tacsim {

// Per-rollout CSV: tick, entity_id, x, y, health, suppressed.
std::string trajectory_csv(const RolloutRecord& record);

// Trajectory overlay: planned (dashed) vs simulated plan-side paths vs
// opponent paths, with no-fly zones and weapon ranges for context.
std::string trajectory_svg(const RolloutRecord& record, const CandidatePlan& plan,
                           const Scenario& scenario);

}  // namespace tacsim
