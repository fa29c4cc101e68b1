#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tacsim/plan.hpp"
#include "tacsim/rng.hpp"
#include "tacsim/state.hpp"

namespace tacsim {

class OpponentPolicy;

// Eq.-style engagement model: p_base * (alpha + beta * (1 - d/R)) inside
// range, 0 beyond it, clamped to [0,1].
double effective_hit_probability(double p_base, double d, double range, double alpha, double beta);

struct SuppressedFireParams {
    double rof_eff;    // seconds per shot
    double p_eff;      // degraded hit probability
};

SuppressedFireParams suppressed_fire_params(double rof_base, double p_eff, double gamma_rof,
                                            double lambda_hit);

enum class FireMode { Damage, Suppress };

struct FireContext {
    double now = 0.0;
    int tick = 0;
    FireMode mode = FireMode::Damage;
};

// One weapon engagement. Silent no-op when the shooter cannot fire (dead, no
// weapon, no ammo, ROF gate closed, target dead or out of range); otherwise
// spends one round, emits Fire, consumes exactly one uniform draw and emits
// Hit or Miss (strict u < p). Returns true when a round was fired.
bool resolve_fire(EntityState& shooter, EntityState& target, const Scenario& scenario,
                  const FireContext& ctx, RngStream& rng, std::vector<Event>& events);

// One deterministic tick: suppression expiry, movement integration, active
// suppression fire, launch resolution, tick increment. Actions referencing
// dead or unknown entities are dropped and noted in `dropped`.
GlobalState step(const GlobalState& state, std::span<const AtomicAction> blue_actions,
                 std::span<const AtomicAction> red_actions, const Scenario& scenario,
                 RngStream& rng, std::vector<std::string>* dropped = nullptr);

enum class Outcome { Continue, Success, Failure };
enum class FailureReason { None, AllFriendlyLost, HorizonExceeded };

const char* to_string(Outcome o);
const char* to_string(FailureReason r);

struct Termination {
    Outcome outcome = Outcome::Continue;
    FailureReason reason = FailureReason::None;
};

// Success iff the core target is dead; then AllFriendlyLost; then horizon.
Termination check_termination(const GlobalState& state, const Scenario& scenario);

struct TrajPoint {
    Vec2 position;
    double health = 0.0;
    int ammo = 0;
    bool suppressed = false;
};

struct EntitySummary {
    std::string id;
    Side side = Side::PlanExecuting;
    EntityClass cls = EntityClass::Bomber;
    ValueClass value_class = ValueClass::Ordinary;
};

struct SeedInfo {
    std::uint64_t base_seed = 1;
    std::uint64_t rollout_index = 0;
};

struct RolloutRecord {
    std::string algorithm_id;
    std::uint64_t base_seed = 0;
    std::uint64_t rollout_index = 0;
    std::string plan_id;
    std::string opponent_id;
    std::string core_target_id;
    Outcome outcome = Outcome::Failure;
    FailureReason failure_reason = FailureReason::None;
    int end_tick = 0;
    double dt = 0.1;
    std::vector<Event> events;
    std::map<std::string, std::vector<TrajPoint>> trajectories;  // end_tick+1 samples each
    std::vector<EntitySummary> entities;
    int ammo_spent_blue = 0;
    int ammo_spent_opponent = 0;
    int lost_blue = 0;
    int lost_opponent = 0;
    std::uint64_t draw_count = 0;
    std::vector<std::string> dropped_actions;
    std::string log_hash;  // SHA-256 over the canonical event-log lines
};

// Canonical line-delimited event log; log_hash is SHA-256 over these bytes.
std::string event_log_lines(std::span<const Event> events);

// Executes the plan verbatim against the given opponent until termination.
// Fully deterministic for a fixed (scenario, plan, opponent config, seed).
RolloutRecord run_rollout(const Scenario& scenario, const CandidatePlan& plan,
                          OpponentPolicy& opponent, const SeedInfo& seed);

}  // namespace tacsim
