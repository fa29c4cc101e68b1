#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tacsim/plan.hpp"
#include "tacsim/sim_engine.hpp"
#include "tacsim/state.hpp"

namespace tacsim {

// Opponent-side decision contract. One instance drives exactly one rollout;
// decide() is called once per tick with the full state history and must be a
// pure function of (history, scenario, config, internal seed state).
class OpponentPolicy {
public:
    virtual ~OpponentPolicy() = default;
    virtual std::string id() const = 0;
    virtual void reset(const SeedInfo& seed) { (void)seed; }
    virtual std::vector<AtomicAction> decide(const std::vector<GlobalState>& history,
                                             const Scenario& scenario) = 0;
};

// Static script: every weapon entity fires at the nearest in-range live
// plan-executing entity whenever its ROF permits; AirPatrol entities loop
// over their scenario waypoints. No prediction, no reallocation.
class NoBrainPolicy final : public OpponentPolicy {
public:
    std::string id() const override { return "nobrain"; }
    void reset(const SeedInfo&) override { patrol_index_.clear(); }
    std::vector<AtomicAction> decide(const std::vector<GlobalState>& history,
                                     const Scenario& scenario) override;

private:
    std::map<std::string, std::size_t> patrol_index_;
};

struct PredictiveConfig {
    double w_high_value = 2.0;  // target-value weight, high-value entities
    double w_ordinary = 1.0;
    int prediction_ticks = 20;  // H_pred
};

struct EntityPrediction {
    std::string entity_id;
    std::vector<Vec2> positions;  // exactly H_pred entries
    double confidence = 1.0;
};

struct PredictionSet {
    int horizon_ticks = 0;
    std::vector<EntityPrediction> predictions;  // live plan-executing entities, stored order
};

// Constant-velocity extrapolation over the last k=3 observed positions,
// clamped to map bounds. Confidence is 1 for collinear motion and falls off
// linearly with the observed turn angle: 1 - turn/pi.
PredictionSet predict_trajectories(const std::vector<GlobalState>& history, int h_pred,
                                   const Scenario& scenario);

struct TargetPriority {
    // Sorted by score descending, ties by entity index ascending.
    std::vector<std::pair<std::string, double>> ranked;
};

// score(target) = value_weight * in-range-indicator * (1 - d_min/R), where
// d_min is the minimum predicted distance to the shooter over the window.
TargetPriority prioritize_targets(const PredictionSet& predictions, const EntityState& shooter,
                                  const Scenario& scenario, const PredictiveConfig& config);

// Predict-then-allocate surrogate for a learned opponent: weapon entities
// engage their highest-priority feasible target, patrol entities intercept
// the predicted position of the highest-value unengaged attacker.
class PredictivePolicy final : public OpponentPolicy {
public:
    explicit PredictivePolicy(PredictiveConfig config = {}) : config_(config) {}
    std::string id() const override { return "predictive"; }
    std::vector<AtomicAction> decide(const std::vector<GlobalState>& history,
                                     const Scenario& scenario) override;
    const PredictiveConfig& config() const { return config_; }

private:
    PredictiveConfig config_;
};

struct OpponentSpec {
    std::string kind = "nobrain";  // nobrain | predictive | external | external-stdio | none
    PredictiveConfig predictive;
    std::string endpoint;          // http://host:port for external
    std::string command;           // child command line for external-stdio
    double timeout_seconds = 2.0;
    int history_tail = 20;
};

// Identifier echoed in reports; includes the config knobs that change behavior.
std::string opponent_identifier(const OpponentSpec& spec);

std::unique_ptr<OpponentPolicy> make_opponent(const OpponentSpec& spec);

}  // namespace tacsim
