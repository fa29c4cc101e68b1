#include "tacsim/opponents.hpp"

#include <algorithm>
#include <cmath>

#include "tacsim/adapter.hpp"
#include "tacsim/sim_engine.hpp"

namespace tacsim {

namespace {

bool fire_gate_open(const EntityState& e, double now, const SimConfig& cfg) {
    if (!e.weapon || e.ammo <= 0) return false;
    double interval = e.weapon->rof_base;
    if (e.suppressed_at(now)) interval *= cfg.gamma_rof;
    return !e.last_fire_time || now - *e.last_fire_time >= interval - 1e-9;
}

}  // namespace

std::vector<AtomicAction> NoBrainPolicy::decide(const std::vector<GlobalState>& history,
                                                const Scenario& scenario) {
    const GlobalState& st = history.back();
    const double now = st.time;
    std::vector<AtomicAction> actions;

    for (const EntityState& e : st.entities) {
        if (e.side != Side::Opponent || !e.alive()) continue;

        if (e.cls == EntityClass::AirPatrol && !e.patrol.empty()) {
            std::size_t& idx = patrol_index_[e.id];
            idx %= e.patrol.size();
            if (distance(e.position, e.patrol[idx]) < 0.5) idx = (idx + 1) % e.patrol.size();
            actions.push_back({e.id, now, MoveToAction{e.patrol[idx], e.speed_max}});
        }

        if (!e.weapon || !fire_gate_open(e, now, scenario.sim_config)) continue;
        const EntityState* nearest = nullptr;
        double best = e.weapon->range;
        for (const EntityState& t : st.entities) {
            if (t.side != Side::PlanExecuting || !t.alive()) continue;
            const double d = distance(e.position, t.position);
            if (d <= best && (!nearest || d < best)) {
                nearest = &t;
                best = d;
            }
        }
        if (nearest) actions.push_back({e.id, now, LaunchAction{e.weapon->name, nearest->id}});
    }
    return actions;
}

PredictionSet predict_trajectories(const std::vector<GlobalState>& history, int h_pred,
                                   const Scenario& scenario) {
    if (history.empty()) throw DomainError("prediction requires at least one observed state");
    if (h_pred < 1) throw DomainError("prediction horizon must be >= 1 tick");

    const GlobalState& cur = history.back();
    const MapBounds bounds = scenario.bounds();
    PredictionSet out;
    out.horizon_ticks = h_pred;

    constexpr std::size_t kWindow = 3;
    const std::size_t have = std::min(history.size(), kWindow);

    for (std::size_t i = 0; i < cur.entities.size(); ++i) {
        const EntityState& e = cur.entities[i];
        if (e.side != Side::PlanExecuting || !e.alive()) continue;

        std::vector<Vec2> window;
        for (std::size_t k = history.size() - have; k < history.size(); ++k) {
            window.push_back(history[k].entities[i].position);
        }

        Vec2 velocity{0.0, 0.0};
        if (window.size() >= 2) {
            velocity = (window.back() - window.front()) *
                       (1.0 / static_cast<double>(window.size() - 1));
        }

        // Confidence 1 for collinear motion, falling off linearly with the
        // turn angle between the last two observed displacement vectors.
        double confidence = 1.0;
        if (window.size() == 3) {
            const Vec2 u = window[1] - window[0];
            const Vec2 v = window[2] - window[1];
            const double nu = u.norm(), nv = v.norm();
            if (nu > 1e-12 && nv > 1e-12) {
                const double c = std::clamp((u.x * v.x + u.y * v.y) / (nu * nv), -1.0, 1.0);
                confidence = 1.0 - std::acos(c) / M_PI;
            }
        }

        EntityPrediction pred;
        pred.entity_id = e.id;
        pred.confidence = confidence;
        Vec2 p = e.position;
        for (int t = 0; t < h_pred; ++t) {
            p = bounds.clamp(p + velocity);
            pred.positions.push_back(p);
        }
        out.predictions.push_back(std::move(pred));
    }
    return out;
}

TargetPriority prioritize_targets(const PredictionSet& predictions, const EntityState& shooter,
                                  const Scenario& scenario, const PredictiveConfig& config) {
    TargetPriority out;
    if (!shooter.weapon) return out;
    const double range = shooter.weapon->range;

    std::vector<std::pair<int, std::pair<std::string, double>>> scored;  // (entity index, (id, score))
    for (const EntityPrediction& pred : predictions.predictions) {
        const int idx = scenario.entity_index(pred.entity_id);
        const EntityState* target = scenario.find_entity(pred.entity_id);
        double d_min = std::numeric_limits<double>::infinity();
        bool in_range = false;
        for (const Vec2& p : pred.positions) {
            const double d = distance(shooter.position, p);
            d_min = std::min(d_min, d);
            if (d <= range) in_range = true;
        }
        const double value = (target && target->value_class == ValueClass::HighValue)
                                 ? config.w_high_value
                                 : config.w_ordinary;
        const double score = in_range ? value * (1.0 - d_min / range) : 0.0;
        scored.emplace_back(idx, std::make_pair(pred.entity_id, score));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second.second != b.second.second) return a.second.second > b.second.second;
        return a.first < b.first;  // ties by entity index ascending
    });
    for (auto& [idx, entry] : scored) out.ranked.push_back(std::move(entry));
    return out;
}

std::vector<AtomicAction> PredictivePolicy::decide(const std::vector<GlobalState>& history,
                                                   const Scenario& scenario) {
    const GlobalState& st = history.back();
    const double now = st.time;
    std::vector<AtomicAction> actions;

    const PredictionSet predictions =
        predict_trajectories(history, config_.prediction_ticks, scenario);
    if (predictions.predictions.empty()) return actions;

    // Current live state per predicted entity, for feasibility checks.
    auto live_target = [&st](const std::string& id) -> const EntityState* {
        const EntityState* t = st.find_entity(id);
        return (t && t->alive()) ? t : nullptr;
    };

    std::vector<std::string> engaged;
    for (const EntityState& e : st.entities) {
        if (e.side != Side::Opponent || !e.alive() || !e.weapon) continue;
        if (e.cls == EntityClass::AirPatrol) continue;  // handled below as interceptor
        if (!fire_gate_open(e, now, scenario.sim_config)) continue;

        const TargetPriority priority = prioritize_targets(predictions, e, scenario, config_);
        for (const auto& [target_id, score] : priority.ranked) {
            if (score <= 0.0) break;
            const EntityState* t = live_target(target_id);
            if (!t) continue;
            if (distance(e.position, t->position) > e.weapon->range) continue;
            actions.push_back({e.id, now, LaunchAction{e.weapon->name, target_id}});
            engaged.push_back(target_id);
            break;
        }
    }

    // Mobile defenders intercept the predicted position of the highest-value
    // attacker nobody is already engaging; midpoint lead on the window.
    for (const EntityState& e : st.entities) {
        if (e.side != Side::Opponent || !e.alive() || e.cls != EntityClass::AirPatrol) continue;

        const EntityPrediction* chosen = nullptr;
        double chosen_value = -1.0;
        int chosen_idx = 0;
        for (const EntityPrediction& pred : predictions.predictions) {
            if (std::find(engaged.begin(), engaged.end(), pred.entity_id) != engaged.end())
                continue;
            const EntityState* t = live_target(pred.entity_id);
            if (!t) continue;
            const double value = (t->value_class == ValueClass::HighValue)
                                     ? config_.w_high_value
                                     : config_.w_ordinary;
            const int idx = st.entity_index(pred.entity_id);
            if (value > chosen_value || (value == chosen_value && idx < chosen_idx)) {
                chosen = &pred;
                chosen_value = value;
                chosen_idx = idx;
            }
        }
        if (chosen) {
            const std::size_t lead =
                std::min(chosen->positions.size() - 1,
                         static_cast<std::size_t>(config_.prediction_ticks / 2));
            actions.push_back({e.id, now, MoveToAction{chosen->positions[lead], e.speed_max}});
        }
        if (e.weapon && fire_gate_open(e, now, scenario.sim_config)) {
            const TargetPriority priority = prioritize_targets(predictions, e, scenario, config_);
            for (const auto& [target_id, score] : priority.ranked) {
                if (score <= 0.0) break;
                const EntityState* t = live_target(target_id);
                if (!t) continue;
                if (distance(e.position, t->position) > e.weapon->range) continue;
                actions.push_back({e.id, now, LaunchAction{e.weapon->name, target_id}});
                break;
            }
        }
    }
    return actions;
}

std::string opponent_identifier(const OpponentSpec& spec) {
    if (spec.kind == "predictive") {
        return "predictive(w_hv=" + std::to_string(spec.predictive.w_high_value) +
               ",w_ord=" + std::to_string(spec.predictive.w_ordinary) +
               ",h=" + std::to_string(spec.predictive.prediction_ticks) + ")";
    }
    if (spec.kind == "external") return "external(" + spec.endpoint + ")";
    if (spec.kind == "external-stdio") return "external-stdio(" + spec.command + ")";
    return spec.kind;
}

namespace {

// Passive policy: never acts. Useful for analyst drafts and tests.
class NonePolicy final : public OpponentPolicy {
public:
    std::string id() const override { return "none"; }
    std::vector<AtomicAction> decide(const std::vector<GlobalState>&, const Scenario&) override {
        return {};
    }
};

}  // namespace

std::unique_ptr<OpponentPolicy> make_opponent(const OpponentSpec& spec) {
    if (spec.kind == "nobrain") return std::make_unique<NoBrainPolicy>();
    if (spec.kind == "predictive") return std::make_unique<PredictivePolicy>(spec.predictive);
    if (spec.kind == "none") return std::make_unique<NonePolicy>();
    if (spec.kind == "external" || spec.kind == "external-stdio")
        return make_external_opponent(spec);
    throw SchemaError("unknown opponent kind '" + spec.kind + "'");
}

}  // namespace tacsim
