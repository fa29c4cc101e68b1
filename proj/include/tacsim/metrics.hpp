#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>

#include "tacsim/plan.hpp"
#include "tacsim/sim_engine.hpp"

namespace tacsim {

struct MetricWeights {
    double eta1 = 1.0;     // platform-attrition cost weight
    double eta2 = 0.1;     // ammunition cost weight
    double lambda1 = 1.0;  // success weight in the quality score
    double lambda2 = 0.2;  // cost weight
    double lambda3 = 0.1;  // trajectory-deviation weight
    double norm_x0 = 30.5; // displacement normalization scale, map units

    void validate() const;
};

// norm_x0 default: one tenth of the map diagonal.
double default_norm_scale(const Scenario& scenario);

// Fraction of rollouts that destroyed the core target.
double compute_msr(std::span<const RolloutRecord> records);

// Mean of eta1 * platforms lost + eta2 * ammunition spent (plan side).
double compute_cla(std::span<const RolloutRecord> records, const MetricWeights& weights);

struct DisplacementSummary {
    double ade = 0.0;  // mean per-tick deviation from the planned trajectory
    double fde = 0.0;  // mean final-tick deviation
};

// Mean L2 deviation between simulated and planned positions over all
// records, ticks (1..end) and plan-executing entities. Entities keep their
// final position after death.
DisplacementSummary compute_ade(std::span<const RolloutRecord> records,
                                const CandidatePlan& plan);

// lambda1 * msr - lambda2 * cla - lambda3 * x/(x + norm_x0) evaluated at x = ade.
double compute_pqs(double msr, double cla, double ade, const MetricWeights& weights);

// (mean, min) of the two difficulty-level success rates.
std::pair<double, double> success_aggregates(double easy_msr, double difficult_msr);

// Outcome-level suppression: 1 - msr.
double suppression_rate_outcome(double msr);

struct ProcessMetrics {
    double attrition_mean = 0.0;      // plan-side platforms lost per rollout
    double attrition_fraction = 0.0;  // lost / friendly platform count
    double opponent_fire_hits = 0.0;
    double opponent_fire_fired = 0.0;
    double missiles_launched = 0.0;   // plan-side Fire events per rollout
    double missile_hits = 0.0;
    double missile_misses = 0.0;
    std::optional<double> ttk_mean;   // over successful rollouts only; absent when msr = 0
    std::optional<double> sr_process_blue;      // hits / fires, plan side
    std::optional<double> sr_process_opponent;  // hits / fires, opponent side
};

ProcessMetrics process_metrics(std::span<const RolloutRecord> records);

struct StaticScore {
    int path_smoothness = 1;
    int threat_avoidance = 1;
    int resource_consumption = 1;
    int tactical_coordination = 1;
    int engagement_feasibility = 1;
    double total = 1.0;  // equal-weight mean
};

// Rubric scoring of a plan before any simulation, each dimension 1..5.
StaticScore static_score(const CandidatePlan& plan, const Scenario& scenario);

}  // namespace tacsim
