#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tacsim/json_io.hpp"
#include "tacsim/metrics.hpp"
#include "tacsim/opponents.hpp"

namespace tacsim {

// One plan evaluated on one scenario.
struct PlanMetricsBlock {
    std::string scenario_difficulty;
    double msr = 0.0;
    double cla = 0.0;
    double ade = 0.0;
    double fde = 0.0;
    double pqs = 0.0;
    double suppression_outcome = 0.0;
    ProcessMetrics process;
    std::vector<std::string> record_hashes;  // per completed seed, in seed order
    int fault_count = 0;
};

struct PlanReportEntry {
    std::string plan_id;
    std::vector<PlanMetricsBlock> per_scenario;
    std::optional<double> overall_success;  // both difficulties only
    std::optional<double> robust_success;
    StaticScore static_rubric;
    double pqs = 0.0;  // ranking key: mean over scenario blocks
    int rank = 0;
    int static_rank = 0;  // ranking by the static rubric alone
};

struct VerificationReport {
    std::string opponent_id;
    std::string seed_protocol;
    std::vector<std::string> scenario_digests;
    std::vector<std::string> scenario_difficulties;
    MetricWeights weights;
    std::vector<PlanReportEntry> plans;  // sorted by pqs descending, ties by plan_id
};

// Seeded rollouts of one plan; rollout i uses seeds[i]. Faulted rollouts are
// skipped and counted, completed records keep seed order. Results do not
// depend on the worker count.
std::vector<RolloutRecord> monte_carlo_verify(const CandidatePlan& plan, const Scenario& scenario,
                                              const OpponentSpec& opponent,
                                              std::span<const std::uint64_t> seeds, int workers = 1,
                                              int* fault_count = nullptr);

// Full pipeline over one or two scenarios (easy / difficult): verify every
// plan, compute all metrics, rank by plan quality score.
VerificationReport rank_and_report(std::span<const CandidatePlan> plans,
                                   std::span<const Scenario> scenarios,
                                   const OpponentSpec& opponent,
                                   std::span<const std::uint64_t> seeds,
                                   const MetricWeights& weights, int workers = 1);

std::string seed_protocol_string(std::span<const std::uint64_t> seeds);

json report_to_json(const VerificationReport& report);
std::string render_report_text(const VerificationReport& report);

json record_to_json(const RolloutRecord& record);
RolloutRecord record_from_json(const json& j);

}  // namespace tacsim
