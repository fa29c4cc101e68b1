#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tacsim/json_io.hpp"
#include "tacsim/sim_engine.hpp"

namespace tacsim {

struct DatasetConfig {
    int window = 20;   // history ticks per sample
    int horizon = 10;  // target ticks per sample
    int stride = 10;   // cut spacing
};

struct EvaConfig {
    double w_high_value = 2.0;
    double w_ordinary = 1.0;

    void validate() const;  // w_high_value > w_ordinary > 0
};

struct TokenAnnotation {
    std::string entity_id;
    ValueClass value_class = ValueClass::Ordinary;
};

// One supervised sample: serialized history window, serialized target window,
// and a positional entity annotation for every target token (one token per
// serialized entity-tick line).
struct PredictionSample {
    std::string sample_id;
    int cut_tick = 0;
    std::string history_text;
    std::string target_text;
    std::vector<TokenAnnotation> token_annotations;
    std::map<std::string, std::vector<Vec2>> target_positions;  // per entity, horizon ticks
};

struct DatasetBuildResult {
    std::vector<PredictionSample> samples;
    int skipped_records = 0;  // rollouts shorter than window + horizon
};

// Slides a cut over each rollout at the configured stride; deterministic for
// fixed records and config.
DatasetBuildResult build_prediction_dataset(std::span<const RolloutRecord> records,
                                            const DatasetConfig& config);

// Token weight: w_high_value for tokens of high-value entities, w_ordinary
// otherwise.
std::vector<double> eva_token_weights(const PredictionSample& sample, const EvaConfig& config);

// Value of the weighted negative log-likelihood objective for one sample:
// -(1/|Y|) * sum_j w_j * log p_j.
double weighted_nll(const PredictionSample& sample, std::span<const double> token_log_probs,
                    const EvaConfig& config);

// Batch objective: mean of per-sample values.
double weighted_nll_batch(std::span<const PredictionSample> samples,
                          const std::vector<std::vector<double>>& token_log_probs,
                          const EvaConfig& config);

struct DisplacementError {
    double ade = 0.0;
    double fde = 0.0;
};

// Scores an external predictor's positions against the dataset targets.
// predictions[i] maps entity id to predicted positions for sample i.
DisplacementError eval_predictor(
    const std::vector<std::map<std::string, std::vector<Vec2>>>& predictions,
    std::span<const PredictionSample> samples);

json sample_to_json(const PredictionSample& sample);
PredictionSample sample_from_json(const json& j);

// Line-delimited dataset plus a manifest with config and source digests.
void write_dataset(const std::string& dataset_path, const std::string& manifest_path,
                   const DatasetBuildResult& result, const DatasetConfig& config,
                   const EvaConfig& eva, std::span<const RolloutRecord> sources);

}  // namespace tacsim
