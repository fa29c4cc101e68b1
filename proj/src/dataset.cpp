#include "tacsim/dataset.hpp"

#include <cmath>
#include <cstdio>

#include "tacsim/sha256.hpp"

namespace tacsim {

void EvaConfig::validate() const {
    if (!(w_high_value > w_ordinary && w_ordinary > 0.0))
        throw DomainError("entity-value weights must satisfy w_high_value > w_ordinary > 0");
}

namespace {

// Fixed-width record "tick entity_id x y health ammo flags". One line per
// entity per tick keeps the token-to-entity mapping positional.
std::string state_line(int tick, const std::string& id, const TrajPoint& p, bool dead) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%5d %-12s %10.3f %10.3f %8.3f %4d %c%c", tick, id.c_str(),
                  p.position.x, p.position.y, p.health, p.ammo, p.suppressed ? 'S' : '-',
                  dead ? 'D' : '-');
    return buf;
}

}  // namespace

DatasetBuildResult build_prediction_dataset(std::span<const RolloutRecord> records,
                                            const DatasetConfig& config) {
    if (config.window < 1 || config.horizon < 1 || config.stride < 1)
        throw DomainError("dataset window, horizon and stride must be >= 1");

    DatasetBuildResult out;
    for (std::size_t ri = 0; ri < records.size(); ++ri) {
        const RolloutRecord& r = records[ri];
        const int states = r.end_tick + 1;
        const int need = config.window + config.horizon;
        if (states < need) {
            ++out.skipped_records;
            continue;
        }
        const int cuts = (states - need) / config.stride + 1;
        for (int c = 0; c < cuts; ++c) {
            const int cut = config.window + c * config.stride;  // first target tick
            PredictionSample s;
            s.sample_id = "seed" + std::to_string(r.base_seed) + "-r" +
                          std::to_string(r.rollout_index) + "-c" + std::to_string(cut);
            s.cut_tick = cut;

            for (int t = cut - config.window; t < cut; ++t) {
                for (const EntitySummary& e : r.entities) {
                    const TrajPoint& p =
                        r.trajectories.at(e.id)[static_cast<std::size_t>(t)];
                    s.history_text += state_line(t, e.id, p, p.health <= 0.0);
                    s.history_text += '\n';
                }
            }
            for (int t = cut; t < cut + config.horizon; ++t) {
                for (const EntitySummary& e : r.entities) {
                    const TrajPoint& p =
                        r.trajectories.at(e.id)[static_cast<std::size_t>(t)];
                    s.target_text += state_line(t, e.id, p, p.health <= 0.0);
                    s.target_text += '\n';
                    s.token_annotations.push_back({e.id, e.value_class});
                    s.target_positions[e.id].push_back(p.position);
                }
            }
            out.samples.push_back(std::move(s));
        }
    }
    return out;
}

// Note: the training-export invariant (w_high_value > w_ordinary) is enforced
// where an EvaConfig enters a dataset manifest, not here; the objective value
// itself is well defined for any positive weights, including the flat-weight
// reduction to plain cross entropy.
std::vector<double> eva_token_weights(const PredictionSample& sample, const EvaConfig& config) {
    if (!(config.w_high_value > 0.0 && config.w_ordinary > 0.0))
        throw DomainError("entity-value weights must be positive");
    std::vector<double> weights;
    weights.reserve(sample.token_annotations.size());
    for (std::size_t i = 0; i < sample.token_annotations.size(); ++i) {
        const TokenAnnotation& a = sample.token_annotations[i];
        if (a.entity_id.empty())
            throw UnannotatedToken("target token " + std::to_string(i) + " has no entity");
        weights.push_back(a.value_class == ValueClass::HighValue ? config.w_high_value
                                                                 : config.w_ordinary);
    }
    return weights;
}

double weighted_nll(const PredictionSample& sample, std::span<const double> token_log_probs,
                    const EvaConfig& config) {
    const std::vector<double> weights = eva_token_weights(sample, config);
    if (token_log_probs.size() != weights.size())
        throw LengthMismatch("expected " + std::to_string(weights.size()) + " log-probs, got " +
                             std::to_string(token_log_probs.size()));
    double sum = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        const double lp = token_log_probs[j];
        if (!std::isfinite(lp) || lp > 0.0)
            throw NonPositiveProbability("token " + std::to_string(j) +
                                         " log-probability implies p outside (0,1]");
        sum += weights[j] * lp;
    }
    return -sum / static_cast<double>(weights.size());
}

double weighted_nll_batch(std::span<const PredictionSample> samples,
                          const std::vector<std::vector<double>>& token_log_probs,
                          const EvaConfig& config) {
    if (samples.empty()) throw EmptyInput("batch objective over zero samples");
    if (token_log_probs.size() != samples.size())
        throw LengthMismatch("log-prob batch size differs from sample count");
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        sum += weighted_nll(samples[i], token_log_probs[i], config);
    return sum / static_cast<double>(samples.size());
}

DisplacementError eval_predictor(
    const std::vector<std::map<std::string, std::vector<Vec2>>>& predictions,
    std::span<const PredictionSample> samples) {
    if (predictions.size() != samples.size())
        throw ShapeMismatch("prediction batch size differs from sample count");

    double sum = 0.0;
    std::size_t count = 0;
    double final_sum = 0.0;
    std::size_t final_count = 0;

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const PredictionSample& s = samples[i];
        const auto& pred = predictions[i];
        for (const auto& [id, target] : s.target_positions) {
            auto it = pred.find(id);
            if (it == pred.end())
                throw ShapeMismatch("sample " + s.sample_id + " has no prediction for '" + id + "'");
            if (it->second.size() != target.size())
                throw ShapeMismatch("prediction length differs for '" + id + "' in sample " +
                                    s.sample_id);
            for (std::size_t t = 0; t < target.size(); ++t) {
                const double d = distance(it->second[t], target[t]);
                sum += d;
                ++count;
                if (t + 1 == target.size()) {
                    final_sum += d;
                    ++final_count;
                }
            }
        }
    }
    DisplacementError out;
    if (count > 0) out.ade = sum / static_cast<double>(count);
    if (final_count > 0) out.fde = final_sum / static_cast<double>(final_count);
    return out;
}

json sample_to_json(const PredictionSample& s) {
    json tokens = json::array();
    for (const TokenAnnotation& a : s.token_annotations)
        tokens.push_back(json{{"entity_id", a.entity_id}, {"value_class", to_string(a.value_class)}});
    json targets = json::object();
    for (const auto& [id, points] : s.target_positions) {
        json arr = json::array();
        for (const Vec2& p : points) arr.push_back(json::array({p.x, p.y}));
        targets[id] = arr;
    }
    return json{{"sample_id", s.sample_id},   {"cut_tick", s.cut_tick},
                {"history_text", s.history_text}, {"target_text", s.target_text},
                {"tokens", tokens},           {"target_positions", targets}};
}

PredictionSample sample_from_json(const json& j) {
    PredictionSample s;
    s.sample_id = j.at("sample_id").get<std::string>();
    s.cut_tick = j.at("cut_tick").get<int>();
    s.history_text = j.at("history_text").get<std::string>();
    s.target_text = j.at("target_text").get<std::string>();
    for (const auto& t : j.at("tokens")) {
        s.token_annotations.push_back(
            {t.at("entity_id").get<std::string>(),
             value_class_from_string(t.at("value_class").get<std::string>())});
    }
    for (auto it = j.at("target_positions").begin(); it != j.at("target_positions").end(); ++it) {
        std::vector<Vec2>& points = s.target_positions[it.key()];
        for (const auto& p : it.value()) points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return s;
}

void write_dataset(const std::string& dataset_path, const std::string& manifest_path,
                   const DatasetBuildResult& result, const DatasetConfig& config,
                   const EvaConfig& eva, std::span<const RolloutRecord> sources) {
    eva.validate();
    std::string lines;
    for (const PredictionSample& s : result.samples) {
        lines += canonical_dump(sample_to_json(s));
        lines += '\n';
    }
    write_file(dataset_path, lines);

    json source_digests = json::array();
    for (const RolloutRecord& r : sources) source_digests.push_back(r.log_hash);
    const json manifest{{"window", config.window},
                        {"horizon", config.horizon},
                        {"stride", config.stride},
                        {"eva", json{{"w_high_value", eva.w_high_value},
                                     {"w_ordinary", eva.w_ordinary}}},
                        {"sample_count", result.samples.size()},
                        {"skipped_records", result.skipped_records},
                        {"source_digests", source_digests},
                        {"dataset_digest", sha256_hex(lines)}};
    write_file(manifest_path, canonical_dump(manifest) + "\n");
}

}  // namespace tacsim
