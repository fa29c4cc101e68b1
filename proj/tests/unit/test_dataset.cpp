#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "fixtures.hpp"
#include "tacsim/dataset.hpp"
#include "tacsim/opponents.hpp"

using namespace tacsim;
namespace ts = tacsim::testsupport;

namespace {

RolloutRecord record_of_ticks(int end_tick) {
    RolloutRecord r;
    r.base_seed = 1;
    r.core_target_id = "CC";
    r.end_tick = end_tick;
    r.dt = 0.1;
    r.entities = {{"B", Side::PlanExecuting, EntityClass::Bomber, ValueClass::HighValue},
                  {"F", Side::PlanExecuting, EntityClass::Fighter, ValueClass::Ordinary}};
    for (int t = 0; t <= end_tick; ++t) {
        r.trajectories["B"].push_back({{static_cast<double>(t), 0.0}, 10.0, 6, false});
        r.trajectories["F"].push_back({{0.0, static_cast<double>(t)}, 8.0, 8, false});
    }
    return r;
}

// Fixture with an explicit token mix: n_high high-value + n_ord ordinary.
PredictionSample mixed_sample(int n_high, int n_ord) {
    PredictionSample s;
    s.sample_id = "mix";
    for (int i = 0; i < n_high; ++i) s.token_annotations.push_back({"B", ValueClass::HighValue});
    for (int i = 0; i < n_ord; ++i) s.token_annotations.push_back({"F", ValueClass::Ordinary});
    return s;
}

}  // namespace

TEST_CASE("dataset cuts follow the stride arithmetic") {
    // A 200-tick rollout holds 201 states; with window 20, horizon 10 and
    // stride 10 the cut index runs 20, 30, ..., 190: 18 samples.
    std::vector<RolloutRecord> recs{record_of_ticks(200)};
    const DatasetBuildResult out = build_prediction_dataset(recs, {20, 10, 10});
    CHECK(out.samples.size() == 18);
    CHECK(out.skipped_records == 0);
    // Every sample has horizon * entity_count target tokens.
    for (const PredictionSample& s : out.samples) {
        CHECK(s.token_annotations.size() == 10 * 2);
        CHECK(s.target_positions.at("B").size() == 10);
    }
}

TEST_CASE("short rollouts are skipped and reported") {
    std::vector<RolloutRecord> recs{record_of_ticks(25)};
    const DatasetBuildResult out = build_prediction_dataset(recs, {20, 10, 10});
    CHECK(out.samples.empty());
    CHECK(out.skipped_records == 1);
}

TEST_CASE("dataset files are byte-identical across rebuilds") {
    const Scenario s = ts::template_scenario();
    const CandidatePlan p = ts::straight_plan(s);
    NoBrainPolicy opp;
    std::vector<RolloutRecord> recs;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
        recs.push_back(run_rollout(s, p, opp, {seed, 0}));

    const auto dir = std::filesystem::temp_directory_path();
    const std::string d1 = (dir / "ds1.jsonl").string();
    const std::string d2 = (dir / "ds2.jsonl").string();
    const DatasetConfig cfg{20, 10, 10};
    const EvaConfig eva;
    const DatasetBuildResult r1 = build_prediction_dataset(recs, cfg);
    const DatasetBuildResult r2 = build_prediction_dataset(recs, cfg);
    write_dataset(d1, d1 + ".manifest.json", r1, cfg, eva, recs);
    write_dataset(d2, d2 + ".manifest.json", r2, cfg, eva, recs);
    CHECK(read_file(d1) == read_file(d2));
    CHECK(read_file(d1 + ".manifest.json") == read_file(d2 + ".manifest.json"));

    // Samples survive a serialization round trip.
    if (!r1.samples.empty()) {
        const json j = sample_to_json(r1.samples[0]);
        const PredictionSample back = sample_from_json(j);
        CHECK(back.history_text == r1.samples[0].history_text);
        CHECK(back.token_annotations.size() == r1.samples[0].token_annotations.size());
    }
}

TEST_CASE("token weights follow the entity value class") {
    EvaConfig cfg;  // 2.0 / 1.0
    SUBCASE("all ordinary tokens weigh w_ordinary") {
        const auto w = eva_token_weights(mixed_sample(0, 5), cfg);
        for (double x : w) CHECK(x == doctest::Approx(1.0));
    }
    SUBCASE("high-value token weighs w_high_value") {
        const auto w = eva_token_weights(mixed_sample(1, 0), cfg);
        REQUIRE(w.size() == 1);
        CHECK(w[0] == doctest::Approx(2.0));
    }
    SUBCASE("3 high + 7 ordinary sums to 13") {
        const auto w = eva_token_weights(mixed_sample(3, 7), cfg);
        double sum = 0.0;
        for (double x : w) sum += x;
        CHECK(sum == doctest::Approx(13.0));
    }
    SUBCASE("the training-export invariant rejects flat or inverted weights") {
        CHECK_THROWS_AS((EvaConfig{1.0, 1.0}.validate()), DomainError);
        CHECK_THROWS_AS((EvaConfig{1.0, 2.0}.validate()), DomainError);
        CHECK_THROWS_AS((EvaConfig{2.0, 0.0}.validate()), DomainError);
        CHECK_NOTHROW((EvaConfig{2.0, 1.0}.validate()));
    }
    SUBCASE("unannotated token raises") {
        PredictionSample s = mixed_sample(1, 1);
        s.token_annotations[0].entity_id.clear();
        CHECK_THROWS_AS(eva_token_weights(s, cfg), UnannotatedToken);
    }
}

TEST_CASE("weighted objective value") {
    EvaConfig cfg;
    SUBCASE("certain tokens cost nothing") {
        const PredictionSample s = mixed_sample(2, 2);
        const std::vector<double> lp(4, 0.0);  // log 1
        CHECK(weighted_nll(s, lp, cfg) == doctest::Approx(0.0));
    }
    SUBCASE("unit weights and p=e^-1 give exactly 1") {
        const EvaConfig flat{1.0, 1.0};
        const PredictionSample s = mixed_sample(2, 4);
        const std::vector<double> lp(6, -1.0);
        CHECK(weighted_nll(s, lp, flat) == doctest::Approx(1.0));
    }
    SUBCASE("hand arithmetic: weights (2,1), log-probs (-1,-2)") {
        const PredictionSample s = mixed_sample(1, 1);
        const std::vector<double> lp{-1.0, -2.0};
        CHECK(weighted_nll(s, lp, cfg) == doctest::Approx(2.0));
    }
    SUBCASE("length mismatch and bad log-probs raise") {
        const PredictionSample s = mixed_sample(1, 1);
        CHECK_THROWS_AS(weighted_nll(s, std::vector<double>{-1.0}, cfg), LengthMismatch);
        CHECK_THROWS_AS(weighted_nll(s, std::vector<double>{0.5, -1.0}, cfg),
                        NonPositiveProbability);
        const double nan = std::nan("");
        CHECK_THROWS_AS(weighted_nll(s, std::vector<double>{nan, -1.0}, cfg),
                        NonPositiveProbability);
    }
}

TEST_CASE("weight-scaling linearity holds exactly") {
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> lp_dist(-3.0, -0.01);
    const PredictionSample s = mixed_sample(4, 6);
    std::vector<double> lp;
    for (int i = 0; i < 10; ++i) lp.push_back(lp_dist(gen));

    const EvaConfig base{2.0, 1.0};
    const EvaConfig scaled{6.0, 3.0};  // x3
    CHECK(weighted_nll(s, lp, scaled) == doctest::Approx(3.0 * weighted_nll(s, lp, base)));
}

TEST_CASE("batch objective averages per-sample values") {
    EvaConfig cfg;
    const PredictionSample a = mixed_sample(1, 1);
    const PredictionSample b = mixed_sample(0, 2);
    std::vector<PredictionSample> samples{a, b};
    const std::vector<std::vector<double>> lp{{-1.0, -2.0}, {-1.0, -1.0}};
    const double mean = weighted_nll_batch(samples, lp, cfg);
    CHECK(mean ==
          doctest::Approx((weighted_nll(a, lp[0], cfg) + weighted_nll(b, lp[1], cfg)) / 2.0));
}

TEST_CASE("predictor evaluation: ade and fde") {
    PredictionSample s;
    s.sample_id = "eval";
    s.target_positions["B"] = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};

    SUBCASE("exact predictions score zero") {
        std::vector<std::map<std::string, std::vector<Vec2>>> preds{{{"B", s.target_positions["B"]}}};
        const auto d = eval_predictor(preds, {&s, 1});
        CHECK(d.ade == doctest::Approx(0.0));
        CHECK(d.fde == doctest::Approx(0.0));
    }
    SUBCASE("constant (3,4) offset scores 5") {
        std::vector<Vec2> off;
        for (const Vec2& p : s.target_positions["B"]) off.push_back({p.x + 3.0, p.y + 4.0});
        std::vector<std::map<std::string, std::vector<Vec2>>> preds{{{"B", off}}};
        const auto d = eval_predictor(preds, {&s, 1});
        CHECK(d.ade == doctest::Approx(5.0));
        CHECK(d.fde == doctest::Approx(5.0));
    }
    SUBCASE("fde averages final offsets over samples") {
        PredictionSample t = s;
        t.sample_id = "eval2";
        std::vector<Vec2> exact = s.target_positions["B"];
        std::vector<Vec2> off = exact;
        off.back().y += 10.0;
        std::vector<PredictionSample> samples{s, t};
        std::vector<std::map<std::string, std::vector<Vec2>>> preds{{{"B", exact}}, {{"B", off}}};
        const auto d = eval_predictor(preds, samples);
        CHECK(d.fde == doctest::Approx(5.0));
    }
    SUBCASE("shape mismatch raises") {
        std::vector<std::map<std::string, std::vector<Vec2>>> preds{
            {{"B", std::vector<Vec2>{{0.0, 0.0}}}}};
        CHECK_THROWS_AS(eval_predictor(preds, {&s, 1}), ShapeMismatch);
        std::vector<std::map<std::string, std::vector<Vec2>>> missing{{}};
        CHECK_THROWS_AS(eval_predictor(missing, {&s, 1}), ShapeMismatch);
    }
}

TEST_CASE("token weights are a pure positional lookup") {
    EvaConfig cfg;
    PredictionSample s = mixed_sample(3, 4);
    const auto before = eva_token_weights(s, cfg);
    std::rotate(s.token_annotations.begin(), s.token_annotations.begin() + 2,
                s.token_annotations.end());
    const auto after = eva_token_weights(s, cfg);
    REQUIRE(after.size() == before.size());
    for (std::size_t i = 0; i < after.size(); ++i) {
        const std::size_t src = (i + 2) % before.size();
        CHECK(after[i] == before[src]);  // permuting tokens permutes weights identically
    }
}

TEST_CASE("flat weights reduce to the plain mean objective exactly") {
    std::mt19937 gen(123);
    std::uniform_real_distribution<double> lp_dist(-4.0, -0.01);
    const EvaConfig flat{1.0, 1.0};
    for (int trial = 0; trial < 20; ++trial) {
        PredictionSample s = mixed_sample(trial % 5, 3 + trial % 4);
        std::vector<double> lp;
        double plain = 0.0;
        for (std::size_t i = 0; i < s.token_annotations.size(); ++i) {
            lp.push_back(lp_dist(gen));
            plain += lp.back();
        }
        plain = -plain / static_cast<double>(lp.size());
        CHECK(std::abs(weighted_nll(s, lp, flat) - plain) <= 1e-12);
    }
}
