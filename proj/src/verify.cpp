#include "tacsim/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "tacsim/sha256.hpp"

namespace tacsim {

std::vector<RolloutRecord> monte_carlo_verify(const CandidatePlan& plan, const Scenario& scenario,
                                              const OpponentSpec& opponent,
                                              std::span<const std::uint64_t> seeds, int workers,
                                              int* fault_count) {
    if (seeds.empty()) throw EmptyInput("verification requires at least one seed");
    workers = std::max(1, workers);

    std::vector<std::optional<RolloutRecord>> slots(seeds.size());
    std::atomic<std::size_t> cursor{0};
    std::atomic<int> faults{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
        // One policy instance per worker; reset() re-seeds it per rollout.
        std::unique_ptr<OpponentPolicy> policy = make_opponent(opponent);
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= seeds.size()) break;
            try {
                slots[i] = run_rollout(scenario, plan, *policy, {seeds[i], 0});
            } catch (const OpponentFault&) {
                faults.fetch_add(1);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<RolloutRecord> records;
    records.reserve(seeds.size());
    for (auto& slot : slots) {
        if (slot) records.push_back(std::move(*slot));
    }
    if (fault_count) *fault_count = faults.load();
    return records;
}

std::string seed_protocol_string(std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) return "";
    bool contiguous = true;
    for (std::size_t i = 1; i < seeds.size(); ++i) {
        if (seeds[i] != seeds[i - 1] + 1) {
            contiguous = false;
            break;
        }
    }
    if (contiguous && seeds.size() > 1)
        return std::to_string(seeds.front()) + ".." + std::to_string(seeds.back());
    std::string out;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(seeds[i]);
    }
    return out;
}

VerificationReport rank_and_report(std::span<const CandidatePlan> plans,
                                   std::span<const Scenario> scenarios,
                                   const OpponentSpec& opponent,
                                   std::span<const std::uint64_t> seeds,
                                   const MetricWeights& weights, int workers) {
    if (plans.empty()) throw EmptyInput("report requires at least one plan");
    if (scenarios.empty()) throw EmptyInput("report requires at least one scenario");
    weights.validate();

    VerificationReport report;
    report.opponent_id = opponent_identifier(opponent);
    report.seed_protocol = seed_protocol_string(seeds);
    report.weights = weights;
    for (const Scenario& s : scenarios) {
        report.scenario_digests.push_back(json_digest(scenario_to_json(s)));
        report.scenario_difficulties.push_back(to_string(s.difficulty));
    }

    for (const CandidatePlan& plan : plans) {
        PlanReportEntry entry;
        entry.plan_id = plan.plan_id;
        entry.static_rubric = static_score(plan, scenarios.front());

        double pqs_sum = 0.0;
        for (const Scenario& scenario : scenarios) {
            PlanMetricsBlock block;
            block.scenario_difficulty = to_string(scenario.difficulty);
            std::vector<RolloutRecord> records =
                monte_carlo_verify(plan, scenario, opponent, seeds, workers, &block.fault_count);
            if (records.empty()) throw EmptyInput("no completed rollouts for '" + plan.plan_id + "'");

            block.msr = compute_msr(records);
            block.cla = compute_cla(records, weights);
            const DisplacementSummary d = compute_ade(records, plan);
            block.ade = d.ade;
            block.fde = d.fde;
            block.pqs = compute_pqs(block.msr, block.cla, block.ade, weights);
            block.suppression_outcome = suppression_rate_outcome(block.msr);
            block.process = process_metrics(records);
            for (const RolloutRecord& r : records) block.record_hashes.push_back(r.log_hash);
            pqs_sum += block.pqs;
            entry.per_scenario.push_back(std::move(block));
        }
        entry.pqs = pqs_sum / static_cast<double>(scenarios.size());
        if (entry.per_scenario.size() == 2) {
            const auto [overall, robust] = success_aggregates(entry.per_scenario[0].msr,
                                                              entry.per_scenario[1].msr);
            entry.overall_success = overall;
            entry.robust_success = robust;
        }
        report.plans.push_back(std::move(entry));
    }

    std::sort(report.plans.begin(), report.plans.end(),
              [](const PlanReportEntry& a, const PlanReportEntry& b) {
                  if (a.pqs != b.pqs) return a.pqs > b.pqs;
                  return a.plan_id < b.plan_id;
              });
    for (std::size_t i = 0; i < report.plans.size(); ++i)
        report.plans[i].rank = static_cast<int>(i) + 1;

    // Static-rubric ranking for side-by-side comparison with the simulation rank.
    std::vector<std::size_t> order(report.plans.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&report](std::size_t a, std::size_t b) {
        const double ta = report.plans[a].static_rubric.total;
        const double tb = report.plans[b].static_rubric.total;
        if (ta != tb) return ta > tb;
        return report.plans[a].plan_id < report.plans[b].plan_id;
    });
    for (std::size_t i = 0; i < order.size(); ++i)
        report.plans[order[i]].static_rank = static_cast<int>(i) + 1;

    return report;
}

// --- Serialization -----------------------------------------------------------

namespace {

json process_to_json(const ProcessMetrics& p) {
    return json{{"attrition_mean", p.attrition_mean},
                {"attrition_fraction", p.attrition_fraction},
                {"opponent_fire_hits", p.opponent_fire_hits},
                {"opponent_fire_fired", p.opponent_fire_fired},
                {"missiles_launched", p.missiles_launched},
                {"missile_hits", p.missile_hits},
                {"missile_misses", p.missile_misses},
                {"ttk_mean", p.ttk_mean ? json(*p.ttk_mean) : json()},
                {"sr_process_blue", p.sr_process_blue ? json(*p.sr_process_blue) : json()},
                {"sr_process_opponent",
                 p.sr_process_opponent ? json(*p.sr_process_opponent) : json()}};
}

json static_score_to_json(const StaticScore& s) {
    return json{{"path_smoothness", s.path_smoothness},
                {"threat_avoidance", s.threat_avoidance},
                {"resource_consumption", s.resource_consumption},
                {"tactical_coordination", s.tactical_coordination},
                {"engagement_feasibility", s.engagement_feasibility},
                {"total", s.total}};
}

}  // namespace

json report_to_json(const VerificationReport& report) {
    json scenarios = json::array();
    for (std::size_t i = 0; i < report.scenario_digests.size(); ++i) {
        scenarios.push_back(json{{"digest", report.scenario_digests[i]},
                                 {"difficulty", report.scenario_difficulties[i]}});
    }
    json plans = json::array();
    for (const PlanReportEntry& e : report.plans) {
        json blocks = json::array();
        for (const PlanMetricsBlock& b : e.per_scenario) {
            json hashes = json::array();
            for (const std::string& h : b.record_hashes) hashes.push_back(h);
            blocks.push_back(json{{"scenario_difficulty", b.scenario_difficulty},
                                  {"msr", b.msr},
                                  {"cla", b.cla},
                                  {"ade", b.ade},
                                  {"fde", b.fde},
                                  {"pqs", b.pqs},
                                  {"suppression_rate_outcome", b.suppression_outcome},
                                  {"process", process_to_json(b.process)},
                                  {"record_hashes", hashes},
                                  {"fault_count", b.fault_count}});
        }
        plans.push_back(json{
            {"plan_id", e.plan_id},
            {"per_scenario", blocks},
            {"overall_success", e.overall_success ? json(*e.overall_success) : json()},
            {"robust_success", e.robust_success ? json(*e.robust_success) : json()},
            {"static_score", static_score_to_json(e.static_rubric)},
            {"pqs", e.pqs},
            {"rank", e.rank},
            {"static_rank", e.static_rank}});
    }
    return json{{"opponent", report.opponent_id},
                {"seed_protocol", report.seed_protocol},
                {"scenarios", scenarios},
                {"weights",
                 json{{"eta1", report.weights.eta1},
                      {"eta2", report.weights.eta2},
                      {"lambda1", report.weights.lambda1},
                      {"lambda2", report.weights.lambda2},
                      {"lambda3", report.weights.lambda3},
                      {"norm_x0", report.weights.norm_x0}}},
                {"plans", plans}};
}

std::string render_report_text(const VerificationReport& report) {
    std::ostringstream out;
    out << "Verification report\n";
    out << "  opponent: " << report.opponent_id << "\n";
    out << "  seeds:    " << report.seed_protocol << "\n";
    for (std::size_t i = 0; i < report.scenario_digests.size(); ++i) {
        out << "  scenario[" << report.scenario_difficulties[i]
            << "]: " << report.scenario_digests[i].substr(0, 12) << "...\n";
    }
    out << "\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-4s %-20s %8s %8s %8s %8s %8s %11s\n", "rank", "plan",
                  "PQS", "MSR", "CLA", "ADE", "static", "static_rank");
    out << line;
    for (const PlanReportEntry& e : report.plans) {
        const PlanMetricsBlock& b = e.per_scenario.front();
        std::snprintf(line, sizeof(line), "%-4d %-20s %8.4f %8.4f %8.4f %8.4f %8.2f %11d\n",
                      e.rank, e.plan_id.c_str(), e.pqs, b.msr, b.cla, b.ade,
                      e.static_rubric.total, e.static_rank);
        out << line;
        if (e.overall_success) {
            std::snprintf(line, sizeof(line),
                          "     overall %.4f robust %.4f (easy %.4f / difficult %.4f)\n",
                          *e.overall_success, *e.robust_success, e.per_scenario[0].msr,
                          e.per_scenario[1].msr);
            out << line;
        }
        for (const PlanMetricsBlock& blk : e.per_scenario) {
            std::snprintf(line, sizeof(line),
                          "     [%s] supp %.4f ttk %s launched %.2f hits %.2f misses %.2f "
                          "attr %.2f opp_fired %.2f opp_hits %.2f faults %d\n",
                          blk.scenario_difficulty.c_str(), blk.suppression_outcome,
                          blk.process.ttk_mean ? std::to_string(*blk.process.ttk_mean).c_str()
                                               : "n/a",
                          blk.process.missiles_launched, blk.process.missile_hits,
                          blk.process.missile_misses, blk.process.attrition_mean,
                          blk.process.opponent_fire_fired, blk.process.opponent_fire_hits,
                          blk.fault_count);
            out << line;
        }
    }
    return out.str();
}

json record_to_json(const RolloutRecord& r) {
    json events = json::array();
    for (const Event& e : r.events) events.push_back(event_to_json(e));
    json traj = json::object();
    for (const auto& [id, points] : r.trajectories) {
        json arr = json::array();
        for (const TrajPoint& p : points)
            arr.push_back(json::array(
                {p.position.x, p.position.y, p.health, p.ammo, p.suppressed ? 1 : 0}));
        traj[id] = arr;
    }
    json entities = json::array();
    for (const EntitySummary& e : r.entities) {
        entities.push_back(json{{"id", e.id},
                                {"side", to_string(e.side)},
                                {"class", to_string(e.cls)},
                                {"value_class", to_string(e.value_class)}});
    }
    json dropped = json::array();
    for (const std::string& d : r.dropped_actions) dropped.push_back(d);
    return json{{"algorithm_id", r.algorithm_id},
                {"base_seed", r.base_seed},
                {"rollout_index", r.rollout_index},
                {"plan_id", r.plan_id},
                {"opponent_id", r.opponent_id},
                {"core_target_id", r.core_target_id},
                {"outcome", to_string(r.outcome)},
                {"failure_reason", to_string(r.failure_reason)},
                {"end_tick", r.end_tick},
                {"dt", r.dt},
                {"events", events},
                {"trajectories", traj},
                {"entities", entities},
                {"ammo_spent_blue", r.ammo_spent_blue},
                {"ammo_spent_opponent", r.ammo_spent_opponent},
                {"lost_blue", r.lost_blue},
                {"lost_opponent", r.lost_opponent},
                {"draw_count", r.draw_count},
                {"dropped_actions", dropped},
                {"log_hash", r.log_hash}};
}

RolloutRecord record_from_json(const json& j) {
    RolloutRecord r;
    r.algorithm_id = j.at("algorithm_id").get<std::string>();
    r.base_seed = j.at("base_seed").get<std::uint64_t>();
    r.rollout_index = j.at("rollout_index").get<std::uint64_t>();
    r.plan_id = j.at("plan_id").get<std::string>();
    r.opponent_id = j.at("opponent_id").get<std::string>();
    r.core_target_id = j.at("core_target_id").get<std::string>();
    const std::string outcome = j.at("outcome").get<std::string>();
    r.outcome = outcome == "Success" ? Outcome::Success
                                     : (outcome == "Continue" ? Outcome::Continue : Outcome::Failure);
    const std::string reason = j.at("failure_reason").get<std::string>();
    r.failure_reason = reason == "AllFriendlyLost"
                           ? FailureReason::AllFriendlyLost
                           : (reason == "HorizonExceeded" ? FailureReason::HorizonExceeded
                                                          : FailureReason::None);
    r.end_tick = j.at("end_tick").get<int>();
    r.dt = j.at("dt").get<double>();
    for (const auto& e : j.at("events")) r.events.push_back(event_from_json(e));
    for (auto it = j.at("trajectories").begin(); it != j.at("trajectories").end(); ++it) {
        std::vector<TrajPoint>& points = r.trajectories[it.key()];
        for (const auto& p : it.value()) {
            points.push_back({{p[0].get<double>(), p[1].get<double>()}, p[2].get<double>(),
                              p[3].get<int>(), p[4].get<int>() != 0});
        }
    }
    for (const auto& e : j.at("entities")) {
        r.entities.push_back({e.at("id").get<std::string>(),
                              side_from_string(e.at("side").get<std::string>()),
                              entity_class_from_string(e.at("class").get<std::string>()),
                              value_class_from_string(e.at("value_class").get<std::string>())});
    }
    r.ammo_spent_blue = j.at("ammo_spent_blue").get<int>();
    r.ammo_spent_opponent = j.at("ammo_spent_opponent").get<int>();
    r.lost_blue = j.at("lost_blue").get<int>();
    r.lost_opponent = j.at("lost_opponent").get<int>();
    r.draw_count = j.at("draw_count").get<std::uint64_t>();
    if (j.contains("dropped_actions")) {
        for (const auto& d : j.at("dropped_actions")) r.dropped_actions.push_back(d.get<std::string>());
    }
    r.log_hash = j.at("log_hash").get<std::string>();
    return r;
}

}  // namespace tacsim
