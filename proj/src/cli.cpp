#include "tacsim/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "tacsim/adapter.hpp"
#include "tacsim/dataset.hpp"
#include "tacsim/json_io.hpp"
#include "tacsim/manifest.hpp"
#include "tacsim/planner.hpp"
#include "tacsim/plot.hpp"
#include "tacsim/sha256.hpp"
#include "tacsim/verify.hpp"

namespace tacsim {

namespace {

namespace fs = std::filesystem;

// All tunables in one place; a config file overrides the built-in defaults,
// CLI flags override the file. The effective values are echoed into every
// manifest and report.
struct ToolConfig {
    PlannerConfig planner;
    MetricWeights weights;
    bool derive_norm_from_map = true;
    PredictiveConfig predictive;
    double adapter_timeout_seconds = 2.0;
    int adapter_history_tail = 20;
};

json tool_config_to_json(const ToolConfig& c) {
    return json{
        {"planner",
         json{{"lattice_cell", c.planner.lattice_cell},
              {"diversity_inflation", c.planner.diversity_inflation},
              {"route_length_weight", c.planner.route_length_weight},
              {"route_threat_weight", c.planner.route_threat_weight},
              {"analyst_rollouts", c.planner.analyst_rollouts},
              {"max_repair_rounds", c.planner.max_repair_rounds},
              {"suppress_lead_seconds", c.planner.suppress_lead_seconds},
              {"escort_offset", json::array({c.planner.escort_offset.x, c.planner.escort_offset.y})},
              {"utility_floor", c.planner.utility_floor},
              {"standoff_fraction", c.planner.standoff_fraction}}},
        {"weights",
         json{{"eta1", c.weights.eta1},
              {"eta2", c.weights.eta2},
              {"lambda1", c.weights.lambda1},
              {"lambda2", c.weights.lambda2},
              {"lambda3", c.weights.lambda3},
              {"norm_x0", c.derive_norm_from_map ? json() : json(c.weights.norm_x0)}}},
        {"opponent",
         json{{"w_high_value", c.predictive.w_high_value},
              {"w_ordinary", c.predictive.w_ordinary},
              {"prediction_ticks", c.predictive.prediction_ticks},
              {"timeout_seconds", c.adapter_timeout_seconds},
              {"history_tail", c.adapter_history_tail}}}};
}

ToolConfig load_tool_config(const std::string& path) {
    ToolConfig c;
    if (path.empty()) return c;
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const nlohmann::detail::parse_error& e) {
        throw ParseError(std::string("malformed config '") + path + "': " + e.what());
    }
    if (j.contains("planner")) {
        const json& p = j["planner"];
        if (p.contains("lattice_cell")) c.planner.lattice_cell = p["lattice_cell"].get<double>();
        if (p.contains("diversity_inflation"))
            c.planner.diversity_inflation = p["diversity_inflation"].get<double>();
        if (p.contains("route_length_weight"))
            c.planner.route_length_weight = p["route_length_weight"].get<double>();
        if (p.contains("route_threat_weight"))
            c.planner.route_threat_weight = p["route_threat_weight"].get<double>();
        if (p.contains("analyst_rollouts"))
            c.planner.analyst_rollouts = p["analyst_rollouts"].get<int>();
        if (p.contains("max_repair_rounds"))
            c.planner.max_repair_rounds = p["max_repair_rounds"].get<int>();
        if (p.contains("suppress_lead_seconds"))
            c.planner.suppress_lead_seconds = p["suppress_lead_seconds"].get<double>();
        if (p.contains("escort_offset"))
            c.planner.escort_offset = {p["escort_offset"][0].get<double>(),
                                       p["escort_offset"][1].get<double>()};
        if (p.contains("utility_floor")) c.planner.utility_floor = p["utility_floor"].get<double>();
        if (p.contains("standoff_fraction"))
            c.planner.standoff_fraction = p["standoff_fraction"].get<double>();
    }
    if (j.contains("weights")) {
        const json& w = j["weights"];
        if (w.contains("eta1")) c.weights.eta1 = w["eta1"].get<double>();
        if (w.contains("eta2")) c.weights.eta2 = w["eta2"].get<double>();
        if (w.contains("lambda1")) c.weights.lambda1 = w["lambda1"].get<double>();
        if (w.contains("lambda2")) c.weights.lambda2 = w["lambda2"].get<double>();
        if (w.contains("lambda3")) c.weights.lambda3 = w["lambda3"].get<double>();
        if (w.contains("norm_x0") && !w["norm_x0"].is_null()) {
            c.weights.norm_x0 = w["norm_x0"].get<double>();
            c.derive_norm_from_map = false;
        }
    }
    if (j.contains("opponent")) {
        const json& o = j["opponent"];
        if (o.contains("w_high_value")) c.predictive.w_high_value = o["w_high_value"].get<double>();
        if (o.contains("w_ordinary")) c.predictive.w_ordinary = o["w_ordinary"].get<double>();
        if (o.contains("prediction_ticks"))
            c.predictive.prediction_ticks = o["prediction_ticks"].get<int>();
        if (o.contains("timeout_seconds"))
            c.adapter_timeout_seconds = o["timeout_seconds"].get<double>();
        if (o.contains("history_tail")) c.adapter_history_tail = o["history_tail"].get<int>();
    }
    return c;
}

OpponentSpec build_opponent_spec(const std::string& kind, const std::string& endpoint,
                                 const std::string& command, const ToolConfig& cfg) {
    OpponentSpec spec;
    spec.kind = kind;
    spec.predictive = cfg.predictive;
    spec.timeout_seconds = cfg.adapter_timeout_seconds;
    spec.history_tail = cfg.adapter_history_tail;
    spec.endpoint = endpoint;
    spec.command = command;
    if (spec.endpoint.empty()) {
        if (const char* env = std::getenv("TACSIM_ADAPTER_ENDPOINT")) spec.endpoint = env;
    }
    if (spec.kind == "external" && spec.endpoint.empty())
        throw SchemaError("external opponent needs --endpoint or TACSIM_ADAPTER_ENDPOINT");
    if (spec.kind == "external-stdio" && spec.command.empty())
        throw SchemaError("external-stdio opponent needs --command");
    return spec;
}

std::string file_digest(const std::string& path) {
    return sha256_hex(read_file(path));
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Deterministic combat-tactic simulator with plan generation and "
                 "Monte-Carlo adversarial verification"};
    app.require_subcommand(1);
    app.fallthrough();  // global options are accepted after the subcommand name

    std::string config_path;
    app.add_option("--config", config_path, "Tool config file (JSON)");

    // --- plan --------------------------------------------------------------
    auto* cmd_plan = app.add_subcommand("plan", "Generate candidate plans from an intent");
    std::string plan_scenario, plan_intent, plan_out_dir = ".", plan_ablate = "none";
    int plan_n = 3;
    cmd_plan->add_option("--scenario", plan_scenario, "Scenario file")->required();
    cmd_plan->add_option("--intent", plan_intent, "Intent file")->required();
    cmd_plan->add_option("--n", plan_n, "Number of candidates");
    cmd_plan->add_option("--ablate", plan_ablate, "none|single|no_pf|no_an|no_pl")
        ->check(CLI::IsMember({"none", "single", "no_pf", "no_an", "no_pl"}));
    cmd_plan->add_option("--out-dir", plan_out_dir, "Output directory");

    // --- verify ------------------------------------------------------------
    auto* cmd_verify = app.add_subcommand("verify", "Monte-Carlo verification and ranking");
    std::string v_scenario, v_scenario_difficult, v_opponent = "nobrain", v_endpoint, v_command;
    std::vector<std::string> v_plans;
    std::string v_seeds, v_report = "report.json", v_report_text;
    int v_workers = 1;
    cmd_verify->add_option("--scenario", v_scenario, "Scenario file")->required();
    cmd_verify->add_option("--scenario-difficult", v_scenario_difficult,
                           "Second scenario for overall/robust aggregates");
    cmd_verify->add_option("--plan", v_plans, "Plan file (repeatable)")->required();
    cmd_verify->add_option("--opponent", v_opponent, "nobrain|predictive|external|external-stdio")
        ->check(CLI::IsMember({"nobrain", "predictive", "external", "external-stdio", "none"}));
    cmd_verify->add_option("--endpoint", v_endpoint, "External adapter endpoint");
    cmd_verify->add_option("--command", v_command, "External stdio adapter command");
    cmd_verify->add_option("--seeds", v_seeds,
                           "Seed range a..b or single seed (default: the scenario's seed list)");
    cmd_verify->add_option("--workers", v_workers, "Worker threads");
    cmd_verify->add_option("--report", v_report, "Report output path");
    cmd_verify->add_option("--report-text", v_report_text, "Human-readable report path");

    // --- simulate ----------------------------------------------------------
    auto* cmd_sim = app.add_subcommand("simulate", "Run one seeded rollout");
    std::string s_scenario, s_plan, s_opponent = "nobrain", s_endpoint, s_command,
                              s_out_dir = ".";
    std::uint64_t s_seed = 1;
    cmd_sim->add_option("--scenario", s_scenario, "Scenario file")->required();
    cmd_sim->add_option("--plan", s_plan, "Plan file")->required();
    cmd_sim->add_option("--seed", s_seed, "Seed");
    cmd_sim->add_option("--opponent", s_opponent, "nobrain|predictive|external|external-stdio")
        ->check(CLI::IsMember({"nobrain", "predictive", "external", "external-stdio", "none"}));
    cmd_sim->add_option("--endpoint", s_endpoint, "External adapter endpoint");
    cmd_sim->add_option("--command", s_command, "External stdio adapter command");
    cmd_sim->add_option("--out-dir", s_out_dir, "Output directory");

    // --- replay ------------------------------------------------------------
    auto* cmd_replay = app.add_subcommand("replay", "Recheck a record's event-log hash");
    std::string r_record;
    cmd_replay->add_option("--record", r_record, "Record file")->required();

    // --- export-dataset ------------------------------------------------------
    auto* cmd_export = app.add_subcommand("export-dataset", "Build a trajectory dataset");
    std::vector<std::string> e_records;
    std::string e_out = "dataset.jsonl", e_manifest;
    int e_window = 20, e_horizon = 10, e_stride = 10;
    double e_w_high = 2.0, e_w_ord = 1.0;
    cmd_export->add_option("--record", e_records, "Record file (repeatable)")->required();
    cmd_export->add_option("--window", e_window, "History ticks");
    cmd_export->add_option("--horizon", e_horizon, "Target ticks");
    cmd_export->add_option("--stride", e_stride, "Cut stride");
    cmd_export->add_option("--w-high-value", e_w_high, "Weight for high-value entity tokens");
    cmd_export->add_option("--w-ordinary", e_w_ord, "Weight for ordinary entity tokens");
    cmd_export->add_option("--out", e_out, "Dataset output path");
    cmd_export->add_option("--manifest", e_manifest, "Manifest output path");

    // --- score ----------------------------------------------------------------
    auto* cmd_score = app.add_subcommand("score", "Static rubric scoring of a plan");
    std::string sc_scenario, sc_plan, sc_out;
    cmd_score->add_option("--scenario", sc_scenario, "Scenario file")->required();
    cmd_score->add_option("--plan", sc_plan, "Plan file")->required();
    cmd_score->add_option("--out", sc_out, "Score output path (default stdout)");

    // --- plot -------------------------------------------------------------------
    auto* cmd_plot = app.add_subcommand("plot", "Trajectory overlay SVG and CSV");
    std::string p_scenario, p_plan, p_record, p_prefix = "trajectories";
    cmd_plot->add_option("--scenario", p_scenario, "Scenario file")->required();
    cmd_plot->add_option("--plan", p_plan, "Plan file")->required();
    cmd_plot->add_option("--record", p_record, "Record file")->required();
    cmd_plot->add_option("--out-prefix", p_prefix, "Output path prefix");

    std::vector<std::string> argv_copy = args;
    std::vector<char*> argv;
    argv.reserve(argv_copy.size() + 1);
    static char name[] = "tacsim";
    argv.push_back(name);
    for (std::string& a : argv_copy) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        const ToolConfig cfg = load_tool_config(config_path);

        RunManifest manifest;
        manifest.command_line.assign(args.begin(), args.end());
        manifest.effective_config = tool_config_to_json(cfg);

        if (cmd_plan->parsed()) {
            const Scenario scenario = load_scenario(plan_scenario);
            const Intent intent = load_intent(plan_intent);
            manifest.input_digests["scenario"] = json_digest(scenario_to_json(scenario));
            manifest.input_digests["intent"] = json_digest(intent_to_json(intent));

            PlannerConfig pc = cfg.planner;
            if (const char* env = std::getenv("TACSIM_PLAN_ENDPOINT"))
                pc.external_plan_endpoint = env;
            const std::vector<CandidatePlan> plans =
                generate_candidates(intent, scenario, plan_n, pc, ablation_from_string(plan_ablate));

            fs::create_directories(plan_out_dir);
            for (const CandidatePlan& p : plans) {
                const std::string path = (fs::path(plan_out_dir) / (p.plan_id + ".json")).string();
                write_file(path, canonical_dump(plan_to_json(p)) + "\n");
                manifest.outputs.push_back(path);
                std::cout << "wrote " << path << "\n";
            }
            write_manifest((fs::path(plan_out_dir) / "plan-manifest.json").string(), manifest);
            return 0;
        }

        if (cmd_verify->parsed()) {
            std::vector<Scenario> scenarios{load_scenario(v_scenario)};
            manifest.input_digests["scenario"] = json_digest(scenario_to_json(scenarios[0]));
            if (!v_scenario_difficult.empty()) {
                scenarios.push_back(load_scenario(v_scenario_difficult));
                manifest.input_digests["scenario_difficult"] =
                    json_digest(scenario_to_json(scenarios[1]));
            }
            std::vector<CandidatePlan> plans;
            for (const std::string& path : v_plans) {
                plans.push_back(load_plan(path));
                manifest.input_digests["plan:" + plans.back().plan_id] =
                    json_digest(plan_to_json(plans.back()));
            }
            const std::vector<std::uint64_t> seeds =
                v_seeds.empty() ? scenarios[0].sim_config.seed_list : parse_seed_range(v_seeds);
            const OpponentSpec spec = build_opponent_spec(v_opponent, v_endpoint, v_command, cfg);

            MetricWeights weights = cfg.weights;
            if (cfg.derive_norm_from_map) weights.norm_x0 = default_norm_scale(scenarios[0]);

            const VerificationReport report =
                rank_and_report(plans, scenarios, spec, seeds, weights, v_workers);

            json rj = report_to_json(report);
            rj["effective_config"] = tool_config_to_json(cfg);
            write_file(v_report, canonical_dump(rj) + "\n");
            manifest.outputs.push_back(v_report);
            if (!v_report_text.empty()) {
                write_file(v_report_text, render_report_text(report));
                manifest.outputs.push_back(v_report_text);
            }
            manifest.seed_protocol = report.seed_protocol;
            manifest.opponent_id = report.opponent_id;
            write_manifest(v_report + ".manifest.json", manifest);
            std::cout << render_report_text(report);
            return 0;
        }

        if (cmd_sim->parsed()) {
            const Scenario scenario = load_scenario(s_scenario);
            const CandidatePlan plan = load_plan(s_plan);
            manifest.input_digests["scenario"] = json_digest(scenario_to_json(scenario));
            manifest.input_digests["plan"] = json_digest(plan_to_json(plan));
            const OpponentSpec spec = build_opponent_spec(s_opponent, s_endpoint, s_command, cfg);
            std::unique_ptr<OpponentPolicy> policy = make_opponent(spec);

            const RolloutRecord rec = run_rollout(scenario, plan, *policy, {s_seed, 0});

            fs::create_directories(s_out_dir);
            const std::string rec_path =
                (fs::path(s_out_dir) / ("record-seed" + std::to_string(s_seed) + ".json")).string();
            const std::string log_path =
                (fs::path(s_out_dir) / ("events-seed" + std::to_string(s_seed) + ".jsonl")).string();
            write_file(rec_path, canonical_dump(record_to_json(rec)) + "\n");
            write_file(log_path, event_log_lines(rec.events));
            manifest.outputs = {rec_path, log_path};
            manifest.seed_protocol = std::to_string(s_seed);
            manifest.opponent_id = policy->id();
            write_manifest(rec_path + ".manifest.json", manifest);
            std::cout << "outcome: " << to_string(rec.outcome) << " end_tick: " << rec.end_tick
                      << " log_hash: " << rec.log_hash << "\n";
            return 0;
        }

        if (cmd_replay->parsed()) {
            const json j = json::parse(read_file(r_record));
            const RolloutRecord rec = record_from_json(j);
            const std::string recomputed = sha256_hex(event_log_lines(rec.events));
            if (recomputed == rec.log_hash) {
                std::cout << "hash OK " << recomputed << "\n";
                return 0;
            }
            std::cerr << "hash mismatch: stored " << rec.log_hash << " recomputed " << recomputed
                      << "\n";
            return 1;
        }

        if (cmd_export->parsed()) {
            std::vector<RolloutRecord> records;
            for (const std::string& path : e_records) {
                records.push_back(record_from_json(json::parse(read_file(path))));
                manifest.input_digests["record:" + records.back().log_hash.substr(0, 12)] =
                    file_digest(path);
            }
            const DatasetConfig dc{e_window, e_horizon, e_stride};
            const EvaConfig eva{e_w_high, e_w_ord};
            eva.validate();
            const DatasetBuildResult result = build_prediction_dataset(records, dc);
            const std::string manifest_path =
                e_manifest.empty() ? e_out + ".manifest.json" : e_manifest;
            write_dataset(e_out, manifest_path, result, dc, eva, records);
            manifest.outputs = {e_out, manifest_path};
            write_manifest(e_out + ".run-manifest.json", manifest);
            std::cout << "samples: " << result.samples.size()
                      << " skipped_records: " << result.skipped_records << "\n";
            return 0;
        }

        if (cmd_score->parsed()) {
            const Scenario scenario = load_scenario(sc_scenario);
            const CandidatePlan plan = load_plan(sc_plan);
            const StaticScore s = static_score(plan, scenario);
            const json j{{"plan_id", plan.plan_id},
                         {"path_smoothness", s.path_smoothness},
                         {"threat_avoidance", s.threat_avoidance},
                         {"resource_consumption", s.resource_consumption},
                         {"tactical_coordination", s.tactical_coordination},
                         {"engagement_feasibility", s.engagement_feasibility},
                         {"total", s.total}};
            const std::string text = canonical_dump(j) + "\n";
            if (sc_out.empty()) {
                std::cout << text;
            } else {
                write_file(sc_out, text);
                manifest.outputs = {sc_out};
                write_manifest(sc_out + ".manifest.json", manifest);
            }
            return 0;
        }

        if (cmd_plot->parsed()) {
            const Scenario scenario = load_scenario(p_scenario);
            const CandidatePlan plan = load_plan(p_plan);
            const RolloutRecord rec = record_from_json(json::parse(read_file(p_record)));
            const std::string svg_path = p_prefix + ".svg";
            const std::string csv_path = p_prefix + ".csv";
            write_file(svg_path, trajectory_svg(rec, plan, scenario));
            write_file(csv_path, trajectory_csv(rec));
            manifest.outputs = {svg_path, csv_path};
            write_manifest(p_prefix + ".manifest.json", manifest);
            std::cout << "wrote " << svg_path << " and " << csv_path << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::detail::exception& e) {
        std::cerr << "ParseError: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace tacsim
