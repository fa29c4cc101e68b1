#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "fixtures.hpp"
#include "tacsim/adapter.hpp"

using namespace tacsim;
namespace ts = tacsim::testsupport;

namespace {

// In-process adapter server for the HTTP protocol tests.
class StubServer {
public:
    explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Post("/decide", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

OpponentSpec http_spec(const std::string& endpoint, double timeout = 2.0) {
    OpponentSpec spec;
    spec.kind = "external";
    spec.endpoint = endpoint;
    spec.timeout_seconds = timeout;
    return spec;
}

}  // namespace

TEST_CASE("decide request carries tick, bounded history, scenario digest") {
    const Scenario s = ts::duel_scenario();
    std::vector<GlobalState> history;
    for (int i = 0; i < 40; ++i) {
        GlobalState st = initial_state(s);
        st.tick = i;
        st.time = i * 0.1;
        history.push_back(st);
    }
    const json j = decide_request_json(history, s, 20);
    CHECK(j["tick"] == 39);
    CHECK(j["history"].size() == 20);
    CHECK(j["history"][0]["tick"] == 20);
    CHECK(j["scenario_digest"] == json_digest(scenario_to_json(s)));
}

TEST_CASE("decide response validation drops bad actions and flags protocol errors") {
    const Scenario s = ts::suppression_scenario();
    GlobalState st = initial_state(s);
    std::vector<std::string> faults;

    SUBCASE("empty action list is fine") {
        const auto actions = parse_decide_response(R"({"actions":[]})", st, s, faults);
        CHECK(actions.empty());
        CHECK(faults.empty());
    }
    SUBCASE("action for a dead entity is dropped with a fault note") {
        st.find_entity("AAT-01")->health = 0.0;
        const auto actions = parse_decide_response(
            R"({"actions":[{"actor_id":"AAT-01","t_start":0.0,"kind":"LAUNCH","weapon":"sam","target_id":"B-01"}]})",
            st, s, faults);
        CHECK(actions.empty());
        REQUIRE(faults.size() == 1);
        CHECK(faults[0].find("dead") != std::string::npos);
    }
    SUBCASE("plan-side actors are rejected") {
        const auto actions = parse_decide_response(
            R"({"actions":[{"actor_id":"B-01","t_start":0.0,"kind":"LAUNCH","weapon":"m","target_id":"CC-01"}]})",
            st, s, faults);
        CHECK(actions.empty());
        CHECK(faults.size() == 1);
    }
    SUBCASE("schema-invalid actions are dropped") {
        const auto actions = parse_decide_response(
            R"({"actions":[{"actor_id":"AAT-01","t_start":0.0,"kind":"LAUNCH"}]})", st, s, faults);
        CHECK(actions.empty());
        CHECK(faults.size() == 1);
    }
    SUBCASE("malformed envelopes raise ProtocolError") {
        CHECK_THROWS_AS(parse_decide_response("not json", st, s, faults), ProtocolError);
        CHECK_THROWS_AS(parse_decide_response(R"({"acts":[]})", st, s, faults), ProtocolError);
    }
}

TEST_CASE("http adapter: empty responses yield a passive opponent") {
    StubServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"actions":[]})", "application/json");
    });
    const Scenario s = ts::duel_scenario();
    CandidatePlan idle;
    idle.plan_id = "idle";
    idle.planned_trajectories = integrate_plan_kinematics({}, s, s.sim_config.tick_count());

    auto policy = make_opponent(http_spec(server.endpoint()));
    const RolloutRecord rec = run_rollout(s, idle, *policy, {1, 0});
    CHECK(rec.outcome == Outcome::Failure);
    CHECK(rec.failure_reason == FailureReason::HorizonExceeded);
}

TEST_CASE("http adapter: non-200 status aborts the rollout") {
    StubServer server([](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("{}", "application/json");
    });
    const Scenario s = ts::duel_scenario();
    CandidatePlan idle;
    idle.plan_id = "idle";
    idle.planned_trajectories = integrate_plan_kinematics({}, s, s.sim_config.tick_count());

    auto policy = make_opponent(http_spec(server.endpoint()));
    CHECK_THROWS_AS(run_rollout(s, idle, *policy, {1, 0}), OpponentFault);
}

TEST_CASE("http adapter: timeout aborts the rollout") {
    StubServer server([](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1500));
        res.set_content(R"({"actions":[]})", "application/json");
    });
    const Scenario s = ts::duel_scenario();
    CandidatePlan idle;
    idle.plan_id = "idle";
    idle.planned_trajectories = integrate_plan_kinematics({}, s, s.sim_config.tick_count());

    auto policy = make_opponent(http_spec(server.endpoint(), 0.3));
    CHECK_THROWS_AS(run_rollout(s, idle, *policy, {1, 0}), OpponentFault);
}

TEST_CASE("stdio adapter round-trips the line protocol") {
    const char* stub = std::getenv("TACSIM_STDIO_STUB");
    REQUIRE_MESSAGE(stub != nullptr, "TACSIM_STDIO_STUB must point at the stub binary");
    const Scenario s = ts::duel_scenario();
    CandidatePlan idle;
    idle.plan_id = "idle";
    idle.planned_trajectories = integrate_plan_kinematics({}, s, s.sim_config.tick_count());

    SUBCASE("empty responses run to the horizon") {
        OpponentSpec spec;
        spec.kind = "external-stdio";
        spec.command = std::string(stub) + " empty";
        auto policy = make_opponent(spec);
        const RolloutRecord rec = run_rollout(s, idle, *policy, {1, 0});
        CHECK(rec.failure_reason == FailureReason::HorizonExceeded);
    }
    SUBCASE("invalid actions are dropped and the rollout continues") {
        OpponentSpec spec;
        spec.kind = "external-stdio";
        spec.command = std::string(stub) + " launch GHOST-99 B-01";
        auto policy = make_opponent(spec);
        const RolloutRecord rec = run_rollout(s, idle, *policy, {1, 0});
        CHECK(rec.failure_reason == FailureReason::HorizonExceeded);  // ran to completion
        const auto* ext = dynamic_cast<const ExternalPolicyBase*>(policy.get());
        REQUIRE(ext != nullptr);
        CHECK(!ext->faults().empty());
    }
    SUBCASE("garbage output aborts") {
        OpponentSpec spec;
        spec.kind = "external-stdio";
        spec.command = std::string(stub) + " garbage";
        auto policy = make_opponent(spec);
        CHECK_THROWS_AS(run_rollout(s, idle, *policy, {1, 0}), OpponentFault);
    }
    SUBCASE("slow child times out") {
        OpponentSpec spec;
        spec.kind = "external-stdio";
        spec.command = std::string(stub) + " delay 2000";
        spec.timeout_seconds = 0.3;
        auto policy = make_opponent(spec);
        CHECK_THROWS_AS(run_rollout(s, idle, *policy, {1, 0}), OpponentFault);
    }
}

TEST_CASE("external plan adapter round-trips a plan") {
    const Scenario s = ts::duel_scenario();
    const CandidatePlan canned = ts::straight_plan(s);
    httplib::Server server;
    server.Post("/plan", [&canned](const httplib::Request&, httplib::Response& res) {
        res.set_content(canonical_dump(plan_to_json(canned)), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&server] { server.listen_after_bind(); });
    server.wait_until_ready();

    const Intent intent = ts::template_intent();
    const CandidatePlan received = request_external_plan(
        intent, s, "http://127.0.0.1:" + std::to_string(port), 2.0);
    CHECK(canonical_dump(plan_to_json(received)) == canonical_dump(plan_to_json(canned)));

    server.stop();
    t.join();
}
