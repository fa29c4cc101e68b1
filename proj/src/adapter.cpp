#include "tacsim/adapter.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstring>

#include <httplib.h>

namespace tacsim {

json decide_request_json(const std::vector<GlobalState>& history, const Scenario& scenario,
                         int history_tail) {
    json states = json::array();
    const std::size_t tail = history_tail > 0 ? static_cast<std::size_t>(history_tail)
                                              : history.size();
    const std::size_t from = history.size() > tail ? history.size() - tail : 0;
    for (std::size_t i = from; i < history.size(); ++i) states.push_back(state_to_json(history[i]));
    return json{{"tick", history.back().tick},
                {"history", states},
                {"scenario_digest", json_digest(scenario_to_json(scenario))}};
}

std::vector<AtomicAction> parse_decide_response(const std::string& body,
                                                const GlobalState& current,
                                                const Scenario& scenario,
                                                std::vector<std::string>& faults) {
    (void)scenario;
    json j;
    try {
        j = json::parse(body);
    } catch (const nlohmann::detail::parse_error& e) {
        throw ProtocolError(std::string("adapter response is not JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("actions") || !j["actions"].is_array())
        throw ProtocolError("adapter response must be {\"actions\": [...]}");

    std::vector<AtomicAction> actions;
    for (const auto& item : j["actions"]) {
        AtomicAction a;
        try {
            a = action_from_json(item);
        } catch (const Error& e) {
            faults.push_back(std::string("adapter action dropped: ") + e.name() + ": " + e.what());
            continue;
        }
        const EntityState* actor = current.find_entity(a.actor_id);
        if (!actor) {
            faults.push_back("adapter action dropped: unknown actor '" + a.actor_id + "'");
            continue;
        }
        if (!actor->alive()) {
            faults.push_back("adapter action dropped: actor '" + a.actor_id + "' is dead");
            continue;
        }
        if (actor->side != Side::Opponent) {
            faults.push_back("adapter action dropped: actor '" + a.actor_id +
                             "' is not opponent-side");
            continue;
        }
        actions.push_back(std::move(a));
    }
    return actions;
}

namespace {

class HttpExternalPolicy final : public ExternalPolicyBase {
public:
    explicit HttpExternalPolicy(OpponentSpec spec) : spec_(std::move(spec)) {}

    std::string id() const override { return opponent_identifier(spec_); }

    std::vector<AtomicAction> decide(const std::vector<GlobalState>& history,
                                     const Scenario& scenario) override {
        httplib::Client client(spec_.endpoint);
        const auto timeout_ms =
            std::chrono::milliseconds(static_cast<long long>(spec_.timeout_seconds * 1000.0));
        client.set_connection_timeout(timeout_ms);
        client.set_read_timeout(timeout_ms);
        client.set_write_timeout(timeout_ms);

        const std::string body =
            canonical_dump(decide_request_json(history, scenario, spec_.history_tail));
        httplib::Result res = client.Post("/decide", body, "application/json");
        if (!res) {
            if (res.error() == httplib::Error::ConnectionTimeout ||
                res.error() == httplib::Error::Read || res.error() == httplib::Error::Write) {
                throw TimeoutError("adapter '" + spec_.endpoint + "' timed out after " +
                                   std::to_string(spec_.timeout_seconds) + " s");
            }
            throw ProtocolError("adapter '" + spec_.endpoint +
                                "' request failed: " + httplib::to_string(res.error()));
        }
        if (res->status != 200)
            throw ProtocolError("adapter returned status " + std::to_string(res->status));
        return parse_decide_response(res->body, history.back(), scenario, faults_);
    }

private:
    OpponentSpec spec_;
};

// Child process speaking the line-delimited variant of the protocol.
class StdioProcess {
public:
    explicit StdioProcess(const std::string& command) {
        int to_child[2];
        int from_child[2];
        if (pipe(to_child) != 0 || pipe(from_child) != 0)
            throw ProtocolError("cannot create adapter pipes");
        pid_ = fork();
        if (pid_ < 0) throw ProtocolError("cannot fork adapter process");
        if (pid_ == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        write_fd_ = to_child[1];
        read_fd_ = from_child[0];
    }

    ~StdioProcess() {
        if (write_fd_ >= 0) close(write_fd_);
        if (read_fd_ >= 0) close(read_fd_);
        if (pid_ > 0) {
            kill(pid_, SIGTERM);
            int status = 0;
            waitpid(pid_, &status, 0);
        }
    }

    StdioProcess(const StdioProcess&) = delete;
    StdioProcess& operator=(const StdioProcess&) = delete;

    void write_line(const std::string& line) {
        std::string out = line;
        out.push_back('\n');
        std::size_t off = 0;
        while (off < out.size()) {
            const ssize_t n = write(write_fd_, out.data() + off, out.size() - off);
            if (n <= 0) throw ProtocolError("adapter stdin closed");
            off += static_cast<std::size_t>(n);
        }
    }

    std::string read_line(double timeout_seconds) {
        while (true) {
            const auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            pollfd pfd{read_fd_, POLLIN, 0};
            const int rv = poll(&pfd, 1, static_cast<int>(timeout_seconds * 1000.0));
            if (rv == 0)
                throw TimeoutError("stdio adapter timed out after " +
                                   std::to_string(timeout_seconds) + " s");
            if (rv < 0) throw ProtocolError("poll on adapter pipe failed");
            char chunk[4096];
            const ssize_t n = read(read_fd_, chunk, sizeof(chunk));
            if (n <= 0) throw ProtocolError("adapter stdout closed");
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    pid_t pid_ = -1;
    int write_fd_ = -1;
    int read_fd_ = -1;
    std::string buffer_;
};

class StdioExternalPolicy final : public ExternalPolicyBase {
public:
    explicit StdioExternalPolicy(OpponentSpec spec) : spec_(std::move(spec)) {}

    std::string id() const override { return opponent_identifier(spec_); }

    void reset(const SeedInfo&) override { process_.reset(); }

    std::vector<AtomicAction> decide(const std::vector<GlobalState>& history,
                                     const Scenario& scenario) override {
        if (!process_) process_ = std::make_unique<StdioProcess>(spec_.command);
        process_->write_line(
            canonical_dump(decide_request_json(history, scenario, spec_.history_tail)));
        const std::string line = process_->read_line(spec_.timeout_seconds);
        return parse_decide_response(line, history.back(), scenario, faults_);
    }

private:
    OpponentSpec spec_;
    std::unique_ptr<StdioProcess> process_;
};

}  // namespace

std::unique_ptr<OpponentPolicy> make_external_opponent(const OpponentSpec& spec) {
    if (spec.kind == "external") {
        if (spec.endpoint.empty())
            throw SchemaError("external opponent requires an endpoint");
        return std::make_unique<HttpExternalPolicy>(spec);
    }
    if (spec.kind == "external-stdio") {
        if (spec.command.empty())
            throw SchemaError("external-stdio opponent requires a command");
        return std::make_unique<StdioExternalPolicy>(spec);
    }
    throw SchemaError("unknown external opponent kind '" + spec.kind + "'");
}

CandidatePlan request_external_plan(const Intent& intent, const Scenario& scenario,
                                    const std::string& endpoint, double timeout_seconds) {
    httplib::Client client(endpoint);
    const auto timeout_ms =
        std::chrono::milliseconds(static_cast<long long>(timeout_seconds * 1000.0));
    client.set_connection_timeout(timeout_ms);
    client.set_read_timeout(timeout_ms);
    client.set_write_timeout(timeout_ms);

    const json request{{"intent", intent_to_json(intent)},
                       {"scenario", scenario_to_json(scenario)}};
    httplib::Result res = client.Post("/plan", canonical_dump(request), "application/json");
    if (!res) throw TimeoutError("plan adapter '" + endpoint + "' unreachable or timed out");
    if (res->status != 200)
        throw ProtocolError("plan adapter returned status " + std::to_string(res->status));
    try {
        return plan_from_json(json::parse(res->body));
    } catch (const nlohmann::detail::parse_error& e) {
        throw ProtocolError(std::string("plan adapter response is not JSON: ") + e.what());
    }
}

}  // namespace tacsim
