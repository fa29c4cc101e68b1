#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tacsim/json_io.hpp"
#include "tacsim/opponents.hpp"

namespace tacsim {

// Wire protocol shared by the opponent adapter (POST /decide) and the
// external plan generator (POST /plan). The stdio variant exchanges the same
// JSON payloads, one request line and one response line per tick.

// {tick, history: [GlobalState...tail], scenario_digest}
json decide_request_json(const std::vector<GlobalState>& history, const Scenario& scenario,
                         int history_tail);

// Parses {actions: [...]}; malformed envelopes raise ProtocolError. Actions
// that fail schema validation or reference dead/unknown/wrong-side entities
// are dropped, each with a note appended to `faults`.
std::vector<AtomicAction> parse_decide_response(const std::string& body,
                                                const GlobalState& current,
                                                const Scenario& scenario,
                                                std::vector<std::string>& faults);

class ExternalPolicyBase : public OpponentPolicy {
public:
    const std::vector<std::string>& faults() const { return faults_; }

protected:
    std::vector<std::string> faults_;
};

std::unique_ptr<OpponentPolicy> make_external_opponent(const OpponentSpec& spec);

// One-shot plan generation through the external adapter.
CandidatePlan request_external_plan(const Intent& intent, const Scenario& scenario,
                                    const std::string& endpoint, double timeout_seconds);

}  // namespace tacsim
