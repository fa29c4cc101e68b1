#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tacsim/events.hpp"
#include "tacsim/plan.hpp"
#include "tacsim/state.hpp"
#include "tacsim/types.hpp"

namespace tacsim {

using json = nlohmann::json;

// Canonical rendering: keys sorted lexicographically (nlohmann objects are
// already map-backed), no whitespace, floats with 17 significant digits.
// Non-finite numbers are rejected.
std::string canonical_dump(const json& j);

// SHA-256 hex of the canonical rendering.
std::string json_digest(const json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// --- Scenario / intent / plan schemas -------------------------------------

json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const json& j);
Scenario load_scenario(const std::string& path);

json intent_to_json(const Intent& i);
Intent intent_from_json(const json& j);
Intent load_intent(const std::string& path);

json plan_to_json(const CandidatePlan& p);
CandidatePlan plan_from_json(const json& j);
CandidatePlan load_plan(const std::string& path);

json action_to_json(const AtomicAction& a);
AtomicAction action_from_json(const json& j);

// --- Wire / log formats -----------------------------------------------------

json event_to_json(const Event& e);
Event event_from_json(const json& j);

// Full per-tick state, including engine runtime fields; used by the adapter
// wire protocol and the record files.
json state_to_json(const GlobalState& s);

// Inclusive seed range "a..b", or a single integer "a".
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

}  // namespace tacsim
