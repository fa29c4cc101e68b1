#include "tacsim/manifest.hpp"

namespace tacsim {

json manifest_to_json(const RunManifest& m) {
    json cmd = json::array();
    for (const std::string& c : m.command_line) cmd.push_back(c);
    json digests = json::object();
    for (const auto& [k, v] : m.input_digests) digests[k] = v;
    json outputs = json::array();
    for (const std::string& o : m.outputs) outputs.push_back(o);
    return json{{"command_line", cmd},
                {"tool_version", m.tool_version},
                {"input_digests", digests},
                {"seed_protocol", m.seed_protocol},
                {"opponent", m.opponent_id},
                {"effective_config", m.effective_config},
                {"outputs", outputs}};
}

void write_manifest(const std::string& path, const RunManifest& m) {
    write_file(path, canonical_dump(manifest_to_json(m)) + "\n");
}

}  // namespace tacsim
