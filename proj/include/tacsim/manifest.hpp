#pragma once

#include <string>
#include <vector>

#include "tacsim/json_io.hpp"

namespace tacsim {

inline constexpr const char* kToolVersion = "0.1.0";

// Reproducibility envelope written next to every command's outputs: the exact
// invocation, the digests of every input, the seed protocol, and the output
// paths. A verify run is re-creatable from this file alone.
struct RunManifest {
    std::vector<std::string> command_line;
    std::string tool_version = kToolVersion;
    std::map<std::string, std::string> input_digests;  // label -> sha256
    std::string seed_protocol;
    std::string opponent_id;
    json effective_config = json::object();
    std::vector<std::string> outputs;
};

json manifest_to_json(const RunManifest& m);
void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace tacsim
