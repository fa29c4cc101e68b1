#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tacsim {

// FIPS 180-4 SHA-256, returned as a lowercase hex string.
std::string sha256_hex(std::string_view data);

}  // namespace tacsim
