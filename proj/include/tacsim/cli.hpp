#pragma once

#include <string>
#include <vector>

namespace tacsim {

// Full command dispatch. Exit status 0 on success, 1 on domain errors,
// 2 on usage errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace tacsim
