#pragma once

#include <string>
#include <vector>

namespace chaosmab {

// Full CLI entry point, callable in-process for tests. Returns the process
// exit code: 0 success, 2 config error, 3 runtime/data error.
int run_cli(const std::vector<std::string>& args);

}  // namespace chaosmab
