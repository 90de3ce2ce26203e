#pragma once

#include <string_view>

namespace chaosmab {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kBuildId = "chaosmab 0.1.0";

}  // namespace chaosmab
