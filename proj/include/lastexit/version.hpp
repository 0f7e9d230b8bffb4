#pragma once

namespace lastexit {

inline constexpr const char* kVersion = "lastexit 0.1.0";

}  // namespace lastexit
