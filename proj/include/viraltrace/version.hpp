#pragma once

namespace viraltrace {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace viraltrace
