#pragma once

namespace rhlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rhlab
