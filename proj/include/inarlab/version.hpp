#pragma once

namespace inarlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace inarlab
