#pragma once

namespace povmkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace povmkit
