#pragma once

namespace decotrans {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "decotrans";

}  // namespace decotrans
