#pragma once

namespace bks {

inline constexpr const char* kToolName = "bks";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace bks
