#pragma once

namespace tzliq {

inline constexpr const char* kToolName = "tzliq";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace tzliq
