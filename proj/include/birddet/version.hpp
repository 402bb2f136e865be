#pragma once

namespace birddet {

inline constexpr const char* kToolName = "birddet";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace birddet
