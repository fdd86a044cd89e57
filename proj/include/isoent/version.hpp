#pragma once

namespace isoent {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace isoent
