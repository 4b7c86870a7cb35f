#pragma once

namespace vml {

// Bumping the version invalidates cached run records.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace vml
