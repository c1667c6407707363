#pragma once

namespace shapeval {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kLibraryName = "shapeval";

}  // namespace shapeval
