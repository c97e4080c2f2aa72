#pragma once

namespace delayfield {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace delayfield
