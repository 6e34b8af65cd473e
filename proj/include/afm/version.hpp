#pragma once

namespace afm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace afm
