#pragma once

namespace wafergp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wafergp
