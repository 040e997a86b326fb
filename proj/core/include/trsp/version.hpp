#pragma once

namespace trsp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace trsp
