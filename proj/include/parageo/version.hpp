#pragma once

namespace parageo {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace parageo
