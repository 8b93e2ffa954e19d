#pragma once

namespace gwcp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gwcp
