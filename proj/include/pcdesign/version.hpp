#pragma once

namespace pcd {

inline constexpr const char* kVersion = "0.1.0";

} // namespace pcd
