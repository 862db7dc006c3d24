#pragma once

namespace equifocal {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace equifocal
