#pragma once

namespace supneu {
inline constexpr const char* kVersion = "supneu 0.1.0";
}
