#pragma once

namespace theoria {
inline constexpr const char* kVersion = "0.1.0";
}
