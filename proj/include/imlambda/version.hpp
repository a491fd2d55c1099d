#pragma once

namespace imlambda {
inline constexpr const char* kVersion = "0.3.0";
}
