#pragma once

namespace lzs {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace lzs
