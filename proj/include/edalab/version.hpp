#pragma once

namespace edalab {

inline constexpr const char* kCodeVersion = "edalab 0.1.0";

}  // namespace edalab
