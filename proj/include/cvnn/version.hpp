#pragma once

namespace cvnn {

inline constexpr const char* version_string = "cvnn 1.0.0";

}  // namespace cvnn
