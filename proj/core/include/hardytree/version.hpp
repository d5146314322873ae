#pragma once

namespace hardytree {

inline constexpr const char* version_string = "0.1.0";

}
