// version.hpp
#pragma once

namespace exciton2des {
inline constexpr const char* version = "1.0.0";
}
