// version.hpp — library version string embedded in emitted files

#pragma once

namespace wqed {

inline constexpr const char* version_string = "wqed 0.1.0";

} // namespace wqed
