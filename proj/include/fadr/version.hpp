#pragma once

/// @file version.hpp
/// @brief Library version, kept in step with the CMake project version.

namespace fadr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fadr
