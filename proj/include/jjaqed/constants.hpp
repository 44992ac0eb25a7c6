// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <numbers>

namespace jjaqed::constants {

// CODATA 2018 exact / recommended values, SI.
inline constexpr double e = 1.602176634e-19;
inline constexpr double h = 6.62607015e-34;
inline constexpr double hbar = h / (2.0 * std::numbers::pi);
inline constexpr double k_B = 1.380649e-23;

}  // namespace jjaqed::constants
