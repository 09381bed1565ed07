#pragma once

#include <cmath>
#include <cstdint>

namespace meshdetect {

// Simulation time is kept in integer microseconds so that event ordering,
// window arithmetic and trace round-trips are exact.
using TimeUs = int64_t;

constexpr TimeUs kUsPerSec = 1000000;

inline TimeUs seconds_to_us(double s) { return static_cast<TimeUs>(std::llround(s * 1e6)); }
inline double us_to_seconds(TimeUs t) { return static_cast<double>(t) / 1e6; }

} // namespace meshdetect
