#pragma once

// Regime boundaries of the truncated-normal generator, in standardized
// units z = (x - mu) / sigma on the truncation interval [a, b].
//
//   central  : interval meets [-kTailStart, kTailStart] and is wider than
//              kMinNormalWidth -> plain normal draws, rejected outside [a, b]
//   narrow   : interval meets the central band but is narrower
//              -> uniform proposal on [a, b], accepted with the density ratio
//   tail     : a >= kTailStart (or b <= -kTailStart by symmetry)
//              -> if (b^2 - a^2) / 2 <= kTailUniformLogRatio, uniform proposal;
//                 otherwise translated-exponential proposal with the optimal
//                 rate (a + sqrt(a^2 + 4)) / 2, rejected above b
//
// With these values the acceptance probability of every regime stays above
// 0.18 for any interval, including one-sided tails at a = 40.

namespace bss::trunc_normal {

inline constexpr double kTailStart = 0.45;
inline constexpr double kMinNormalWidth = 1.0;
inline constexpr double kTailUniformLogRatio = 1.0;
inline constexpr int kMaxAttempts = 100000;

}  // namespace bss::trunc_normal
