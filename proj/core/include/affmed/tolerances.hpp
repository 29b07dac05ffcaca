#pragma once

// Numerical tolerances shared across the library. Values are part of the
// public contract: tests pin against them, so change with care.
namespace affmed::tol {

inline constexpr double pd = 1e-10;    // positive-definiteness checks
inline constexpr double unit = 1e-12;  // unit-norm validation of directions
inline constexpr double lin = 1e-8;    // linear-map and whitening roundtrips

}  // namespace affmed::tol
