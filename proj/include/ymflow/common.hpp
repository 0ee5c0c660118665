#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ymflow {

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }
inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }

// Thrown for precondition failures (bad input, rejected configuration).
struct Rejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a numerical procedure cannot finish (CG stall, iteration cap).
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// %.17g rendering used for every numeric CSV cell.
std::string fmt17(double x);

}  // namespace ymflow
