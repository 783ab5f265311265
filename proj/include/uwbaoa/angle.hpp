#pragma once

#include <cstddef>
#include <numbers>
#include <span>

namespace uwbaoa {

inline constexpr double kDegPerRad = 180.0 / std::numbers::pi;
inline constexpr double kRadPerDeg = std::numbers::pi / 180.0;

/// Planar angle in degrees, always held in the canonical range (-180, +180].
class Angle {
public:
    constexpr Angle() = default;
    /// Wraps `degrees` into (-180, 180]. Throws std::invalid_argument on NaN/inf.
    explicit Angle(double degrees);

    static Angle from_radians(double radians);

    double degrees() const noexcept { return deg_; }
    double radians() const noexcept { return deg_ * kRadPerDeg; }

    Angle operator-() const { return Angle(-deg_); }
    friend Angle operator+(Angle a, Angle b) { return Angle(a.deg_ + b.deg_); }
    friend Angle operator-(Angle a, Angle b) { return Angle(a.deg_ - b.deg_); }
    friend bool operator==(Angle a, Angle b) noexcept { return a.deg_ == b.deg_; }

private:
    double deg_ = 0.0;
};

Angle wrap_degrees(double x);

/// Signed shortest-arc difference a - b in (-180, 180].
double angular_difference(Angle a, Angle b);

// Trigonometry in degrees. Exact multiples of 90 give exact results, which
// keeps collinear and broadside geometry free of rounding residue.
double sind(double degrees);
double cosd(double degrees);
double asind(double x);

struct CircularStats {
    Angle mean;
    double std_deg = 0.0;  // sqrt(-2 ln R), converted to degrees
    std::size_t count = 0;
    double resultant_length = 0.0;
};

/// Throws EmptyInputError on empty input and UndefinedMeanError when the
/// unit-vector sum vanishes.
CircularStats circular_mean_std(std::span<const Angle> samples);

/// Plain sample standard deviation (n - 1) of the wrapped degree values.
/// Only meaningful away from the +-180 seam.
double linear_std(std::span<const Angle> samples);

}  // namespace uwbaoa
