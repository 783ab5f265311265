#include "uwbaoa/angle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uwbaoa/errors.hpp"

namespace uwbaoa {

namespace {

double wrap_value(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("angle must be finite");
    }
    if (x > -180.0 && x <= 180.0) {
        return x;
    }
    double r = std::fmod(x, 360.0);
    if (r <= -180.0) {
        r += 360.0;
    } else if (r > 180.0) {
        r -= 360.0;
    }
    // r + 360 can round up onto the excluded -180 side only via -180 itself
    return r == -180.0 ? 180.0 : r;
}

}  // namespace

Angle::Angle(double degrees) : deg_(wrap_value(degrees)) {}

Angle Angle::from_radians(double radians) { return Angle(radians * kDegPerRad); }

Angle wrap_degrees(double x) { return Angle(x); }

double angular_difference(Angle a, Angle b) { return Angle(a.degrees() - b.degrees()).degrees(); }

double sind(double degrees) {
    const double d = wrap_value(degrees);
    if (d == 0.0) return d;
    if (d == 90.0) return 1.0;
    if (d == -90.0) return -1.0;
    if (d == 180.0) return 0.0;
    return std::sin(d * kRadPerDeg);
}

double cosd(double degrees) {
    const double d = wrap_value(degrees);
    if (d == 0.0) return 1.0;
    if (d == 90.0 || d == -90.0) return 0.0;
    if (d == 180.0) return -1.0;
    return std::cos(d * kRadPerDeg);
}

double asind(double x) {
    if (x == 1.0) return 90.0;
    if (x == -1.0) return -90.0;
    return std::asin(x) * kDegPerRad;
}

CircularStats circular_mean_std(std::span<const Angle> samples) {
    if (samples.empty()) {
        throw EmptyInputError("circular statistics need at least one sample");
    }
    double c = 0.0;
    double s = 0.0;
    for (const Angle& a : samples) {
        c += cosd(a.degrees());
        s += sind(a.degrees());
    }
    const double n = static_cast<double>(samples.size());
    if (std::hypot(c, s) <= 1e-12 * n) {
        throw UndefinedMeanError("resultant vector is zero; circular mean undefined");
    }
    const Angle mean = Angle::from_radians(std::atan2(s, c));

    // Projecting onto the mean direction gives R = 1 exactly for identical samples.
    double proj = 0.0;
    for (const Angle& a : samples) {
        proj += cosd(angular_difference(a, mean));
    }
    const double r = std::clamp(proj / n, 0.0, 1.0);
    const double std_rad = r > 0.0 ? std::sqrt(-2.0 * std::log(r)) : INFINITY;

    CircularStats out;
    out.mean = mean;
    out.std_deg = std_rad * kDegPerRad;
    out.count = samples.size();
    out.resultant_length = r;
    return out;
}

double linear_std(std::span<const Angle> samples) {
    if (samples.empty()) {
        throw EmptyInputError("linear std needs at least one sample");
    }
    if (samples.size() == 1) return 0.0;
    double mean = 0.0;
    for (const Angle& a : samples) mean += a.degrees();
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (const Angle& a : samples) ss += (a.degrees() - mean) * (a.degrees() - mean);
    return std::sqrt(ss / static_cast<double>(samples.size() - 1));
}

}  // namespace uwbaoa
