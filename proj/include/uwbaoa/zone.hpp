#pragma once

#include <array>
#include <cmath>
#include <string_view>

#include "uwbaoa/angle.hpp"

namespace uwbaoa {

/// 90 degree sectors centred on 0, 90, 180 and 270 degrees.
enum class Zone : int { z0 = 0, z90 = 1, z180 = 2, z270 = 3 };

inline constexpr int kZoneCount = 4;
inline constexpr std::array<Zone, kZoneCount> kAllZones = {Zone::z0, Zone::z90, Zone::z180, Zone::z270};

/// Left-closed sectors: [-45, 45), [45, 135), [135, 225), [225, 315).
inline Zone zone_of(Angle a) {
    double x = a.degrees() + 45.0;  // (-135, 225]
    if (x < 0.0) x += 360.0;        // [0, 360)
    int idx = static_cast<int>(std::floor(x / 90.0));
    if (idx > 3) idx = 3;
    return static_cast<Zone>(idx);
}

inline Angle zone_center(Zone z) { return Angle(90.0 * static_cast<int>(z)); }

inline std::string_view zone_name(Zone z) {
    constexpr std::array<std::string_view, kZoneCount> names = {"Z0", "Z90", "Z180", "Z270"};
    return names[static_cast<std::size_t>(z)];
}

}  // namespace uwbaoa
