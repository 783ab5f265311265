#include "uwbaoa/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uwbaoa/errors.hpp"

namespace uwbaoa {

AntennaGeometry::AntennaGeometry(double carrier_frequency, double antenna_spacing,
                                 double effective_spacing_delta, double speed_of_light)
    : frequency_(carrier_frequency),
      spacing_(antenna_spacing),
      delta_(effective_spacing_delta),
      c_(speed_of_light) {
    if (!(frequency_ > 0.0) || !std::isfinite(frequency_))
        throw std::invalid_argument("carrier_frequency must be positive");
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
        throw std::invalid_argument("antenna_spacing must be positive");
    if (!std::isfinite(delta_) || !(spacing_ + delta_ > 0.0))
        throw std::invalid_argument("antenna_spacing + effective_spacing_delta must be positive");
    if (!(c_ > 0.0) || !std::isfinite(c_))
        throw std::invalid_argument("speed_of_light must be positive");
}

AntennaGeometry AntennaGeometry::half_wavelength(double carrier_frequency,
                                                 double effective_spacing_delta) {
    return AntennaGeometry(carrier_frequency, kSpeedOfLight / carrier_frequency / 2.0,
                           effective_spacing_delta);
}

AntennaGeometry AntennaGeometry::with_delta(double effective_spacing_delta) const {
    return AntennaGeometry(frequency_, spacing_, effective_spacing_delta, c_);
}

namespace {

PropagationResult from_path_delta(const AntennaGeometry& geom, double path_delta) {
    PropagationResult r;
    r.path_delta = path_delta;
    r.time_delta = path_delta / geom.speed_of_light();
    r.phase_delta_unwrapped = path_delta * geom.phase_per_meter();
    r.phase_delta_wrapped = Angle(r.phase_delta_unwrapped);
    return r;
}

}  // namespace

PropagationResult pdoa_far_field(const AntennaGeometry& geom, Angle true_aoa) {
    double psi = true_aoa.degrees();
    if (psi > 90.0) {
        psi = 180.0 - psi;
    } else if (psi < -90.0) {
        psi = -180.0 - psi;
    }
    return from_path_delta(geom, geom.effective_spacing() * sind(psi));
}

namespace {

double arcsine_argument(const AntennaGeometry& geom, Angle pdoa) {
    return pdoa.degrees() / (geom.antenna_spacing() * geom.phase_per_meter());
}

}  // namespace

Angle aoa_from_pdoa(const AntennaGeometry& geom, Angle pdoa) {
    const double x = arcsine_argument(geom, pdoa);
    if (x > 1.0 || x < -1.0) {
        throw ArcsineDomainError(x, asind(std::clamp(x, -1.0, 1.0)));
    }
    return Angle(asind(x));
}

ClampedAoa aoa_from_pdoa_clamped(const AntennaGeometry& geom, Angle pdoa) {
    const double x = arcsine_argument(geom, pdoa);
    const bool clamped = x > 1.0 || x < -1.0;
    return {Angle(asind(std::clamp(x, -1.0, 1.0))), clamped};
}

PropagationResult pdoa_near_field(const AntennaGeometry& geom, const NearFieldSource& src) {
    const double half = geom.effective_spacing() / 2.0;
    if (!(src.radius > half) || !std::isfinite(src.radius)) {
        throw GeometryError("near-field source radius must exceed half the effective spacing");
    }
    const double psi = src.incident_angle.degrees();
    const double ox = src.radius * sind(psi);
    const double oz = src.radius * cosd(psi);
    const double dist_a = std::hypot(ox + half, oz);
    const double dist_b = std::hypot(ox - half, oz);
    if (dist_a == 0.0 || dist_b == 0.0) {
        throw GeometryError("near-field source coincides with an antenna");
    }
    // on the array axis the difference is the full spacing for any radius;
    // subtracting the two rounded distances would lose the last bit
    if (oz == 0.0) return from_path_delta(geom, std::copysign(2.0 * half, ox));
    return from_path_delta(geom, dist_a - dist_b);
}

std::optional<double> wrap_onset_deg(const AntennaGeometry& geom) {
    const double x = geom.wavelength() / (2.0 * geom.effective_spacing());
    if (x >= 1.0) return std::nullopt;
    return asind(x);
}

double uwb_pulse_envelope(double t, double amplitude_scale, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    const double u = t / tau;
    return amplitude_scale * u * std::exp(-2.0 * std::numbers::pi * u * u);
}

double uwb_pulse(double t, double amplitude_scale, double tau, double center_frequency) {
    return uwb_pulse_envelope(t, amplitude_scale, tau) *
           std::sin(2.0 * std::numbers::pi * center_frequency * t);
}

double uwb_envelope_peak_time(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    return tau / (2.0 * std::sqrt(std::numbers::pi));
}

}  // namespace uwbaoa
