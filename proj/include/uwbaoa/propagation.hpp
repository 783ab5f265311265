#pragma once

#include <optional>

#include "uwbaoa/angle.hpp"

namespace uwbaoa {

inline constexpr double kSpeedOfLight = 299'792'458.0;
/// UWB channel 5 nominal carrier.
inline constexpr double kChannel5Frequency = 6.4896e9;
/// Antenna spacing of the reference board (c/(2f) with c rounded to 3e8).
inline constexpr double kReferenceSpacing = 0.023114;

/// Dual-antenna array description. `effective_spacing_delta` models the
/// displacement of the electrical phase centres; the AoA estimator never sees it.
class AntennaGeometry {
public:
    AntennaGeometry(double carrier_frequency, double antenna_spacing,
                    double effective_spacing_delta = 0.0, double speed_of_light = kSpeedOfLight);

    /// Geometry with spacing exactly half a wavelength.
    static AntennaGeometry half_wavelength(double carrier_frequency = kChannel5Frequency,
                                           double effective_spacing_delta = 0.0);

    double carrier_frequency() const noexcept { return frequency_; }
    double antenna_spacing() const noexcept { return spacing_; }
    double effective_spacing_delta() const noexcept { return delta_; }
    double speed_of_light() const noexcept { return c_; }
    double effective_spacing() const noexcept { return spacing_ + delta_; }
    double wavelength() const noexcept { return c_ / frequency_; }
    /// Carrier phase accumulated per metre of path difference, degrees.
    double phase_per_meter() const noexcept { return 360.0 * frequency_ / c_; }

    AntennaGeometry with_delta(double effective_spacing_delta) const;

private:
    double frequency_;
    double spacing_;
    double delta_;
    double c_;
};

struct NearFieldSource {
    double radius = 0.05;  // metres from the array centre
    Angle incident_angle;
};

struct PropagationResult {
    double path_delta = 0.0;  // metres, extra travel to antenna A
    double time_delta = 0.0;  // seconds
    double phase_delta_unwrapped = 0.0;  // degrees
    Angle phase_delta_wrapped;
};

/// Plane-wave model. Back-side angles fold onto their front mirror
/// sign(psi) * (180 - |psi|), reproducing the front-back ambiguity.
PropagationResult pdoa_far_field(const AntennaGeometry& geom, Angle true_aoa);

/// Inverts psi = asin(alpha * lambda / (360 d)) using the nominal spacing.
/// Throws ArcsineDomainError when the argument leaves [-1, 1].
Angle aoa_from_pdoa(const AntennaGeometry& geom, Angle pdoa);

struct ClampedAoa {
    Angle aoa;
    bool clamped = false;
};

/// Same as aoa_from_pdoa but clamps the arcsine argument and flags it.
ClampedAoa aoa_from_pdoa_clamped(const AntennaGeometry& geom, Angle pdoa);

/// Point source on a circle around the array centre; antennas sit at
/// (-(d+dd)/2, 0, 0) [A] and (+(d+dd)/2, 0, 0) [B], the source at
/// R (sin psi, 0, cos psi). Throws GeometryError if the source is not
/// strictly outside the antenna pair.
PropagationResult pdoa_near_field(const AntennaGeometry& geom, const NearFieldSource& src);

/// Smallest positive true AoA at which the wrapped far-field PDoA jumps
/// across +-180. Empty when the phase never exceeds 180 on the front side.
std::optional<double> wrap_onset_deg(const AntennaGeometry& geom);

/// A(t) = G (t/tau) exp(-2 pi (t/tau)^2) sin(2 pi f0 t).
double uwb_pulse(double t, double amplitude_scale, double tau, double center_frequency);

/// Envelope G (t/tau) exp(-2 pi (t/tau)^2) of the pulse above.
double uwb_pulse_envelope(double t, double amplitude_scale, double tau);

/// Envelope maximum, tau / (2 sqrt(pi)).
double uwb_envelope_peak_time(double tau);

}  // namespace uwbaoa
