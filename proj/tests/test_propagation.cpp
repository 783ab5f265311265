#include <cmath>
#include <random>

#include "doctest.h"
#include "uwbaoa/errors.hpp"
#include "uwbaoa/propagation.hpp"

using namespace uwbaoa;

namespace {

const AntennaGeometry kHalf = AntennaGeometry::half_wavelength();

double scan_wrap_onset(const AntennaGeometry& g, double step) {
    double prev = pdoa_far_field(g, Angle(0.0)).phase_delta_wrapped.degrees();
    for (int i = 1; i * step <= 90.0; ++i) {
        const double psi = i * step;
        const double cur = pdoa_far_field(g, Angle(psi)).phase_delta_wrapped.degrees();
        if (cur < prev) return psi;  // jumped from near +180 to near -180
        prev = cur;
    }
    return NAN;
}

}  // namespace

TEST_CASE("geometry validation") {
    CHECK_THROWS_AS(AntennaGeometry(0.0, 0.02), std::invalid_argument);
    CHECK_THROWS_AS(AntennaGeometry(6e9, -0.02), std::invalid_argument);
    CHECK_THROWS_AS(AntennaGeometry(6e9, 0.02, -0.02), std::invalid_argument);
    CHECK_THROWS_AS(AntennaGeometry(6e9, 0.02, 0.0, 0.0), std::invalid_argument);
    const AntennaGeometry g(kChannel5Frequency, kReferenceSpacing);
    CHECK(g.wavelength() == doctest::Approx(kSpeedOfLight / kChannel5Frequency).epsilon(1e-15));
    CHECK(g.speed_of_light() == 299792458.0);
    CHECK(kHalf.antenna_spacing() == doctest::Approx(kHalf.wavelength() / 2).epsilon(1e-15));
}

TEST_CASE("far field: broadside and the quarter-turn example") {
    const PropagationResult r0 = pdoa_far_field(kHalf, Angle(0.0));
    CHECK(r0.path_delta == 0.0);
    CHECK(r0.phase_delta_wrapped.degrees() == 0.0);
    const PropagationResult r30 = pdoa_far_field(kHalf, Angle(30.0));
    CHECK(r30.phase_delta_wrapped.degrees() == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(r30.time_delta == doctest::Approx(r30.path_delta / kSpeedOfLight).epsilon(1e-15));
    CHECK(r30.phase_delta_wrapped == wrap_degrees(r30.phase_delta_unwrapped));
}

TEST_CASE("far field path delta uses the effective spacing") {
    const AntennaGeometry g(kChannel5Frequency, 0.023, 0.0077);
    const PropagationResult r = pdoa_far_field(g, Angle(40.0));
    CHECK(r.path_delta == doctest::Approx(0.0307 * std::sin(40.0 * M_PI / 180)).epsilon(1e-14));
    CHECK(r.phase_delta_unwrapped == doctest::Approx(360.0 * g.carrier_frequency() * r.time_delta).epsilon(1e-14));
}

TEST_CASE("inverse examples") {
    CHECK(aoa_from_pdoa(kHalf, Angle(0.0)).degrees() == 0.0);
    CHECK(aoa_from_pdoa(kHalf, Angle(90.0)).degrees() == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("inverse ignores the spacing offset") {
    const AntennaGeometry g = kHalf.with_delta(0.005);
    CHECK(aoa_from_pdoa(g, Angle(90.0)).degrees() == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("arcsine domain error carries the clamped value") {
    const AntennaGeometry g(kChannel5Frequency, 0.01);
    try {
        (void)aoa_from_pdoa(g, Angle(100.0));
        FAIL("expected domain error");
    } catch (const ArcsineDomainError& e) {
        CHECK(e.argument() > 1.0);
        CHECK(e.clamped_aoa_deg() == 90.0);
    }
    const ClampedAoa c = aoa_from_pdoa_clamped(g, Angle(-100.0));
    CHECK(c.clamped);
    CHECK(c.aoa.degrees() == -90.0);
    CHECK_FALSE(aoa_from_pdoa_clamped(g, Angle(10.0)).clamped);
}

TEST_CASE("round trip on a 0.5 degree grid, spacing below half a wavelength") {
    const AntennaGeometry g(kChannel5Frequency, 0.023);
    for (int i = -180; i <= 180; ++i) {
        const double psi = 0.5 * i;
        const double back = aoa_from_pdoa(g, pdoa_far_field(g, Angle(psi)).phase_delta_wrapped).degrees();
        CHECK(std::abs(back - psi) <= 1e-9);
    }
}

TEST_CASE("round trip at exactly half a wavelength away from endfire") {
    for (int i = -179; i <= 179; ++i) {
        const double psi = 0.5 * i;
        const double back = aoa_from_pdoa(kHalf, pdoa_far_field(kHalf, Angle(psi)).phase_delta_wrapped).degrees();
        CHECK(std::abs(back - psi) <= 1e-9);
    }
}

TEST_CASE("front-back mirror symmetry") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-180.0, 180.0);
    const AntennaGeometry g(kChannel5Frequency, kReferenceSpacing, 0.0077);
    for (int i = 0; i < 2000; ++i) {
        const Angle psi(u(rng));
        const PropagationResult a = pdoa_far_field(g, psi);
        const PropagationResult b = pdoa_far_field(g, Angle(180.0) - psi);
        CHECK(std::abs(a.phase_delta_unwrapped - b.phase_delta_unwrapped) <= 1e-12);
        CHECK(std::abs(a.path_delta - b.path_delta) <= 1e-15);
    }
    CHECK(pdoa_far_field(g, Angle(150.0)).phase_delta_wrapped == pdoa_far_field(g, Angle(30.0)).phase_delta_wrapped);
}

TEST_CASE("odd symmetry and monotonicity") {
    const AntennaGeometry g(kChannel5Frequency, kReferenceSpacing);
    double prev = -INFINITY;
    for (int i = -900; i <= 900; ++i) {
        const double psi = 0.1 * i;
        const double p = pdoa_far_field(g, Angle(psi)).phase_delta_unwrapped;
        CHECK(p > prev);
        prev = p;
        CHECK(pdoa_far_field(g, Angle(-psi)).phase_delta_unwrapped == -p);
    }
}

TEST_CASE("near field: broadside, collinear and validation") {
    const AntennaGeometry g(kChannel5Frequency, 0.0231);
    CHECK(pdoa_near_field(g, {0.05, Angle(0.0)}).path_delta == 0.0);
    const PropagationResult c = pdoa_near_field(g, {0.05, Angle(90.0)});
    CHECK(c.path_delta == g.effective_spacing());
    CHECK(pdoa_near_field(g, {0.05, Angle(-90.0)}).path_delta == -c.path_delta);
    CHECK_THROWS_AS(pdoa_near_field(g, {0.0231 / 2, Angle(90.0)}), GeometryError);
    CHECK_THROWS_AS(pdoa_near_field(g, {0.005, Angle(0.0)}), GeometryError);
}

TEST_CASE("near field converges to far field") {
    const AntennaGeometry g(kChannel5Frequency, 0.023);
    for (int i = -120; i <= 120; ++i) {
        const Angle psi(0.5 * i);
        const double near = aoa_from_pdoa(g, pdoa_near_field(g, {10.0, psi}).phase_delta_wrapped).degrees();
        const double far = aoa_from_pdoa(g, pdoa_far_field(g, psi).phase_delta_wrapped).degrees();
        CHECK(std::abs(near - far) < 0.1);
    }
    // closer sources deviate more
    const double d50 = std::abs(pdoa_near_field(g, {0.05, Angle(60.0)}).path_delta -
                                pdoa_far_field(g, Angle(60.0)).path_delta);
    const double d500 = std::abs(pdoa_near_field(g, {0.5, Angle(60.0)}).path_delta -
                                 pdoa_far_field(g, Angle(60.0)).path_delta);
    CHECK(d50 > d500);
}

TEST_CASE("wrap onset closed form matches a 0.01 degree scan") {
    // 3e8 rounding convention that produced the 23.114 mm spacing
    const AntennaGeometry g(kChannel5Frequency, kReferenceSpacing, 0.0077, 3e8);
    const double closed = *wrap_onset_deg(g);
    CHECK(closed == doctest::Approx(48.6).epsilon(0.5 / 48.6));
    const double scanned = scan_wrap_onset(g, 0.01);
    CHECK(scanned >= closed);
    CHECK(scanned - closed < 0.01 + 1e-9);

    const AntennaGeometry g0 = g.with_delta(0.0);
    CHECK(*wrap_onset_deg(g0) >= 89.0);
    CHECK(*wrap_onset_deg(g) < *wrap_onset_deg(g0));
    // below half a wavelength the phase never reaches 180 on the front side
    CHECK_FALSE(wrap_onset_deg(AntennaGeometry(kChannel5Frequency, 0.02)).has_value());
}

TEST_CASE("pulse: zero at origin and envelope peak") {
    const double tau = 4e-9;
    CHECK(uwb_pulse(0.0, 1.0, tau, kChannel5Frequency) == 0.0);
    CHECK(uwb_envelope_peak_time(tau) == doctest::Approx(1.1284e-9).epsilon(1e-4));
    double best_t = 0.0;
    double best = -1.0;
    for (int i = 0; i <= 10000; ++i) {
        const double t = i * 1e-12;
        const double v = uwb_pulse_envelope(t, 1.0, tau);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    CHECK(std::abs(best_t - uwb_envelope_peak_time(tau)) <= 1e-12);
    CHECK_THROWS_AS(uwb_pulse(1e-9, 1.0, 0.0, kChannel5Frequency), std::invalid_argument);
    CHECK_THROWS_AS(uwb_pulse_envelope(1e-9, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("pulse is even in time") {
    // Both factors t/tau and sin(2 pi f t) are odd, so their product is even.
    const double tau = 4e-9;
    for (int i = 1; i <= 2000; ++i) {
        const double t = i * 7.3e-12;
        const double a = uwb_pulse(t, 1.3, tau, kChannel5Frequency);
        CHECK(uwb_pulse(-t, 1.3, tau, kChannel5Frequency) == doctest::Approx(a).epsilon(1e-12));
    }
}
