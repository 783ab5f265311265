#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "uwbaoa/errors.hpp"
#include "uwbaoa/features.hpp"

using namespace uwbaoa;

namespace {

const AntennaGeometry kGeom(kChannel5Frequency, kReferenceSpacing);

MeasurementRecord cir_record(int fp, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    MeasurementRecord r;
    for (Cir* c : {&r.cir_a, &r.cir_b}) {
        c->first_path_index = fp;
        for (auto& s : c->samples) s = {n(rng), n(rng)};
    }
    r.pdoa = Angle(20.0 * n(rng));
    r.tdoa = 1e-11 * n(rng);
    r.distance_estimate = 2.0 + n(rng);
    r.first_path_power_ratio = 0.5 + 0.1 * n(rng);
    r.true_distance = 2.0;
    return r;
}

std::vector<MeasurementRecord> records(int n) {
    std::vector<MeasurementRecord> v;
    for (int i = 0; i < n; ++i) v.push_back(cir_record(100, static_cast<std::uint64_t>(i)));
    return v;
}

}  // namespace

TEST_CASE("feature length") {
    FeatureSpec s;
    CHECK(s.window_length() == 106);
    CHECK(s.length() == 4 + 2 * 212);
    s.flags = {true, false, false, false, false, false};
    CHECK(s.length() == 1);
    s.flags = {false, false, false, false, true, false};
    CHECK(s.length() == 212);
}

TEST_CASE("window at fp = 100 covers samples 95..200") {
    MeasurementRecord r = cir_record(100, 1);
    FeatureSpec s = fit_scalers(std::vector<MeasurementRecord>{r});
    s.flags = {false, false, false, false, true, false};
    const FeatureVector v = extract(r, s);
    REQUIRE(v.size() == 212);
    double peak = 0.0;
    for (int i = 95; i <= 200; ++i) peak = std::max(peak, std::abs(r.cir_a.samples[static_cast<std::size_t>(i)]));
    CHECK(v[0] == doctest::Approx(r.cir_a.samples[95].real() / peak).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(r.cir_a.samples[95].imag() / peak).epsilon(1e-15));
    CHECK(v[210] == doctest::Approx(r.cir_a.samples[200].real() / peak).epsilon(1e-15));
    // per-record max magnitude is 1
    double vmax = 0.0;
    for (std::size_t k = 0; k < v.size(); k += 2) vmax = std::max(vmax, std::hypot(v[k], v[k + 1]));
    CHECK(vmax == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("samples outside the window do not affect the features") {
    MeasurementRecord r = cir_record(100, 2);
    const FeatureSpec s = fit_scalers(records(10));
    const FeatureVector before = extract(r, s);
    r.cir_a.samples[201] = {1e6, -1e6};
    r.cir_b.samples[94] = {-1e6, 1e6};
    CHECK(extract(r, s) == before);
    r.cir_b.samples[200] *= 2.0;
    CHECK_FALSE(extract(r, s) == before);
}

TEST_CASE("extraction is deterministic") {
    const auto recs = records(5);
    const FeatureSpec s = fit_scalers(recs);
    CHECK(extract(recs[3], s) == extract(recs[3], s));
}

TEST_CASE("window bounds") {
    const FeatureSpec s = fit_scalers(records(3));
    CHECK_NOTHROW(extract(cir_record(5, 1), s));
    CHECK_NOTHROW(extract(cir_record(411, 1), s));
    CHECK_THROWS_AS(extract(cir_record(4, 1), s), WindowOutOfBoundsError);
    CHECK_THROWS_AS(extract(cir_record(412, 1), s), WindowOutOfBoundsError);

    std::vector<MeasurementRecord> mix = {cir_record(100, 1), cir_record(450, 2), cir_record(200, 3)};
    const FeatureMatrix m = extract_batch(mix, s);
    CHECK(m.skipped == 1);
    CHECK(m.values.rows() == 2);
    CHECK(m.indices == std::vector<std::size_t>{0, 2});
    const FeatureVector row2 = extract(mix[2], s);
    for (std::size_t k = 0; k < row2.size(); ++k) CHECK(m.values(1, static_cast<Eigen::Index>(k)) == row2[k]);

    // scalar-only specs never look at the CIR
    FeatureSpec scalar = s;
    scalar.flags.cir_a = scalar.flags.cir_b = false;
    CHECK(extract(cir_record(450, 2), scalar).size() == 4);
}

TEST_CASE("scalers: examples") {
    std::vector<MeasurementRecord> recs;
    for (double d : {1.0, 3.0, 5.0}) {
        MeasurementRecord r = cir_record(100, static_cast<std::uint64_t>(d));
        r.distance_estimate = d;
        r.tdoa = 3e-11;
        recs.push_back(r);
    }
    const FeatureSpec s = fit_scalers(recs);
    CHECK(s.twr_distance.apply(1.0) == 0.0);
    CHECK(s.twr_distance.apply(3.0) == 0.5);
    CHECK(s.twr_distance.apply(5.0) == 1.0);
    CHECK(s.tdoa.degenerate);
    CHECK(s.tdoa.std == 1.0);
    for (const auto& r : recs) CHECK(s.tdoa.apply(r.tdoa) == 0.0);
    CHECK_FALSE(s.pdoa.degenerate);
    CHECK_THROWS_AS(fit_scalers(std::vector<MeasurementRecord>{}), std::invalid_argument);
}

TEST_CASE("standardized columns have zero mean and unit variance on the fit set") {
    const auto recs = records(500);
    const FeatureSpec s = fit_scalers(recs);
    const FeatureMatrix m = extract_batch(recs, s);
    for (Eigen::Index c : {0, 1, 3}) {
        const Eigen::VectorXd col = m.values.col(c);
        const double mean = col.mean();
        const double var = (col.array() - mean).square().mean();
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(var - 1.0) < 1e-9);
    }
    CHECK(m.values.col(2).minCoeff() == 0.0);
    CHECK(m.values.col(2).maxCoeff() == 1.0);
}

TEST_CASE("targets: examples") {
    const FeatureSpec s = fit_scalers(records(3));
    MeasurementRecord r = cir_record(100, 1);
    r.true_aoa = Angle(30.0);
    r.pdoa = pdoa_far_field(kGeom, Angle(30.0)).phase_delta_wrapped;
    const TargetVector t0 = make_targets(r, kGeom, s);
    CHECK(std::abs(t0.sin_err) < 1e-12);
    CHECK(t0.cos_err == doctest::Approx(1.0).epsilon(1e-15));

    // naive 0 with true 30 gives e = 30
    r.pdoa = Angle(0.0);
    const TargetVector t30 = make_targets(r, kGeom, s);
    CHECK(t30.error_deg == 30.0);
    CHECK(t30.sin_err == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(t30.cos_err == doctest::Approx(0.8660254037844386).epsilon(1e-15));

    r.true_aoa = Angle(100.0);
    CHECK(make_targets(r, kGeom, s).zone == Zone::z90);
}

TEST_CASE("targets: clamped estimate is flagged") {
    const AntennaGeometry small(kChannel5Frequency, 0.01);
    const FeatureSpec s = fit_scalers(records(3));
    MeasurementRecord r = cir_record(100, 1);
    r.pdoa = Angle(150.0);
    r.true_aoa = Angle(60.0);
    const TargetVector t = make_targets(r, small, s);
    CHECK(t.estimate_clamped);
    CHECK(t.error_deg == doctest::Approx(-30.0).epsilon(1e-12));
}

TEST_CASE("targets: unit circle and atan2 recovery") {
    const FeatureSpec s = fit_scalers(records(3));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-180.0, 180.0);
    MeasurementRecord r = cir_record(100, 1);
    for (int i = 0; i < 3000; ++i) {
        r.true_aoa = Angle(u(rng));
        r.pdoa = Angle(u(rng));
        const TargetVector t = make_targets(r, kGeom, s);
        CHECK(std::abs(t.sin_err * t.sin_err + t.cos_err * t.cos_err - 1.0) < 1e-15);
        const double back = std::atan2(t.sin_err, t.cos_err) * kDegPerRad;
        CHECK(std::abs(angular_difference(Angle(back), Angle(t.error_deg))) < 1e-12);
        CHECK(t.zone == zone_of(r.true_aoa));
    }
}
