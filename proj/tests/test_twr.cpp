#include <cmath>
#include <vector>

#include "doctest.h"
#include "uwbaoa/errors.hpp"
#include "uwbaoa/twr.hpp"

using namespace uwbaoa;

namespace {
constexpr double kC = 299'792'458.0;
}

TEST_CASE("zero distance returns the reply time") {
    const TwrExchange x = synthesize_twr(0.0, 500e-9, 0.0, 0.0);
    CHECK(x.round_trip_time == 500e-9);
    CHECK(estimate_distance(x, 0.0).meters == 0.0);
}

TEST_CASE("3 m exchange") {
    const TwrExchange x = synthesize_twr(3.0, 500e-9, 0.0, 0.0);
    const double tof = 3.0 / kC;
    CHECK(tof == doctest::Approx(10.00692e-9).epsilon(1e-6));
    CHECK(x.round_trip_time == doctest::Approx(520.01384e-9).epsilon(1e-8));
    CHECK(std::abs(estimate_distance(x, 0.0).meters - 3.0) <= 1e-9);
}

TEST_CASE("responder drift biases the distance by c drift reply / 2") {
    const double drift = 20e-6;
    const TwrExchange x = synthesize_twr(0.0, 500e-9, drift, 0.0);
    const double bias = estimate_distance(x, 0.0).meters;
    const double closed = kC * drift * 500e-9 / 2.0;
    CHECK(closed == doctest::Approx(1.5e-3).epsilon(0.01));
    CHECK(bias == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("uncompensated antenna delay adds c * delay") {
    const TwrExchange x = synthesize_twr(2.0, 500e-9, 0.0, 0.5e-9);
    const double bias = estimate_distance(x, 0.0).meters - 2.0;
    CHECK(bias == doctest::Approx(kC * 1e-9 / 2.0).epsilon(1e-6));
    CHECK(bias == doctest::Approx(0.15).epsilon(0.01));
    // matched calibration removes it
    CHECK(std::abs(estimate_distance(x, 0.5e-9).meters - 2.0) <= 1e-9);
}

TEST_CASE("negative distance is reported, not clamped") {
    const TwrExchange x = synthesize_twr(0.0, 500e-9, 0.0, 0.0);
    const DistanceEstimate d = estimate_distance(x, 1e-9);
    CHECK(d.negative);
    CHECK(d.meters < 0.0);
}

TEST_CASE("malformed exchange") {
    TwrExchange x;
    x.round_trip_time = 100e-9;
    x.reply_time = 200e-9;
    CHECK_THROWS_AS(estimate_distance(x, 0.0), MalformedExchangeError);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(synthesize_twr(-1.0, 500e-9, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(synthesize_twr(1.0, 0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(synthesize_twr(1.0, 500e-9, 1e-3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(synthesize_twr(1.0, 500e-9, 0.0, -1e-9), std::invalid_argument);
}

TEST_CASE("round trip is the identity over 0..100 m") {
    for (int i = 0; i <= 1000; ++i) {
        const double d = 0.1 * i;
        const TwrExchange x = synthesize_twr(d, 300e-6, 0.0, kDefaultAntennaDelay);
        CHECK(std::abs(estimate_distance(x, kDefaultAntennaDelay).meters - d) <= 1e-9);
    }
}

TEST_CASE("bias is linear in drift with slope c reply / 2") {
    const double reply = 500e-9;
    std::vector<double> xs;
    std::vector<double> ys;
    for (int i = -20; i <= 20; ++i) {
        const double drift = i * 2e-5;
        xs.push_back(drift);
        ys.push_back(estimate_distance(synthesize_twr(1.0, reply, drift, 0.0), 0.0).meters - 1.0);
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double r2 = sxy * sxy / (sxx * syy);
    CHECK(slope == doctest::Approx(kC * reply / 2.0).epsilon(1e-6));
    CHECK(r2 > 0.999);
}

TEST_CASE("raw ticks and quantization") {
    const TwrExchange x = synthesize_twr(3.0, 500e-9, 0.0, 0.0);
    CHECK(twr_raw_ticks(x) == doctest::Approx((x.round_trip_time - x.reply_time) / kDeviceTimeUnit));
    TwrOptions opt;
    opt.tick = kDeviceTimeUnit;
    const TwrExchange q = synthesize_twr(3.0, 500e-9, 0.0, 0.0, opt);
    const double ticks = q.round_trip_time / kDeviceTimeUnit;
    CHECK(std::abs(ticks - std::round(ticks)) < 1e-6);
    // one tick of range resolution is c * tick / 2, about 2.3 mm
    CHECK(std::abs(estimate_distance(q, 0.0).meters - 3.0) <= kC * kDeviceTimeUnit);
}
