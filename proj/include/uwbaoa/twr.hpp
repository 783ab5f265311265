#pragma once

namespace uwbaoa {

/// DW1000/DW3000 device time unit, 1 / (128 * 499.2 MHz) ~ 15.65 ps.
inline constexpr double kDeviceTimeUnit = 1.0 / (128.0 * 499.2e6);
/// Common factory antenna delay (16385 device ticks).
inline constexpr double kDefaultAntennaDelay = 16385.0 * kDeviceTimeUnit;

/// Single-sided two-way-ranging exchange as logged by the initiator.
struct TwrExchange {
    double round_trip_time = 0.0;  // initiator clock, seconds
    double reply_time = 0.0;       // responder clock, seconds
    double responder_drift = 0.0;  // fractional clock offset
    double antenna_delay = 0.0;    // per device, seconds

    friend bool operator==(const TwrExchange&, const TwrExchange&) = default;
};

struct TwrOptions {
    double speed_of_light = 299'792'458.0;
    /// Round timestamps to multiples of this period; 0 disables quantization.
    double tick = 0.0;
};

/// round_trip = 2 ToF + reply (1 + drift) + 2 antenna_delay.
TwrExchange synthesize_twr(double true_distance, double reply_time, double drift,
                           double antenna_delay, const TwrOptions& options = {});

struct DistanceEstimate {
    double meters = 0.0;
    bool negative = false;  // miscalibration or corrupt timestamps
};

/// c (round_trip - reply - 2 assumed_antenna_delay) / 2. Negative results are
/// returned unclamped with `negative` set. Throws MalformedExchangeError when
/// round_trip < reply.
DistanceEstimate estimate_distance(const TwrExchange& x, double assumed_antenna_delay,
                                   double speed_of_light = 299'792'458.0);

/// (round_trip - reply) in device time units; the raw quantity screened by
/// the dataset quality filter.
double twr_raw_ticks(const TwrExchange& x);

}  // namespace uwbaoa
