#include "uwbaoa/twr.hpp"

#include <cmath>
#include <stdexcept>

#include "uwbaoa/errors.hpp"

namespace uwbaoa {

TwrExchange synthesize_twr(double true_distance, double reply_time, double drift,
                           double antenna_delay, const TwrOptions& options) {
    if (!(true_distance >= 0.0) || !std::isfinite(true_distance))
        throw std::invalid_argument("true_distance must be non-negative");
    if (!(reply_time > 0.0) || !std::isfinite(reply_time))
        throw std::invalid_argument("reply_time must be positive");
    if (!(std::abs(drift) < 1e-3))
        throw std::invalid_argument("responder drift must satisfy |drift| < 1e-3");
    if (!(antenna_delay >= 0.0) || !std::isfinite(antenna_delay))
        throw std::invalid_argument("antenna_delay must be non-negative");

    const double tof = true_distance / options.speed_of_light;
    TwrExchange x;
    x.reply_time = reply_time;
    x.round_trip_time = 2.0 * tof + reply_time * (1.0 + drift) + 2.0 * antenna_delay;
    x.responder_drift = drift;
    x.antenna_delay = antenna_delay;
    if (options.tick > 0.0) {
        x.round_trip_time = std::round(x.round_trip_time / options.tick) * options.tick;
        x.reply_time = std::round(x.reply_time / options.tick) * options.tick;
    }
    return x;
}

DistanceEstimate estimate_distance(const TwrExchange& x, double assumed_antenna_delay,
                                   double speed_of_light) {
    if (!(x.round_trip_time >= x.reply_time)) {
        throw MalformedExchangeError("round-trip time shorter than reply time");
    }
    DistanceEstimate d;
    d.meters = speed_of_light * (x.round_trip_time - x.reply_time - 2.0 * assumed_antenna_delay) / 2.0;
    d.negative = d.meters < 0.0;
    return d;
}

double twr_raw_ticks(const TwrExchange& x) {
    return (x.round_trip_time - x.reply_time) / kDeviceTimeUnit;
}

}  // namespace uwbaoa
