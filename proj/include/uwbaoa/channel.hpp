#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "uwbaoa/angle.hpp"
#include "uwbaoa/propagation.hpp"
#include "uwbaoa/twr.hpp"

namespace uwbaoa {

inline constexpr int kCirLength = 512;

struct Cir {
    std::vector<std::complex<double>> samples = std::vector<std::complex<double>>(kCirLength);
    double sample_period = 1e-9;
    int first_path_index = 0;

    friend bool operator==(const Cir&, const Cir&) = default;
};

/// Record quality flags, combined as a bitmask.
enum QualityFlag : std::uint32_t {
    kFlagNone = 0,
    kFlagNegativeDistance = 1u << 0,
    kFlagWindowInvalid = 1u << 1,  // first path too close to either CIR edge
    kFlagImported = 1u << 2,
};

/// One logged TWR exchange seen by the dual-antenna node.
struct MeasurementRecord {
    Angle pdoa;
    double tdoa = 0.0;  // seconds
    Cir cir_a;
    Cir cir_b;
    TwrExchange twr;
    double distance_estimate = 0.0;  // metres
    double first_path_power_ratio = 1.0;
    Angle true_aoa;
    double true_distance = 0.0;  // metres
    std::uint32_t flags = kFlagNone;
    std::int64_t pose_id = 0;
    std::int32_t repetition = 0;

    friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

struct MultipathTap {
    double excess_delay = 0.0;        // seconds after the first path
    double relative_amplitude = 0.0;  // (0, 1), relative to an unattenuated first path
    Angle phase;                      // carrier phase at antenna A
    Angle arrival_offset;             // arrival direction relative to the line of sight
};

/// Channel and impairment description for synthetic records.
struct ChannelProfile {
    std::vector<MultipathTap> multipath_taps;  // ascending excess delay
    double pdoa_noise_std = 0.0;               // degrees, at boresight
    double tdoa_noise_std = 0.0;               // seconds, at boresight
    double amplitude_noise_std = 0.0;          // complex CIR noise, relative to first path
    /// Path gain for arrivals from directly behind the board (1 = isotropic).
    /// Gain falls off as b + (1 - b)(1 + cos theta)/2, and PDoA/TDoA noise
    /// scales with its inverse.
    double back_attenuation = 1.0;
    double twr_jitter_std = 0.0;  // seconds on the round-trip timestamp

    void validate() const;

    /// No multipath and no noise.
    static ChannelProfile ideal();
    /// Reference office channel: three reflections, PDoA noise calibrated so
    /// that d = lambda/2 gives 2.45 deg AoA spread at boresight.
    static ChannelProfile office();
};

/// PDoA noise that maps to `aoa_std_deg` at boresight through the first-order
/// sensitivity d psi / d alpha = lambda / (2 pi d).
double calibrated_pdoa_noise_std(const AntennaGeometry& geom, double aoa_std_deg);

struct SimulationConfig {
    double sample_period = 1e-9;
    int base_index = 64;
    double pulse_tau = 4e-9;
    double reply_time = 500e-6;
    double responder_drift = 0.0;
    double antenna_delay = kDefaultAntennaDelay;
    /// Antenna delay the ranging estimator assumes.
    double estimator_antenna_delay = kDefaultAntennaDelay;
    double timestamp_tick = 0.0;  // 0 = no quantization
    /// Round CIR components to 18-bit integers (36 bits per complex sample).
    bool quantize_cir = false;
};

/// Path gain of the board for an arrival at `theta` (board frame).
double board_gain(const ChannelProfile& profile, Angle theta);

/// Deterministic for a given seed.
MeasurementRecord synthesize_record(const AntennaGeometry& geom, const ChannelProfile& profile,
                                    Angle true_aoa, double true_distance, std::uint64_t seed,
                                    const SimulationConfig& config = {});

/// Records for every (distance, angle) pose, distance-major, angles
/// 0, step, 2 step, ... (wrapped), `records_per_pose` repetitions each.
std::vector<MeasurementRecord> sweep_dataset(const AntennaGeometry& geom,
                                             const ChannelProfile& profile,
                                             std::span<const double> distances, double angle_step,
                                             int records_per_pose, std::uint64_t seed,
                                             const SimulationConfig& config = {});

/// Phase of cir_b * conj(cir_a) at the first-path sample. Throws
/// LowSignalError when either first-path sample is not above the noise floor
/// estimated from the samples preceding the first path.
Angle measure_pdoa_from_cirs(const Cir& cir_a, const Cir& cir_b);

/// Per-record seed derived from (seed, pose, repetition).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t pose_index, std::uint64_t repetition);

}  // namespace uwbaoa
