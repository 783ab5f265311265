#include "uwbaoa/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "uwbaoa/errors.hpp"

namespace uwbaoa {

void ChannelProfile::validate() const {
    double prev = 0.0;
    for (const MultipathTap& tap : multipath_taps) {
        if (!(tap.excess_delay > prev))
            throw std::invalid_argument("multipath excess delays must be positive and ascending");
        if (!(tap.relative_amplitude > 0.0 && tap.relative_amplitude < 1.0))
            throw std::invalid_argument("multipath relative amplitude must lie in (0, 1)");
        prev = tap.excess_delay;
    }
    if (!(pdoa_noise_std >= 0.0) || !(tdoa_noise_std >= 0.0) || !(amplitude_noise_std >= 0.0) ||
        !(twr_jitter_std >= 0.0))
        throw std::invalid_argument("noise standard deviations must be non-negative");
    if (!(back_attenuation > 0.0 && back_attenuation <= 1.0))
        throw std::invalid_argument("back_attenuation must lie in (0, 1]");
}

ChannelProfile ChannelProfile::ideal() { return ChannelProfile{}; }

ChannelProfile ChannelProfile::office() {
    ChannelProfile p;
    p.multipath_taps = {
        {4e-9, 0.45, Angle(40.0), Angle(65.0)},
        {9e-9, 0.30, Angle(-160.0), Angle(-110.0)},
        {15e-9, 0.20, Angle(-50.0), Angle(150.0)},
    };
    p.pdoa_noise_std = 7.70;
    p.tdoa_noise_std = 10e-12;
    p.amplitude_noise_std = 0.02;
    p.back_attenuation = 0.15;
    p.twr_jitter_std = 100e-12;
    return p;
}

double calibrated_pdoa_noise_std(const AntennaGeometry& geom, double aoa_std_deg) {
    return aoa_std_deg * 2.0 * std::numbers::pi * geom.antenna_spacing() / geom.wavelength();
}

double board_gain(const ChannelProfile& profile, Angle theta) {
    const double b = profile.back_attenuation;
    return b + (1.0 - b) * (1.0 + cosd(theta.degrees())) / 2.0;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t pose_index, std::uint64_t repetition) {
    // splitmix64 finaliser applied to a running combination
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ pose_index) ^ repetition);
}

namespace {

// Causal pulse built from the envelope of the UWB excitation, shifted so its
// peak sits at s = 0 and normalised to unit peak.
class PulseShape {
public:
    explicit PulseShape(double tau) : tau_(tau), peak_time_(uwb_envelope_peak_time(tau)) {
        peak_ = uwb_pulse_envelope(peak_time_, 1.0, tau_);
    }

    double operator()(double s) const {
        const double t = s + peak_time_;
        if (t <= 0.0 || t > 3.0 * tau_) return 0.0;
        return uwb_pulse_envelope(t, 1.0, tau_) / peak_;
    }

private:
    double tau_;
    double peak_time_;
    double peak_ = 1.0;
};

struct PathComponent {
    double arrival_a;  // seconds
    double arrival_b;
    std::complex<double> gain_a;
    std::complex<double> gain_b;
};

void render(Cir& cir, std::span<const PathComponent> paths, bool antenna_b, const PulseShape& pulse) {
    for (int n = 0; n < kCirLength; ++n) {
        const double t = n * cir.sample_period;
        std::complex<double> v{0.0, 0.0};
        for (const PathComponent& p : paths) {
            const double s = t - (antenna_b ? p.arrival_b : p.arrival_a);
            const double shape = pulse(s);
            if (shape != 0.0) v += shape * (antenna_b ? p.gain_b : p.gain_a);
        }
        cir.samples[static_cast<std::size_t>(n)] = v;
    }
}

void quantize(Cir& cir) {
    double full_scale = 0.0;
    for (const auto& v : cir.samples)
        full_scale = std::max({full_scale, std::abs(v.real()), std::abs(v.imag())});
    if (full_scale == 0.0) return;
    const double levels = (1 << 17) - 1;
    const double step = full_scale / levels;
    for (auto& v : cir.samples)
        v = {std::round(v.real() / step) * step, std::round(v.imag() / step) * step};
}

}  // namespace

MeasurementRecord synthesize_record(const AntennaGeometry& geom, const ChannelProfile& profile,
                                    Angle true_aoa, double true_distance, std::uint64_t seed,
                                    const SimulationConfig& config) {
    if (!(true_distance > 0.0) || !std::isfinite(true_distance))
        throw std::invalid_argument("true_distance must be positive");
    if (!(config.sample_period > 0.0) || config.base_index < 0)
        throw std::invalid_argument("invalid CIR sampling configuration");
    profile.validate();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&](double std_dev) { return std_dev > 0.0 ? std_dev * normal(rng) : 0.0; };

    const PropagationResult los = pdoa_far_field(geom, true_aoa);
    const double los_gain = board_gain(profile, true_aoa);

    MeasurementRecord rec;
    rec.true_aoa = true_aoa;
    rec.true_distance = true_distance;
    // The same phase jitter rotates the whole antenna-B capture, so PDoA read
    // back from the CIRs agrees with the reported value.
    const double pdoa_jitter = draw(profile.pdoa_noise_std / los_gain);
    rec.pdoa = Angle(los.phase_delta_wrapped.degrees() + pdoa_jitter);
    rec.tdoa = los.time_delta + draw(profile.tdoa_noise_std / los_gain);

    TwrOptions twr_opts;
    twr_opts.speed_of_light = geom.speed_of_light();
    twr_opts.tick = config.timestamp_tick;
    rec.twr = synthesize_twr(true_distance, config.reply_time, config.responder_drift,
                             config.antenna_delay, twr_opts);
    rec.twr.round_trip_time += draw(profile.twr_jitter_std);
    const DistanceEstimate est =
        estimate_distance(rec.twr, config.estimator_antenna_delay, geom.speed_of_light());
    rec.distance_estimate = est.meters;
    if (est.negative) rec.flags |= kFlagNegativeDistance;

    // Path A is the longer one for positive path_delta; arrivals are split
    // symmetrically around the array-centre arrival time.
    const double tof = true_distance / geom.speed_of_light();
    const double t0 = config.base_index * config.sample_period + tof;
    std::vector<PathComponent> paths;
    paths.push_back({t0 + los.time_delta / 2.0, t0 - los.time_delta / 2.0, {los_gain, 0.0},
                     std::polar(los_gain, los.phase_delta_wrapped.radians())});
    double multipath_power = 0.0;
    for (const MultipathTap& tap : profile.multipath_taps) {
        const Angle direction = true_aoa + tap.arrival_offset;
        const PropagationResult prop = pdoa_far_field(geom, direction);
        const double amp = board_gain(profile, direction) * tap.relative_amplitude;
        multipath_power += amp * amp;
        const double t = t0 + tap.excess_delay;
        paths.push_back({t + prop.time_delta / 2.0, t - prop.time_delta / 2.0,
                         std::polar(amp, tap.phase.radians()),
                         std::polar(amp, (tap.phase + prop.phase_delta_wrapped).radians())});
    }
    rec.first_path_power_ratio = los_gain * los_gain / (los_gain * los_gain + multipath_power);

    const int fp = static_cast<int>(std::floor(t0 / config.sample_period + 0.5));
    for (Cir* cir : {&rec.cir_a, &rec.cir_b}) {
        cir->sample_period = config.sample_period;
        cir->first_path_index = std::clamp(fp, 0, kCirLength - 1);
    }
    if (fp < 5 || fp + 100 > kCirLength - 1) rec.flags |= kFlagWindowInvalid;

    const PulseShape pulse(config.pulse_tau);
    render(rec.cir_a, paths, false, pulse);
    render(rec.cir_b, paths, true, pulse);
    if (pdoa_jitter != 0.0) {
        const auto rot = std::polar(1.0, pdoa_jitter * kRadPerDeg);
        for (auto& v : rec.cir_b.samples) v *= rot;
    }

    const double component_std = profile.amplitude_noise_std / std::numbers::sqrt2;
    if (component_std > 0.0) {
        for (Cir* cir : {&rec.cir_a, &rec.cir_b})
            for (auto& v : cir->samples) v += std::complex<double>(draw(component_std), draw(component_std));
    }
    if (config.quantize_cir) {
        quantize(rec.cir_a);
        quantize(rec.cir_b);
    }
    return rec;
}

std::vector<MeasurementRecord> sweep_dataset(const AntennaGeometry& geom,
                                             const ChannelProfile& profile,
                                             std::span<const double> distances, double angle_step,
                                             int records_per_pose, std::uint64_t seed,
                                             const SimulationConfig& config) {
    if (!(angle_step > 0.0) || !std::isfinite(angle_step))
        throw std::invalid_argument("angle_step must be positive");
    const double steps = 360.0 / angle_step;
    const long n_angles = std::lround(steps);
    if (n_angles < 1 || std::abs(steps - static_cast<double>(n_angles)) > 1e-9)
        throw std::invalid_argument("angle_step must divide 360");
    if (records_per_pose < 1) throw std::invalid_argument("records_per_pose must be >= 1");

    std::vector<MeasurementRecord> out;
    out.reserve(distances.size() * static_cast<std::size_t>(n_angles) *
                static_cast<std::size_t>(records_per_pose));
    for (std::size_t di = 0; di < distances.size(); ++di) {
        for (long k = 0; k < n_angles; ++k) {
            const auto pose = static_cast<std::uint64_t>(di) * static_cast<std::uint64_t>(n_angles) +
                              static_cast<std::uint64_t>(k);
            const Angle aoa(static_cast<double>(k) * angle_step);
            for (int rep = 0; rep < records_per_pose; ++rep) {
                MeasurementRecord rec = synthesize_record(
                    geom, profile, aoa, distances[di],
                    derive_seed(seed, pose, static_cast<std::uint64_t>(rep)), config);
                rec.pose_id = static_cast<std::int64_t>(pose);
                rec.repetition = rep;
                out.push_back(std::move(rec));
            }
        }
    }
    return out;
}

Angle measure_pdoa_from_cirs(const Cir& cir_a, const Cir& cir_b) {
    if (cir_a.sample_period != cir_b.sample_period || cir_a.first_path_index != cir_b.first_path_index ||
        cir_a.samples.size() != cir_b.samples.size())
        throw std::invalid_argument("CIRs must share sampling and first-path index");
    const int fp = cir_a.first_path_index;
    if (fp < 0 || static_cast<std::size_t>(fp) >= cir_a.samples.size())
        throw std::invalid_argument("first-path index outside CIR");

    // Noise floor from the leading samples, well clear of the first-path pulse.
    double floor = 0.0;
    const int lead = fp - 10;
    if (lead > 0) {
        double power = 0.0;
        for (int i = 0; i < lead; ++i) {
            power += std::norm(cir_a.samples[static_cast<std::size_t>(i)]) +
                     std::norm(cir_b.samples[static_cast<std::size_t>(i)]);
        }
        floor = 3.0 * std::sqrt(power / (2.0 * lead));
    }
    const auto a = cir_a.samples[static_cast<std::size_t>(fp)];
    const auto b = cir_b.samples[static_cast<std::size_t>(fp)];
    if (!(std::abs(a) > floor) || !(std::abs(b) > floor))
        throw LowSignalError("first-path amplitude below noise floor");
    return Angle::from_radians(std::arg(b * std::conj(a)));
}

}  // namespace uwbaoa
