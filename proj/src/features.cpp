#include "uwbaoa/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uwbaoa/errors.hpp"

namespace uwbaoa {

std::size_t FeatureSpec::length() const {
    std::size_t n = 0;
    n += flags.pdoa + flags.tdoa + flags.twr_distance + flags.power_ratio;
    const std::size_t per_cir = 2 * static_cast<std::size_t>(window_length());
    n += per_cir * (static_cast<std::size_t>(flags.cir_a) + static_cast<std::size_t>(flags.cir_b));
    return n;
}

namespace {

template <class Get>
Standardizer fit_standardizer(std::span<const MeasurementRecord> train, Get get) {
    double mean = 0.0;
    for (const auto& r : train) mean += get(r);
    mean /= static_cast<double>(train.size());
    double var = 0.0;
    for (const auto& r : train) var += (get(r) - mean) * (get(r) - mean);
    var /= static_cast<double>(train.size());
    Standardizer s;
    s.mean = mean;
    if (var > 0.0 && std::isfinite(var)) {
        s.std = std::sqrt(var);
    } else {
        s.std = 1.0;
        s.degenerate = true;
    }
    return s;
}

template <class Get>
MinMaxScaler fit_minmax(std::span<const MeasurementRecord> train, Get get) {
    MinMaxScaler m;
    m.min = m.max = get(train.front());
    for (const auto& r : train) {
        m.min = std::min(m.min, get(r));
        m.max = std::max(m.max, get(r));
    }
    m.degenerate = !(m.max > m.min);
    return m;
}

}  // namespace

FeatureSpec fit_scalers(std::span<const MeasurementRecord> train, const FeatureSpec& layout) {
    if (train.empty()) throw std::invalid_argument("cannot fit scalers on an empty training set");
    if (layout.window_before < 0 || layout.window_after < 0)
        throw std::invalid_argument("CIR window extents must be non-negative");
    FeatureSpec spec = layout;
    spec.pdoa = fit_standardizer(train, [](const MeasurementRecord& r) { return r.pdoa.degrees(); });
    spec.tdoa = fit_standardizer(train, [](const MeasurementRecord& r) { return r.tdoa; });
    spec.power_ratio =
        fit_standardizer(train, [](const MeasurementRecord& r) { return r.first_path_power_ratio; });
    spec.twr_distance = fit_minmax(train, [](const MeasurementRecord& r) { return r.distance_estimate; });
    spec.true_distance = fit_minmax(train, [](const MeasurementRecord& r) { return r.true_distance; });
    return spec;
}

namespace {

void check_window(const MeasurementRecord& record, const FeatureSpec& spec) {
    for (const Cir* cir : {&record.cir_a, &record.cir_b}) {
        const int fp = cir->first_path_index;
        if (fp - spec.window_before < 0 ||
            fp + spec.window_after >= static_cast<int>(cir->samples.size())) {
            throw WindowOutOfBoundsError("CIR window [" + std::to_string(fp - spec.window_before) + ", " +
                                         std::to_string(fp + spec.window_after) + "] outside CIR");
        }
    }
}

template <class Out>
void write_features(const MeasurementRecord& record, const FeatureSpec& spec, Out out) {
    if (spec.flags.cir_a || spec.flags.cir_b) check_window(record, spec);
    std::size_t k = 0;
    if (spec.flags.pdoa) out(k++, spec.pdoa.apply(record.pdoa.degrees()));
    if (spec.flags.tdoa) out(k++, spec.tdoa.apply(record.tdoa));
    if (spec.flags.twr_distance) out(k++, spec.twr_distance.apply(record.distance_estimate));
    if (spec.flags.power_ratio) out(k++, spec.power_ratio.apply(record.first_path_power_ratio));

    // one divisor per record, shared by both antennas
    double peak = 0.0;
    for (auto [active, cir] : {std::pair{spec.flags.cir_a, &record.cir_a}, std::pair{spec.flags.cir_b, &record.cir_b}}) {
        if (!active) continue;
        for (int i = -spec.window_before; i <= spec.window_after; ++i)
            peak = std::max(peak, std::abs(cir->samples[static_cast<std::size_t>(cir->first_path_index + i)]));
    }
    const double scale = peak > 0.0 ? 1.0 / peak : 1.0;
    for (auto [active, cir] : {std::pair{spec.flags.cir_a, &record.cir_a}, std::pair{spec.flags.cir_b, &record.cir_b}}) {
        if (!active) continue;
        for (int i = -spec.window_before; i <= spec.window_after; ++i) {
            const auto v = cir->samples[static_cast<std::size_t>(cir->first_path_index + i)];
            out(k++, v.real() * scale);
            out(k++, v.imag() * scale);
        }
    }
}

}  // namespace

FeatureVector extract(const MeasurementRecord& record, const FeatureSpec& spec) {
    FeatureVector v(spec.length());
    write_features(record, spec, [&](std::size_t k, double x) { v[k] = x; });
    return v;
}

FeatureMatrix extract_batch(std::span<const MeasurementRecord> records, const FeatureSpec& spec) {
    FeatureMatrix m;
    m.values.resize(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(spec.length()));
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        try {
            write_features(records[i], spec, [&](std::size_t k, double x) {
                m.values(row, static_cast<Eigen::Index>(k)) = x;
            });
        } catch (const WindowOutOfBoundsError&) {
            ++m.skipped;
            continue;
        }
        m.indices.push_back(i);
        ++row;
    }
    m.values.conservativeResize(row, Eigen::NoChange);
    return m;
}

TargetVector make_targets(const MeasurementRecord& record, const AntennaGeometry& geom,
                          const FeatureSpec& spec) {
    const ClampedAoa naive = aoa_from_pdoa_clamped(geom, record.pdoa);
    TargetVector t;
    t.error_deg = angular_difference(record.true_aoa, naive.aoa);
    t.estimate_clamped = naive.clamped;
    t.sin_err = sind(t.error_deg);
    t.cos_err = cosd(t.error_deg);
    t.true_distance_scaled = spec.true_distance.apply(record.true_distance);
    t.zone = zone_of(record.true_aoa);
    return t;
}

}  // namespace uwbaoa
