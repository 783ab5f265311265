#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uwbaoa/channel.hpp"
#include "uwbaoa/propagation.hpp"
#include "uwbaoa/zone.hpp"

namespace uwbaoa {

struct Standardizer {
    double mean = 0.0;
    double std = 1.0;
    bool degenerate = false;  // zero variance on the fit set; std forced to 1

    double apply(double x) const { return (x - mean) / std; }
};

struct MinMaxScaler {
    double min = 0.0;
    double max = 1.0;
    bool degenerate = false;  // max == min on the fit set; range forced to 1

    double apply(double x) const { return (x - min) / (degenerate ? 1.0 : max - min); }
    double invert(double y) const { return y * (degenerate ? 1.0 : max - min) + min; }
};

struct FeatureFlags {
    bool pdoa = true;
    bool tdoa = true;
    bool twr_distance = true;
    bool power_ratio = true;
    bool cir_a = true;
    bool cir_b = true;

    friend bool operator==(const FeatureFlags&, const FeatureFlags&) = default;
};

/// Feature layout and scaler parameters. Scalers are fitted on training
/// records only and stored with every model.
struct FeatureSpec {
    int window_before = 5;
    int window_after = 100;
    FeatureFlags flags;
    Standardizer pdoa;
    Standardizer tdoa;
    Standardizer power_ratio;
    MinMaxScaler twr_distance;
    MinMaxScaler true_distance;  // regression target scaling

    int window_length() const { return window_before + window_after + 1; }
    /// One value per active scalar plus 2 * window_length per active CIR.
    std::size_t length() const;
};

using FeatureVector = std::vector<double>;

FeatureSpec fit_scalers(std::span<const MeasurementRecord> train, const FeatureSpec& layout = {});

/// Throws WindowOutOfBoundsError when [fp - before, fp + after] leaves the CIR.
FeatureVector extract(const MeasurementRecord& record, const FeatureSpec& spec);

struct FeatureMatrix {
    Eigen::MatrixXd values;            // one row per extracted record
    std::vector<std::size_t> indices;  // source record index of each row
    std::size_t skipped = 0;           // records rejected by the window check
};

FeatureMatrix extract_batch(std::span<const MeasurementRecord> records, const FeatureSpec& spec);

struct TargetVector {
    double sin_err = 0.0;
    double cos_err = 1.0;
    double true_distance_scaled = 0.0;
    Zone zone = Zone::z0;
    double error_deg = 0.0;        // true AoA minus naive estimate, wrapped
    bool estimate_clamped = false; // PDoA was outside the arcsine domain
};

/// Error target relative to the (clamped) naive PDoA estimate.
TargetVector make_targets(const MeasurementRecord& record, const AntennaGeometry& geom,
                          const FeatureSpec& spec);

}  // namespace uwbaoa
