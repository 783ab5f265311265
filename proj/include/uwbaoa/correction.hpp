#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "uwbaoa/dataset.hpp"
#include "uwbaoa/features.hpp"
#include "uwbaoa/gbt.hpp"
#include "uwbaoa/mlp.hpp"
#include "uwbaoa/zone_polynomial.hpp"

namespace uwbaoa {

enum class ModelKind { mlp, gbt };
/// regress: (sin err, cos err, scaled distance); zone_classify: 4 zone scores.
enum class ModelTask { regress, zone_classify };

inline constexpr int kRegressionOutputs = 3;

std::string_view to_string(ModelKind k);
std::string_view to_string(ModelTask t);

struct AngleCorrection {
    Angle corrected;
    /// raw + predicted error left (-180, 180] before wrapping.
    bool out_of_range = false;
};

/// corrected = wrap(raw + atan2(sin_err, cos_err)).
AngleCorrection apply_angle_correction(double sin_err, double cos_err, Angle raw_estimate);

/// Throws std::invalid_argument when the feature length does not match.
AngleCorrection predict_angle_correction(const MlpModel& model, std::span<const double> features,
                                         Angle raw_estimate);
/// One boosted model per output: sin, cos, distance.
AngleCorrection predict_angle_correction(std::span<const GbtModel> models, std::span<const double> features,
                                         Angle raw_estimate);

struct ZoneDecision {
    Zone zone = Zone::z0;
    std::array<double, kZoneCount> scores{};  // non-negative, sum 1
    bool tie = false;                         // top score shared; lowest index wins
};

/// Normalizes raw non-negative scores and picks the arg max.
ZoneDecision decide_zone(std::array<double, kZoneCount> raw_scores);

ZoneDecision classify_zone(const MlpModel& model, std::span<const double> features);
/// One-vs-rest boosted scores, clamped at 0 before normalization.
ZoneDecision classify_zone(std::span<const GbtModel> models, std::span<const double> features);

/// Everything needed to apply a trained model to raw records.
struct CorrectionModel {
    ModelKind kind = ModelKind::mlp;
    ModelTask task = ModelTask::regress;
    FeatureSpec features;
    double carrier_frequency = kChannel5Frequency;
    double antenna_spacing = kReferenceSpacing;
    double speed_of_light = kSpeedOfLight;
    SplitSpec split;
    MlpModel mlp;
    std::vector<GbtModel> gbt;
    std::vector<ZonePolynomial> zone_polynomials;

    /// Estimator geometry: nominal spacing, no phase-centre offset.
    AntennaGeometry geometry() const;
    std::size_t estimator_count() const;
    std::size_t parameter_count() const;

    Angle naive_estimate(const MeasurementRecord& record) const;
    AngleCorrection correct(const MeasurementRecord& record) const;
    double predict_distance(const MeasurementRecord& record) const;
    ZoneDecision classify(const MeasurementRecord& record) const;
    /// Raw model outputs for a prepared feature vector.
    std::vector<double> raw_outputs(std::span<const double> features) const;

    void validate() const;
};

}  // namespace uwbaoa
