#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>

#include "uwbaoa/angle.hpp"
#include "uwbaoa/zone.hpp"

namespace uwbaoa {

/// Closed arc of true angles, center +- half_width. half_width >= 180 covers
/// the full circle.
struct AngleWindow {
    Angle center;
    double half_width = 180.0;

    bool contains(Angle a) const;
    static AngleWindow full() { return {}; }
    friend bool operator==(const AngleWindow&, const AngleWindow&) = default;
};

struct WindowMetrics {
    double mse_deg2 = 0.0;
    double rmse_deg = 0.0;
    double mae_deg = 0.0;
    double median_ae_deg = 0.0;
    std::size_t count = 0;  // all other fields are 0 when count is 0

    friend bool operator==(const WindowMetrics&, const WindowMetrics&) = default;
};

/// Statistics of already computed signed errors, degrees.
WindowMetrics error_metrics(std::span<const double> errors_deg);

/// Wrap-safe errors est - true over the records whose TRUE angle lies in
/// `window`. Throws std::invalid_argument on length mismatch.
WindowMetrics angle_errors(std::span<const Angle> truth, std::span<const Angle> estimate,
                           const AngleWindow& window = AngleWindow::full());

/// Same, grouped by the zone of the true angle.
std::array<WindowMetrics, kZoneCount> zone_errors(std::span<const Angle> truth, std::span<const Angle> estimate);

struct ClassMetrics {
    std::optional<double> precision;  // empty when the class was never predicted
    std::optional<double> recall;     // empty when the class is absent from the truth
    std::size_t support = 0;
    std::size_t predicted = 0;

    friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

using ConfusionMatrix = std::array<std::array<std::size_t, kZoneCount>, kZoneCount>;  // [true][predicted]

ConfusionMatrix confusion_matrix(std::span<const Zone> truth, std::span<const Zone> predicted);
std::array<ClassMetrics, kZoneCount> precision_recall(std::span<const Zone> truth, std::span<const Zone> predicted);

/// Fraction of estimates on the same side (front |psi| < 90, back |psi| > 90)
/// as the truth. Truths exactly at +-90 count as resolved.
double front_back_accuracy(std::span<const Angle> truth, std::span<const Angle> estimate);

struct StabilityResult {
    double std_raw = 0.0;  // circular std of the individual estimates, degrees
    double std_avg = 0.0;  // circular std of the group means
    int group_size = 0;
    std::size_t groups = 0;
    Angle mean;

    friend bool operator==(const StabilityResult&, const StabilityResult&) = default;
};

/// Estimates from one fixed pose; groups are consecutive and non-overlapping,
/// leftovers are ignored. Throws InsufficientRecordsError below 10 * group_size.
StabilityResult stability_experiment(std::span<const Angle> estimates, int group_size);

}  // namespace uwbaoa
