#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uwbaoa/metrics.hpp"

namespace uwbaoa {

struct NamedWindow {
    std::string name;
    AngleWindow window;
    WindowMetrics metrics;

    friend bool operator==(const NamedWindow&, const NamedWindow&) = default;
};

/// Full circle, +-90 and +-45 around boresight.
std::vector<NamedWindow> default_windows();

inline constexpr int kReportSchemaVersion = 1;

struct MetricsReport {
    std::string estimator = "naive";  // naive | mlp | gbt
    std::string task = "regress";     // regress | zone-classify
    std::size_t record_count = 0;
    std::size_t out_of_range_count = 0;
    std::vector<NamedWindow> windows;
    std::array<WindowMetrics, kZoneCount> zones{};  // grouped by true zone
    std::optional<double> front_back_accuracy;
    std::optional<double> distance_rmse_m;
    std::optional<std::array<ClassMetrics, kZoneCount>> classification;
    std::optional<StabilityResult> stability;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

std::string report_to_json(const MetricsReport& report);
/// Throws SchemaError naming the first missing or mistyped field.
MetricsReport report_from_json(const std::string& text);

/// Throws std::runtime_error when the path cannot be written.
void emit_report(const MetricsReport& report, const std::filesystem::path& path);
MetricsReport read_report(const std::filesystem::path& path);

/// One row per record for angle-vs-estimate plots.
struct PlotRow {
    std::int64_t pose_id = 0;
    std::int32_t repetition = 0;
    double true_distance_m = 0.0;
    Angle true_aoa;
    Angle naive_aoa;
    std::optional<Angle> corrected_aoa;
    std::optional<Zone> predicted_zone;
};

void write_plot_table(std::span<const PlotRow> rows, std::ostream& out);
void write_plot_table(std::span<const PlotRow> rows, const std::filesystem::path& path);

}  // namespace uwbaoa
