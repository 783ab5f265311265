#include "uwbaoa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "uwbaoa/errors.hpp"

namespace uwbaoa {

bool AngleWindow::contains(Angle a) const {
    if (half_width >= 180.0) return true;
    return std::abs(angular_difference(a, center)) <= half_width;
}

WindowMetrics error_metrics(std::span<const double> errors_deg) {
    WindowMetrics m;
    m.count = errors_deg.size();
    if (errors_deg.empty()) return m;
    std::vector<double> abs_err;
    abs_err.reserve(errors_deg.size());
    for (double e : errors_deg) {
        if (!std::isfinite(e)) throw std::invalid_argument("non-finite angle error");
        abs_err.push_back(std::abs(e));
    }
    // Sorting first keeps the sums independent of record order.
    std::sort(abs_err.begin(), abs_err.end());
    double sq = 0.0;
    double ab = 0.0;
    for (double a : abs_err) {
        sq += a * a;
        ab += a;
    }
    const auto n = static_cast<double>(abs_err.size());
    m.mse_deg2 = sq / n;
    m.rmse_deg = std::sqrt(m.mse_deg2);
    m.mae_deg = ab / n;
    const std::size_t mid = abs_err.size() / 2;
    m.median_ae_deg = abs_err.size() % 2 == 1 ? abs_err[mid] : (abs_err[mid - 1] + abs_err[mid]) / 2.0;
    return m;
}

namespace {

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b)
        throw std::invalid_argument("length mismatch: " + std::to_string(a) + " truths vs " + std::to_string(b) +
                                    " estimates");
}

}  // namespace

WindowMetrics angle_errors(std::span<const Angle> truth, std::span<const Angle> estimate,
                           const AngleWindow& window) {
    check_lengths(truth.size(), estimate.size());
    std::vector<double> err;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (window.contains(truth[i])) err.push_back(angular_difference(estimate[i], truth[i]));
    return error_metrics(err);
}

std::array<WindowMetrics, kZoneCount> zone_errors(std::span<const Angle> truth, std::span<const Angle> estimate) {
    check_lengths(truth.size(), estimate.size());
    std::array<std::vector<double>, kZoneCount> err;
    for (std::size_t i = 0; i < truth.size(); ++i)
        err[static_cast<std::size_t>(zone_of(truth[i]))].push_back(angular_difference(estimate[i], truth[i]));
    std::array<WindowMetrics, kZoneCount> out;
    for (std::size_t z = 0; z < out.size(); ++z) out[z] = error_metrics(err[z]);
    return out;
}

ConfusionMatrix confusion_matrix(std::span<const Zone> truth, std::span<const Zone> predicted) {
    check_lengths(truth.size(), predicted.size());
    ConfusionMatrix c{};
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++c[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
    return c;
}

std::array<ClassMetrics, kZoneCount> precision_recall(std::span<const Zone> truth, std::span<const Zone> predicted) {
    const ConfusionMatrix c = confusion_matrix(truth, predicted);
    std::array<ClassMetrics, kZoneCount> out;
    for (std::size_t k = 0; k < out.size(); ++k) {
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[k].support += c[k][j];
            out[k].predicted += c[j][k];
        }
        const auto tp = static_cast<double>(c[k][k]);
        if (out[k].predicted > 0) out[k].precision = tp / static_cast<double>(out[k].predicted);
        if (out[k].support > 0) out[k].recall = tp / static_cast<double>(out[k].support);
    }
    return out;
}

double front_back_accuracy(std::span<const Angle> truth, std::span<const Angle> estimate) {
    check_lengths(truth.size(), estimate.size());
    if (truth.empty()) throw EmptyInputError("front/back accuracy of an empty set");
    std::size_t ok = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double t = std::abs(truth[i].degrees());
        const double e = std::abs(estimate[i].degrees());
        if (t == 90.0 || (t < 90.0) == (e < 90.0)) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(truth.size());
}

StabilityResult stability_experiment(std::span<const Angle> estimates, int group_size) {
    if (group_size < 1) throw std::invalid_argument("group size must be positive");
    const auto needed = 10 * static_cast<std::size_t>(group_size);
    if (estimates.size() < needed)
        throw InsufficientRecordsError("stability experiment needs at least " + std::to_string(needed) +
                                       " records, got " + std::to_string(estimates.size()));
    StabilityResult r;
    r.group_size = group_size;
    const CircularStats raw = circular_mean_std(estimates);
    r.std_raw = raw.std_deg;
    r.mean = raw.mean;

    const auto g = static_cast<std::size_t>(group_size);
    r.groups = estimates.size() / g;
    std::vector<Angle> means;
    means.reserve(r.groups);
    for (std::size_t k = 0; k < r.groups; ++k) means.push_back(circular_mean_std(estimates.subspan(k * g, g)).mean);
    r.std_avg = circular_mean_std(means).std_deg;
    return r;
}

}  // namespace uwbaoa
