#include "uwbaoa/correction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uwbaoa {

std::string_view to_string(ModelKind k) { return k == ModelKind::mlp ? "mlp" : "gbt"; }
std::string_view to_string(ModelTask t) { return t == ModelTask::regress ? "regress" : "zone-classify"; }

AngleCorrection apply_angle_correction(double sin_err, double cos_err, Angle raw_estimate) {
    if (!std::isfinite(sin_err) || !std::isfinite(cos_err))
        throw std::invalid_argument("non-finite correction output");
    const double err = std::atan2(sin_err, cos_err) * kDegPerRad;
    const double unwrapped = raw_estimate.degrees() + err;
    AngleCorrection out;
    out.out_of_range = !(unwrapped > -180.0 && unwrapped <= 180.0);
    out.corrected = Angle(unwrapped);
    return out;
}

namespace {

void check_length(std::size_t got, int want) {
    if (got != static_cast<std::size_t>(want))
        throw std::invalid_argument("feature length " + std::to_string(got) + " does not match model input " +
                                    std::to_string(want));
}

void check_gbt_set(std::span<const GbtModel> models, std::size_t want_count, std::size_t features) {
    if (models.size() != want_count)
        throw std::invalid_argument("expected " + std::to_string(want_count) + " boosted models, got " +
                                    std::to_string(models.size()));
    for (const auto& m : models) check_length(features, m.n_features);
}

}  // namespace

AngleCorrection predict_angle_correction(const MlpModel& model, std::span<const double> features,
                                         Angle raw_estimate) {
    check_length(features.size(), model.input_size());
    if (model.output_size() < 2) throw std::invalid_argument("regression model needs sin and cos outputs");
    const Eigen::VectorXd y = model.predict(features);
    return apply_angle_correction(y(0), y(1), raw_estimate);
}

AngleCorrection predict_angle_correction(std::span<const GbtModel> models, std::span<const double> features,
                                         Angle raw_estimate) {
    if (models.size() < 2) throw std::invalid_argument("need boosted models for sin and cos");
    for (const auto& m : models) check_length(features.size(), m.n_features);
    return apply_angle_correction(models[0].predict(features), models[1].predict(features), raw_estimate);
}

ZoneDecision decide_zone(std::array<double, kZoneCount> raw_scores) {
    double sum = 0.0;
    for (double& s : raw_scores) {
        if (!std::isfinite(s)) throw std::invalid_argument("non-finite class score");
        s = std::max(s, 0.0);
        sum += s;
    }
    ZoneDecision d;
    for (int k = 0; k < kZoneCount; ++k) {
        const auto i = static_cast<std::size_t>(k);
        d.scores[i] = sum > 0.0 ? raw_scores[i] / sum : 1.0 / kZoneCount;
    }
    int best = 0;
    for (int k = 1; k < kZoneCount; ++k)
        if (d.scores[static_cast<std::size_t>(k)] > d.scores[static_cast<std::size_t>(best)]) best = k;
    for (int k = 0; k < kZoneCount; ++k)
        if (k != best && d.scores[static_cast<std::size_t>(k)] == d.scores[static_cast<std::size_t>(best)])
            d.tie = true;
    d.zone = static_cast<Zone>(best);
    return d;
}

ZoneDecision classify_zone(const MlpModel& model, std::span<const double> features) {
    check_length(features.size(), model.input_size());
    if (model.output_size() != kZoneCount) throw std::invalid_argument("zone classifier needs 4 outputs");
    const Eigen::VectorXd y = model.predict(features);
    std::array<double, kZoneCount> s{};
    for (int k = 0; k < kZoneCount; ++k) s[static_cast<std::size_t>(k)] = y(k);
    return decide_zone(s);
}

ZoneDecision classify_zone(std::span<const GbtModel> models, std::span<const double> features) {
    check_gbt_set(models, kZoneCount, features.size());
    std::array<double, kZoneCount> s{};
    for (int k = 0; k < kZoneCount; ++k)
        s[static_cast<std::size_t>(k)] = models[static_cast<std::size_t>(k)].predict(features);
    return decide_zone(s);
}

AntennaGeometry CorrectionModel::geometry() const {
    return AntennaGeometry(carrier_frequency, antenna_spacing, 0.0, speed_of_light);
}

std::size_t CorrectionModel::estimator_count() const {
    if (kind == ModelKind::mlp) return 1;
    return gbt.empty() ? 0 : static_cast<std::size_t>(gbt.front().n_estimators);
}

std::size_t CorrectionModel::parameter_count() const {
    if (kind == ModelKind::mlp) return mlp.parameter_count();
    std::size_t n = 0;
    for (const auto& m : gbt) {
        n += 1;
        for (const auto& t : m.trees) n += t.nodes.size();
    }
    return n;
}

Angle CorrectionModel::naive_estimate(const MeasurementRecord& record) const {
    return aoa_from_pdoa_clamped(geometry(), record.pdoa).aoa;
}

std::vector<double> CorrectionModel::raw_outputs(std::span<const double> features) const {
    std::vector<double> out;
    if (kind == ModelKind::mlp) {
        check_length(features.size(), mlp.input_size());
        const Eigen::VectorXd y = mlp.predict(features);
        out.assign(y.data(), y.data() + y.size());
    } else {
        for (const auto& m : gbt) {
            check_length(features.size(), m.n_features);
            out.push_back(m.predict(features));
        }
    }
    return out;
}

AngleCorrection CorrectionModel::correct(const MeasurementRecord& record) const {
    if (task != ModelTask::regress) throw std::logic_error("angle correction needs a regression model");
    const FeatureVector x = extract(record, features);
    const Angle raw = naive_estimate(record);
    if (kind == ModelKind::mlp) return predict_angle_correction(mlp, x, raw);
    return predict_angle_correction(gbt, x, raw);
}

double CorrectionModel::predict_distance(const MeasurementRecord& record) const {
    if (task != ModelTask::regress) throw std::logic_error("distance prediction needs a regression model");
    const auto y = raw_outputs(extract(record, features));
    if (y.size() < 3) throw std::logic_error("model has no distance output");
    return features.true_distance.invert(y[2]);
}

ZoneDecision CorrectionModel::classify(const MeasurementRecord& record) const {
    if (task != ModelTask::zone_classify) throw std::logic_error("zone decision needs a classification model");
    const FeatureVector x = extract(record, features);
    if (kind == ModelKind::mlp) return classify_zone(mlp, x);
    return classify_zone(gbt, x);
}

void CorrectionModel::validate() const {
    const auto l = features.length();
    const std::size_t outputs = task == ModelTask::regress ? kRegressionOutputs : kZoneCount;
    if (kind == ModelKind::mlp) {
        mlp.validate();
        if (static_cast<std::size_t>(mlp.input_size()) != l)
            throw std::invalid_argument("model input does not match feature layout");
        if (static_cast<std::size_t>(mlp.output_size()) != outputs)
            throw std::invalid_argument("model output count does not match task");
        if ((task == ModelTask::zone_classify) != (mlp.output_kind() == OutputKind::classification))
            throw std::invalid_argument("model output activation does not match task");
    } else {
        check_gbt_set(gbt, outputs, l);
        for (const auto& m : gbt) m.validate();
    }
    for (const auto& p : zone_polynomials)
        if (p.coefficients.empty() || p.degree() > kMaxPolynomialDegree || !(p.lo <= p.hi))
            throw std::invalid_argument("invalid zone polynomial");
    AntennaGeometry(carrier_frequency, antenna_spacing, 0.0, speed_of_light);
}

}  // namespace uwbaoa
