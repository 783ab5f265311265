#include "uwbaoa/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "uwbaoa/errors.hpp"

namespace uwbaoa {

Eigen::MatrixXd make_target_matrix(std::span<const MeasurementRecord> records, std::span<const std::size_t> rows,
                                   const AntennaGeometry& estimator, const FeatureSpec& spec, ModelTask task) {
    const Eigen::Index cols = task == ModelTask::regress ? kRegressionOutputs : kZoneCount;
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const TargetVector t = make_targets(records[rows[i]], estimator, spec);
        const auto r = static_cast<Eigen::Index>(i);
        if (task == ModelTask::regress) {
            y(r, 0) = t.sin_err;
            y(r, 1) = t.cos_err;
            y(r, 2) = t.true_distance_scaled;
        } else {
            y(r, static_cast<Eigen::Index>(t.zone)) = 1.0;
        }
    }
    return y;
}

TrainedModel train_correction_model(std::span<const MeasurementRecord> train, const AntennaGeometry& estimator,
                                    const TrainOptions& options, const SplitSpec& split) {
    if (train.empty()) throw EmptyInputError("no training records");
    TrainedModel out;
    CorrectionModel& m = out.model;
    m.kind = options.kind;
    m.task = options.task;
    m.carrier_frequency = estimator.carrier_frequency();
    m.antenna_spacing = estimator.antenna_spacing();
    m.speed_of_light = estimator.speed_of_light();
    m.split = split;
    m.features = fit_scalers(train, options.layout);

    const FeatureMatrix x = extract_batch(train, m.features);
    out.skipped_records = x.skipped;
    if (x.values.rows() == 0) throw EmptyInputError("no training record has a valid CIR window");
    const Eigen::MatrixXd y = make_target_matrix(train, x.indices, m.geometry(), m.features, options.task);

    if (options.kind == ModelKind::mlp) {
        std::vector<int> sizes;
        sizes.push_back(static_cast<int>(m.features.length()));
        sizes.insert(sizes.end(), options.hidden.begin(), options.hidden.end());
        sizes.push_back(static_cast<int>(y.cols()));
        const OutputKind kind =
            options.task == ModelTask::regress ? OutputKind::regression : OutputKind::classification;
        const MlpModel init(sizes, kind, options.mlp.seed, options.dropout);
        TrainResult r = train_mlp(init, x.values, y, options.mlp);
        m.mlp = std::move(r.model);
        out.epoch_loss = std::move(r.epoch_loss);
    } else {
        for (Eigen::Index c = 0; c < y.cols(); ++c) {
            const Eigen::VectorXd col = y.col(c);
            GbtConfig cfg = options.gbt;
            cfg.seed = options.gbt.seed + static_cast<std::uint64_t>(c);
            m.gbt.push_back(train_gbt(x.values, std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), cfg));
        }
    }
    m.validate();
    return out;
}

Evaluation evaluate_records(std::span<const MeasurementRecord> records, const AntennaGeometry& estimator,
                            const CorrectionModel* model) {
    Evaluation ev;
    MetricsReport& rep = ev.report;
    rep.record_count = records.size();
    if (model) {
        rep.estimator = std::string(to_string(model->kind));
        rep.task = std::string(to_string(model->task));
    }
    const bool regress = model && model->task == ModelTask::regress;
    const bool classify = model && model->task == ModelTask::zone_classify;
    const AntennaGeometry geom = model ? model->geometry() : estimator;

    double dist_sq = 0.0;
    std::size_t dist_n = 0;
    for (const MeasurementRecord& r : records) {
        PlotRow row;
        row.pose_id = r.pose_id;
        row.repetition = r.repetition;
        row.true_distance_m = r.true_distance;
        row.true_aoa = r.true_aoa;
        row.naive_aoa = aoa_from_pdoa_clamped(geom, r.pdoa).aoa;
        Angle est = row.naive_aoa;
        if (model) {
            try {
                const FeatureVector x = extract(r, model->features);
                if (regress) {
                    const AngleCorrection c = model->kind == ModelKind::mlp
                                                  ? predict_angle_correction(model->mlp, x, row.naive_aoa)
                                                  : predict_angle_correction(model->gbt, x, row.naive_aoa);
                    est = c.corrected;
                    if (c.out_of_range) ++rep.out_of_range_count;
                    row.corrected_aoa = est;
                    const auto y = model->raw_outputs(x);
                    const double d = model->features.true_distance.invert(y[2]) - r.true_distance;
                    dist_sq += d * d;
                    ++dist_n;
                } else {
                    const ZoneDecision z =
                        model->kind == ModelKind::mlp ? classify_zone(model->mlp, x) : classify_zone(model->gbt, x);
                    row.predicted_zone = z.zone;
                }
            } catch (const WindowOutOfBoundsError&) {
                if (classify) row.predicted_zone = zone_of(row.naive_aoa);
            }
        }
        ev.truth.push_back(r.true_aoa);
        ev.estimate.push_back(est);
        if (classify) ev.predicted_zone.push_back(*row.predicted_zone);
        ev.rows.push_back(row);
    }

    rep.windows = default_windows();
    for (NamedWindow& w : rep.windows) w.metrics = angle_errors(ev.truth, ev.estimate, w.window);
    rep.zones = zone_errors(ev.truth, ev.estimate);
    if (!records.empty()) rep.front_back_accuracy = front_back_accuracy(ev.truth, ev.estimate);
    if (dist_n > 0) rep.distance_rmse_m = std::sqrt(dist_sq / static_cast<double>(dist_n));
    if (classify) {
        std::vector<Zone> truth_zone;
        truth_zone.reserve(ev.truth.size());
        for (Angle a : ev.truth) truth_zone.push_back(zone_of(a));
        rep.classification = precision_recall(truth_zone, ev.predicted_zone);
    }
    return ev;
}

}  // namespace uwbaoa
