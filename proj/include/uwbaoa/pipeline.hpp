#pragma once

#include <span>
#include <vector>

#include "uwbaoa/correction.hpp"
#include "uwbaoa/report.hpp"

namespace uwbaoa {

struct TrainOptions {
    ModelKind kind = ModelKind::mlp;
    ModelTask task = ModelTask::regress;
    FeatureSpec layout;               // window and flags; scalers are fitted here
    std::vector<int> hidden = {224};  // MLP hidden layer widths
    std::vector<double> dropout;      // per hidden layer
    TrainConfig mlp;
    GbtConfig gbt;
};

struct TrainedModel {
    CorrectionModel model;
    std::vector<double> epoch_loss;  // MLP only
    std::size_t skipped_records = 0; // CIR window outside the capture
};

/// Targets per task: regress -> (sin err, cos err, scaled distance) against
/// the clamped naive estimate of `estimator`; zone_classify -> one-hot true zone.
Eigen::MatrixXd make_target_matrix(std::span<const MeasurementRecord> records, std::span<const std::size_t> rows,
                                   const AntennaGeometry& estimator, const FeatureSpec& spec, ModelTask task);

/// `estimator` is the geometry the naive inversion assumes (nominal spacing).
TrainedModel train_correction_model(std::span<const MeasurementRecord> train, const AntennaGeometry& estimator,
                                    const TrainOptions& options, const SplitSpec& split = {});

struct Evaluation {
    MetricsReport report;
    std::vector<PlotRow> rows;  // one per input record, input order
    std::vector<Angle> truth;
    std::vector<Angle> estimate;   // naive or corrected
    std::vector<Zone> predicted_zone;  // classification models only
};

/// Evaluates the naive inversion (model == nullptr) or a trained model.
/// Records whose CIR window leaves the capture fall back to the naive estimate.
Evaluation evaluate_records(std::span<const MeasurementRecord> records, const AntennaGeometry& estimator,
                            const CorrectionModel* model = nullptr);

}  // namespace uwbaoa
