#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace uwbaoa {

enum class OutputKind { regression, classification };

struct DenseLayer {
    Eigen::MatrixXd weights;  // outputs x inputs
    Eigen::VectorXd bias;
    double dropout = 0.0;     // applied to this layer's output while training; hidden layers only
};

/// Fully connected network: rectifier hidden layers, identity (regression)
/// or softmax (classification) output.
class MlpModel {
public:
    MlpModel() = default;
    /// `layer_sizes` = {inputs, hidden..., outputs} with 1 to 3 hidden layers.
    /// Weights are drawn uniformly with fan-in scaling from `seed`; biases start at 0.
    MlpModel(std::vector<int> layer_sizes, OutputKind kind, std::uint64_t seed,
             std::vector<double> hidden_dropout = {});

    /// Builds a model from explicit layers (used by the loader).
    MlpModel(std::vector<DenseLayer> layers, OutputKind kind);

    int input_size() const;
    int output_size() const;
    OutputKind output_kind() const noexcept { return kind_; }
    std::vector<int> layer_sizes() const;
    std::size_t parameter_count() const;

    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }

    /// Inputs and outputs hold one sample per row.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;
    Eigen::VectorXd predict(std::span<const double> features) const;

    /// Throws std::invalid_argument on inconsistent shapes or non-finite values.
    void validate() const;

private:
    std::vector<DenseLayer> layers_;
    OutputKind kind_ = OutputKind::regression;
};

struct TrainConfig {
    std::uint64_t seed = 0;
    int epochs = 100;
    int batch_size = 64;
    double learning_rate = 0.01;
    double momentum = 0.9;
    /// Learning rate multiplier applied after every epoch.
    double learning_rate_decay = 1.0;
    /// Stop after this many epochs without improvement; 0 disables.
    int early_stop_patience = 0;
};

struct TrainResult {
    MlpModel model;
    std::vector<double> epoch_loss;  // mean mini-batch loss per epoch
    bool early_stopped = false;
};

/// Mean squared error (regression) or cross-entropy against one-hot rows
/// (classification), averaged over samples.
double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets);

struct MlpGradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> bias;
};

/// Analytic gradient of mlp_loss by backpropagation (no dropout).
MlpGradients mlp_gradients(const MlpModel& model, const Eigen::MatrixXd& inputs,
                           const Eigen::MatrixXd& targets);

/// Mini-batch SGD with momentum; shuffling and dropout masks come from
/// cfg.seed, so training is reproducible. Throws TrainingDivergedError if the
/// loss becomes non-finite.
TrainResult train_mlp(const MlpModel& initial, const Eigen::MatrixXd& inputs,
                      const Eigen::MatrixXd& targets, const TrainConfig& cfg);

struct GradientCheckResult {
    double max_relative_error = 0.0;
    double max_absolute_error = 0.0;
    /// Smallest |pre-activation| of any hidden unit; central differences are
    /// only valid when this exceeds the step size.
    double min_preactivation_margin = 0.0;
    std::size_t parameters_checked = 0;
};

/// Compares backpropagation with central finite differences on every
/// parameter. Relative error is |a - n| / max(|a|, |n|, floor).
GradientCheckResult mlp_gradient_check(const MlpModel& model, std::span<const double> sample,
                                       std::span<const double> target, double step = 1e-5,
                                       double floor = 1e-6);

}  // namespace uwbaoa
