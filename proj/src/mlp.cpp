#include "uwbaoa/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "uwbaoa/errors.hpp"

namespace uwbaoa {

MlpModel::MlpModel(std::vector<int> layer_sizes, OutputKind kind, std::uint64_t seed,
                   std::vector<double> hidden_dropout)
    : kind_(kind) {
    if (layer_sizes.size() < 3 || layer_sizes.size() > 5)
        throw std::invalid_argument("MLP needs inputs, 1 to 3 hidden layers and outputs");
    for (int n : layer_sizes)
        if (n < 1) throw std::invalid_argument("layer sizes must be positive");
    const std::size_t hidden = layer_sizes.size() - 2;
    if (!hidden_dropout.empty() && hidden_dropout.size() != hidden)
        throw std::invalid_argument("one dropout rate per hidden layer expected");
    if (kind == OutputKind::classification && layer_sizes.back() < 2)
        throw std::invalid_argument("classification needs at least two outputs");

    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const bool is_output = l + 2 == layer_sizes.size();
        const double limit = std::sqrt((is_output ? 1.0 : 6.0) / fan_in);
        std::uniform_real_distribution<double> dist(-limit, limit);
        DenseLayer layer;
        layer.weights.resize(fan_out, fan_in);
        for (Eigen::Index r = 0; r < fan_out; ++r)
            for (Eigen::Index c = 0; c < fan_in; ++c) layer.weights(r, c) = dist(rng);
        layer.bias = Eigen::VectorXd::Zero(fan_out);
        if (!is_output && !hidden_dropout.empty()) {
            layer.dropout = hidden_dropout[l];
            if (!(layer.dropout >= 0.0 && layer.dropout < 1.0))
                throw std::invalid_argument("dropout rate must lie in [0, 1)");
        }
        layers_.push_back(std::move(layer));
    }
}

MlpModel::MlpModel(std::vector<DenseLayer> layers, OutputKind kind) : layers_(std::move(layers)), kind_(kind) {
    validate();
}

int MlpModel::input_size() const {
    return layers_.empty() ? 0 : static_cast<int>(layers_.front().weights.cols());
}

int MlpModel::output_size() const {
    return layers_.empty() ? 0 : static_cast<int>(layers_.back().weights.rows());
}

std::vector<int> MlpModel::layer_sizes() const {
    std::vector<int> sizes;
    if (layers_.empty()) return sizes;
    sizes.push_back(input_size());
    for (const auto& l : layers_) sizes.push_back(static_cast<int>(l.weights.rows()));
    return sizes;
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
}

void MlpModel::validate() const {
    if (layers_.size() < 2 || layers_.size() > 4)
        throw std::invalid_argument("MLP must have 1 to 3 hidden layers");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        if (layer.weights.rows() < 1 || layer.weights.cols() < 1)
            throw std::invalid_argument("empty layer");
        if (layer.bias.size() != layer.weights.rows())
            throw std::invalid_argument("bias length does not match layer width");
        if (l > 0 && layer.weights.cols() != layers_[l - 1].weights.rows())
            throw std::invalid_argument("layer input width does not match previous layer");
        if (!layer.weights.allFinite() || !layer.bias.allFinite())
            throw std::invalid_argument("non-finite MLP parameter");
        if (!(layer.dropout >= 0.0 && layer.dropout < 1.0))
            throw std::invalid_argument("dropout rate must lie in [0, 1)");
    }
    if (kind_ == OutputKind::classification && output_size() < 2)
        throw std::invalid_argument("classification needs at least two outputs");
}

namespace {

// Column-per-sample working layout.
struct ForwardTrace {
    std::vector<Eigen::MatrixXd> pre;   // pre-activations per layer
    std::vector<Eigen::MatrixXd> post;  // post[0] = inputs, post[l+1] = activation of layer l
};

void softmax_columns(Eigen::MatrixXd& z) {
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        auto col = z.col(c);
        const double m = col.maxCoeff();
        col = (col.array() - m).exp();
        col /= col.sum();
    }
}

ForwardTrace run_forward(const std::vector<DenseLayer>& layers, OutputKind kind, const Eigen::MatrixXd& inputs_cols,
                         std::mt19937_64* dropout_rng) {
    ForwardTrace t;
    t.post.push_back(inputs_cols);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        Eigen::MatrixXd z = layer.weights * t.post.back();
        z.colwise() += layer.bias;
        t.pre.push_back(z);
        const bool is_output = l + 1 == layers.size();
        if (is_output) {
            if (kind == OutputKind::classification) softmax_columns(z);
            t.post.push_back(std::move(z));
        } else {
            Eigen::MatrixXd a = z.cwiseMax(0.0);
            if (dropout_rng && layer.dropout > 0.0) {
                std::bernoulli_distribution keep(1.0 - layer.dropout);
                const double scale = 1.0 / (1.0 - layer.dropout);
                for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] *= keep(*dropout_rng) ? scale : 0.0;
            }
            t.post.push_back(std::move(a));
        }
    }
    return t;
}

double loss_from_output(OutputKind kind, const Eigen::MatrixXd& out, const Eigen::MatrixXd& targets_cols) {
    const double n = static_cast<double>(out.cols());
    if (kind == OutputKind::regression) {
        return (out - targets_cols).squaredNorm() / (n * static_cast<double>(out.rows()));
    }
    double ce = 0.0;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double y = targets_cols.data()[i];
        if (y != 0.0) ce -= y * std::log(std::max(out.data()[i], std::numeric_limits<double>::min()));
    }
    return ce / n;
}

MlpGradients backprop(const std::vector<DenseLayer>& layers, OutputKind kind, const ForwardTrace& t,
                      const Eigen::MatrixXd& targets_cols) {
    const double n = static_cast<double>(targets_cols.cols());
    MlpGradients g;
    g.weights.resize(layers.size());
    g.bias.resize(layers.size());

    Eigen::MatrixXd delta = t.post.back() - targets_cols;
    if (kind == OutputKind::regression) {
        delta *= 2.0 / (n * static_cast<double>(targets_cols.rows()));
    } else {
        delta /= n;
    }
    for (std::size_t l = layers.size(); l-- > 0;) {
        g.weights[l] = delta * t.post[l].transpose();
        g.bias[l] = delta.rowwise().sum();
        if (l == 0) break;
        Eigen::MatrixXd back = layers[l].weights.transpose() * delta;
        // post[l] = relu(pre) * mask * scale, so post/pre is the local derivative.
        const auto& act = t.post[l];
        const auto& pre = t.pre[l - 1];
        for (Eigen::Index i = 0; i < back.size(); ++i) {
            const double a = act.data()[i];
            back.data()[i] *= (pre.data()[i] > 0.0 && a != 0.0) ? a / pre.data()[i] : 0.0;
        }
        delta = std::move(back);
    }
    return g;
}

}  // namespace

Eigen::MatrixXd MlpModel::forward(const Eigen::MatrixXd& inputs) const {
    if (inputs.cols() != input_size())
        throw std::invalid_argument("feature length " + std::to_string(inputs.cols()) + " does not match model input " +
                                    std::to_string(input_size()));
    const ForwardTrace t = run_forward(layers_, kind_, inputs.transpose(), nullptr);
    return t.post.back().transpose();
}

Eigen::VectorXd MlpModel::predict(std::span<const double> features) const {
    if (static_cast<int>(features.size()) != input_size())
        throw std::invalid_argument("feature length " + std::to_string(features.size()) + " does not match model input " +
                                    std::to_string(input_size()));
    const Eigen::Map<const Eigen::VectorXd> x(features.data(), static_cast<Eigen::Index>(features.size()));
    const ForwardTrace t = run_forward(layers_, kind_, x, nullptr);
    return t.post.back().col(0);
}

double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) {
    const Eigen::MatrixXd out = model.forward(inputs);
    if (targets.rows() != out.rows() || targets.cols() != out.cols())
        throw std::invalid_argument("target shape does not match model output");
    return loss_from_output(model.output_kind(), out.transpose(), targets.transpose());
}

MlpGradients mlp_gradients(const MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) {
    if (inputs.cols() != model.input_size() || targets.cols() != model.output_size() ||
        targets.rows() != inputs.rows())
        throw std::invalid_argument("input/target shape does not match model");
    const ForwardTrace t = run_forward(model.layers(), model.output_kind(), inputs.transpose(), nullptr);
    return backprop(model.layers(), model.output_kind(), t, targets.transpose());
}

TrainResult train_mlp(const MlpModel& initial, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                      const TrainConfig& cfg) {
    initial.validate();
    if (inputs.rows() == 0) throw std::invalid_argument("training set is empty");
    if (inputs.cols() != initial.input_size() || targets.cols() != initial.output_size() ||
        targets.rows() != inputs.rows())
        throw std::invalid_argument("input/target shape does not match model");
    if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0) || !(cfg.momentum >= 0.0) ||
        !(cfg.momentum < 1.0))
        throw std::invalid_argument("invalid training configuration");

    TrainResult result;
    result.model = initial;
    auto& layers = result.model.layers();
    const OutputKind kind = initial.output_kind();

    std::vector<Eigen::MatrixXd> vel_w;
    std::vector<Eigen::VectorXd> vel_b;
    for (const auto& l : layers) {
        vel_w.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
        vel_b.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }

    const Eigen::MatrixXd x_cols = inputs.transpose();
    const Eigen::MatrixXd y_cols = targets.transpose();
    const auto n = static_cast<std::size_t>(inputs.rows());
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(cfg.seed ^ 0x5deece66dull);

    double lr = cfg.learning_rate;
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    Eigen::MatrixXd xb, yb;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
            const auto b = static_cast<Eigen::Index>(end - start);
            xb.resize(x_cols.rows(), b);
            yb.resize(y_cols.rows(), b);
            for (Eigen::Index j = 0; j < b; ++j) {
                xb.col(j) = x_cols.col(order[start + static_cast<std::size_t>(j)]);
                yb.col(j) = y_cols.col(order[start + static_cast<std::size_t>(j)]);
            }
            const ForwardTrace t = run_forward(layers, kind, xb, &rng);
            const double loss = loss_from_output(kind, t.post.back(), yb);
            if (!std::isfinite(loss)) throw TrainingDivergedError(epoch);
            loss_sum += loss * static_cast<double>(b);
            seen += static_cast<std::size_t>(b);

            const MlpGradients g = backprop(layers, kind, t, yb);
            for (std::size_t l = 0; l < layers.size(); ++l) {
                vel_w[l] = cfg.momentum * vel_w[l] - lr * g.weights[l];
                vel_b[l] = cfg.momentum * vel_b[l] - lr * g.bias[l];
                layers[l].weights += vel_w[l];
                layers[l].bias += vel_b[l];
            }
        }
        const double epoch_loss = loss_sum / static_cast<double>(seen);
        if (!std::isfinite(epoch_loss)) throw TrainingDivergedError(epoch);
        result.epoch_loss.push_back(epoch_loss);
        lr *= cfg.learning_rate_decay;

        if (epoch_loss < best) {
            best = epoch_loss;
            since_best = 0;
        } else if (cfg.early_stop_patience > 0 && ++since_best >= cfg.early_stop_patience) {
            result.early_stopped = true;
            break;
        }
    }
    for (const auto& l : layers) {
        if (!l.weights.allFinite() || !l.bias.allFinite())
            throw TrainingDivergedError(static_cast<int>(result.epoch_loss.size()));
    }
    return result;
}

GradientCheckResult mlp_gradient_check(const MlpModel& model, std::span<const double> sample,
                                       std::span<const double> target, double step, double floor) {
    model.validate();
    if (static_cast<int>(sample.size()) != model.input_size() || static_cast<int>(target.size()) != model.output_size())
        throw std::invalid_argument("sample/target length does not match model");
    Eigen::MatrixXd x(1, model.input_size());
    Eigen::MatrixXd y(1, model.output_size());
    for (Eigen::Index i = 0; i < x.cols(); ++i) x(0, i) = sample[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i < y.cols(); ++i) y(0, i) = target[static_cast<std::size_t>(i)];

    GradientCheckResult res;
    const ForwardTrace t = run_forward(model.layers(), model.output_kind(), x.transpose(), nullptr);
    res.min_preactivation_margin = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l + 1 < t.pre.size(); ++l)
        res.min_preactivation_margin = std::min(res.min_preactivation_margin, t.pre[l].cwiseAbs().minCoeff());

    const MlpGradients g = mlp_gradients(model, x, y);
    MlpModel probe = model;
    auto compare = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + step;
        const double up = mlp_loss(probe, x, y);
        param = saved - step;
        const double down = mlp_loss(probe, x, y);
        param = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double abs_err = std::abs(analytic - numeric);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
        res.max_absolute_error = std::max(res.max_absolute_error, abs_err);
        res.max_relative_error = std::max(res.max_relative_error, abs_err / denom);
        ++res.parameters_checked;
    };
    for (std::size_t l = 0; l < probe.layers().size(); ++l) {
        auto& layer = probe.layers()[l];
        for (Eigen::Index i = 0; i < layer.weights.size(); ++i) compare(layer.weights.data()[i], g.weights[l].data()[i]);
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) compare(layer.bias.data()[i], g.bias[l].data()[i]);
    }
    return res;
}

}  // namespace uwbaoa
