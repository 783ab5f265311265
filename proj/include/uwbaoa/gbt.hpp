#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace uwbaoa {

/// Node of an axis-aligned regression tree. Leaves have feature == -1.
/// Samples with x[feature] <= threshold go left.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> x) const;
    int depth() const;
};

/// Squared-loss gradient boosting for one scalar target.
struct GbtModel {
    double base_prediction = 0.0;
    double learning_rate = 0.1;
    int max_depth = 3;
    int n_estimators = 0;
    int n_features = 0;
    std::vector<RegressionTree> trees;

    /// base_prediction + learning_rate * sum of tree outputs.
    double predict(std::span<const double> x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& rows) const;
    void validate() const;
};

struct GbtConfig {
    int n_estimators = 100;
    int max_depth = 3;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
    int min_samples_leaf = 1;
    /// Row fraction drawn (without replacement, from `seed`) for each tree.
    double subsample = 1.0;
};

/// Each tree is fitted to the current residuals by exact greedy search over
/// all features and all midpoints between consecutive distinct values,
/// maximising the squared-error reduction. Ties keep the lowest feature index
/// and the lowest threshold.
GbtModel train_gbt(const Eigen::MatrixXd& rows, std::span<const double> targets, const GbtConfig& cfg);

}  // namespace uwbaoa
