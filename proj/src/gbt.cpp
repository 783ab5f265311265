#include "uwbaoa/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

namespace uwbaoa {

double RegressionTree::predict(std::span<const double> x) const {
    if (nodes.empty()) return 0.0;
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
        const TreeNode& n = nodes[static_cast<std::size_t>(i)];
        i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

int RegressionTree::depth() const {
    std::function<int(int)> walk = [&](int i) -> int {
        const TreeNode& n = nodes[static_cast<std::size_t>(i)];
        if (n.is_leaf()) return 0;
        return 1 + std::max(walk(n.left), walk(n.right));
    };
    return nodes.empty() ? 0 : walk(0);
}

double GbtModel::predict(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_features)
        throw std::invalid_argument("feature length " + std::to_string(x.size()) + " does not match model input " +
                                    std::to_string(n_features));
    double sum = 0.0;
    for (const RegressionTree& t : trees) sum += t.predict(x);
    return base_prediction + learning_rate * sum;
}

Eigen::VectorXd GbtModel::predict(const Eigen::MatrixXd& rows) const {
    Eigen::VectorXd out(rows.rows());
    std::vector<double> x(static_cast<std::size_t>(rows.cols()));
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < rows.cols(); ++c) x[static_cast<std::size_t>(c)] = rows(r, c);
        out(r) = predict(x);
    }
    return out;
}

void GbtModel::validate() const {
    if (n_features < 1) throw std::invalid_argument("GBT model needs at least one feature");
    if (!std::isfinite(base_prediction) || !std::isfinite(learning_rate))
        throw std::invalid_argument("non-finite GBT parameter");
    if (static_cast<int>(trees.size()) != n_estimators)
        throw std::invalid_argument("tree count does not match n_estimators");
    for (const RegressionTree& t : trees) {
        if (t.nodes.empty()) throw std::invalid_argument("empty tree");
        for (const TreeNode& n : t.nodes) {
            if (n.is_leaf()) {
                if (!std::isfinite(n.value)) throw std::invalid_argument("non-finite leaf value");
                continue;
            }
            if (n.feature >= n_features) throw std::invalid_argument("split feature index out of range");
            const auto count = static_cast<int>(t.nodes.size());
            if (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count)
                throw std::invalid_argument("tree child index out of range");
        }
    }
}

namespace {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Eigen::MatrixXd& x, const std::vector<double>& residual, int max_depth, int min_leaf)
        : x_(x), r_(residual), max_depth_(max_depth), min_leaf_(min_leaf) {}

    RegressionTree build(std::vector<std::vector<int>> sorted) {
        RegressionTree tree;
        tree_ = &tree;
        grow(std::move(sorted), 0);
        return tree;
    }

private:
    int grow(std::vector<std::vector<int>> sorted, int depth) {
        const auto& members = sorted.front();
        const auto n = static_cast<double>(members.size());
        double sum = 0.0;
        double sum_sq = 0.0;
        for (int i : members) {
            sum += r_[static_cast<std::size_t>(i)];
            sum_sq += r_[static_cast<std::size_t>(i)] * r_[static_cast<std::size_t>(i)];
        }
        const int id = static_cast<int>(tree_->nodes.size());
        tree_->nodes.push_back(TreeNode{});
        tree_->nodes.back().value = sum / n;

        if (depth >= max_depth_ || members.size() < 2 * static_cast<std::size_t>(min_leaf_)) return id;
        const SplitChoice best = find_split(sorted, sum, n);
        if (best.feature < 0 || !(best.gain > 1e-12 * sum_sq)) return id;

        std::vector<std::vector<int>> left(sorted.size());
        std::vector<std::vector<int>> right(sorted.size());
        for (std::size_t f = 0; f < sorted.size(); ++f) {
            for (int i : sorted[f]) {
                (x_(i, best.feature) <= best.threshold ? left[f] : right[f]).push_back(i);
            }
        }
        sorted.clear();
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        TreeNode& node = tree_->nodes[static_cast<std::size_t>(id)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    SplitChoice find_split(const std::vector<std::vector<int>>& sorted, double sum, double n) const {
        SplitChoice best;
        const double parent = sum * sum / n;
        for (std::size_t f = 0; f < sorted.size(); ++f) {
            const auto& list = sorted[f];
            const auto fi = static_cast<Eigen::Index>(f);
            double left_sum = 0.0;
            for (std::size_t k = 0; k + 1 < list.size(); ++k) {
                left_sum += r_[static_cast<std::size_t>(list[k])];
                const double xv = x_(list[k], fi);
                const double xn = x_(list[k + 1], fi);
                if (!(xv < xn)) continue;
                const auto n_left = static_cast<double>(k + 1);
                const double n_right = n - n_left;
                if (n_left < min_leaf_ || n_right < min_leaf_) continue;
                const double right_sum = sum - left_sum;
                const double gain = left_sum * left_sum / n_left + right_sum * right_sum / n_right - parent;
                if (gain > best.gain) {
                    best.gain = gain;
                    best.feature = static_cast<int>(f);
                    double mid = xv + (xn - xv) / 2.0;
                    if (!(mid < xn)) mid = xv;
                    best.threshold = mid;
                }
            }
        }
        return best;
    }

    const Eigen::MatrixXd& x_;
    const std::vector<double>& r_;
    int max_depth_;
    int min_leaf_;
    RegressionTree* tree_ = nullptr;
};

}  // namespace

GbtModel train_gbt(const Eigen::MatrixXd& rows, std::span<const double> targets, const GbtConfig& cfg) {
    if (rows.rows() == 0 || targets.empty()) throw std::invalid_argument("cannot train boosting on an empty set");
    if (static_cast<std::size_t>(rows.rows()) != targets.size())
        throw std::invalid_argument("row count does not match target count");
    if (rows.cols() < 1) throw std::invalid_argument("need at least one feature");
    if (cfg.n_estimators < 0 || cfg.max_depth < 0 || cfg.min_samples_leaf < 1 || !(cfg.learning_rate > 0.0) ||
        !(cfg.subsample > 0.0 && cfg.subsample <= 1.0))
        throw std::invalid_argument("invalid boosting configuration");
    if (!rows.allFinite()) throw std::invalid_argument("non-finite feature value");

    const auto n = static_cast<std::size_t>(rows.rows());
    const auto n_features = static_cast<std::size_t>(rows.cols());

    GbtModel model;
    model.learning_rate = cfg.learning_rate;
    model.max_depth = cfg.max_depth;
    model.n_estimators = cfg.n_estimators;
    model.n_features = static_cast<int>(n_features);
    model.base_prediction = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(n);

    std::vector<std::vector<int>> presorted(n_features);
    for (std::size_t f = 0; f < n_features; ++f) {
        auto& order = presorted[f];
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        const auto fi = static_cast<Eigen::Index>(f);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rows(a, fi) < rows(b, fi); });
    }

    std::vector<double> prediction(n, model.base_prediction);
    std::vector<double> residual(n);
    std::mt19937_64 rng(cfg.seed);
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    const auto sample_size =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.subsample * static_cast<double>(n))));

    for (int t = 0; t < cfg.n_estimators; ++t) {
        for (std::size_t i = 0; i < n; ++i) residual[i] = targets[i] - prediction[i];

        std::vector<std::vector<int>> sorted;
        if (sample_size < n) {
            std::shuffle(all.begin(), all.end(), rng);
            std::vector<char> in_sample(n, 0);
            for (std::size_t k = 0; k < sample_size; ++k) in_sample[static_cast<std::size_t>(all[k])] = 1;
            sorted.resize(n_features);
            for (std::size_t f = 0; f < n_features; ++f)
                for (int i : presorted[f])
                    if (in_sample[static_cast<std::size_t>(i)]) sorted[f].push_back(i);
        } else {
            sorted = presorted;
        }

        TreeBuilder builder(rows, residual, cfg.max_depth, cfg.min_samples_leaf);
        RegressionTree tree = builder.build(std::move(sorted));
        std::vector<double> x(n_features);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t f = 0; f < n_features; ++f)
                x[f] = rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
            prediction[i] += cfg.learning_rate * tree.predict(x);
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace uwbaoa
