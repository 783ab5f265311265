#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "uwbaoa/errors.hpp"
#include "uwbaoa/mlp.hpp"

using namespace uwbaoa;

namespace {

struct Toy {
    Eigen::MatrixXd x;
    Eigen::MatrixXd y;
};

// Two Gaussian blobs either side of the line x0 + x1 = 0, with a margin.
Toy separable(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Toy t{Eigen::MatrixXd(n, 2), Eigen::MatrixXd::Zero(n, 2)};
    for (int i = 0; i < n; ++i) {
        double a, b;
        do {
            a = u(rng);
            b = u(rng);
        } while (std::abs(a + b) < 0.2);
        t.x(i, 0) = a;
        t.x(i, 1) = b;
        t.y(i, a + b > 0 ? 1 : 0) = 1.0;
    }
    return t;
}

Toy smooth_regression(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Toy t{Eigen::MatrixXd(n, 3), Eigen::MatrixXd(n, 2)};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j) t.x(i, j) = u(rng);
        t.y(i, 0) = std::sin(t.x(i, 0)) + 0.5 * t.x(i, 1);
        t.y(i, 1) = t.x(i, 2) * t.x(i, 2);
    }
    return t;
}

double accuracy(const MlpModel& m, const Toy& t) {
    const Eigen::MatrixXd p = m.forward(t.x);
    int ok = 0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        Eigen::Index pi, ti;
        p.row(i).maxCoeff(&pi);
        t.y.row(i).maxCoeff(&ti);
        ok += pi == ti;
    }
    return static_cast<double>(ok) / static_cast<double>(p.rows());
}

bool same_parameters(const MlpModel& a, const MlpModel& b) {
    if (a.layers().size() != b.layers().size()) return false;
    for (std::size_t l = 0; l < a.layers().size(); ++l) {
        if (a.layers()[l].weights != b.layers()[l].weights) return false;
        if (a.layers()[l].bias != b.layers()[l].bias) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("construction and shape validation") {
    const MlpModel m({4, 8, 3}, OutputKind::regression, 1);
    CHECK(m.input_size() == 4);
    CHECK(m.output_size() == 3);
    CHECK(m.layer_sizes() == std::vector<int>{4, 8, 3});
    CHECK(m.parameter_count() == 4 * 8 + 8 + 8 * 3 + 3);
    CHECK(m.layers()[0].bias.isZero());
    // fan-in scaled uniform init
    const double bound = 1.0 / std::sqrt(4.0) * std::sqrt(6.0);
    CHECK(m.layers()[0].weights.cwiseAbs().maxCoeff() <= bound);
    CHECK_THROWS_AS(MlpModel({4, 3}, OutputKind::regression, 1), std::invalid_argument);
    CHECK_THROWS_AS(MlpModel({4, 2, 2, 2, 2, 3}, OutputKind::regression, 1), std::invalid_argument);
    CHECK_THROWS_AS(MlpModel({4, 8, 1}, OutputKind::classification, 1), std::invalid_argument);
    CHECK_THROWS_AS(MlpModel({4, 8, 3}, OutputKind::regression, 1, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(m.predict(std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST_CASE("parameter count of the 224-unit model with 428 inputs") {
    const MlpModel m({428, 224, 3}, OutputKind::regression, 0);
    CHECK(m.parameter_count() == 96771);
    CHECK(428 * 224 + 224 + 224 * 3 + 3 == 96771);
}

TEST_CASE("classification outputs are probability vectors") {
    const MlpModel m({5, 16, 16, 4}, OutputKind::classification, 3);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(50, 5) * 10.0;
    const Eigen::MatrixXd p = m.forward(x);
    CHECK(p.minCoeff() >= 0.0);
    for (Eigen::Index i = 0; i < p.rows(); ++i) CHECK(std::abs(p.row(i).sum() - 1.0) < 1e-12);
}

TEST_CASE("separable toy set is learned") {
    const Toy t = separable(200, 21);
    const MlpModel init({2, 16, 2}, OutputKind::classification, 5);
    TrainConfig cfg;
    cfg.seed = 5;
    cfg.epochs = 200;
    cfg.batch_size = 16;
    cfg.learning_rate = 0.05;
    const TrainResult r = train_mlp(init, t.x, t.y, cfg);
    CHECK(accuracy(r.model, t) == 1.0);
    CHECK(r.epoch_loss.size() == 200);
}

TEST_CASE("zero epochs return the initial model") {
    const Toy t = separable(40, 1);
    const MlpModel init({2, 8, 2}, OutputKind::classification, 9);
    TrainConfig cfg;
    cfg.epochs = 0;
    const TrainResult r = train_mlp(init, t.x, t.y, cfg);
    CHECK(same_parameters(r.model, init));
    CHECK(r.epoch_loss.empty());
}

TEST_CASE("training is deterministic per seed") {
    const Toy t = smooth_regression(120, 4);
    const MlpModel init({3, 12, 2}, OutputKind::regression, 2, {0.2});
    TrainConfig cfg;
    cfg.seed = 77;
    cfg.epochs = 15;
    cfg.batch_size = 8;
    const TrainResult a = train_mlp(init, t.x, t.y, cfg);
    const TrainResult b = train_mlp(init, t.x, t.y, cfg);
    CHECK(same_parameters(a.model, b.model));
    CHECK(a.epoch_loss == b.epoch_loss);
    cfg.seed = 78;
    CHECK_FALSE(same_parameters(train_mlp(init, t.x, t.y, cfg).model, a.model));
}

TEST_CASE("smoothed training loss does not increase") {
    const Toy t = smooth_regression(400, 6);
    const MlpModel init({3, 32, 2}, OutputKind::regression, 8);
    TrainConfig cfg;
    cfg.seed = 1;
    cfg.epochs = 100;
    cfg.batch_size = 32;
    cfg.learning_rate = 0.01;
    const TrainResult r = train_mlp(init, t.x, t.y, cfg);
    const int w = 10;
    double prev = INFINITY;
    for (std::size_t e = 0; e + w <= r.epoch_loss.size(); e += w) {
        double avg = 0.0;
        for (int k = 0; k < w; ++k) avg += r.epoch_loss[e + static_cast<std::size_t>(k)] / w;
        CHECK(avg <= prev);
        prev = avg;
    }
    CHECK(mlp_loss(r.model, t.x, t.y) < 0.2 * mlp_loss(init, t.x, t.y));
}

TEST_CASE("early stopping") {
    const Toy t = smooth_regression(50, 2);
    const MlpModel init({3, 4, 2}, OutputKind::regression, 8);
    TrainConfig cfg;
    cfg.epochs = 5000;
    cfg.learning_rate = 1e-9;
    cfg.momentum = 0.0;
    cfg.early_stop_patience = 3;
    cfg.learning_rate_decay = 0.0;  // nothing moves after the first epoch
    const TrainResult r = train_mlp(init, t.x, t.y, cfg);
    CHECK(r.early_stopped);
    CHECK(r.epoch_loss.size() < 5000);
}

TEST_CASE("divergence is reported with the epoch") {
    const Toy t = smooth_regression(50, 3);
    const MlpModel init({3, 8, 2}, OutputKind::regression, 8);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.learning_rate = 1e6;
    try {
        (void)train_mlp(init, t.x, t.y, cfg);
        FAIL("expected divergence");
    } catch (const TrainingDivergedError& e) {
        CHECK(e.epoch() >= 0);
        CHECK(e.epoch() < 50);
    }
}

TEST_CASE("invalid training input") {
    const MlpModel init({3, 8, 2}, OutputKind::regression, 8);
    TrainConfig cfg;
    CHECK_THROWS_AS(train_mlp(init, Eigen::MatrixXd(0, 3), Eigen::MatrixXd(0, 2), cfg), std::invalid_argument);
    CHECK_THROWS_AS(train_mlp(init, Eigen::MatrixXd::Zero(4, 3), Eigen::MatrixXd::Zero(4, 3), cfg),
                    std::invalid_argument);
}

TEST_CASE("gradient check on fresh small models") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n(0.0, 1.0);
    const std::vector<std::pair<std::vector<int>, OutputKind>> archs = {
        {{6, 10, 3}, OutputKind::regression},
        {{6, 10, 4}, OutputKind::classification},
        {{5, 8, 7, 3}, OutputKind::regression},
        {{4, 6, 6, 6, 4}, OutputKind::classification},
    };
    for (std::size_t a = 0; a < archs.size(); ++a) {
        const MlpModel m(archs[a].first, archs[a].second, 100 + a);
        REQUIRE(m.parameter_count() <= 500);
        int checked = 0;
        for (int trial = 0; trial < 20 && checked < 5; ++trial) {
            std::vector<double> x(static_cast<std::size_t>(m.input_size()));
            for (double& v : x) v = n(rng);
            std::vector<double> y(static_cast<std::size_t>(m.output_size()), 0.0);
            if (archs[a].second == OutputKind::classification) {
                y[static_cast<std::size_t>(trial) % y.size()] = 1.0;
            } else {
                for (double& v : y) v = n(rng);
            }
            const GradientCheckResult g = mlp_gradient_check(m, x, y);
            // central differences straddling a rectifier kink are meaningless
            if (g.min_preactivation_margin < 1e-3) continue;
            ++checked;
            CHECK(g.parameters_checked == m.parameter_count());
            CHECK(g.max_relative_error < 1e-4);
        }
        CHECK(checked >= 3);
    }
}

TEST_CASE("zero-weight model at zero input: bias gradients are exact") {
    MlpModel m({3, 5, 2}, OutputKind::regression, 1);
    for (auto& l : m.layers()) {
        l.weights.setZero();
        l.bias.setZero();
    }
    const std::vector<double> x(3, 0.0);
    const std::vector<double> y = {0.7, -0.3};
    Eigen::MatrixXd xm = Eigen::MatrixXd::Zero(1, 3);
    Eigen::MatrixXd ym(1, 2);
    ym << 0.7, -0.3;
    const MlpGradients g = mlp_gradients(m, xm, ym);
    for (Eigen::Index i = 0; i < 2; ++i) {
        MlpModel p = m;
        p.layers()[1].bias(i) = 1e-5;
        const double up = mlp_loss(p, xm, ym);
        p.layers()[1].bias(i) = -1e-5;
        const double down = mlp_loss(p, xm, ym);
        CHECK(std::abs(g.bias[1](i) - (up - down) / 2e-5) < 1e-8);
    }
    CHECK(g.bias[0].cwiseAbs().maxCoeff() < 1e-8);
    const GradientCheckResult r = mlp_gradient_check(m, x, y);
    CHECK(r.max_absolute_error < 1e-8);
}

TEST_CASE("inputs placed near a kink are detected by the margin") {
    MlpModel m({1, 2, 1}, OutputKind::regression, 1);
    m.layers()[0].weights << 1.0, -1.0;
    m.layers()[0].bias << 0.0, 0.5;
    const std::vector<double> y = {0.0};
    CHECK(mlp_gradient_check(m, std::vector<double>{1e-7}, y).min_preactivation_margin < 1e-5);
    const GradientCheckResult ok = mlp_gradient_check(m, std::vector<double>{0.25}, y);
    CHECK(ok.min_preactivation_margin >= 1e-3);
    CHECK(ok.max_relative_error < 1e-4);
}

TEST_CASE("regression output is homogeneous in the output weights") {
    const MlpModel m({6, 12, 3}, OutputKind::regression, 4);
    MlpModel doubled = m;
    doubled.layers().back().weights *= 2.0;
    doubled.layers().back().bias *= 2.0;
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(30, 6);
    const Eigen::MatrixXd a = m.forward(x);
    const Eigen::MatrixXd b = doubled.forward(x);
    CHECK((b - 2.0 * a).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dropout is inactive at inference") {
    const MlpModel m({4, 16, 2}, OutputKind::regression, 4, {0.5});
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 4);
    CHECK(m.forward(x) == m.forward(x));
    const Eigen::VectorXd p = m.predict(std::vector<double>{x(0, 0), x(0, 1), x(0, 2), x(0, 3)});
    CHECK((p.transpose() - m.forward(x).row(0)).cwiseAbs().maxCoeff() < 1e-14);
}
