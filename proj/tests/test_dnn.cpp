#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "imugest/dnn.hpp"
#include "imugest/rng.hpp"
#include "oracles.hpp"

using namespace imugest;

namespace {

struct Problem {
    Mat x;
    Mat y;
};

Problem random_problem(RandomStream& rng, std::size_t m, std::size_t d, std::size_t k) {
    Problem p;
    p.x = Mat(m, d);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < d; ++c) p.x(r, c) = rng.uniform(-1.0, 1.0);
    std::vector<int> labels(m);
    for (int& l : labels) l = static_cast<int>(rng.below(k));
    p.y = one_hot(labels, k);
    return p;
}

// analytic gradient vs central finite differences of the cost
void check_gradients(const std::vector<std::size_t>& layers, std::uint64_t seed,
                     RandomStream& rng, double l2) {
    DnnHyper hyper;
    hyper.l2 = l2;
    DnnModel model = make_dnn(layers, seed, hyper);
    const std::size_t m = 2 + rng.below(15);  // up to 16 examples
    const Problem p = random_problem(rng, m, layers.front(), layers.back());

    const std::vector<Mat> grads = backprop(model, p.x, p.y);
    REQUIRE(grads.size() == model.weights.size());

    constexpr double step = 1e-5;
    for (std::size_t L = 0; L < model.weights.size(); ++L) {
        REQUIRE(grads[L].rows() == model.weights[L].rows());
        REQUIRE(grads[L].cols() == model.weights[L].cols());
        for (std::size_t r = 0; r < model.weights[L].rows(); ++r)
            for (std::size_t c = 0; c < model.weights[L].cols(); ++c) {
                const double saved = model.weights[L](r, c);
                model.weights[L](r, c) = saved + step;
                const double plus = cost(model, p.x, p.y);
                model.weights[L](r, c) = saved - step;
                const double minus = cost(model, p.x, p.y);
                model.weights[L](r, c) = saved;
                const double fd = (plus - minus) / (2.0 * step);
                INFO("layer " << L << " entry (" << r << "," << c << ")");
                CHECK(oracle::rel_close(grads[L](r, c), fd, 1e-6));
            }
    }
}

} // namespace

TEST_CASE("cost on hand-checkable nets") {
    // zero weights: every output is 1/2 and each of the two output terms
    // contributes ln 2
    DnnModel model = make_dnn({2, 2}, 1);
    for (Mat& w : model.weights)
        for (std::size_t r = 0; r < w.rows(); ++r)
            for (std::size_t c = 0; c < w.cols(); ++c) w(r, c) = 0.0;
    Mat x(1, 2);
    x(0, 0) = 0.3;
    x(0, 1) = -0.7;
    Mat y(1, 2);
    y(0, 0) = 1.0;
    CHECK(cost(model, x, y) == Catch::Approx(2.0 * std::log(2.0)).epsilon(1e-12));

    // perfectly confident and correct outputs cost (numerically) nothing
    DnnModel sure = make_dnn({1, 1}, 1);
    sure.weights[0](0, 0) = 1000.0;  // bias pushes the sigmoid to 1
    sure.weights[0](0, 1) = 0.0;
    Mat x1(1, 1), y1(1, 1);
    y1(0, 0) = 1.0;
    CHECK(cost(sure, x1, y1) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("cost matches the scalar-loop reference on random nets") {
    RandomStream rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 2 + rng.below(6);
        const std::size_t h = 2 + rng.below(8);
        const std::size_t k = 2 + rng.below(4);
        const double l2 = trial % 2 == 0 ? 0.0 : rng.uniform(0.01, 1.0);
        DnnHyper hyper;
        hyper.l2 = l2;
        const DnnModel model = make_dnn({d, h, k}, 1000 + static_cast<std::uint64_t>(trial), hyper);
        const Problem p = random_problem(rng, 3 + rng.below(10), d, k);
        INFO("trial " << trial << " l2=" << l2);
        CHECK(oracle::rel_close(cost(model, p.x, p.y),
                                oracle::net_cost(model.weights, p.x, p.y, l2), 1e-12));
    }
}

TEST_CASE("backprop gradients match finite differences on 20 random nets") {
    RandomStream rng(4242);
    // the stock architecture first, then random shapes up to 4 hidden layers
    check_gradients({10, 15, 15, 15, 6}, 90001, rng, 0.0);
    check_gradients({10, 15, 15, 15, 6}, 90002, rng, 0.3);
    for (int trial = 0; trial < 18; ++trial) {
        std::vector<std::size_t> layers;
        layers.push_back(2 + rng.below(11));
        const std::size_t hidden = 1 + rng.below(4);
        for (std::size_t i = 0; i < hidden; ++i) layers.push_back(2 + rng.below(15));
        layers.push_back(2 + rng.below(5));
        const double l2 = trial % 3 == 0 ? rng.uniform(0.0, 0.5) : 0.0;
        INFO("trial " << trial);
        check_gradients(layers, 31000 + static_cast<std::uint64_t>(trial), rng, l2);
    }
}

TEST_CASE("zero training iterations return the freshly initialized net") {
    RandomStream rng(5);
    const Problem p = random_problem(rng, 12, 4, 3);
    DnnHyper hyper;
    hyper.iterations = 0;
    const auto [trained, trace] = train_dnn(p.x, p.y, {4, 6, 3}, hyper, 99);
    const DnnModel fresh = make_dnn({4, 6, 3}, 99, hyper);
    REQUIRE(trained.weights.size() == fresh.weights.size());
    for (std::size_t L = 0; L < trained.weights.size(); ++L)
        CHECK(trained.weights[L] == fresh.weights[L]);
    CHECK(trace.cost_per_iteration.empty());
}

TEST_CASE("training is deterministic and tracks the cost per update") {
    RandomStream rng(6);
    const Problem p = random_problem(rng, 18, 5, 3);
    DnnHyper hyper;
    hyper.iterations = 30;
    const auto [m1, t1] = train_dnn(p.x, p.y, {5, 8, 3}, hyper, 7);
    const auto [m2, t2] = train_dnn(p.x, p.y, {5, 8, 3}, hyper, 7);
    REQUIRE(m1.weights.size() == m2.weights.size());
    for (std::size_t L = 0; L < m1.weights.size(); ++L) CHECK(m1.weights[L] == m2.weights[L]);
    CHECK(t1.cost_per_iteration == t2.cost_per_iteration);
    CHECK(t1.cost_per_iteration.size() == 30);
    // the traced value is the cost after the corresponding update
    CHECK(cost(m1, p.x, p.y) == Catch::Approx(t1.cost_per_iteration.back()).epsilon(1e-12));
    // learning on a fixed batch reduces the cost overall
    CHECK(t1.cost_per_iteration.back() < t1.cost_per_iteration.front());
}

TEST_CASE("prediction is the arg-max output with ties to the lowest class") {
    DnnModel model = make_dnn({3, 4}, 2);
    for (Mat& w : model.weights)
        for (std::size_t r = 0; r < w.rows(); ++r)
            for (std::size_t c = 0; c < w.cols(); ++c) w(r, c) = 0.0;
    const std::vector<double> x = {0.4, -0.2, 0.9};
    CHECK(dnn_predict(model, x).first == 0);  // all outputs equal 1/2

    RandomStream rng(8);
    for (int trial = 0; trial < 25; ++trial) {
        const DnnModel net = make_dnn({3, 5, 4}, 500 + static_cast<std::uint64_t>(trial));
        std::vector<double> q(3);
        for (double& v : q) v = rng.uniform(-2.0, 2.0);
        const auto [label, outputs] = dnn_predict(net, q);
        std::size_t best = 0;
        for (std::size_t k = 1; k < outputs.size(); ++k)
            if (outputs[k] > outputs[best]) best = k;
        CHECK(label == static_cast<int>(best));
    }
}

TEST_CASE("shape and label validation") {
    CHECK_THROWS(make_dnn({5}, 1));
    CHECK_THROWS(make_dnn({5, 0, 2}, 1));
    CHECK_THROWS(one_hot({0, 3}, 3));
    CHECK_THROWS(one_hot({-1}, 3));

    RandomStream rng(9);
    const Problem p = random_problem(rng, 6, 4, 2);
    DnnModel model = make_dnn({3, 2}, 1);  // expects 3 inputs, x has 4
    CHECK_THROWS(cost(model, p.x, p.y));
}
