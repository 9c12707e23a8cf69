#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "imugest/knn.hpp"
#include "imugest/rng.hpp"
#include "imugest/svm.hpp"
#include "oracles.hpp"

using namespace imugest;

TEST_CASE("neighbour vote equals an exhaustive scan on 1000 random cases") {
    RandomStream rng(12345);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 10 + rng.below(51);
        const std::size_t d = 2 + rng.below(7);
        const bool coarse = trial % 2 == 1;  // integer grid provokes distance ties

        KnnModel model;
        model.points = Mat(m, d);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < d; ++c)
                model.points(r, c) = coarse ? static_cast<double>(rng.below(4))
                                            : rng.uniform(-1.0, 1.0);
        model.labels.resize(m);
        for (int& l : model.labels) l = static_cast<int>(rng.below(4));
        const std::size_t kk = rng.below(4);
        model.k = kk == 0 ? 1 : static_cast<int>(std::min<std::size_t>(m, 2 * kk + 1));
        model.weighting = trial % 3 == 0 ? KnnWeighting::inverse_distance : KnnWeighting::uniform;

        std::vector<double> query(d);
        if (trial % 5 == 0) {
            const std::size_t src = rng.below(m);  // exact hit on a stored point
            for (std::size_t c = 0; c < d; ++c) query[c] = model.points(src, c);
        } else {
            for (std::size_t c = 0; c < d; ++c)
                query[c] = coarse ? static_cast<double>(rng.below(4)) : rng.uniform(-1.0, 1.0);
        }

        INFO("trial " << trial << " m=" << m << " d=" << d << " k=" << model.k
                      << (model.weighting == KnnWeighting::uniform ? " uniform" : " inverse"));
        CHECK(knn_predict(model, query) ==
              oracle::knn_scan(model.points, model.labels, model.k,
                               model.weighting == KnnWeighting::inverse_distance, query));
    }
}

TEST_CASE("single-neighbour lookup memorizes distinct training points") {
    KnnModel model;
    model.points = Mat(9, 2);
    model.labels.resize(9);
    for (std::size_t i = 0; i < 9; ++i) {
        model.points(i, 0) = static_cast<double>(i % 3);
        model.points(i, 1) = static_cast<double>(i / 3);
        model.labels[i] = static_cast<int>(i % 4);
    }
    model.k = 1;
    for (std::size_t i = 0; i < 9; ++i)
        CHECK(knn_predict(model, model.points.row(i)) == model.labels[i]);
}

TEST_CASE("neighbour vote tie rules") {
    KnnModel model;
    model.points = Mat(2, 1);
    model.points(0, 0) = -1.0;
    model.points(1, 0) = 1.0;
    model.labels = {1, 0};
    model.k = 2;
    // equidistant, one vote each: the smaller class id wins
    CHECK(knn_predict(model, std::vector<double>{0.0}) == 0);

    // distance ties at the cut: the lower point index enters the vote
    KnnModel tie;
    tie.points = Mat(3, 1);
    tie.points(0, 0) = 1.0;
    tie.points(1, 0) = -1.0;
    tie.points(2, 0) = 1.0;
    tie.labels = {2, 2, 1};
    tie.k = 2;  // neighbours: index 0 (label 2) and index 1 (label 2)
    CHECK(knn_predict(tie, std::vector<double>{0.0}) == 2);

    // an exact coincidence under inverse weighting wins outright
    KnnModel exact;
    exact.points = Mat(3, 1);
    exact.points(0, 0) = 0.0;
    exact.points(1, 0) = 0.1;
    exact.points(2, 0) = -0.1;
    exact.labels = {3, 1, 1};
    exact.k = 3;
    exact.weighting = KnnWeighting::inverse_distance;
    CHECK(knn_predict(exact, std::vector<double>{0.0}) == 3);
}

TEST_CASE("neighbour model validation") {
    KnnModel model;
    model.points = Mat(4, 2);
    model.labels = {0, 1, 0, 1};
    model.k = 5;  // more neighbours than points
    CHECK_THROWS(knn_predict(model, std::vector<double>{0.0, 0.0}));
    model.k = 2;
    CHECK_THROWS(knn_predict(model, std::vector<double>{0.0}));  // wrong width
    model.labels = {0, 1, 0};
    CHECK_THROWS(knn_predict(model, std::vector<double>{0.0, 0.0}));  // count mismatch
}

TEST_CASE("margin classifier separates unit-margin clusters perfectly") {
    RandomStream rng(31337);
    const std::size_t per_class = 30;
    const double centers[3][2] = {{0.0, 8.0}, {-8.0, -4.0}, {8.0, -4.0}};
    Mat x(3 * per_class, 2);
    std::vector<int> labels(3 * per_class);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < per_class; ++i) {
            const std::size_t row = c * per_class + i;
            x(row, 0) = centers[c][0] + rng.uniform(-1.0, 1.0);
            x(row, 1) = centers[c][1] + rng.uniform(-1.0, 1.0);
            labels[row] = static_cast<int>(c);
        }

    const SvmModel model = svm_train(x, labels);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < x.rows(); ++r)
        if (svm_predict(model, x.row(r)) == labels[r]) ++correct;
    CHECK(correct == x.rows());

    // retraining reproduces the exact same parameters
    const SvmModel again = svm_train(x, labels);
    CHECK(again.weights == model.weights);
    CHECK(again.biases == model.biases);
}

TEST_CASE("margin classifier scores on hand-built models") {
    // two mirrored weight vectors act as a sign test
    SvmModel mirror;
    mirror.weights = Mat(2, 2);
    mirror.weights(0, 0) = 1.0;
    mirror.weights(0, 1) = 2.0;
    mirror.weights(1, 0) = -1.0;
    mirror.weights(1, 1) = -2.0;
    mirror.biases = {0.0, 0.0};
    CHECK(svm_predict(mirror, std::vector<double>{1.0, 1.0}) == 0);
    CHECK(svm_predict(mirror, std::vector<double>{-1.0, -1.0}) == 1);
    // at the origin both score zero: the lowest class id wins
    CHECK(svm_predict(mirror, std::vector<double>{0.0, 0.0}) == 0);

    // with a zero query only the biases matter
    SvmModel biased;
    biased.weights = Mat(3, 2);
    biased.biases = {0.25, 0.75, -0.5};
    CHECK(svm_predict(biased, std::vector<double>{0.0, 0.0}) == 1);

    // random models: prediction equals a direct per-class recomputation
    RandomStream rng(404);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 2 + rng.below(5);
        const std::size_t d = 1 + rng.below(6);
        SvmModel model;
        model.weights = Mat(k, d);
        model.biases.resize(k);
        for (std::size_t c = 0; c < k; ++c) {
            model.biases[c] = rng.uniform(-1.0, 1.0);
            for (std::size_t j = 0; j < d; ++j) model.weights(c, j) = rng.uniform(-1.0, 1.0);
        }
        std::vector<double> q(d);
        for (double& v : q) v = rng.uniform(-2.0, 2.0);

        std::size_t best = 0;
        double best_score = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            double s = model.biases[c];
            for (std::size_t j = 0; j < d; ++j) s += model.weights(c, j) * q[j];
            if (c == 0 || s > best_score) {
                best = c;
                best_score = s;
            }
        }
        CHECK(svm_predict(model, q) == static_cast<int>(best));
    }
}

TEST_CASE("margin classifier validation") {
    Mat x(4, 2);
    CHECK_THROWS(svm_train(x, {0, 0, 0, 0}));  // one class
    CHECK_THROWS(svm_train(x, {0, 1}));        // count mismatch
    SvmHyper bad;
    bad.lambda = 0.0;
    CHECK_THROWS(svm_train(x, {0, 1, 0, 1}, bad));
    SvmHyper bad2;
    bad2.epochs = 0;
    CHECK_THROWS(svm_train(x, {0, 1, 0, 1}, bad2));
}
