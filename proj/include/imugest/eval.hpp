#pragma once

// Dataset splitting, accuracy/confusion reporting and the learning-curve
// sweeps. PCA and classifiers are always fitted on the training partition
// only; test rows are projected with the training-fitted model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "imugest/dnn.hpp"
#include "imugest/features.hpp"
#include "imugest/pca.hpp"
#include "imugest/rng.hpp"

namespace imugest {

struct EvalReport {
    double accuracy = 0.0;
    std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
    std::vector<double> per_class_recall;             // NaN for classes absent from the test set
    std::size_t n_test = 0;
};

using PredictFn = std::function<int(std::span<const double>)>;

struct SplitDataset {
    FeatureMatrix train;
    FeatureMatrix test;
};

inline std::size_t count_classes(const std::vector<int>& labels) {
    int max_label = -1;
    for (const int l : labels) {
        if (l < 0) throw std::runtime_error("negative class label");
        max_label = std::max(max_label, l);
    }
    return static_cast<std::size_t>(max_label) + 1;
}

namespace detail {
inline FeatureMatrix take_rows(const FeatureMatrix& fm, const std::vector<std::size_t>& rows) {
    FeatureMatrix out;
    out.column_names = fm.column_names;
    out.values = Mat(rows.size(), fm.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < fm.cols(); ++c) out.values(i, c) = fm.values(rows[i], c);
        out.labels.push_back(fm.labels[rows[i]]);
    }
    return out;
}
} // namespace detail

// Per-class proportional split with a seeded shuffle. Test takes
// round(test_fraction * class size) rows of each class, at least 1 and at
// most size-1. Row order within each part follows the source matrix.
inline SplitDataset split_stratified(const FeatureMatrix& fm, double test_fraction,
                                     std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::runtime_error("split: test_fraction must be in (0, 1)");
    const std::size_t n_classes = count_classes(fm.labels);

    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t i = 0; i < fm.labels.size(); ++i)
        by_class[static_cast<std::size_t>(fm.labels[i])].push_back(i);

    RandomStream rng(mix_seed(seed, 0x5B7));
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto& idx = by_class[c];
        if (idx.size() < 2)
            throw std::runtime_error("split: class " + std::to_string(c) + " has " +
                                     std::to_string(idx.size()) + " rows, need at least 2");
        rng.shuffle(idx);
        auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
        n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
        test_rows.insert(test_rows.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
        train_rows.insert(train_rows.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {detail::take_rows(fm, train_rows), detail::take_rows(fm, test_rows)};
}

// Runs the predictor over every test row and tallies the confusion matrix.
inline EvalReport evaluate(const PredictFn& predict, const FeatureMatrix& test) {
    if (test.rows() == 0) throw std::runtime_error("evaluate: empty test set");

    std::vector<int> predictions;
    predictions.reserve(test.rows());
    int max_label = 0;
    for (std::size_t i = 0; i < test.rows(); ++i) {
        const int p = predict(test.values.row(i));
        if (p < 0) throw std::runtime_error("evaluate: negative prediction");
        predictions.push_back(p);
        max_label = std::max({max_label, p, test.labels[i]});
    }
    const auto k = static_cast<std::size_t>(max_label) + 1;

    EvalReport report;
    report.n_test = test.rows();
    report.confusion.assign(k, std::vector<std::size_t>(k, 0));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < test.rows(); ++i) {
        const auto truth = static_cast<std::size_t>(test.labels[i]);
        const auto pred = static_cast<std::size_t>(predictions[i]);
        ++report.confusion[truth][pred];
        if (truth == pred) ++hits;
    }
    report.accuracy = static_cast<double>(hits) / static_cast<double>(report.n_test);
    report.per_class_recall.assign(k, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t row_sum = 0;
        for (const std::size_t v : report.confusion[c]) row_sum += v;
        if (row_sum > 0)
            report.per_class_recall[c] =
                static_cast<double>(report.confusion[c][c]) / static_cast<double>(row_sum);
    }
    return report;
}

namespace detail {
// One PCA + DNN round at a given component count and iteration budget. The
// net consumes the raw PCA scores, exactly as the full pipeline does.
inline double pca_dnn_accuracy(const SplitDataset& data, std::size_t l, int iterations,
                               const DnnHyper& base, std::uint64_t seed,
                               const std::vector<std::size_t>& hidden_layers) {
    const PcaModel pca = fit_pca(data.train, l);
    FeatureMatrix train_t = pca_transform(pca, data.train);
    FeatureMatrix test_t = pca_transform(pca, data.test);
    const std::size_t n_classes = std::max(count_classes(train_t.labels), count_classes(test_t.labels));

    std::vector<std::size_t> layers;
    layers.push_back(l);
    layers.insert(layers.end(), hidden_layers.begin(), hidden_layers.end());
    layers.push_back(n_classes);

    DnnHyper hyper = base;
    hyper.iterations = iterations;
    const auto [model, trace] = train_dnn(train_t.values, one_hot(train_t.labels, n_classes),
                                          layers, hyper, seed);
    const EvalReport report = evaluate(
        [&](std::span<const double> row) { return dnn_predict(model, row).first; }, test_t);
    return report.accuracy;
}
} // namespace detail

// Accuracy as a function of training iterations: one freshly seeded DNN per
// grid point on the same split and PCA width.
inline std::vector<std::pair<int, double>> sweep_iterations(
    const SplitDataset& data, const std::vector<int>& iteration_grid, std::size_t l,
    const DnnHyper& base, std::uint64_t seed,
    const std::vector<std::size_t>& hidden_layers = {15, 15, 15}) {
    for (std::size_t i = 0; i + 1 < iteration_grid.size(); ++i)
        if (iteration_grid[i] > iteration_grid[i + 1])
            throw std::runtime_error("sweep: iteration grid must be ascending");
    std::vector<std::pair<int, double>> curve;
    curve.reserve(iteration_grid.size());
    for (const int t : iteration_grid)
        curve.emplace_back(t, detail::pca_dnn_accuracy(data, l, t, base, seed, hidden_layers));
    return curve;
}

// Accuracy as a function of retained PCA components at a fixed iteration
// budget.
inline std::vector<std::pair<std::size_t, double>> sweep_features(
    const SplitDataset& data, const std::vector<std::size_t>& l_grid, int iterations,
    const DnnHyper& base, std::uint64_t seed,
    const std::vector<std::size_t>& hidden_layers = {15, 15, 15}) {
    std::vector<std::pair<std::size_t, double>> curve;
    curve.reserve(l_grid.size());
    for (const std::size_t l : l_grid)
        curve.emplace_back(l, detail::pca_dnn_accuracy(data, l, iterations, base, seed, hidden_layers));
    return curve;
}

} // namespace imugest
