#pragma once

// One-vs-rest linear SVM. Each class gets a binary hinge-loss classifier
// trained by deterministic full-batch subgradient descent with the schedule
// eta_t = 1/(lambda t); prediction is the argmax of per-class scores.
// Callers standardize the features first.

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imugest/matrix.hpp"

namespace imugest {

struct SvmHyper {
    double lambda = 0.01;
    int epochs = 200;
    std::uint64_t seed = 42;
};

struct SvmModel {
    Mat weights;                // [K x d], one weight vector per class
    std::vector<double> biases; // K
    SvmHyper hyper;

    std::size_t n_classes() const { return weights.rows(); }
    std::size_t dims() const { return weights.cols(); }
};

inline SvmModel svm_train(const Mat& x, const std::vector<int>& labels, const SvmHyper& hyper = {}) {
    const std::size_t m = x.rows();
    const std::size_t d = x.cols();
    if (m == 0 || labels.size() != m) throw std::runtime_error("svm: label count mismatch");
    if (hyper.lambda <= 0.0) throw std::runtime_error("svm: lambda must be positive");
    if (hyper.epochs < 1) throw std::runtime_error("svm: epochs must be >= 1");

    std::set<int> present(labels.begin(), labels.end());
    if (*present.begin() < 0) throw std::runtime_error("svm: negative label");
    if (present.size() < 2) throw std::runtime_error("svm: need at least 2 classes");
    const std::size_t n_classes = static_cast<std::size_t>(*present.rbegin()) + 1;

    SvmModel model;
    model.hyper = hyper;
    model.weights = Mat(n_classes, d);
    model.biases.assign(n_classes, 0.0);

    const double inv_m = 1.0 / static_cast<double>(m);
    std::vector<double> push(d);
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto w = model.weights.row(c);
        double& b = model.biases[c];
        for (int t = 1; t <= hyper.epochs; ++t) {
            const double eta = 1.0 / (hyper.lambda * static_cast<double>(t));
            std::fill(push.begin(), push.end(), 0.0);
            double push_b = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double y = labels[i] == static_cast<int>(c) ? 1.0 : -1.0;
                double score = b;
                for (std::size_t j = 0; j < d; ++j) score += w[j] * x(i, j);
                if (y * score < 1.0) {
                    for (std::size_t j = 0; j < d; ++j) push[j] += y * x(i, j);
                    push_b += y;
                }
            }
            const double shrink = 1.0 - eta * hyper.lambda;
            for (std::size_t j = 0; j < d; ++j) w[j] = shrink * w[j] + eta * inv_m * push[j];
            b += eta * inv_m * push_b;
        }
    }
    return model;
}

// argmax_c (w_c . x + b_c); ties to the lowest class id
inline int svm_predict(const SvmModel& model, std::span<const double> x) {
    if (x.size() != model.dims())
        throw std::runtime_error("svm: query has " + std::to_string(x.size()) +
                                 " values, model expects " + std::to_string(model.dims()));
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t c = 0; c < model.n_classes(); ++c) {
        double score = model.biases[c];
        for (std::size_t j = 0; j < model.dims(); ++j) score += model.weights(c, j) * x[j];
        if (c == 0 || score > best_score) {
            best = c;
            best_score = score;
        }
    }
    return static_cast<int>(best);
}

} // namespace imugest
