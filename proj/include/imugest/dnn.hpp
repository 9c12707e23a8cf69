#pragma once

// Sigmoid feed-forward network with one-vs-all output coding, cross-entropy
// cost and full-batch gradient descent. The stock architecture is
// 10-15-15-15-K; layer sizes stay configurable. Weight matrices carry the
// bias as column 0, so Theta[L] has shape [size_{L+1} x (size_L + 1)] and
// acts on [1; a^(L)].

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "imugest/matrix.hpp"
#include "imugest/rng.hpp"

namespace imugest {

struct DnnHyper {
    double learning_rate = 0.3;
    int iterations = 150;
    double l2 = 0.0;
};

struct DnnModel {
    std::vector<std::size_t> layer_sizes;  // input, hidden..., output
    std::vector<Mat> weights;              // weights[L]: layer L -> L+1, bias column first
    std::uint64_t seed = 0;
    DnnHyper hyper;

    std::size_t n_inputs() const { return layer_sizes.front(); }
    std::size_t n_outputs() const { return layer_sizes.back(); }
};

struct TrainTrace {
    std::vector<double> cost_per_iteration;                    // J after each update, length T
    std::vector<std::pair<int, double>> accuracy_per_checkpoint;  // training-set accuracy
};

// 1/(1+e^-z), saturating cleanly for large |z|
inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline void validate_dnn(const DnnModel& model) {
    if (model.layer_sizes.size() < 2) throw std::runtime_error("dnn: need at least input and output layers");
    for (const std::size_t s : model.layer_sizes)
        if (s == 0) throw std::runtime_error("dnn: zero-size layer");
    if (model.weights.size() != model.layer_sizes.size() - 1)
        throw std::runtime_error("dnn: weight matrix count mismatch");
    for (std::size_t L = 0; L + 1 < model.layer_sizes.size(); ++L)
        if (model.weights[L].rows() != model.layer_sizes[L + 1] ||
            model.weights[L].cols() != model.layer_sizes[L] + 1)
            throw std::runtime_error("dnn: weight shape mismatch at layer " + std::to_string(L));
}

// Uniform init in [-e0, e0], e0 = sqrt(6/(fan_in + fan_out)), seeded.
inline DnnModel make_dnn(std::vector<std::size_t> layer_sizes, std::uint64_t seed,
                         const DnnHyper& hyper = {}) {
    DnnModel model;
    model.layer_sizes = std::move(layer_sizes);
    model.seed = seed;
    model.hyper = hyper;
    RandomStream rng(mix_seed(seed, 0xD7));
    for (std::size_t L = 0; L + 1 < model.layer_sizes.size(); ++L) {
        const std::size_t fan_in = model.layer_sizes[L];
        const std::size_t fan_out = model.layer_sizes[L + 1];
        const double e0 = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Mat w(fan_out, fan_in + 1);
        for (std::size_t r = 0; r < w.rows(); ++r)
            for (std::size_t c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-e0, e0);
        model.weights.push_back(std::move(w));
    }
    validate_dnn(model);
    return model;
}

// Activations per layer: a[0] = x, a[L+1] = g(Theta[L] . [1; a[L]]).
inline std::vector<Vec> forward(const DnnModel& model, std::span<const double> x) {
    if (x.size() != model.n_inputs())
        throw std::runtime_error("dnn: input has " + std::to_string(x.size()) + " values, expected " +
                                 std::to_string(model.n_inputs()));
    std::vector<Vec> a(model.layer_sizes.size());
    a[0].assign(x.begin(), x.end());
    for (std::size_t L = 0; L + 1 < model.layer_sizes.size(); ++L) {
        const Mat& w = model.weights[L];
        Vec next(w.rows());
        for (std::size_t r = 0; r < w.rows(); ++r) {
            double z = w(r, 0);
            for (std::size_t c = 0; c < a[L].size(); ++c) z += w(r, c + 1) * a[L][c];
            next[r] = sigmoid(z);
        }
        a[L + 1] = std::move(next);
    }
    return a;
}

// argmax over outputs; ties go to the lowest class id
inline std::pair<int, Vec> dnn_predict(const DnnModel& model, std::span<const double> x) {
    Vec out = forward(model, x).back();
    std::size_t best = 0;
    for (std::size_t k = 1; k < out.size(); ++k)
        if (out[k] > out[best]) best = k;
    return {static_cast<int>(best), std::move(out)};
}

inline Mat one_hot(const std::vector<int>& labels, std::size_t n_classes) {
    Mat y(labels.size(), n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes)
            throw std::runtime_error("label " + std::to_string(labels[i]) + " out of range for K=" +
                                     std::to_string(n_classes));
        y(i, static_cast<std::size_t>(labels[i])) = 1.0;
    }
    return y;
}

namespace detail {
// sum of squared non-bias weights
inline double weight_penalty(const DnnModel& model) {
    double s = 0.0;
    for (const Mat& w : model.weights)
        for (std::size_t r = 0; r < w.rows(); ++r)
            for (std::size_t c = 1; c < w.cols(); ++c) s += w(r, c) * w(r, c);
    return s;
}
} // namespace detail

// Cross-entropy over all examples and classes plus the L2 term; hypotheses
// are clamped to [eps, 1-eps] inside the logs only.
inline double cost(const DnnModel& model, const Mat& x, const Mat& y) {
    const std::size_t m = x.rows();
    if (m == 0) throw std::runtime_error("dnn cost: no examples");
    if (y.rows() != m || y.cols() != model.n_outputs())
        throw std::runtime_error("dnn cost: target shape mismatch");
    constexpr double eps = 1e-12;
    double J = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Vec h = forward(model, x.row(i)).back();
        for (std::size_t k = 0; k < h.size(); ++k) {
            const double hk = std::min(1.0 - eps, std::max(eps, h[k]));
            J -= y(i, k) * std::log(hk) + (1.0 - y(i, k)) * std::log(1.0 - hk);
        }
    }
    J /= static_cast<double>(m);
    if (model.hyper.l2 != 0.0)
        J += model.hyper.l2 / (2.0 * static_cast<double>(m)) * detail::weight_penalty(model);
    return J;
}

// Gradients of cost() w.r.t. every weight matrix.
// Output delta: d^(out) = a^(out) - y. Hidden deltas walk the weights back:
// d^(L) = (Theta[L] without bias column)^T d^(L+1) .* a^(L) .* (1 - a^(L)).
// No delta at the input layer.
inline std::vector<Mat> backprop(const DnnModel& model, const Mat& x, const Mat& y) {
    const std::size_t m = x.rows();
    if (m == 0) throw std::runtime_error("dnn backprop: no examples");
    if (y.rows() != m || y.cols() != model.n_outputs())
        throw std::runtime_error("dnn backprop: target shape mismatch");

    const std::size_t n_layers = model.layer_sizes.size();
    std::vector<Mat> grads;
    grads.reserve(n_layers - 1);
    for (std::size_t L = 0; L + 1 < n_layers; ++L)
        grads.emplace_back(model.weights[L].rows(), model.weights[L].cols());

    std::vector<Vec> delta(n_layers);
    for (std::size_t i = 0; i < m; ++i) {
        const std::vector<Vec> a = forward(model, x.row(i));

        delta[n_layers - 1].resize(model.n_outputs());
        for (std::size_t k = 0; k < model.n_outputs(); ++k)
            delta[n_layers - 1][k] = a[n_layers - 1][k] - y(i, k);

        for (std::size_t L = n_layers - 2; L >= 1; --L) {
            const Mat& w = model.weights[L];
            delta[L].assign(model.layer_sizes[L], 0.0);
            for (std::size_t j = 0; j < model.layer_sizes[L]; ++j) {
                double s = 0.0;
                for (std::size_t r = 0; r < w.rows(); ++r) s += w(r, j + 1) * delta[L + 1][r];
                delta[L][j] = s * a[L][j] * (1.0 - a[L][j]);
            }
        }

        for (std::size_t L = 0; L + 1 < n_layers; ++L) {
            Mat& g = grads[L];
            for (std::size_t r = 0; r < g.rows(); ++r) {
                const double d = delta[L + 1][r];
                g(r, 0) += d;
                for (std::size_t c = 0; c < a[L].size(); ++c) g(r, c + 1) += d * a[L][c];
            }
        }
    }

    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t L = 0; L + 1 < n_layers; ++L) {
        Mat& g = grads[L];
        const Mat& w = model.weights[L];
        for (std::size_t r = 0; r < g.rows(); ++r) {
            g(r, 0) *= inv_m;
            for (std::size_t c = 1; c < g.cols(); ++c)
                g(r, c) = g(r, c) * inv_m + model.hyper.l2 * inv_m * w(r, c);
        }
    }
    return grads;
}

// T full-batch steps Theta <- Theta - alpha * grad; the trace records J after
// each step and training-set accuracy at ~10 evenly spaced checkpoints.
// Deterministic given the seed. A non-finite cost aborts with the iteration
// index (the step size diverged).
inline std::pair<DnnModel, TrainTrace> train_dnn(const Mat& x, const Mat& y,
                                                 std::vector<std::size_t> layer_sizes,
                                                 const DnnHyper& hyper, std::uint64_t seed) {
    const std::size_t m = x.rows();
    if (m == 0) throw std::runtime_error("dnn train: no examples");
    if (layer_sizes.empty() || x.cols() != layer_sizes.front() || y.cols() != layer_sizes.back())
        throw std::runtime_error("dnn train: layer sizes do not match data");
    if (m < layer_sizes.back()) throw std::runtime_error("dnn train: fewer examples than classes");
    if (hyper.iterations < 0) throw std::runtime_error("dnn train: negative iteration count");

    DnnModel model = make_dnn(std::move(layer_sizes), seed, hyper);
    TrainTrace trace;
    trace.cost_per_iteration.reserve(static_cast<std::size_t>(hyper.iterations));

    const int checkpoint_every = std::max(1, hyper.iterations / 10);
    const auto record_accuracy = [&](int iteration) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const int pred = dnn_predict(model, x.row(i)).first;
            std::size_t truth = 0;
            for (std::size_t k = 1; k < y.cols(); ++k)
                if (y(i, k) > y(i, truth)) truth = k;
            if (static_cast<std::size_t>(pred) == truth) ++hits;
        }
        trace.accuracy_per_checkpoint.emplace_back(iteration,
                                                   static_cast<double>(hits) / static_cast<double>(m));
    };

    for (int t = 1; t <= hyper.iterations; ++t) {
        const std::vector<Mat> grads = backprop(model, x, y);
        for (std::size_t L = 0; L < grads.size(); ++L) {
            Mat& w = model.weights[L];
            const Mat& g = grads[L];
            for (std::size_t r = 0; r < w.rows(); ++r)
                for (std::size_t c = 0; c < w.cols(); ++c)
                    w(r, c) -= hyper.learning_rate * g(r, c);
        }
        const double J = cost(model, x, y);
        if (!std::isfinite(J))
            throw std::runtime_error("dnn train: cost diverged at iteration " + std::to_string(t));
        trace.cost_per_iteration.push_back(J);
        if (t % checkpoint_every == 0 || t == hyper.iterations) record_accuracy(t);
    }
    return {std::move(model), std::move(trace)};
}

} // namespace imugest
