#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imugest/matrix.hpp"

namespace imugest {

enum class KnnWeighting { uniform, inverse_distance };

struct KnnModel {
    Mat points;               // [m x d]
    std::vector<int> labels;  // aligned with points
    int k = 5;
    KnnWeighting weighting = KnnWeighting::uniform;
};

inline void validate_knn(const KnnModel& model) {
    if (model.points.rows() == 0) throw std::runtime_error("knn: no training points");
    if (model.labels.size() != model.points.rows())
        throw std::runtime_error("knn: label count mismatch");
    if (model.k < 1 || static_cast<std::size_t>(model.k) > model.points.rows())
        throw std::runtime_error("knn: k must be in [1, m]");
    for (const int l : model.labels)
        if (l < 0) throw std::runtime_error("knn: negative label");
}

// Majority (or inverse-distance-weighted) vote over the k nearest points by
// Euclidean distance. Distance ties break by lower point index, vote ties by
// lower class id. An exact coincidence under inverse-distance weighting
// returns that point's label outright.
inline int knn_predict(const KnnModel& model, std::span<const double> x) {
    validate_knn(model);
    const std::size_t m = model.points.rows();
    const std::size_t d = model.points.cols();
    if (x.size() != d)
        throw std::runtime_error("knn: query has " + std::to_string(x.size()) +
                                 " values, model expects " + std::to_string(d));

    std::vector<std::pair<double, std::size_t>> dist(m);  // (squared distance, index)
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = model.points(i, j) - x[j];
            s += diff * diff;
        }
        dist[i] = {s, i};
    }
    const auto k = static_cast<std::size_t>(model.k);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    int max_label = 0;
    for (std::size_t i = 0; i < k; ++i) max_label = std::max(max_label, model.labels[dist[i].second]);
    std::vector<double> score(static_cast<std::size_t>(max_label) + 1, 0.0);

    for (std::size_t i = 0; i < k; ++i) {
        const int label = model.labels[dist[i].second];
        if (model.weighting == KnnWeighting::uniform) {
            score[static_cast<std::size_t>(label)] += 1.0;
        } else {
            const double dd = std::sqrt(dist[i].first);
            if (dd == 0.0) return label;  // nearest coincident point wins
            score[static_cast<std::size_t>(label)] += 1.0 / dd;
        }
    }

    std::size_t best = 0;
    for (std::size_t c = 1; c < score.size(); ++c)
        if (score[c] > score[best]) best = c;
    return static_cast<int>(best);
}

} // namespace imugest
