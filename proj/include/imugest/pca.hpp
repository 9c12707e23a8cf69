#pragma once

// PCA by eigendecomposition of the sample covariance. Columns are optionally
// z-scored first (on by default; the feature columns mix units). Components
// carry a deterministic sign: the largest-magnitude entry of each eigenvector
// is positive, so fitted models serialize reproducibly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imugest/features.hpp"
#include "imugest/jacobi.hpp"
#include "imugest/matrix.hpp"

namespace imugest {

struct PcaModel {
    std::vector<double> column_means;   // d
    std::vector<double> column_scales;  // d, all 1 when standardization is off
    Mat components;                     // [d x l], orthonormal columns
    std::vector<double> eigenvalues;    // l, descending

    std::size_t input_dim() const { return components.rows(); }
    std::size_t output_dim() const { return components.cols(); }
};

inline PcaModel fit_pca(const FeatureMatrix& fm, std::size_t l, bool standardize = true) {
    const std::size_t m = fm.rows();
    const std::size_t d = fm.cols();
    if (m < 2) throw std::runtime_error("pca: need at least 2 rows");
    if (l < 1 || l > std::min(d, m - 1))
        throw std::runtime_error("pca: l=" + std::to_string(l) + " out of range [1, " +
                                 std::to_string(std::min(d, m - 1)) + "]");

    PcaModel model;
    model.column_means.resize(d);
    model.column_scales.assign(d, 1.0);
    for (std::size_t c = 0; c < d; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += fm.values(r, c);
        model.column_means[c] = s / static_cast<double>(m);
    }
    if (standardize) {
        for (std::size_t c = 0; c < d; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                const double z = fm.values(r, c) - model.column_means[c];
                s += z * z;
            }
            const double sd = std::sqrt(s / static_cast<double>(m - 1));
            if (sd <= 1e-12 * (1.0 + std::fabs(model.column_means[c]))) {
                const std::string name =
                    c < fm.column_names.size() ? fm.column_names[c] : std::to_string(c);
                throw std::runtime_error("pca: zero-variance column '" + name +
                                         "' cannot be standardized");
            }
            model.column_scales[c] = sd;
        }
    }

    // scaled, centered copy
    Mat z(m, d);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < d; ++c)
            z(r, c) = (fm.values(r, c) - model.column_means[c]) / model.column_scales[c];

    Mat cov(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < m; ++r) s += z(r, i) * z(r, j);
            s /= static_cast<double>(m - 1);
            cov(i, j) = s;
            cov(j, i) = s;
        }
    }

    const SymmetricEigen eig = jacobi_eigensymm(cov);

    model.components = Mat(d, l);
    model.eigenvalues.assign(eig.eigenvalues.begin(),
                             eig.eigenvalues.begin() + static_cast<std::ptrdiff_t>(l));
    for (std::size_t k = 0; k < l; ++k) {
        std::size_t imax = 0;
        for (std::size_t i = 1; i < d; ++i)
            if (std::fabs(eig.eigenvectors(i, k)) > std::fabs(eig.eigenvectors(imax, k))) imax = i;
        const double sign = eig.eigenvectors(imax, k) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < d; ++i) model.components(i, k) = sign * eig.eigenvectors(i, k);
    }
    return model;
}

// components^T . ((x - means) / scales)
inline Vec pca_transform_row(const PcaModel& model, std::span<const double> row) {
    const std::size_t d = model.input_dim();
    const std::size_t l = model.output_dim();
    if (row.size() != d)
        throw std::runtime_error("pca: row has " + std::to_string(row.size()) +
                                 " values, model expects " + std::to_string(d));
    Vec out(l, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        const double zi = (row[i] - model.column_means[i]) / model.column_scales[i];
        for (std::size_t k = 0; k < l; ++k) out[k] += model.components(i, k) * zi;
    }
    return out;
}

// Projects every row; output columns are named F_1..F_l.
inline FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& fm) {
    if (fm.cols() != model.input_dim())
        throw std::runtime_error("pca: matrix has " + std::to_string(fm.cols()) +
                                 " columns, model expects " + std::to_string(model.input_dim()));
    FeatureMatrix out;
    out.labels = fm.labels;
    out.values = Mat(fm.rows(), model.output_dim());
    for (std::size_t k = 0; k < model.output_dim(); ++k)
        out.column_names.push_back("F_" + std::to_string(k + 1));
    for (std::size_t r = 0; r < fm.rows(); ++r) {
        const Vec y = pca_transform_row(model, fm.values.row(r));
        for (std::size_t k = 0; k < y.size(); ++k) out.values(r, k) = y[k];
    }
    return out;
}

} // namespace imugest
