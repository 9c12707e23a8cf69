#pragma once

// Column-wise zero-mean/unit-variance rescaling. Columns with (numerically)
// zero spread are centered but left unscaled.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imugest/matrix.hpp"

namespace imugest {

struct Standardizer {
    std::vector<double> means;
    std::vector<double> scales;
};

inline Standardizer fit_standardizer(const Mat& x) {
    if (x.rows() < 2) throw std::runtime_error("standardizer: need at least 2 rows");
    Standardizer s;
    s.means.resize(x.cols());
    s.scales.assign(x.cols(), 1.0);
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double mu = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) mu += x(r, c);
        mu /= static_cast<double>(x.rows());
        double ss = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double d = x(r, c) - mu;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(x.rows() - 1));
        s.means[c] = mu;
        if (sd > 1e-12 * (1.0 + std::abs(mu))) s.scales[c] = sd;
    }
    return s;
}

inline Vec standardize_row(const Standardizer& s, std::span<const double> row) {
    if (row.size() != s.means.size())
        throw std::runtime_error("standardizer: row has " + std::to_string(row.size()) +
                                 " values, expected " + std::to_string(s.means.size()));
    Vec out(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) out[c] = (row[c] - s.means[c]) / s.scales[c];
    return out;
}

inline Mat standardize(const Standardizer& s, const Mat& x) {
    Mat out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const Vec v = standardize_row(s, x.row(r));
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = v[c];
    }
    return out;
}

} // namespace imugest
