#pragma once

// The ten per-channel time-domain features and assembly of the
// segment-by-feature matrix. Conventions, fixed across the library:
//   - variance and standard deviation use the n-1 denominator;
//   - third/fourth moments for skewness/kurtosis use the 1/n sum;
//   - mav is the absolute value of the segment mean, NOT the mean of
//     absolute values common elsewhere in the EMG literature;
//   - mobility is var(first difference)/var(x) without the square root the
//     classical Hjorth parameter takes.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imugest/csv.hpp"
#include "imugest/matrix.hpp"
#include "imugest/signal.hpp"

namespace imugest::features {

namespace detail {
inline void require(bool ok, const char* msg) {
    if (!ok) throw std::runtime_error(msg);
}
} // namespace detail

inline double mean(std::span<const double> x) {
    detail::require(!x.empty(), "mean: empty input");
    double s = 0.0;
    for (const double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// |mean(x)|
inline double mav(std::span<const double> x) {
    detail::require(!x.empty(), "mav: empty input");
    return std::fabs(mean(x));
}

inline double variance(std::span<const double> x) {
    detail::require(x.size() >= 2, "variance: need at least 2 samples");
    const double mu = mean(x);
    double s = 0.0;
    for (const double v : x) s += (v - mu) * (v - mu);
    return s / static_cast<double>(x.size() - 1);
}

inline double stdev(std::span<const double> x) { return std::sqrt(variance(x)); }

inline double rms(std::span<const double> x) {
    detail::require(!x.empty(), "rms: empty input");
    double s = 0.0;
    for (const double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

/// Waveform length: sum of absolute successive differences.
inline double waveform_length(std::span<const double> x) {
    detail::require(x.size() >= 2, "waveform_length: need at least 2 samples");
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) s += std::fabs(x[k + 1] - x[k]);
    return s;
}

// Order-p autoregressive coefficients a_1..a_p of x_n = sum_k a_k x_{n-k} + e,
// via Levinson-Durbin on the biased sample autocorrelation
// r(k) = (1/n) sum_t x_t x_{t+k}. The signal is used as-is (no demeaning).
inline std::vector<double> ar_coefficients(std::span<const double> x, int order) {
    detail::require(order >= 1, "ar: order must be >= 1");
    const std::size_t n = x.size();
    detail::require(n > static_cast<std::size_t>(order), "ar: signal shorter than order + 1");

    bool constant = true;
    for (std::size_t i = 1; i < n && constant; ++i) constant = (x[i] == x[0]);
    detail::require(!constant, "ar: constant signal is degenerate");

    const auto p = static_cast<std::size_t>(order);
    std::vector<double> r(p + 1, 0.0);
    for (std::size_t k = 0; k <= p; ++k) {
        double s = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) s += x[t] * x[t + k];
        r[k] = s / static_cast<double>(n);
    }
    detail::require(r[0] > 0.0, "ar: zero-power signal is degenerate");

    std::vector<double> a(p, 0.0);
    double err = r[0];
    for (std::size_t m = 1; m <= p; ++m) {
        double acc = r[m];
        for (std::size_t j = 1; j < m; ++j) acc -= a[j - 1] * r[m - j];
        const double k_m = acc / err;
        std::vector<double> next(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(m) - 1);
        for (std::size_t j = 1; j < m; ++j) next[j - 1] = a[j - 1] - k_m * a[m - j - 1];
        for (std::size_t j = 1; j < m; ++j) a[j - 1] = next[j - 1];
        a[m - 1] = k_m;
        err *= (1.0 - k_m * k_m);
        if (!(err > 0.0) || !std::isfinite(err))
            throw std::runtime_error("ar: autocorrelation is degenerate at lag " + std::to_string(m));
    }
    return a;
}

/// Third standardized moment, (1/n) sum (x-mu)^3 / sigma^3.
inline double skewness(std::span<const double> x) {
    detail::require(x.size() >= 2, "skewness: need at least 2 samples");
    const double mu = mean(x);
    const double sd = stdev(x);
    detail::require(sd > 0.0, "skewness: standard deviation is zero");
    double s = 0.0;
    for (const double v : x) s += (v - mu) * (v - mu) * (v - mu);
    return s / static_cast<double>(x.size()) / (sd * sd * sd);
}

/// var(first difference of x) / var(x).
inline double mobility(std::span<const double> x) {
    detail::require(x.size() >= 3, "mobility: need at least 3 samples");
    const double vx = variance(x);
    detail::require(vx > 0.0, "mobility: variance is zero");
    std::vector<double> d(x.size() - 1);
    for (std::size_t k = 0; k + 1 < x.size(); ++k) d[k] = x[k + 1] - x[k];
    return variance(d) / vx;
}

/// Fourth standardized moment, (1/n) sum (x-mu)^4 / sigma^4. Gaussian ~ 3.
inline double kurtosis(std::span<const double> x) {
    detail::require(x.size() >= 2, "kurtosis: need at least 2 samples");
    const double mu = mean(x);
    const double sd = stdev(x);
    detail::require(sd > 0.0, "kurtosis: standard deviation is zero");
    double s = 0.0;
    for (const double v : x) {
        const double c = (v - mu) * (v - mu);
        s += c * c;
    }
    return s / static_cast<double>(x.size()) / (sd * sd * sd * sd);
}

} // namespace imugest::features

namespace imugest {

inline constexpr int kDefaultArOrder = 4;

// Feature rows for a set of segments; column names are
// "<channel>.<feature>" ("<channel>.ar.<k>" for the AR block), labels
// aligned with rows.
struct FeatureMatrix {
    Mat values;
    std::vector<std::string> column_names;
    std::vector<int> labels;

    std::size_t rows() const { return values.rows(); }
    std::size_t cols() const { return values.cols(); }
};

inline std::vector<std::string> feature_column_names(const std::vector<std::string>& channels,
                                                     int ar_order) {
    std::vector<std::string> names;
    names.reserve(channels.size() * (9 + static_cast<std::size_t>(ar_order)));
    for (const auto& ch : channels) {
        names.push_back(ch + ".mean");
        names.push_back(ch + ".mav");
        names.push_back(ch + ".std");
        names.push_back(ch + ".rms");
        names.push_back(ch + ".var");
        names.push_back(ch + ".wl");
        for (int k = 1; k <= ar_order; ++k) names.push_back(ch + ".ar." + std::to_string(k));
        names.push_back(ch + ".skew");
        names.push_back(ch + ".mobility");
        names.push_back(ch + ".kurtosis");
    }
    return names;
}

// Per channel, columns in fixed order
// [mean, mav, std, rms, var, wl, ar_1..ar_p, skew, mobility, kurtosis];
// row order follows segment order. A failing feature is reported with the
// segment, channel and feature it came from.
inline FeatureMatrix extract_features(const std::vector<Segment>& segments,
                                      const std::vector<std::string>& channels,
                                      int ar_order = kDefaultArOrder) {
    if (ar_order < 1) throw std::runtime_error("extract_features: ar order must be >= 1");
    FeatureMatrix fm;
    fm.column_names = feature_column_names(channels, ar_order);
    fm.values = Mat(segments.size(), fm.column_names.size());
    fm.labels.reserve(segments.size());

    const std::size_t per_channel = 9 + static_cast<std::size_t>(ar_order);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const Segment& seg = segments[s];
        if (seg.samples.cols() != channels.size())
            throw std::runtime_error("extract_features: segment " + std::to_string(s) + " has " +
                                     std::to_string(seg.samples.cols()) + " channels, expected " +
                                     std::to_string(channels.size()));
        const std::size_t w = seg.samples.rows();
        std::vector<double> x(w);
        for (std::size_t c = 0; c < channels.size(); ++c) {
            for (std::size_t t = 0; t < w; ++t) x[t] = seg.samples(t, c);
            std::size_t col = c * per_channel;
            const char* stage = "";
            try {
                stage = "mean";
                fm.values(s, col++) = features::mean(x);
                stage = "mav";
                fm.values(s, col++) = features::mav(x);
                stage = "std";
                fm.values(s, col++) = features::stdev(x);
                stage = "rms";
                fm.values(s, col++) = features::rms(x);
                stage = "var";
                fm.values(s, col++) = features::variance(x);
                stage = "wl";
                fm.values(s, col++) = features::waveform_length(x);
                stage = "ar";
                const auto ar = features::ar_coefficients(x, ar_order);
                for (const double v : ar) fm.values(s, col++) = v;
                stage = "skew";
                fm.values(s, col++) = features::skewness(x);
                stage = "mobility";
                fm.values(s, col++) = features::mobility(x);
                stage = "kurtosis";
                fm.values(s, col++) = features::kurtosis(x);
            } catch (const std::exception& e) {
                throw std::runtime_error("segment " + std::to_string(s) + ", channel '" + channels[c] +
                                         "', feature " + stage + ": " + e.what());
            }
            for (std::size_t j = c * per_channel; j < col; ++j)
                if (!std::isfinite(fm.values(s, j)))
                    throw std::runtime_error("segment " + std::to_string(s) + ", channel '" +
                                             channels[c] + "': non-finite feature value in column " +
                                             fm.column_names[j]);
        }
        fm.labels.push_back(seg.label);
    }
    return fm;
}

// FeatureMatrix CSV: feature columns plus a trailing integer `label` column.
inline void save_feature_matrix(const std::string& path, const FeatureMatrix& fm) {
    std::vector<std::string> header = fm.column_names;
    header.push_back("label");
    Mat m(fm.rows(), fm.cols() + 1);
    for (std::size_t r = 0; r < fm.rows(); ++r) {
        for (std::size_t c = 0; c < fm.cols(); ++c) m(r, c) = fm.values(r, c);
        m(r, fm.cols()) = fm.labels[r];
    }
    write_numeric_csv(path, header, m);
}

inline FeatureMatrix load_feature_matrix(const std::string& path) {
    NumericCsv csv = read_numeric_csv(path);
    if (csv.header.empty() || csv.header.back() != "label")
        throw std::runtime_error("'" + path + "': last column must be 'label'");
    if (csv.values.rows() == 0) throw std::runtime_error("'" + path + "': no rows");

    FeatureMatrix fm;
    fm.column_names.assign(csv.header.begin(), csv.header.end() - 1);
    fm.values = Mat(csv.values.rows(), fm.column_names.size());
    for (std::size_t r = 0; r < csv.values.rows(); ++r) {
        for (std::size_t c = 0; c < fm.column_names.size(); ++c) fm.values(r, c) = csv.values(r, c);
        const double dl = csv.values(r, fm.column_names.size());
        const auto lab = static_cast<int>(dl);
        if (dl != static_cast<double>(lab) || lab < 0)
            throw std::runtime_error("'" + path + "': row " + std::to_string(r + 1) +
                                     ": label must be a non-negative integer");
        fm.labels.push_back(lab);
    }
    return fm;
}

} // namespace imugest
