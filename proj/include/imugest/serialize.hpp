#pragma once

// Plain-text model files. Doubles are written in shortest round-trip form,
// so a save/load cycle reproduces every model bit for bit. Layout is
// line-oriented: a magic line, a kind line, the kind's fields, and an `end`
// sentinel that catches truncated files.

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "imugest/matrix.hpp"
#include "imugest/pipeline.hpp"
#include "imugest/textio.hpp"

namespace imugest {

inline constexpr std::string_view kModelMagic = "imugest-model 1";

namespace detail {

inline std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> out;
    for (const auto tok : split(line, ' '))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

class ModelWriter {
public:
    explicit ModelWriter(std::ostream& os) : os_(os) {}

    void magic(std::string_view kind) { os_ << kModelMagic << "\nkind " << kind << "\n"; }
    void end() { os_ << "end\n"; }

    void scalar(std::string_view key, std::string_view token) { os_ << key << ' ' << token << '\n'; }
    void scalar(std::string_view key, double v) { scalar(key, format_double(v)); }
    void scalar(std::string_view key, std::int64_t v) { scalar(key, std::string_view(std::to_string(v))); }
    void scalar(std::string_view key, std::uint64_t v) { scalar(key, std::string_view(std::to_string(v))); }

    template <typename T>
    void vector(std::string_view key, const std::vector<T>& v) {
        os_ << key << ' ' << v.size();
        for (const T& x : v) {
            if constexpr (std::is_same_v<T, double>)
                os_ << ' ' << format_double(x);
            else
                os_ << ' ' << std::to_string(x);
        }
        os_ << '\n';
    }

    void names(std::string_view key, const std::vector<std::string>& v) {
        os_ << key << ' ' << v.size() << '\n';
        for (const auto& s : v) os_ << s << '\n';
    }

    void matrix(std::string_view key, const Mat& m) {
        os_ << key << ' ' << m.rows() << ' ' << m.cols() << '\n';
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c)
                os_ << (c ? " " : "") << format_double(m(r, c));
            os_ << '\n';
        }
    }

private:
    std::ostream& os_;
};

class ModelReader {
public:
    explicit ModelReader(std::istream& is, std::string origin)
        : is_(is), origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& why) const {
        throw std::runtime_error(origin_ + " line " + std::to_string(line_no_) + ": " + why);
    }

    std::string raw_line() {
        if (!std::getline(is_, line_)) fail("unexpected end of file");
        ++line_no_;
        while (!line_.empty() && (line_.back() == '\r' || line_.back() == '\n')) line_.pop_back();
        return line_;
    }

    std::vector<std::string_view> record(std::string_view key, std::size_t n_values) {
        line_ = raw_line();
        auto toks = tokenize(line_);
        if (toks.empty() || toks[0] != key)
            fail("expected '" + std::string(key) + "', got '" + line_ + "'");
        if (toks.size() != n_values + 1)
            fail("'" + std::string(key) + "' needs " + std::to_string(n_values) + " value(s), got " +
                 std::to_string(toks.size() - 1));
        return {toks.begin() + 1, toks.end()};
    }

    void expect_magic(std::string_view kind) {
        if (trim(raw_line()) != kModelMagic) fail("not a model file (bad magic line)");
        const auto k = record("kind", 1)[0];
        if (k != kind) fail("model kind is '" + std::string(k) + "', expected '" + std::string(kind) + "'");
    }

    void expect_end() {
        if (trim(raw_line()) != "end") fail("expected 'end'");
    }

    std::string scalar(std::string_view key) { return std::string(record(key, 1)[0]); }
    double number(std::string_view key) { return parse_double(scalar(key), key); }
    std::int64_t integer(std::string_view key) { return parse_ll(scalar(key), key); }
    std::uint64_t unsigned64(std::string_view key) { return parse_u64(scalar(key), key); }

    std::vector<double> vector(std::string_view key) {
        line_ = raw_line();
        auto toks = tokenize(line_);
        if (toks.size() < 2 || toks[0] != key) fail("expected vector '" + std::string(key) + "'");
        const auto n = static_cast<std::size_t>(parse_ll(toks[1], "vector length"));
        if (toks.size() != n + 2) fail("vector '" + std::string(key) + "' length mismatch");
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = parse_double(toks[i + 2], key);
        return v;
    }

    std::vector<std::int64_t> ivector(std::string_view key) {
        line_ = raw_line();
        auto toks = tokenize(line_);
        if (toks.size() < 2 || toks[0] != key) fail("expected vector '" + std::string(key) + "'");
        const auto n = static_cast<std::size_t>(parse_ll(toks[1], "vector length"));
        if (toks.size() != n + 2) fail("vector '" + std::string(key) + "' length mismatch");
        std::vector<std::int64_t> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = parse_ll(toks[i + 2], key);
        return v;
    }

    std::vector<std::string> names(std::string_view key) {
        const auto n = static_cast<std::size_t>(parse_ll(record(key, 1)[0], "name count"));
        std::vector<std::string> v;
        v.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::string s = raw_line();
            if (s.empty()) fail("empty name in '" + std::string(key) + "'");
            v.push_back(std::move(s));
        }
        return v;
    }

    Mat matrix(std::string_view key) {
        const auto dims = record(key, 2);
        const auto rows = static_cast<std::size_t>(parse_ll(dims[0], "row count"));
        const auto cols = static_cast<std::size_t>(parse_ll(dims[1], "column count"));
        Mat m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            line_ = raw_line();
            auto toks = tokenize(line_);
            if (toks.size() != cols)
                fail("matrix '" + std::string(key) + "' row " + std::to_string(r + 1) + " has " +
                     std::to_string(toks.size()) + " values, expected " + std::to_string(cols));
            for (std::size_t c = 0; c < cols; ++c) m(r, c) = parse_double(toks[c], key);
        }
        return m;
    }

private:
    std::istream& is_;
    std::string origin_;
    std::string line_;
    std::size_t line_no_ = 0;
};

// ---- per-kind bodies (shared between standalone files and pipeline files)

inline void write_pca_body(ModelWriter& w, const PcaModel& m) {
    w.vector("means", m.column_means);
    w.vector("scales", m.column_scales);
    w.vector("eigenvalues", m.eigenvalues);
    w.matrix("components", m.components);
}

inline PcaModel read_pca_body(ModelReader& r) {
    PcaModel m;
    m.column_means = r.vector("means");
    m.column_scales = r.vector("scales");
    m.eigenvalues = r.vector("eigenvalues");
    m.components = r.matrix("components");
    if (m.components.rows() != m.column_means.size() ||
        m.column_scales.size() != m.column_means.size() ||
        m.components.cols() != m.eigenvalues.size())
        r.fail("inconsistent projection dimensions");
    return m;
}

inline void write_dnn_body(ModelWriter& w, const DnnModel& m) {
    std::vector<std::int64_t> sizes(m.layer_sizes.begin(), m.layer_sizes.end());
    w.vector("layers", sizes);
    w.scalar("seed", m.seed);
    w.scalar("learning_rate", m.hyper.learning_rate);
    w.scalar("iterations", static_cast<std::int64_t>(m.hyper.iterations));
    w.scalar("l2", m.hyper.l2);
    w.scalar("n_weight_matrices", static_cast<std::int64_t>(m.weights.size()));
    for (std::size_t i = 0; i < m.weights.size(); ++i)
        w.matrix("W" + std::to_string(i), m.weights[i]);
}

inline DnnModel read_dnn_body(ModelReader& r) {
    DnnModel m;
    for (const auto s : r.ivector("layers")) {
        if (s < 1) r.fail("layer sizes must be positive");
        m.layer_sizes.push_back(static_cast<std::size_t>(s));
    }
    m.seed = r.unsigned64("seed");
    m.hyper.learning_rate = r.number("learning_rate");
    m.hyper.iterations = static_cast<int>(r.integer("iterations"));
    m.hyper.l2 = r.number("l2");
    const auto n = static_cast<std::size_t>(r.integer("n_weight_matrices"));
    for (std::size_t i = 0; i < n; ++i) m.weights.push_back(r.matrix("W" + std::to_string(i)));
    try {
        validate_dnn(m);
    } catch (const std::exception& e) {
        r.fail(e.what());
    }
    return m;
}

inline void write_knn_body(ModelWriter& w, const KnnModel& m) {
    w.scalar("k", static_cast<std::int64_t>(m.k));
    w.scalar("weighting", m.weighting == KnnWeighting::uniform ? std::string_view("uniform")
                                                               : std::string_view("inverse_distance"));
    std::vector<std::int64_t> labels(m.labels.begin(), m.labels.end());
    w.vector("labels", labels);
    w.matrix("points", m.points);
}

inline KnnModel read_knn_body(ModelReader& r) {
    KnnModel m;
    m.k = static_cast<int>(r.integer("k"));
    const std::string weighting = r.scalar("weighting");
    if (weighting == "uniform")
        m.weighting = KnnWeighting::uniform;
    else if (weighting == "inverse_distance")
        m.weighting = KnnWeighting::inverse_distance;
    else
        r.fail("unknown weighting '" + weighting + "'");
    for (const auto l : r.ivector("labels")) m.labels.push_back(static_cast<int>(l));
    m.points = r.matrix("points");
    try {
        validate_knn(m);
    } catch (const std::exception& e) {
        r.fail(e.what());
    }
    return m;
}

inline void write_svm_body(ModelWriter& w, const SvmModel& m) {
    w.scalar("lambda", m.hyper.lambda);
    w.scalar("epochs", static_cast<std::int64_t>(m.hyper.epochs));
    w.scalar("seed", m.hyper.seed);
    w.vector("biases", m.biases);
    w.matrix("weights", m.weights);
}

inline SvmModel read_svm_body(ModelReader& r) {
    SvmModel m;
    m.hyper.lambda = r.number("lambda");
    m.hyper.epochs = static_cast<int>(r.integer("epochs"));
    m.hyper.seed = r.unsigned64("seed");
    m.biases = r.vector("biases");
    m.weights = r.matrix("weights");
    if (m.weights.rows() != m.biases.size()) r.fail("bias count does not match class count");
    return m;
}

} // namespace detail

// ---- standalone single-model files

inline void save_pca(std::ostream& os, const PcaModel& m) {
    detail::ModelWriter w(os);
    w.magic("pca");
    detail::write_pca_body(w, m);
    w.end();
}

inline PcaModel load_pca(std::istream& is, const std::string& origin = "model") {
    detail::ModelReader r(is, origin);
    r.expect_magic("pca");
    PcaModel m = detail::read_pca_body(r);
    r.expect_end();
    return m;
}

inline void save_dnn(std::ostream& os, const DnnModel& m) {
    detail::ModelWriter w(os);
    w.magic("dnn");
    detail::write_dnn_body(w, m);
    w.end();
}

inline DnnModel load_dnn(std::istream& is, const std::string& origin = "model") {
    detail::ModelReader r(is, origin);
    r.expect_magic("dnn");
    DnnModel m = detail::read_dnn_body(r);
    r.expect_end();
    return m;
}

inline void save_knn(std::ostream& os, const KnnModel& m) {
    detail::ModelWriter w(os);
    w.magic("knn");
    detail::write_knn_body(w, m);
    w.end();
}

inline KnnModel load_knn(std::istream& is, const std::string& origin = "model") {
    detail::ModelReader r(is, origin);
    r.expect_magic("knn");
    KnnModel m = detail::read_knn_body(r);
    r.expect_end();
    return m;
}

inline void save_svm(std::ostream& os, const SvmModel& m) {
    detail::ModelWriter w(os);
    w.magic("svm");
    detail::write_svm_body(w, m);
    w.end();
}

inline SvmModel load_svm(std::istream& is, const std::string& origin = "model") {
    detail::ModelReader r(is, origin);
    r.expect_magic("svm");
    SvmModel m = detail::read_svm_body(r);
    r.expect_end();
    return m;
}

// ---- full pipeline files

inline void save_pipeline(std::ostream& os, const PipelineModel& m) {
    detail::ModelWriter w(os);
    w.magic("pipeline");
    w.scalar("classifier", classifier_kind_name(m.kind));
    w.scalar("n_classes", static_cast<std::int64_t>(m.n_classes));
    w.names("feature_names", m.feature_names);
    w.scalar("scaler", static_cast<std::int64_t>(m.scaler ? 1 : 0));
    if (m.scaler) {
        w.vector("scaler_means", m.scaler->means);
        w.vector("scaler_scales", m.scaler->scales);
    }
    detail::write_pca_body(w, m.pca);
    switch (m.kind) {
        case ClassifierKind::dnn: detail::write_dnn_body(w, std::get<DnnModel>(m.classifier)); break;
        case ClassifierKind::knn: detail::write_knn_body(w, std::get<KnnModel>(m.classifier)); break;
        case ClassifierKind::svm: detail::write_svm_body(w, std::get<SvmModel>(m.classifier)); break;
    }
    w.end();
}

inline PipelineModel load_pipeline(std::istream& is, const std::string& origin = "model") {
    detail::ModelReader r(is, origin);
    r.expect_magic("pipeline");
    PipelineModel m;
    m.kind = parse_classifier_kind(r.scalar("classifier"));
    m.n_classes = static_cast<std::size_t>(r.integer("n_classes"));
    m.feature_names = r.names("feature_names");
    if (r.integer("scaler") != 0) {
        Standardizer s;
        s.means = r.vector("scaler_means");
        s.scales = r.vector("scaler_scales");
        if (s.means.size() != s.scales.size()) r.fail("scaler dimension mismatch");
        m.scaler = std::move(s);
    }
    m.pca = detail::read_pca_body(r);
    switch (m.kind) {
        case ClassifierKind::dnn: m.classifier = detail::read_dnn_body(r); break;
        case ClassifierKind::knn: m.classifier = detail::read_knn_body(r); break;
        case ClassifierKind::svm: m.classifier = detail::read_svm_body(r); break;
    }
    r.expect_end();
    if (m.feature_names.size() != m.pca.input_dim()) r.fail("feature name count does not match projection");
    return m;
}

// ---- path convenience wrappers

inline void save_pipeline_file(const std::string& path, const PipelineModel& m) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write '" + path + "'");
    save_pipeline(os, m);
    os.flush();
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

inline PipelineModel load_pipeline_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    return load_pipeline(is, "'" + path + "'");
}

} // namespace imugest
