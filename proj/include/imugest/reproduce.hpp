#pragma once

// One-shot experiment runner: generates a synthetic multi-subject corpus,
// runs the full pipeline per sensor modality (all three classifiers, plus
// the two learning-curve sweeps), and writes every result file into an
// output directory. Everything downstream of the seed is deterministic, so
// two runs with the same configuration produce byte-identical output trees.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "imugest/eval.hpp"
#include "imugest/pipeline.hpp"
#include "imugest/serialize.hpp"
#include "imugest/signal.hpp"
#include "imugest/synth.hpp"

namespace imugest {

struct ReproduceConfig {
    std::string out_dir;
    std::uint64_t seed = 42;
    int n_subjects = 4;
    std::size_t n_classes = 6;
    Protocol protocol;
    double sample_rate = 148.15;
    double noise_rel = 0.3;  // white-noise level relative to pooled motif RMS
    double jitter = 0.1;
    double test_fraction = 0.2;
    std::size_t n_components = 10;
    DnnHyper dnn;
    int knn_k = 5;
    KnnWeighting knn_weighting = KnnWeighting::uniform;
    SvmHyper svm;
    std::vector<int> iteration_grid = {10, 25, 50, 75, 100, 150, 200, 300};
    std::vector<std::size_t> feature_grid = {1, 2, 4, 6, 8, 10};
};

struct ModalityResult {
    std::string name;  // "accel" or "gyro"
    double dnn_accuracy = 0.0;
    double knn_accuracy = 0.0;
    double svm_accuracy = 0.0;
    EvalReport dnn_report;
    std::vector<double> dnn_cost;  // training cost per iteration
    std::vector<std::pair<int, double>> iteration_curve;
    std::vector<std::pair<std::size_t, double>> feature_curve;
};

struct ReproduceResult {
    double noise_sigma = 0.0;  // absolute noise level actually used
    std::vector<ModalityResult> modalities;
};

namespace detail {

inline std::string subject_name(int i) {
    std::string n = std::to_string(i + 1);
    return "s" + std::string(n.size() < 2 ? 1 : 0, '0') + n;
}

inline void write_curve_csv(const std::string& path, const std::string& x_name,
                            const std::vector<std::pair<double, double>>& points) {
    Mat m(points.size(), 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        m(i, 0) = points[i].first;
        m(i, 1) = points[i].second;
    }
    write_numeric_csv(path, {x_name, "accuracy"}, m);
}

inline void write_confusion_csv(const std::string& path, const EvalReport& report) {
    const std::size_t k = report.confusion.size();
    Mat m(k, k);
    std::vector<std::string> header;
    for (std::size_t c = 0; c < k; ++c) header.push_back("pred_" + std::to_string(c));
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c)
            m(r, c) = static_cast<double>(report.confusion[r][c]);
    write_numeric_csv(path, header, m);
}

} // namespace detail

inline ReproduceResult run_reproduce(const ReproduceConfig& cfg, std::ostream* log = nullptr) {
    if (cfg.out_dir.empty()) throw std::runtime_error("reproduce: output directory required");
    if (cfg.n_subjects < 1) throw std::runtime_error("reproduce: need at least 1 subject");
    std::filesystem::create_directories(cfg.out_dir);
    const auto out = [&](const std::string& name) {
        return (std::filesystem::path(cfg.out_dir) / name).string();
    };
    const auto note = [&](const std::string& msg) {
        if (log) *log << "[reproduce] " << msg << "\n";
    };

    SynthSpec spec;
    spec.n_classes = cfg.n_classes;
    spec.protocol = cfg.protocol;
    spec.sample_rate = cfg.sample_rate;
    spec.jitter = cfg.jitter;
    spec.seed = cfg.seed;
    spec.noise_sigma = cfg.noise_rel * motif_rms(build_motifs(spec));

    ReproduceResult result;
    result.noise_sigma = spec.noise_sigma;

    // Corpus: one session per subject, split by sensor modality.
    std::vector<Segment> segments_accel, segments_gyro;
    for (int s = 0; s < cfg.n_subjects; ++s) {
        const std::string subject = detail::subject_name(s);
        const SynthRecording session = generate_recording(spec, subject);
        for (const Modality m : {Modality::accelerometer, Modality::gyroscope}) {
            const Recording rec = select_modality(session.recording, m);
            auto segs = segment_recording(rec, spec.protocol, session.labels);
            auto& sink = (m == Modality::accelerometer) ? segments_accel : segments_gyro;
            sink.insert(sink.end(), std::make_move_iterator(segs.begin()),
                        std::make_move_iterator(segs.end()));
        }
        note("generated subject " + subject);
    }

    const std::vector<std::string> accel_channels = [&] {
        std::vector<std::string> v;
        for (const auto& ch : spec.channels)
            if (is_accel_channel(ch)) v.push_back(ch);
        return v;
    }();
    const std::vector<std::string> gyro_channels = [&] {
        std::vector<std::string> v;
        for (const auto& ch : spec.channels)
            if (is_gyro_channel(ch)) v.push_back(ch);
        return v;
    }();

    struct Job {
        std::string name;
        const std::vector<Segment>* segments;
        const std::vector<std::string>* channels;
    };
    for (const Job& job : {Job{"accel", &segments_accel, &accel_channels},
                           Job{"gyro", &segments_gyro, &gyro_channels}}) {
        note("extracting " + job.name + " features (" + std::to_string(job.segments->size()) +
             " windows)");
        const FeatureMatrix fm = extract_features(*job.segments, *job.channels);
        save_feature_matrix(out("features_" + job.name + ".csv"), fm);

        const SplitDataset split = split_stratified(fm, cfg.test_fraction, cfg.seed);

        ModalityResult mres;
        mres.name = job.name;

        TrainOptions opt;
        opt.n_components = cfg.n_components;
        opt.dnn = cfg.dnn;
        opt.knn_k = cfg.knn_k;
        opt.knn_weighting = cfg.knn_weighting;
        opt.svm = cfg.svm;
        opt.seed = cfg.seed;

        opt.classifier = ClassifierKind::dnn;
        auto [dnn_model, trace] = train_pipeline(split.train, opt);
        mres.dnn_report = evaluate_pipeline(dnn_model, split.test);
        mres.dnn_accuracy = mres.dnn_report.accuracy;
        mres.dnn_cost = trace.cost_per_iteration;
        save_pipeline_file(out("model_" + job.name + "_dnn.txt"), dnn_model);
        note(job.name + " dnn test accuracy " + format_double(mres.dnn_accuracy));

        opt.classifier = ClassifierKind::knn;
        auto [knn_model, knn_trace] = train_pipeline(split.train, opt);
        mres.knn_accuracy = evaluate_pipeline(knn_model, split.test).accuracy;
        save_pipeline_file(out("model_" + job.name + "_knn.txt"), knn_model);
        note(job.name + " knn test accuracy " + format_double(mres.knn_accuracy));

        opt.classifier = ClassifierKind::svm;
        auto [svm_model, svm_trace] = train_pipeline(split.train, opt);
        mres.svm_accuracy = evaluate_pipeline(svm_model, split.test).accuracy;
        save_pipeline_file(out("model_" + job.name + "_svm.txt"), svm_model);
        note(job.name + " svm test accuracy " + format_double(mres.svm_accuracy));

        mres.iteration_curve =
            sweep_iterations(split, cfg.iteration_grid, cfg.n_components, cfg.dnn, cfg.seed);
        mres.feature_curve =
            sweep_features(split, cfg.feature_grid, cfg.dnn.iterations, cfg.dnn, cfg.seed);
        note(job.name + " sweeps done");

        // Cost trajectory of the headline net.
        {
            Mat m(mres.dnn_cost.size(), 2);
            for (std::size_t i = 0; i < mres.dnn_cost.size(); ++i) {
                m(i, 0) = static_cast<double>(i + 1);
                m(i, 1) = mres.dnn_cost[i];
            }
            write_numeric_csv(out("cost_" + job.name + ".csv"), {"iteration", "cost"}, m);
        }
        {
            std::vector<std::pair<double, double>> pts;
            for (const auto& [t, a] : mres.iteration_curve) pts.emplace_back(t, a);
            detail::write_curve_csv(out("curve_iterations_" + job.name + ".csv"), "iterations", pts);
        }
        {
            std::vector<std::pair<double, double>> pts;
            for (const auto& [l, a] : mres.feature_curve)
                pts.emplace_back(static_cast<double>(l), a);
            detail::write_curve_csv(out("curve_features_" + job.name + ".csv"), "components", pts);
        }
        detail::write_confusion_csv(out("confusion_" + job.name + "_dnn.csv"), mres.dnn_report);

        result.modalities.push_back(std::move(mres));
    }

    // Headline numbers, one `key value` pair per line.
    {
        const std::string path = out("report.txt");
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write '" + path + "'");
        os << "imugest-report 1\n";
        os << "seed " << cfg.seed << "\n";
        os << "subjects " << cfg.n_subjects << "\n";
        os << "classes " << cfg.n_classes << "\n";
        os << "noise_sigma " << format_double(result.noise_sigma) << "\n";
        os << "components " << cfg.n_components << "\n";
        os << "iterations " << cfg.dnn.iterations << "\n";
        for (const ModalityResult& m : result.modalities) {
            os << m.name << ".dnn.test_accuracy " << format_double(m.dnn_accuracy) << "\n";
            os << m.name << ".knn.test_accuracy " << format_double(m.knn_accuracy) << "\n";
            os << m.name << ".svm.test_accuracy " << format_double(m.svm_accuracy) << "\n";
            if (!m.dnn_cost.empty()) {
                os << m.name << ".dnn.first_cost " << format_double(m.dnn_cost.front()) << "\n";
                os << m.name << ".dnn.final_cost " << format_double(m.dnn_cost.back()) << "\n";
            }
        }
        os.flush();
        if (!os) throw std::runtime_error("write failed for '" + path + "'");
    }
    note("wrote " + out("report.txt"));
    return result;
}

} // namespace imugest
