#pragma once

/// End-to-end gesture model: PCA projection of the time-domain feature vector
// followed by one of three classifiers. The margin classifier consumes
// re-standardized scores — hinge loss mis-weights coordinates when component
// variances differ by orders of magnitude — while the neural net and the
// neighbour vote use the raw PCA scores: their spread (the component standard
// deviations) drives the first-layer gradients, and flattening it measurably
// slows full-batch training at the stock step size.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "imugest/dnn.hpp"
#include "imugest/eval.hpp"
#include "imugest/features.hpp"
#include "imugest/knn.hpp"
#include "imugest/pca.hpp"
#include "imugest/standardize.hpp"
#include "imugest/svm.hpp"

namespace imugest {

enum class ClassifierKind { dnn, knn, svm };

inline std::string_view classifier_kind_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::dnn: return "dnn";
        case ClassifierKind::knn: return "knn";
        default: return "svm";
    }
}

inline ClassifierKind parse_classifier_kind(std::string_view name) {
    if (name == "dnn") return ClassifierKind::dnn;
    if (name == "knn") return ClassifierKind::knn;
    if (name == "svm") return ClassifierKind::svm;
    throw std::runtime_error("unknown classifier '" + std::string(name) +
                             "' (expected dnn, knn or svm)");
}

struct TrainOptions {
    ClassifierKind classifier = ClassifierKind::dnn;
    std::size_t n_components = 10;
    std::vector<std::size_t> hidden_layers = {15, 15, 15};
    DnnHyper dnn;
    int knn_k = 5;
    KnnWeighting knn_weighting = KnnWeighting::uniform;
    SvmHyper svm;
    std::uint64_t seed = 42;
};

struct PipelineModel {
    PcaModel pca;
    ClassifierKind kind = ClassifierKind::dnn;
    std::optional<Standardizer> scaler;  // present for the margin classifier only
    std::variant<DnnModel, KnnModel, SvmModel> classifier;
    std::vector<std::string> feature_names;  // expected raw input columns
    std::size_t n_classes = 0;
};

// Fits PCA and the chosen classifier on the training rows. The returned
// trace is non-empty for the neural net only.
inline std::pair<PipelineModel, TrainTrace> train_pipeline(const FeatureMatrix& train,
                                                           const TrainOptions& opt) {
    PipelineModel model;
    model.kind = opt.classifier;
    model.feature_names = train.column_names;
    model.n_classes = count_classes(train.labels);
    if (model.n_classes < 2) throw std::runtime_error("train: need at least 2 classes");

    model.pca = fit_pca(train, opt.n_components);
    const FeatureMatrix scores = pca_transform(model.pca, train);

    TrainTrace trace;
    switch (opt.classifier) {
        case ClassifierKind::dnn: {
            std::vector<std::size_t> layers;
            layers.push_back(opt.n_components);
            layers.insert(layers.end(), opt.hidden_layers.begin(), opt.hidden_layers.end());
            layers.push_back(model.n_classes);
            auto [dnn, t] = train_dnn(scores.values, one_hot(scores.labels, model.n_classes),
                                      layers, opt.dnn, opt.seed);
            model.classifier = std::move(dnn);
            trace = std::move(t);
            break;
        }
        case ClassifierKind::knn: {
            KnnModel knn;
            knn.points = scores.values;
            knn.labels = scores.labels;
            knn.k = opt.knn_k;
            knn.weighting = opt.knn_weighting;
            validate_knn(knn);
            model.classifier = std::move(knn);
            break;
        }
        case ClassifierKind::svm: {
            Standardizer scaler = fit_standardizer(scores.values);
            const Mat scaled = standardize(scaler, scores.values);
            model.scaler = std::move(scaler);
            model.classifier = svm_train(scaled, scores.labels, opt.svm);
            break;
        }
    }
    return {std::move(model), std::move(trace)};
}

// Classifies one raw feature row (same columns the model was trained on).
inline int pipeline_predict(const PipelineModel& model, std::span<const double> row) {
    Vec scores = pca_transform_row(model.pca, row);
    if (model.scaler) scores = standardize_row(*model.scaler, scores);
    switch (model.kind) {
        case ClassifierKind::dnn: return dnn_predict(std::get<DnnModel>(model.classifier), scores).first;
        case ClassifierKind::knn: return knn_predict(std::get<KnnModel>(model.classifier), scores);
        default: return svm_predict(std::get<SvmModel>(model.classifier), scores);
    }
}

inline EvalReport evaluate_pipeline(const PipelineModel& model, const FeatureMatrix& test) {
    if (!test.column_names.empty() && !model.feature_names.empty() &&
        test.column_names != model.feature_names)
        throw std::runtime_error("evaluate: feature columns differ from the model's training columns");
    return evaluate([&](std::span<const double> row) { return pipeline_predict(model, row); }, test);
}

} // namespace imugest
