// End-to-end library walkthrough: synthesize one subject's session, segment
// it into gesture windows, extract accelerometer features, reduce them with
// PCA and compare the three classifiers on a held-out split.

#include <iostream>

#include "imugest/imugest.hpp"

int main() {
    using namespace imugest;

    SynthSpec spec;  // 6 gesture classes, stock protocol, seed 42
    const std::vector<Mat> motifs = build_motifs(spec);
    spec.noise_sigma = 0.3 * motif_rms(motifs);
    const SynthRecording session = generate_recording(spec, "demo", motifs);
    std::cout << "session: " << session.recording.samples.rows() << " samples x "
              << session.recording.samples.cols() << " channels, "
              << session.labels.size() << " labelled windows\n";

    const Recording accel = select_modality(session.recording, Modality::accelerometer);
    const std::vector<Segment> segments =
        segment_recording(accel, spec.protocol, session.labels);
    FeatureMatrix fm = extract_features(segments, accel.channels);
    fm.labels = session.labels;
    std::cout << "features: " << fm.values.rows() << " windows x "
              << fm.values.cols() << " columns\n";

    const SplitDataset split = split_stratified(fm, 0.2, spec.seed);
    for (const ClassifierKind kind :
         {ClassifierKind::dnn, ClassifierKind::knn, ClassifierKind::svm}) {
        TrainOptions opt;
        opt.classifier = kind;
        const auto [model, trace] = train_pipeline(split.train, opt);
        const EvalReport report = evaluate_pipeline(model, split.test);
        std::cout << classifier_kind_name(kind) << " test accuracy "
                  << format_double(report.accuracy) << "\n";
        if (kind == ClassifierKind::dnn && !trace.cost_per_iteration.empty())
            std::cout << "  training cost " << format_double(trace.cost_per_iteration.front())
                      << " -> " << format_double(trace.cost_per_iteration.back()) << "\n";
    }
    return 0;
}
