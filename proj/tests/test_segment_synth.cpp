#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "imugest/eval.hpp"
#include "imugest/features.hpp"
#include "imugest/knn.hpp"
#include "imugest/signal.hpp"
#include "imugest/synth.hpp"

using namespace imugest;

TEST_CASE("window arithmetic at the stock timing") {
    const Protocol proto;
    const double rate = 148.15;
    CHECK(window_length(proto, rate) == 444);
    CHECK(window_start(proto, rate, 0) == 74);
    for (std::int64_t i = 0; i < 120; ++i) {
        const double seconds = 0.5 + static_cast<double>(i) * 8.0;
        CHECK(window_start(proto, rate, i) == std::llround(seconds * rate));
    }
}

TEST_CASE("zero-delay unit windows tile the recording") {
    Protocol proto;
    proto.stimulus_duration = 1.0;
    proto.rest_duration = 0.0;
    proto.hardware_delay = 0.0;

    Recording rec;
    rec.sample_rate = 10.0;
    rec.channels = {"s1_ax"};
    rec.samples = Mat(100, 1);
    for (std::size_t t = 0; t < 100; ++t) rec.samples(t, 0) = static_cast<double>(t);

    const std::vector<int> labels(10, 0);
    const auto segments = segment_recording(rec, proto, labels);
    REQUIRE(segments.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(window_start(proto, rec.sample_rate, static_cast<std::int64_t>(i)) ==
              static_cast<std::int64_t>(10 * i));
        REQUIRE(segments[i].samples.rows() == 10);
        for (std::size_t t = 0; t < 10; ++t)  // verbatim copy of the source slice
            CHECK(segments[i].samples(t, 0) == static_cast<double>(10 * i + t));
        CHECK(segments[i].repetition == static_cast<int>(i));
    }
}

TEST_CASE("a recording exactly one window long yields one segment") {
    const Protocol proto;  // delay 0.5 s, stimulus 3 s at 148.15 Hz: 74 + 444 samples
    Recording rec;
    rec.sample_rate = 148.15;
    rec.channels = {"s1_ax"};
    rec.samples = Mat(518, 1, 1.5);

    const auto segments = segment_recording(rec, proto, {3});
    REQUIRE(segments.size() == 1);
    CHECK(segments[0].samples.rows() == 444);
    CHECK(segments[0].label == 3);

    Recording short_rec = rec;
    short_rec.samples = Mat(517, 1, 1.5);
    CHECK_THROWS_WITH(segment_recording(short_rec, proto, {3}),
                      Catch::Matchers::ContainsSubstring("window 0"));
}

TEST_CASE("synthetic default session has the documented shape") {
    SynthSpec spec;
    spec.noise_sigma = 0.05;
    const SynthRecording session = generate_recording(spec, "s01");

    // long enough for 120 windows of the stock protocol
    const auto min_len = std::llround((0.5 + 120.0 * 8.0 - 5.0) * 148.15);
    CHECK(session.recording.samples.rows() >= static_cast<std::size_t>(min_len));
    CHECK(session.recording.samples.cols() == 18);  // 3 sensors x 3 axes x 2 modalities
    REQUIRE(session.labels.size() == 120);

    std::map<int, int> counts;
    for (const int l : session.labels) ++counts[l];
    REQUIRE(counts.size() == 6);
    for (const auto& [label, n] : counts) {
        CHECK(label >= 0);
        CHECK(label < 6);
        CHECK(n == 20);  // balanced: repetitions per class
    }

    const auto segments = segment_recording(session.recording, spec.protocol, session.labels);
    REQUIRE(segments.size() == 120);
    for (const Segment& seg : segments) CHECK(seg.samples.rows() == 444);

    // same spec and subject: byte-identical output
    const SynthRecording again = generate_recording(spec, "s01");
    CHECK(again.recording.samples == session.recording.samples);
    CHECK(again.labels == session.labels);

    // another subject: same shape, different samples
    const SynthRecording other = generate_recording(spec, "s02");
    CHECK(other.recording.samples.rows() == session.recording.samples.rows());
    CHECK(other.recording.samples != session.recording.samples);
}

TEST_CASE("without noise and jitter all repetitions of a class coincide") {
    SynthSpec spec;
    spec.noise_sigma = 0.0;
    spec.jitter = 0.0;
    const SynthRecording session = generate_recording(spec, "s01");
    const auto segments = segment_recording(session.recording, spec.protocol, session.labels);

    std::map<int, const Segment*> first;
    for (const Segment& seg : segments) {
        const auto [it, inserted] = first.try_emplace(seg.label, &seg);
        if (!inserted) CHECK(seg.samples == it->second->samples);
    }
    REQUIRE(first.size() == 6);

    // distinct classes have distinct waveforms
    CHECK(first.at(0)->samples != first.at(1)->samples);
}

TEST_CASE("jitter scales a fixed motif per repetition") {
    SynthSpec spec;
    spec.noise_sigma = 0.0;
    spec.jitter = 0.1;
    const SynthRecording session = generate_recording(spec, "s01");
    const auto segments = segment_recording(session.recording, spec.protocol, session.labels);

    // two same-class windows are proportional: a*gb == b*ga elementwise
    const Segment* a = nullptr;
    const Segment* b = nullptr;
    for (const Segment& seg : segments) {
        if (seg.label != 2) continue;
        if (!a) {
            a = &seg;
        } else {
            b = &seg;
            break;
        }
    }
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);
    double num = 0.0, den = 0.0;  // least-squares gain ratio
    for (std::size_t t = 0; t < a->samples.rows(); ++t)
        for (std::size_t c = 0; c < a->samples.cols(); ++c) {
            num += a->samples(t, c) * b->samples(t, c);
            den += a->samples(t, c) * a->samples(t, c);
        }
    const double ratio = num / den;
    CHECK(ratio != Catch::Approx(1.0).epsilon(1e-6));  // jitter actually moved the gain
    for (std::size_t t = 0; t < a->samples.rows(); ++t)
        for (std::size_t c = 0; c < a->samples.cols(); ++c)
            CHECK(b->samples(t, c) == Catch::Approx(ratio * a->samples(t, c)).margin(1e-9));
}

TEST_CASE("noiseless features make the held-out set trivially memorizable") {
    SynthSpec spec;
    spec.noise_sigma = 0.0;
    spec.jitter = 0.1;
    const SynthRecording session = generate_recording(spec, "s01");
    const Recording accel = select_modality(session.recording, Modality::accelerometer);
    const auto segments = segment_recording(accel, spec.protocol, session.labels);
    FeatureMatrix fm = extract_features(segments, accel.channels);
    fm.labels = session.labels;

    const SplitDataset split = split_stratified(fm, 0.2, 42);
    KnnModel nn;
    nn.points = split.train.values;
    nn.labels = split.train.labels;
    nn.k = 1;
    std::size_t correct = 0;
    for (std::size_t r = 0; r < split.test.rows(); ++r)
        if (knn_predict(nn, split.test.values.row(r)) == split.test.labels[r]) ++correct;
    CHECK(correct == split.test.rows());
}

TEST_CASE("modality split keeps nine channels per instrument") {
    SynthSpec spec;
    spec.noise_sigma = 0.01;
    const SynthRecording session = generate_recording(spec, "s01");

    const Recording accel = select_modality(session.recording, Modality::accelerometer);
    REQUIRE(accel.channels.size() == 9);
    for (const auto& ch : accel.channels) CHECK(is_accel_channel(ch));

    const Recording gyro = select_modality(session.recording, Modality::gyroscope);
    REQUIRE(gyro.channels.size() == 9);
    for (const auto& ch : gyro.channels) CHECK(is_gyro_channel(ch));

    CHECK(infer_modality(session.recording.channels) == Modality::both);
    CHECK(infer_modality(accel.channels) == Modality::accelerometer);
}

TEST_CASE("synthetic spec validation") {
    SynthSpec bad;
    bad.n_classes = 1;
    CHECK_THROWS(build_motifs(bad));
    SynthSpec neg;
    neg.noise_sigma = -0.1;
    CHECK_THROWS(generate_recording(neg, "s01"));
}
