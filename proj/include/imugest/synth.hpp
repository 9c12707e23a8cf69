#pragma once

// Synthetic IMU session generator. Each gesture class gets a fixed
// per-channel motif (a short sum of enveloped sinusoid bursts); a session is
// the protocol timeline with one motif instance per stimulus window, a small
// per-window amplitude jitter, and white noise over the whole recording.
//
// Randomness is split into two independent streams so that data sets are
// reproducible and comparable across subjects:
//   * the motif stream depends on the seed only — every subject performs the
//     same gesture shapes;
//   * the subject stream depends on (seed, subject id) — label order, window
//     gains and measurement noise differ per subject.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "imugest/matrix.hpp"
#include "imugest/rng.hpp"
#include "imugest/signal.hpp"

namespace imugest {

inline std::vector<std::string> synth_channel_names(int n_sensors = 3) {
    std::vector<std::string> names;
    for (int s = 1; s <= n_sensors; ++s)
        for (const char part : {'a', 'g'})
            for (const char axis : {'x', 'y', 'z'})
                names.push_back("s" + std::to_string(s) + "_" + part + axis);
    return names;
}

struct SynthSpec {
    std::size_t n_classes = 6;
    std::vector<std::string> channels = synth_channel_names();
    Protocol protocol;
    double sample_rate = 148.15;
    double noise_sigma = 0.0;  // white-noise standard deviation, signal units
    double jitter = 0.1;       // relative per-window amplitude variation
    std::uint64_t seed = 42;
};

inline void validate_synth_spec(const SynthSpec& spec) {
    if (spec.n_classes < 2) throw std::runtime_error("synth: need at least 2 classes");
    if (spec.channels.empty()) throw std::runtime_error("synth: need at least 1 channel");
    if (!(spec.sample_rate > 0.0)) throw std::runtime_error("synth: sample_rate must be positive");
    if (!(spec.noise_sigma >= 0.0)) throw std::runtime_error("synth: noise_sigma must be >= 0");
    if (!(spec.jitter >= 0.0 && spec.jitter < 1.0))
        throw std::runtime_error("synth: jitter must be in [0, 1)");
    validate_protocol(spec.protocol);
    if (window_length(spec.protocol, spec.sample_rate) < 1)
        throw std::runtime_error("synth: stimulus window rounds to zero samples");
}

namespace detail {
constexpr std::uint64_t kMotifStream = 0x180B;

inline double hann(std::size_t t, std::size_t w) {
    if (w < 2) return 1.0;
    return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(t) /
                                 static_cast<double>(w - 1)));
}
} // namespace detail

// One motif per class: [window_length x n_channels], identical for every
// subject generated from the same seed.
inline std::vector<Mat> build_motifs(const SynthSpec& spec) {
    validate_synth_spec(spec);
    const auto w = static_cast<std::size_t>(window_length(spec.protocol, spec.sample_rate));
    RandomStream rng(mix_seed(spec.seed, detail::kMotifStream));

    std::vector<Mat> motifs;
    motifs.reserve(spec.n_classes);
    for (std::size_t k = 0; k < spec.n_classes; ++k) {
        // A class is a chord of two burst frequencies plus a channel
        // activation pattern: every channel plays the class chord with its
        // own phase, loudly on the class's active channels and faintly on
        // the rest. Activation follows the sensor-axis grid — one class per
        // sensor, one class per axis — so any two classes disagree on at
        // least four channels of each modality; frequencies, amplitudes and
        // phases stay seed-driven.
        const std::vector<double> freqs = {rng.uniform(1.0, 3.0), rng.uniform(1.0, 3.0)};

        Mat motif(w, spec.channels.size());
        for (std::size_t c = 0; c < spec.channels.size(); ++c) {
            const std::size_t kk = k % 6, shift = k / 6;
            const std::size_t sensor = (c / 6) % 3, axis = c % 3;
            const bool active = kk < 3 ? sensor == (kk + shift) % 3 : axis == (kk - 3 + shift) % 3;
            std::vector<std::array<double, 3>> bursts;  // frequency, amplitude, phase
            for (const double freq : freqs) {
                const double amp = active ? rng.uniform(0.9, 1.2) : rng.uniform(0.02, 0.08);
                const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
                bursts.push_back({freq, amp, phase});
            }
            for (std::size_t t = 0; t < w; ++t) {
                double v = 0.0;
                const double time = static_cast<double>(t) / spec.sample_rate;
                for (const auto& [freq, amp, phase] : bursts)
                    v += amp * std::sin(2.0 * std::numbers::pi * freq * time + phase);
                motif(t, c) = detail::hann(t, w) * v;
            }
        }
        motifs.push_back(std::move(motif));
    }
    return motifs;
}

// Root-mean-square amplitude pooled over every class, channel and sample of
// the motif bank; the natural unit for relative noise levels.
inline double motif_rms(const std::vector<Mat>& motifs) {
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (const Mat& m : motifs) {
        for (const double v : m.storage()) sum_sq += v * v;
        n += m.rows() * m.cols();
    }
    if (n == 0) throw std::runtime_error("synth: empty motif bank");
    return std::sqrt(sum_sq / static_cast<double>(n));
}

struct SynthRecording {
    Recording recording;
    std::vector<int> labels;  // one class id per stimulus window
};

// Balanced label sequence for one session: classes cycle through the window
// list and are then shuffled subject-specifically.
inline std::vector<int> synth_labels(const SynthSpec& spec, RandomStream& subject_rng) {
    const std::size_t n_windows = spec.n_classes * static_cast<std::size_t>(spec.protocol.repetitions);
    std::vector<int> labels(n_windows);
    for (std::size_t i = 0; i < n_windows; ++i)
        labels[i] = static_cast<int>(i % spec.n_classes);
    subject_rng.shuffle(labels);
    return labels;
}

// One subject's full session against a caller-supplied motif bank. Draw
// order from the subject stream is fixed: label shuffle, then one gain per
// window, then noise sample by sample in row order — so any change upstream
// leaves later draws untouched.
inline SynthRecording generate_recording(const SynthSpec& spec, const std::string& subject_id,
                                         const std::vector<Mat>& motifs) {
    validate_synth_spec(spec);
    if (subject_id.empty()) throw std::runtime_error("synth: subject id must not be empty");
    if (motifs.size() != spec.n_classes)
        throw std::runtime_error("synth: motif bank has " + std::to_string(motifs.size()) +
                                 " classes, spec wants " + std::to_string(spec.n_classes));
    const auto w = static_cast<std::size_t>(window_length(spec.protocol, spec.sample_rate));
    for (const Mat& m : motifs)
        if (m.rows() != w || m.cols() != spec.channels.size())
            throw std::runtime_error("synth: motif shape does not match window/channels");
    const std::size_t n_windows = spec.n_classes * static_cast<std::size_t>(spec.protocol.repetitions);
    const auto total = static_cast<std::size_t>(
        window_start(spec.protocol, spec.sample_rate, static_cast<std::int64_t>(n_windows) - 1) +
        window_length(spec.protocol, spec.sample_rate));

    RandomStream rng(mix_seed(spec.seed, hash_text(subject_id)));
    SynthRecording out;
    out.labels = synth_labels(spec, rng);

    std::vector<double> gains(n_windows);
    for (std::size_t i = 0; i < n_windows; ++i)
        gains[i] = 1.0 + spec.jitter * rng.uniform(-1.0, 1.0);

    Mat samples(total, spec.channels.size());
    for (std::size_t i = 0; i < n_windows; ++i) {
        const auto start = static_cast<std::size_t>(
            window_start(spec.protocol, spec.sample_rate, static_cast<std::int64_t>(i)));
        const Mat& motif = motifs[static_cast<std::size_t>(out.labels[i])];
        for (std::size_t t = 0; t < w; ++t)
            for (std::size_t c = 0; c < spec.channels.size(); ++c)
                samples(start + t, c) = gains[i] * motif(t, c);
    }
    for (std::size_t t = 0; t < total; ++t)
        for (std::size_t c = 0; c < spec.channels.size(); ++c)
            samples(t, c) += spec.noise_sigma * rng.normal();

    out.recording.sample_rate = spec.sample_rate;
    out.recording.channels = spec.channels;
    out.recording.samples = std::move(samples);
    out.recording.subject_id = subject_id;
    out.recording.modality = infer_modality(spec.channels);
    return out;
}

inline SynthRecording generate_recording(const SynthSpec& spec, const std::string& subject_id) {
    return generate_recording(spec, subject_id, build_motifs(spec));
}

} // namespace imugest
