#pragma once

// Recording and segmentation layer: continuous multi-channel IMU recordings
// cut into fixed-length gesture windows along the stimulus protocol the
// corpus was recorded with (timed cue, rest gap, start-up delay).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "imugest/csv.hpp"
#include "imugest/matrix.hpp"

namespace imugest {

enum class Modality { accelerometer, gyroscope, both };

inline std::string_view modality_name(Modality m) {
    switch (m) {
        case Modality::accelerometer: return "accel";
        case Modality::gyroscope: return "gyro";
        default: return "both";
    }
}

struct Recording {
    double sample_rate = 0.0;           // samples per second
    std::vector<std::string> channels;  // unique channel names, file order
    Mat samples;                        // [n_samples x n_channels]
    std::string subject_id;
    Modality modality = Modality::both;
};

// Stimulus timing of one session: a cue of stimulus_duration seconds per
// gesture, rest_duration seconds between cues, and a one-time hardware
// start-up delay at the beginning of the recording.
struct Protocol {
    double stimulus_duration = 3.0;
    double rest_duration = 5.0;
    double hardware_delay = 0.5;
    int repetitions = 20;
};

// One gesture window cut out of a recording.
struct Segment {
    Mat samples;             // [window_length x n_channels]
    int label = 0;           // class id, 0..K-1
    std::string subject_id;
    int repetition = 0;      // window index within the source recording
};

inline void validate_recording(const Recording& rec) {
    if (!(rec.sample_rate > 0.0)) throw std::runtime_error("recording: sample_rate must be positive");
    if (rec.samples.rows() == 0) throw std::runtime_error("recording: no samples");
    if (rec.samples.cols() != rec.channels.size())
        throw std::runtime_error("recording: channel count mismatch");
    std::unordered_set<std::string_view> seen;
    for (const auto& ch : rec.channels)
        if (!seen.insert(ch).second)
            throw std::runtime_error("recording: duplicate channel name '" + ch + "'");
}

inline void validate_protocol(const Protocol& p) {
    if (p.stimulus_duration < 0 || p.rest_duration < 0 || p.hardware_delay < 0)
        throw std::runtime_error("protocol: durations must be >= 0");
    if (p.repetitions < 1) throw std::runtime_error("protocol: repetitions must be >= 1");
}

// Window geometry. Wall-clock offsets are rounded to the nearest sample.
inline std::int64_t window_length(const Protocol& p, double sample_rate) {
    return std::llround(p.stimulus_duration * sample_rate);
}

inline std::int64_t window_start(const Protocol& p, double sample_rate, std::int64_t index) {
    const double t = p.hardware_delay + static_cast<double>(index) * (p.stimulus_duration + p.rest_duration);
    return std::llround(t * sample_rate);
}

// Cuts len(labels) windows out of the recording, in protocol order. Window i
// covers samples [start_i, start_i + w); the samples are copied verbatim.
inline std::vector<Segment> segment_recording(const Recording& rec, const Protocol& proto,
                                              const std::vector<int>& labels) {
    validate_recording(rec);
    validate_protocol(proto);
    const std::int64_t w = window_length(proto, rec.sample_rate);
    if (w < 1) throw std::runtime_error("segment: window length rounds to zero samples");

    const auto n = static_cast<std::int64_t>(rec.samples.rows());
    std::vector<Segment> out;
    out.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::int64_t start = window_start(proto, rec.sample_rate, static_cast<std::int64_t>(i));
        if (start + w > n)
            throw std::runtime_error("segment: recording too short, window " + std::to_string(i) +
                                     " needs samples up to " + std::to_string(start + w) + " of " +
                                     std::to_string(n));
        Segment seg;
        seg.samples = Mat(static_cast<std::size_t>(w), rec.samples.cols());
        for (std::int64_t t = 0; t < w; ++t)
            for (std::size_t c = 0; c < rec.samples.cols(); ++c)
                seg.samples(static_cast<std::size_t>(t), c) =
                    rec.samples(static_cast<std::size_t>(start + t), c);
        seg.label = labels[i];
        seg.subject_id = rec.subject_id;
        seg.repetition = static_cast<int>(i);
        out.push_back(std::move(seg));
    }
    return out;
}

// Channel naming convention: accelerometer channels carry "_a" (s1_ax ...),
// gyroscope channels "_g". Anything else is neither.
inline bool is_accel_channel(std::string_view name) { return name.find("_a") != std::string_view::npos; }
inline bool is_gyro_channel(std::string_view name) { return name.find("_g") != std::string_view::npos; }

inline Modality infer_modality(const std::vector<std::string>& channels) {
    bool any_a = false, any_g = false;
    for (const auto& ch : channels) {
        if (is_accel_channel(ch)) any_a = true;
        if (is_gyro_channel(ch)) any_g = true;
    }
    if (any_a && !any_g) return Modality::accelerometer;
    if (any_g && !any_a) return Modality::gyroscope;
    return Modality::both;
}

// Keeps only the channels of the requested modality.
inline Recording select_modality(const Recording& rec, Modality m) {
    if (m == Modality::both) return rec;
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
        const bool take = (m == Modality::accelerometer) ? is_accel_channel(rec.channels[c])
                                                         : is_gyro_channel(rec.channels[c]);
        if (take) keep.push_back(c);
    }
    if (keep.empty())
        throw std::runtime_error("recording has no " + std::string(modality_name(m)) + " channels");

    Recording out;
    out.sample_rate = rec.sample_rate;
    out.subject_id = rec.subject_id;
    out.modality = m;
    for (const std::size_t c : keep) out.channels.push_back(rec.channels[c]);
    out.samples = Mat(rec.samples.rows(), keep.size());
    for (std::size_t r = 0; r < rec.samples.rows(); ++r)
        for (std::size_t j = 0; j < keep.size(); ++j)
            out.samples(r, j) = rec.samples(r, keep[j]);
    return out;
}

// Recording CSV: header of channel names (optional leading `t` time column,
// ignored for indexing), one sample per row. An empty schema accepts the
// file's own header.
inline Recording load_recording(const std::string& path, const std::vector<std::string>& schema,
                                double sample_rate, std::string subject_id = "") {
    NumericCsv csv = read_numeric_csv(path);

    std::size_t first_col = 0;
    if (!csv.header.empty() && csv.header.front() == "t") first_col = 1;

    std::vector<std::string> channels(csv.header.begin() + static_cast<std::ptrdiff_t>(first_col),
                                      csv.header.end());
    if (!schema.empty() && channels != schema) {
        std::string want;
        for (const auto& s : schema) want += (want.empty() ? "" : ",") + s;
        std::string got;
        for (const auto& s : channels) got += (got.empty() ? "" : ",") + s;
        throw std::runtime_error("'" + path + "': channel schema mismatch (expected " + want +
                                 "; file has " + got + ")");
    }

    if (csv.values.rows() == 0) throw std::runtime_error("'" + path + "': no samples");

    Recording rec;
    rec.sample_rate = sample_rate;
    rec.channels = std::move(channels);
    if (first_col == 0) {
        rec.samples = std::move(csv.values);
    } else {
        rec.samples = Mat(csv.values.rows(), rec.channels.size());
        for (std::size_t r = 0; r < csv.values.rows(); ++r)
            for (std::size_t c = 0; c < rec.channels.size(); ++c)
                rec.samples(r, c) = csv.values(r, c + 1);
    }
    if (subject_id.empty()) {
        // subject defaults to the file stem
        std::string stem = path;
        if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
            stem = stem.substr(slash + 1);
        if (const auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
        subject_id = stem;
    }
    rec.subject_id = std::move(subject_id);
    rec.modality = infer_modality(rec.channels);
    validate_recording(rec);
    return rec;
}

inline void save_recording(const std::string& path, const Recording& rec) {
    validate_recording(rec);
    write_numeric_csv(path, rec.channels, rec.samples);
}

// Label CSV: `repetition_index,label`, one row per window, indices 0..n-1
// each present exactly once.
inline std::vector<int> load_labels(const std::string& path) {
    NumericCsv csv = read_numeric_csv(path);
    if (csv.header != std::vector<std::string>{"repetition_index", "label"})
        throw std::runtime_error("'" + path + "': expected header repetition_index,label");
    const std::size_t n = csv.values.rows();
    std::vector<int> labels(n, -1);
    for (std::size_t r = 0; r < n; ++r) {
        const double di = csv.values(r, 0);
        const double dl = csv.values(r, 1);
        const auto idx = static_cast<std::int64_t>(di);
        const auto lab = static_cast<int>(dl);
        if (di != static_cast<double>(idx) || dl != static_cast<double>(lab) || lab < 0)
            throw std::runtime_error("'" + path + "': row " + std::to_string(r + 1) +
                                     ": labels must be non-negative integers");
        if (idx < 0 || idx >= static_cast<std::int64_t>(n) || labels[static_cast<std::size_t>(idx)] != -1)
            throw std::runtime_error("'" + path + "': row " + std::to_string(r + 1) +
                                     ": repetition_index out of range or repeated");
        labels[static_cast<std::size_t>(idx)] = lab;
    }
    return labels;
}

inline void save_labels(const std::string& path, const std::vector<int>& labels) {
    Mat m(labels.size(), 2);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        m(i, 0) = static_cast<double>(i);
        m(i, 1) = labels[i];
    }
    write_numeric_csv(path, {"repetition_index", "label"}, m);
}

} // namespace imugest
