#pragma once

// Raw recording I/O and stride-based sample slicing.
//
// Binary recording layout ("TSG1"), all little-endian:
//   magic "TSG1" | u32 channel count | u64 frame count | u32 sample rate (Hz)
//   payload: frame-major, channel-interleaved IEEE-754 binary32 values.
//
// Manifest (JSON):
//   { "format_version": 1, "class_count": C,
//     "entries": [ { "path": "a.tsg", "channels": [0], "label": 0,
//                    "sample_rate_hz": 12000 }, ... ] }
// Relative entry paths resolve against the manifest's directory. "channels"
// selects file columns (default: the first channel only).

#include "tsgraph/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tsg {

struct SignalRecording {
    std::vector<std::vector<double>> channels;
    double sample_rate_hz = 0.0;
    int label = 0;
    std::string source_id;

    std::size_t channel_count() const noexcept { return channels.size(); }
    std::size_t length() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
};

/// Fixed-length slice of a recording; data is channels x L.
struct LabeledSample {
    Matrix data;
    int label = 0;
    std::string source_id;
    std::size_t start_index = 0;

    std::size_t length() const noexcept { return data.cols(); }
};

struct ManifestEntry {
    std::filesystem::path path;
    std::vector<std::size_t> channels;  // empty selects channel 0
    int label = 0;
    double sample_rate_hz = 0.0;  // 0 defers to the file header
};

struct DatasetManifest {
    int format_version = 1;
    int class_count = 0;
    std::vector<ManifestEntry> entries;
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Loads a TSG1 binary file, or a CSV file (header row, one column per
/// channel) when the extension is ".csv".
SignalRecording load_recording(const std::filesystem::path& path, const ManifestEntry& entry);

/// Loads every manifest entry in order.
std::vector<SignalRecording> load_dataset(const std::filesystem::path& manifest_path);

void write_recording(const std::filesystem::path& path, const SignalRecording& rec);

/// floor((N - L) / stride) + 1 samples; sample k starts at k * stride.
std::vector<LabeledSample> make_samples(const SignalRecording& rec, std::size_t sample_len,
                                        std::size_t stride);

/// Slices every recording and keeps at most `max_per_class` samples per label
/// (0 keeps all), preserving recording order.
std::vector<LabeledSample> make_dataset_samples(const std::vector<SignalRecording>& recs,
                                                std::size_t sample_len, std::size_t stride,
                                                std::size_t max_per_class = 0);

}  // namespace tsg
