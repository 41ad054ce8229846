#include "tsgraph/signal_io.hpp"

#include "tsgraph/error.hpp"
#include "tsgraph/le_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tsg {

namespace {

constexpr char kRecordingMagic[4] = {'T', 'S', 'G', '1'};

std::vector<std::size_t> selected_channels(const ManifestEntry& entry, std::size_t available,
                                           const std::filesystem::path& path) {
    std::vector<std::size_t> sel = entry.channels.empty() ? std::vector<std::size_t>{0}
                                                          : entry.channels;
    for (auto c : sel) {
        if (c >= available) {
            throw FormatError(path.string() + ": channel " + std::to_string(c) +
                              " not present (file has " + std::to_string(available) + ")");
        }
    }
    return sel;
}

SignalRecording load_binary(const std::filesystem::path& path, const ManifestEntry& entry) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ByteReader rd(bytes);
    if (bytes.size() < 20 || bytes.compare(0, 4, kRecordingMagic, 4) != 0) {
        throw FormatError(path.string() + ": bad recording header");
    }
    rd.skip(4);
    const auto nch = rd.u32();
    const auto frames = rd.u64();
    const auto rate = rd.u32();
    if (nch == 0) throw FormatError(path.string() + ": zero channels");
    if (frames == 0) throw FormatError(path.string() + ": zero frames");
    const std::uint64_t payload = frames * nch * 4;
    if (rd.remaining() < payload) throw FormatError(path.string() + ": truncated payload");

    const auto sel = selected_channels(entry, nch, path);
    SignalRecording rec;
    rec.channels.assign(sel.size(), std::vector<double>(frames));
    for (std::uint64_t f = 0; f < frames; ++f) {
        for (std::uint32_t c = 0; c < nch; ++c) {
            const float v = rd.f32();
            if (!std::isfinite(v)) throw DataError(path.string() + ": non-finite value", f);
            for (std::size_t k = 0; k < sel.size(); ++k) {
                if (sel[k] == c) rec.channels[k][f] = v;
            }
        }
    }
    rec.sample_rate_hz = entry.sample_rate_hz > 0 ? entry.sample_rate_hz : rate;
    return rec;
}

SignalRecording load_csv(const std::filesystem::path& path, const ManifestEntry& entry) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header row");
    const std::size_t ncols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    const auto sel = selected_channels(entry, ncols, path);

    SignalRecording rec;
    rec.channels.assign(sel.size(), {});
    std::size_t frame = 0;
    std::vector<double> row(ncols);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= ncols) throw FormatError(path.string() + ": too many columns");
            try {
                row[col] = std::stod(cell);
            } catch (const std::exception&) {
                throw FormatError(path.string() + ": unparsable value '" + cell + "'");
            }
            if (!std::isfinite(row[col])) throw DataError(path.string() + ": non-finite value", frame);
            ++col;
        }
        if (col != ncols) throw FormatError(path.string() + ": short row at frame " + std::to_string(frame));
        for (std::size_t k = 0; k < sel.size(); ++k) rec.channels[k].push_back(row[sel[k]]);
        ++frame;
    }
    if (frame == 0) throw FormatError(path.string() + ": no data rows");
    if (entry.sample_rate_hz <= 0) throw FormatError(path.string() + ": CSV needs sample_rate_hz in the manifest");
    rec.sample_rate_hz = entry.sample_rate_hz;
    return rec;
}

}  // namespace

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }

    DatasetManifest m;
    try {
        m.format_version = doc.value("format_version", 1);
        m.class_count = doc.at("class_count").get<int>();
        const auto base = path.parent_path();
        for (const auto& e : doc.at("entries")) {
            ManifestEntry entry;
            std::filesystem::path p = e.at("path").get<std::string>();
            entry.path = p.is_absolute() ? p : base / p;
            if (e.contains("channels")) entry.channels = e["channels"].get<std::vector<std::size_t>>();
            entry.label = e.at("label").get<int>();
            entry.sample_rate_hz = e.value("sample_rate_hz", 0.0);
            m.entries.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (m.format_version != 1) throw FormatError(path.string() + ": unsupported manifest version");
    if (m.class_count < 1) throw FormatError(path.string() + ": class_count must be positive");
    for (const auto& e : m.entries) {
        if (e.label < 0 || e.label >= m.class_count) {
            throw FormatError(path.string() + ": label " + std::to_string(e.label) + " out of range");
        }
    }
    return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    nlohmann::json doc;
    doc["format_version"] = manifest.format_version;
    doc["class_count"] = manifest.class_count;
    doc["entries"] = nlohmann::json::array();
    const auto base = path.parent_path();
    for (const auto& e : manifest.entries) {
        nlohmann::json j;
        auto rel = e.path.is_absolute() ? e.path.lexically_relative(base) : e.path;
        j["path"] = rel.generic_string();
        j["channels"] = e.channels.empty() ? std::vector<std::size_t>{0} : e.channels;
        j["label"] = e.label;
        j["sample_rate_hz"] = e.sample_rate_hz;
        doc["entries"].push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << doc.dump(2) << '\n';
}

SignalRecording load_recording(const std::filesystem::path& path, const ManifestEntry& entry) {
    SignalRecording rec =
        path.extension() == ".csv" ? load_csv(path, entry) : load_binary(path, entry);
    rec.label = entry.label;
    rec.source_id = path.filename().string();
    return rec;
}

std::vector<SignalRecording> load_dataset(const std::filesystem::path& manifest_path) {
    const auto manifest = read_manifest(manifest_path);
    std::vector<SignalRecording> recs;
    recs.reserve(manifest.entries.size());
    for (const auto& e : manifest.entries) recs.push_back(load_recording(e.path, e));
    return recs;
}

void write_recording(const std::filesystem::path& path, const SignalRecording& rec) {
    if (rec.channels.empty() || rec.length() == 0) throw ArgumentError("empty recording");
    for (const auto& ch : rec.channels) {
        if (ch.size() != rec.length()) throw ArgumentError("channel lengths differ");
    }
    ByteWriter w;
    w.raw(kRecordingMagic, 4);
    w.u32(static_cast<std::uint32_t>(rec.channel_count()));
    w.u64(rec.length());
    w.u32(static_cast<std::uint32_t>(std::lround(rec.sample_rate_hz)));
    for (std::size_t f = 0; f < rec.length(); ++f) {
        for (const auto& ch : rec.channels) w.f32(static_cast<float>(ch[f]));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
}

std::vector<LabeledSample> make_samples(const SignalRecording& rec, std::size_t sample_len,
                                        std::size_t stride) {
    if (sample_len == 0 || stride == 0) throw ArgumentError("sample_len and stride must be positive");
    const std::size_t n = rec.length();
    if (sample_len > n) {
        throw InsufficientDataError("sample length " + std::to_string(sample_len) +
                                    " exceeds recording length " + std::to_string(n));
    }
    const std::size_t count = (n - sample_len) / stride + 1;
    std::vector<LabeledSample> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        LabeledSample s;
        s.start_index = k * stride;
        s.label = rec.label;
        s.source_id = rec.source_id;
        s.data = Matrix(rec.channel_count(), sample_len);
        for (std::size_t c = 0; c < rec.channel_count(); ++c) {
            const auto& ch = rec.channels[c];
            std::copy_n(ch.begin() + static_cast<std::ptrdiff_t>(s.start_index), sample_len,
                        s.data.row(c).begin());
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<LabeledSample> make_dataset_samples(const std::vector<SignalRecording>& recs,
                                                std::size_t sample_len, std::size_t stride,
                                                std::size_t max_per_class) {
    std::vector<LabeledSample> out;
    std::map<int, std::size_t> taken;
    for (const auto& rec : recs) {
        for (auto& s : make_samples(rec, sample_len, stride)) {
            auto& n = taken[s.label];
            if (max_per_class != 0 && n >= max_per_class) break;
            ++n;
            out.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace tsg
