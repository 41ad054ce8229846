#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tsgraph/error.hpp"
#include "tsgraph/le_io.hpp"
#include "tsgraph/signal_io.hpp"
#include "tsgraph/synthetic.hpp"

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

using namespace tsg;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("tsgraph_sigio_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string recording_bytes(std::uint32_t channels, std::uint64_t frames, const std::vector<float>& values,
                            const char* magic = "TSG1") {
    ByteWriter w;
    w.raw(magic, 4);
    w.u32(channels);
    w.u64(frames);
    w.u32(12000);
    for (float v : values) w.f32(v);
    return w.take();
}

SignalRecording ramp(std::size_t n, int label = 0) {
    SignalRecording r;
    r.channels = {std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) r.channels[0][i] = static_cast<double>(i);
    r.sample_rate_hz = 1000;
    r.label = label;
    r.source_id = "ramp";
    return r;
}

}  // namespace

TEST_CASE("binary layout: 8 frames, 2 channels, interleaved 0..15") {
    const auto dir = scratch_dir("layout");
    std::vector<float> v(16);
    for (int i = 0; i < 16; ++i) v[i] = static_cast<float>(i);
    write_bytes(dir / "a.tsg", recording_bytes(2, 8, v));
    ManifestEntry e{dir / "a.tsg", {0, 1}, 3, 0};
    const auto rec = load_recording(e.path, e);
    REQUIRE(rec.channel_count() == 2);
    REQUIRE(rec.length() == 8);
    for (int f = 0; f < 8; ++f) {
        CHECK(rec.channels[0][f] == 2 * f);
        CHECK(rec.channels[1][f] == 2 * f + 1);
    }
    CHECK(rec.label == 3);
    CHECK(rec.sample_rate_hz == 12000);
}

TEST_CASE("default channel selection is the first channel") {
    const auto dir = scratch_dir("firstch");
    write_bytes(dir / "a.tsg", recording_bytes(2, 2, {1, 2, 3, 4}));
    ManifestEntry e{dir / "a.tsg", {}, 0, 0};
    const auto rec = load_recording(e.path, e);
    REQUIRE(rec.channel_count() == 1);
    CHECK(rec.channels[0] == std::vector<double>{1, 3});
}

TEST_CASE("NaN frame raises DataError naming the frame") {
    const auto dir = scratch_dir("nan");
    std::vector<float> v(8, 1.0f);
    v[5] = std::numeric_limits<float>::quiet_NaN();  // frame 2, channel 1
    write_bytes(dir / "a.tsg", recording_bytes(2, 4, v));
    ManifestEntry e{dir / "a.tsg", {0}, 0, 0};
    try {
        load_recording(e.path, e);
        FAIL("expected DataError");
    } catch (const DataError& err) {
        CHECK(err.frame() == 2);
    }
}

TEST_CASE("malformed headers and truncated payloads are FormatErrors") {
    const auto dir = scratch_dir("malformed");
    ManifestEntry e{dir / "a.tsg", {0}, 0, 0};
    write_bytes(e.path, recording_bytes(1, 4, {1, 2, 3, 4}, "XXXX"));
    CHECK_THROWS_AS(load_recording(e.path, e), FormatError);
    write_bytes(e.path, recording_bytes(1, 4, {1, 2, 3}));
    CHECK_THROWS_AS(load_recording(e.path, e), FormatError);
    write_bytes(e.path, "TSG1");
    CHECK_THROWS_AS(load_recording(e.path, e), FormatError);
    ManifestEntry missing{dir / "none.tsg", {0}, 0, 0};
    CHECK_THROWS_AS(load_recording(missing.path, missing), IoError);
}

TEST_CASE("write -> load round-trips bit-exactly") {
    const auto dir = scratch_dir("roundtrip");
    std::mt19937_64 rng(5);
    std::normal_distribution<float> nd;
    SignalRecording rec;
    rec.channels.assign(3, std::vector<double>(257));
    for (auto& ch : rec.channels) {
        for (auto& x : ch) x = nd(rng);  // binary32-representable
    }
    rec.sample_rate_hz = 48000;
    write_recording(dir / "r.tsg", rec);
    ManifestEntry e{dir / "r.tsg", {0, 1, 2}, 1, 0};
    const auto back = load_recording(e.path, e);
    CHECK(back.channels == rec.channels);
    CHECK(back.sample_rate_hz == 48000);
    write_recording(dir / "r2.tsg", back);
    std::ifstream a(dir / "r.tsg", std::ios::binary), b(dir / "r2.tsg", std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
}

TEST_CASE("CSV ingestion, one column per channel") {
    const auto dir = scratch_dir("csv");
    {
        std::ofstream out(dir / "a.csv");
        out << "de,fe\n0.5,1\n1.5,2\n-2,3\n";
    }
    ManifestEntry e{dir / "a.csv", {1, 0}, 2, 12000};
    const auto rec = load_recording(e.path, e);
    CHECK(rec.channels[0] == std::vector<double>{1, 2, 3});
    CHECK(rec.channels[1] == std::vector<double>{0.5, 1.5, -2});
    ManifestEntry no_rate{dir / "a.csv", {0}, 2, 0};
    CHECK_THROWS_AS(load_recording(no_rate.path, no_rate), FormatError);
}

TEST_CASE("manifest round-trip resolves paths against its directory") {
    const auto dir = scratch_dir("manifest");
    DatasetManifest m;
    m.class_count = 2;
    m.entries.push_back({dir / "a.tsg", {0}, 0, 12000});
    m.entries.push_back({dir / "b.tsg", {0}, 1, 12000});
    write_manifest(dir / "manifest.json", m);
    const auto back = read_manifest(dir / "manifest.json");
    REQUIRE(back.entries.size() == 2);
    CHECK(back.class_count == 2);
    CHECK(back.entries[1].path == dir / "b.tsg");
    CHECK(back.entries[1].label == 1);

    std::ofstream(dir / "bad.json") << R"({"class_count": 2, "entries": [{"path": "x", "label": 5}]})";
    CHECK_THROWS_AS(read_manifest(dir / "bad.json"), FormatError);
}

TEST_CASE("make_samples count formula and starts") {
    CHECK(make_samples(ramp(120832), 1024, 512).size() == 235);
    const auto whole = make_samples(ramp(10), 10, 3);
    REQUIRE(whole.size() == 1);
    CHECK(whole[0].start_index == 0);
    CHECK(whole[0].length() == 10);
    const auto s = make_samples(ramp(100, 4), 30, 10);
    REQUIRE(s.size() == 8);
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(s[k].start_index == 10 * k);
        CHECK(s[k].label == 4);
        CHECK(s[k].data(0, 0) == 10.0 * k);
    }
    CHECK_THROWS_AS(make_samples(ramp(5), 6, 1), InsufficientDataError);
}

TEST_CASE("property: sample count and constant-gap starts over random triples") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 500;
        const std::size_t l = 1 + rng() % n;
        const std::size_t s = 1 + rng() % 50;
        const auto samples = make_samples(ramp(n), l, s);
        std::size_t brute = 0;
        for (std::size_t start = 0; start + l <= n; start += s) ++brute;
        REQUIRE(samples.size() == brute);
        for (std::size_t k = 1; k < samples.size(); ++k) {
            REQUIRE(samples[k].start_index - samples[k - 1].start_index == s);
        }
        REQUIRE(samples.back().start_index + l <= n);
    }
}

TEST_CASE("max_per_class caps samples per label") {
    std::vector<SignalRecording> recs = {ramp(100, 0), ramp(100, 1), ramp(100, 0)};
    const auto all = make_dataset_samples(recs, 20, 10);
    CHECK(all.size() == 27);
    const auto capped = make_dataset_samples(recs, 20, 10, 5);
    CHECK(std::count_if(capped.begin(), capped.end(), [](auto& s) { return s.label == 0; }) == 5);
    CHECK(std::count_if(capped.begin(), capped.end(), [](auto& s) { return s.label == 1; }) == 5);
}

TEST_CASE("synthetic generator: determinism, shape, degenerate input") {
    const auto a = generate_synthetic_dataset(3, 5, 4096, 7);
    const auto b = generate_synthetic_dataset(3, 5, 4096, 7);
    REQUIRE(a.size() == 15);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].channels == b[i].channels);
        CHECK(a[i].label == static_cast<int>(i / 5));
        CHECK(a[i].length() == 4096);
    }
    CHECK(generate_synthetic_dataset(3, 0, 1024, 7).empty());
    CHECK_THROWS_AS(generate_synthetic_dataset(1, 5, 1024, 7), ArgumentError);
    const auto c = generate_synthetic_dataset(3, 5, 4096, 8);
    CHECK(c[0].channels != a[0].channels);
}

TEST_CASE("synthetic generator: dominant frequency gap between classes") {
    // Strongest DFT bin (searched over 200..3000 Hz) averaged per class.
    const auto recs = generate_synthetic_dataset(2, 6, 4096, 7);
    auto peak_hz = [](const SignalRecording& r) {
        const auto& x = r.channels[0];
        const double n = static_cast<double>(x.size());
        double best = 0.0, best_f = 0.0;
        for (double f = 200.0; f <= 3000.0; f += 5.0) {
            std::complex<double> acc = 0.0;
            for (std::size_t t = 0; t < x.size(); ++t) {
                acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(t) / r.sample_rate_hz);
            }
            if (std::abs(acc) / n > best) best = std::abs(acc) / n, best_f = f;
        }
        return best_f;
    };
    double mean[2] = {0, 0};
    for (const auto& r : recs) mean[r.label] += peak_hz(r) / 6.0;
    CHECK(mean[1] - mean[0] == doctest::Approx(SyntheticFamily::kFrequencyGapHz).epsilon(0.03));
}
