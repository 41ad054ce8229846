#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tsgraph/entropy.hpp"
#include "tsgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace tsg;

namespace {

// Independent oracle: frequency tally with a map.
double oracle_entropy(const std::vector<int>& s) {
    std::map<int, double> count;
    for (int v : s) count[v] += 1.0;
    double h = 0.0;
    for (auto& [sym, c] : count) {
        const double p = c / static_cast<double>(s.size());
        h -= p * std::log(p);
    }
    return h;
}

std::vector<int> oracle_discretize(const std::vector<double>& x, int bins) {
    const double lo = *std::min_element(x.begin(), x.end()), hi = *std::max_element(x.begin(), x.end());
    std::vector<int> out;
    for (double v : x) {
        if (hi == lo) {
            out.push_back(0);
            continue;
        }
        int b = static_cast<int>(std::floor(bins * (v - lo) / (hi - lo)));
        out.push_back(std::clamp(b, 0, bins - 1));
    }
    return out;
}

double oracle_h_bar(const std::vector<double>& x, std::size_t w, std::size_t s, int bins) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t start = 0; start + w <= x.size(); start += s) {
        std::vector<double> seg(x.begin() + start, x.begin() + start + w);
        sum += oracle_entropy(oracle_discretize(seg, bins));
        ++n;
    }
    return sum / static_cast<double>(n);
}

SignalRecording series(std::vector<double> x) {
    SignalRecording r;
    r.channels = {std::move(x)};
    r.sample_rate_hz = 1000;
    return r;
}

std::vector<double> random_series(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> x(n);
    for (auto& v : x) v = nd(rng);
    return x;
}

}  // namespace

TEST_CASE("shannon_entropy examples") {
    CHECK(shannon_entropy(std::vector<int>{5, 5, 5, 5}) == 0.0);
    CHECK(shannon_entropy(std::vector<int>{0, 1, 0, 1}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(shannon_entropy(std::vector<int>{0, 0, 0, 1}) == doctest::Approx(0.562335).epsilon(1e-6));
    CHECK(shannon_entropy(std::vector<int>{0, 0, 0, 1}) ==
          doctest::Approx(-(0.75 * std::log(0.75) + 0.25 * std::log(0.25))).epsilon(1e-15));
    CHECK_THROWS_AS(shannon_entropy(std::vector<int>{}), ArgumentError);
}

TEST_CASE("shannon_entropy: bounds, permutation invariance, oracle agreement") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> s(1 + rng() % 64);
        const int alphabet = 1 + static_cast<int>(rng() % 16);
        for (auto& v : s) v = static_cast<int>(rng() % alphabet);
        const double h = shannon_entropy(s);
        const auto distinct = std::set<int>(s.begin(), s.end()).size();
        CHECK(h >= 0.0);
        CHECK(h <= std::log(static_cast<double>(distinct)) + 1e-12);
        CHECK(h == doctest::Approx(oracle_entropy(s)).epsilon(1e-12));
        std::shuffle(s.begin(), s.end(), rng);
        CHECK(shannon_entropy(s) == doctest::Approx(h).epsilon(1e-12));
    }
}

TEST_CASE("discretize") {
    CHECK(discretize(Matrix(1, 3, {0.0, 0.5, 1.0}), 2) == std::vector<int>{0, 1, 1});
    CHECK(discretize(Matrix(1, 4, {2.0, 2.0, 2.0, 2.0}), 16) == std::vector<int>{0, 0, 0, 0});
    // channels are binned independently and concatenated
    CHECK(discretize(Matrix(2, 2, {0.0, 1.0, 5.0, 5.0}), 4) == std::vector<int>{0, 3, 0, 0});
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto x = random_series(seed, 37);
        CHECK(discretize(Matrix(1, x.size(), x), 16) == oracle_discretize(x, 16));
    }
}

TEST_CASE("entropy of discretized segments is bounded by ln(bins)") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto x = random_series(seed, 64);
        CHECK(shannon_entropy(discretize(Matrix(1, x.size(), x), 16)) <= std::log(16.0) + 1e-12);
    }
}

TEST_CASE("average_entropy against explicit segment enumeration") {
    const auto x = random_series(42, 64);
    const auto avg = average_entropy(series(x), 16, 8, 16);
    CHECK(avg.segment_count == 7);
    CHECK(avg.h_bar == doctest::Approx(oracle_h_bar(x, 16, 8, 16)).epsilon(1e-12));

    const auto one = average_entropy(series(x), 64, 8, 16);
    CHECK(one.segment_count == 1);
    CHECK(one.h_bar == doctest::Approx(oracle_entropy(oracle_discretize(x, 16))).epsilon(1e-12));

    CHECK(average_entropy(series(std::vector<double>(50, 1.5)), 10, 5, 16).h_bar == 0.0);
    CHECK_THROWS_AS(average_entropy(series(x), 65, 8, 16), InsufficientDataError);
}

TEST_CASE("pooled average over recordings") {
    const auto a = random_series(1, 40), b = random_series(2, 60);
    std::vector<SignalRecording> recs = {series(a), series(b)};
    const auto pooled = average_entropy(recs, 10, 5, 16);
    const auto ea = average_entropy(recs[0], 10, 5, 16), eb = average_entropy(recs[1], 10, 5, 16);
    CHECK(pooled.segment_count == ea.segment_count + eb.segment_count);
    const double expect = (ea.h_bar * ea.segment_count + eb.h_bar * eb.segment_count) /
                          static_cast<double>(ea.segment_count + eb.segment_count);
    CHECK(pooled.h_bar == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("normalized_entropy") {
    CHECK(normalized_entropy(0.0, 10) == 0.0);
    CHECK(normalized_entropy(std::log(2.0), 2) == 1.0);
    CHECK(normalized_entropy(0.9, 30) == doctest::Approx(0.26461269341568544).epsilon(1e-12));
    CHECK_THROWS_AS(normalized_entropy(1.0, 1), ArgumentError);
}

TEST_CASE("optimal_window: constant signal ties to the smallest candidate") {
    const std::vector<std::size_t> cands = {40, 10, 20, 30};
    const auto scan = optimal_window(series(std::vector<double>(200, 3.0)), cands, std::nullopt);
    CHECK(scan.best_window == 10);
    for (const auto& e : scan.per_size) {
        CHECK(e.h_bar == 0.0);
        CHECK(e.h_norm == 0.0);
    }
    CHECK_THROWS_AS(optimal_window(series(std::vector<double>(10, 1.0)), std::vector<std::size_t>{}, std::nullopt),
                    ArgumentError);
}

TEST_CASE("optimal_window matches exhaustive scoring") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto x = random_series(seed, 300);
        const std::vector<std::size_t> cands = {8, 16, 32};
        const auto scan = optimal_window(series(x), cands, std::nullopt);
        double best = -1.0;
        std::size_t best_w = 0;
        for (std::size_t w : cands) {
            const double score = oracle_h_bar(x, w, w / 2, 16) / std::log(static_cast<double>(w));
            if (score > best) best = score, best_w = w;
        }
        CHECK(scan.best_window == best_w);
        const auto it = std::find_if(scan.per_size.begin(), scan.per_size.end(),
                                     [&](const auto& e) { return e.w == scan.best_window; });
        REQUIRE(it != scan.per_size.end());
        for (const auto& e : scan.per_size) CHECK(e.h_norm <= it->h_norm);
    }
}

TEST_CASE("optimal_window is invariant under positive affine rescaling") {
    const auto cands = default_window_candidates();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto x = random_series(100 + seed, 1024);
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = 4.0 * x[i] - 7.0;
        CHECK(optimal_window(series(x), cands, std::nullopt).best_window ==
              optimal_window(series(y), cands, std::nullopt).best_window);
    }
}

TEST_CASE("scan CSV and defaults") {
    CHECK(default_window_candidates() == std::vector<std::size_t>{10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
    CHECK(scan_step(30, std::nullopt) == 15);
    CHECK(scan_step(3, std::nullopt) == 1);
    CHECK(scan_step(30, 4) == 4);
    const auto scan = optimal_window(series(random_series(9, 200)), std::vector<std::size_t>{10, 20}, std::nullopt);
    const auto csv = scan.to_csv();
    CHECK(csv.rfind("w,step,H_bar,H_norm,n\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv == optimal_window(series(random_series(9, 200)), std::vector<std::size_t>{10, 20}, std::nullopt).to_csv());
}
