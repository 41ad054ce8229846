#include "tsgraph/eval/stats.hpp"

#include "tsgraph/error.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace tsg::eval {

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // unbiased
};

Moments moments(std::span<const double> v) {
    Moments m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size() - 1);
    return m;
}

}  // namespace

TestResult welch_t_test(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) throw ArgumentError("welch_t_test: each sample needs at least 2 values");
    const Moments mx = moments(x), my = moments(y);
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    const double sx = mx.var / nx, sy = my.var / ny;
    const double se2 = sx + sy;
    if (!(se2 > 0.0)) throw ArgumentError("welch_t_test: both samples have zero variance");

    TestResult r;
    r.statistic = (mx.mean - my.mean) / std::sqrt(se2);
    r.df = se2 * se2 / (sx * sx / (nx - 1.0) + sy * sy / (ny - 1.0));
    const double t2 = r.statistic * r.statistic;
    // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2)
    r.p_value = boost::math::ibeta(r.df / 2.0, 0.5, r.df / (r.df + t2));
    return r;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    constexpr double pi = std::numbers::pi;
    if (lambda < 1.0) {
        // Q = 1 - sqrt(2 pi)/lambda * sum exp(-(2k-1)^2 pi^2 / (8 lambda^2))
        double s = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double term = std::exp(-odd * odd * pi * pi / (8.0 * lambda * lambda));
            s += term;
            if (term < 1e-300) break;
        }
        return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-300) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw ArgumentError("ks_two_sample: samples must be nonempty");
    std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());

    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }

    TestResult r;
    r.statistic = d;
    const double en = n * m / (n + m);
    r.p_value = kolmogorov_survival(std::sqrt(en) * d);
    return r;
}

}  // namespace tsg::eval
