#include "tsgraph/eval/metrics.hpp"

#include "tsgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace tsg::eval {

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1_of(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

std::size_t Confusion::total() const noexcept { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

std::size_t Confusion::trace() const noexcept {
    std::size_t t = 0;
    for (std::size_t c = 0; c < classes_; ++c) t += counts_[c * classes_ + c];
    return t;
}

std::size_t Confusion::support(std::size_t c) const noexcept {
    std::size_t s = 0;
    for (std::size_t p = 0; p < classes_; ++p) s += counts_[c * classes_ + p];
    return s;
}

std::size_t Confusion::predicted(std::size_t c) const noexcept {
    std::size_t s = 0;
    for (std::size_t t = 0; t < classes_; ++t) s += counts_[t * classes_ + c];
    return s;
}

Confusion& Confusion::operator+=(const Confusion& other) {
    if (other.classes_ != classes_) throw ArgumentError("cannot add confusion matrices of different sizes");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
}

Confusion confusion_matrix(std::span<const int> preds, std::span<const int> truth, std::size_t classes) {
    if (preds.size() != truth.size()) {
        throw ArgumentError("confusion_matrix: " + std::to_string(preds.size()) + " predictions vs " +
                            std::to_string(truth.size()) + " labels");
    }
    if (classes == 0) throw ArgumentError("confusion_matrix: zero classes");
    Confusion cm(classes);
    const int c = static_cast<int>(classes);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] < 0 || preds[i] >= c || truth[i] < 0 || truth[i] >= c) {
            throw ArgumentError("confusion_matrix: label out of range at index " + std::to_string(i));
        }
        ++cm.at(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(preds[i]));
    }
    return cm;
}

ClassMetrics precision_recall_f1(const Confusion& cm, std::size_t c) {
    if (c >= cm.classes()) throw ArgumentError("class index out of range");
    const double tp = static_cast<double>(cm.at(c, c));
    ClassMetrics m;
    m.support = cm.support(c);
    m.precision = ratio(tp, static_cast<double>(cm.predicted(c)));
    m.recall = ratio(tp, static_cast<double>(m.support));
    m.f1 = f1_of(m.precision, m.recall);
    return m;
}

double accuracy(const Confusion& cm) {
    return ratio(static_cast<double>(cm.trace()), static_cast<double>(cm.total()));
}

std::optional<double> detection_rate(const Confusion& cm, std::size_t normal_class) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < cm.classes(); ++c) {
        if (c == normal_class || cm.support(c) == 0) continue;
        sum += precision_recall_f1(cm, c).recall;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::optional<double> false_alarm_rate(const Confusion& cm, std::size_t normal_class) {
    if (normal_class >= cm.classes()) throw ArgumentError("normal class out of range");
    const std::size_t normals = cm.support(normal_class);
    if (normals == 0) return std::nullopt;
    const std::size_t alarms = normals - cm.at(normal_class, normal_class);
    return static_cast<double>(alarms) / static_cast<double>(normals);
}

double roc_auc_binary(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ArgumentError("roc_auc_binary: length mismatch");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                rank_sum += midrank;
                ++pos;
            } else if (labels[order[k]] != 0) {
                throw ArgumentError("roc_auc_binary: labels must be 0 or 1");
            }
        }
        i = j;
    }
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw ArgumentError("roc_auc_binary: both classes must be present");
    const double p = static_cast<double>(pos);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double roc_auc_macro(const Matrix& logp, std::span<const int> truth, std::vector<int>* skipped) {
    if (logp.rows() != truth.size()) throw ArgumentError("roc_auc_macro: row count does not match labels");
    const std::size_t classes = logp.cols();
    std::vector<std::size_t> support(classes, 0);
    for (int t : truth) {
        if (t < 0 || static_cast<std::size_t>(t) >= classes) throw ArgumentError("roc_auc_macro: label out of range");
        ++support[static_cast<std::size_t>(t)];
    }
    const auto present = std::count_if(support.begin(), support.end(), [](std::size_t s) { return s > 0; });
    if (present < 2) throw ArgumentError("roc_auc_macro: at least two classes must be present");

    std::vector<double> scores(truth.size());
    std::vector<int> bin(truth.size());
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        if (support[c] == 0) {
            std::clog << "warning: class " << c << " has no samples; skipped in macro AUC\n";
            if (skipped) skipped->push_back(static_cast<int>(c));
            continue;
        }
        for (std::size_t i = 0; i < truth.size(); ++i) {
            scores[i] = std::exp(logp(i, c));
            bin[i] = truth[i] == static_cast<int>(c) ? 1 : 0;
        }
        sum += roc_auc_binary(scores, bin);
        ++used;
    }
    return sum / static_cast<double>(used);
}

void fill_from_confusion(EvalReport& r) {
    const Confusion& cm = r.confusion;
    const std::size_t classes = cm.classes();
    r.per_class.clear();
    r.macro = {};
    double tp = 0.0, tp_fn = 0.0, tp_fp = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
        const ClassMetrics m = precision_recall_f1(cm, c);
        r.per_class.push_back(m);
        r.macro.precision += m.precision;
        r.macro.recall += m.recall;
        r.macro.f1 += m.f1;
        tp += static_cast<double>(cm.at(c, c));
        tp_fn += static_cast<double>(cm.support(c));
        tp_fp += static_cast<double>(cm.predicted(c));
    }
    if (classes > 0) {
        r.macro.precision /= static_cast<double>(classes);
        r.macro.recall /= static_cast<double>(classes);
        r.macro.f1 /= static_cast<double>(classes);
    }
    r.macro.support = cm.total();
    r.micro.precision = ratio(tp, tp_fp);
    r.micro.recall = ratio(tp, tp_fn);
    r.micro.f1 = f1_of(r.micro.precision, r.micro.recall);
    r.micro.support = cm.total();
    r.acc = accuracy(cm);
    r.dr = detection_rate(cm, r.normal_class);
    r.far = false_alarm_rate(cm, r.normal_class);
}

EvalReport make_report(std::span<const int> preds, std::span<const int> truth, std::size_t classes,
                       const Matrix* logp, std::size_t normal_class) {
    EvalReport r;
    r.normal_class = normal_class;
    r.confusion = confusion_matrix(preds, truth, classes);
    fill_from_confusion(r);
    if (logp) {
        if (logp->cols() != classes) throw ArgumentError("make_report: logp width does not match class count");
        std::vector<bool> seen(classes, false);
        for (int t : truth) seen[static_cast<std::size_t>(t)] = true;
        if (std::count(seen.begin(), seen.end(), true) >= 2) r.auc_macro = roc_auc_macro(*logp, truth, &r.auc_skipped);
    }
    return r;
}

}  // namespace tsg::eval
