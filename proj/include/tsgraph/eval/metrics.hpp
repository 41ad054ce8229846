#pragma once

// Classification metrics. Class 0 is the normal (healthy) class unless a
// caller says otherwise; every other class counts as a fault.

#include "tsgraph/matrix.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace tsg::eval {

/// C x C counts, rows = true class, cols = predicted class.
class Confusion {
public:
    Confusion() = default;
    explicit Confusion(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {}

    std::size_t classes() const noexcept { return classes_; }
    std::size_t& at(std::size_t truth, std::size_t pred) { return counts_[truth * classes_ + pred]; }
    std::size_t at(std::size_t truth, std::size_t pred) const { return counts_[truth * classes_ + pred]; }
    std::size_t total() const noexcept;
    std::size_t trace() const noexcept;
    std::size_t support(std::size_t c) const noexcept;    // row sum
    std::size_t predicted(std::size_t c) const noexcept;  // column sum

    Confusion& operator+=(const Confusion& other);
    bool operator==(const Confusion&) const = default;

private:
    std::size_t classes_ = 0;
    std::vector<std::size_t> counts_;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

Confusion confusion_matrix(std::span<const int> preds, std::span<const int> truth, std::size_t classes);

/// One-vs-rest P/R/F1 with 0/0 -> 0.
ClassMetrics precision_recall_f1(const Confusion& cm, std::size_t c);

double accuracy(const Confusion& cm);
/// Mean recall over fault classes that have at least one true sample;
/// absent when no fault samples exist.
std::optional<double> detection_rate(const Confusion& cm, std::size_t normal_class = 0);
/// Normal samples predicted as any fault over all normal samples; absent
/// when there are no normal samples.
std::optional<double> false_alarm_rate(const Confusion& cm, std::size_t normal_class = 0);

/// Mann-Whitney AUC with midranks. labels are 0/1.
double roc_auc_binary(std::span<const double> scores, std::span<const int> labels);
/// Mean one-vs-rest AUC over classes present in `truth`, scored by
/// exp(logp). Classes without samples are skipped and listed in `skipped`.
double roc_auc_macro(const Matrix& logp, std::span<const int> truth, std::vector<int>* skipped = nullptr);

struct EvalReport {
    Confusion confusion;
    std::vector<ClassMetrics> per_class;
    ClassMetrics macro;
    ClassMetrics micro;
    double acc = 0.0;
    std::optional<double> dr;
    std::optional<double> far;
    std::optional<double> auc_macro;
    std::vector<int> auc_skipped;
    std::size_t normal_class = 0;

    std::size_t samples() const noexcept { return confusion.total(); }
    std::optional<double> far_percent() const { return far ? std::optional<double>(*far * 100.0) : std::nullopt; }
};

/// `logp` (B x C) is optional; without it the report has no AUC. AUC is
/// also left absent when fewer than two classes appear in `truth`.
EvalReport make_report(std::span<const int> preds, std::span<const int> truth, std::size_t classes,
                       const Matrix* logp = nullptr, std::size_t normal_class = 0);

/// Fills every derived field from `cm`; AUC is untouched.
void fill_from_confusion(EvalReport& report);

}  // namespace tsg::eval
