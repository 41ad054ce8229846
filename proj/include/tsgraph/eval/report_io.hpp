#pragma once

// Report serialization: JSON for machines, an aligned table for people,
// per-class CSV (precision/recall/F1 heatmap input), and the epoch log CSV.

#include "tsgraph/eval/metrics.hpp"
#include "tsgraph/eval/trainer.hpp"

#include <span>
#include <string>

namespace tsg::eval {

std::string report_to_json(const EvalReport& r);
/// Aggregate, fold means and per-fold reports in one document.
std::string cross_validation_to_json(const CrossValidation& cv);

std::string report_to_text(const EvalReport& r, const std::string& title);
/// Appends the fold-mean block and the external reference table.
std::string cross_validation_to_text(const CrossValidation& cv);

/// Header "class,precision,recall,f1,support".
std::string per_class_csv(const EvalReport& r);
/// Header "fold,epoch,loss".
std::string training_log_csv(std::span<const EpochRecord> log);

/// Baseline rows for CWRU datasets A/B/C, shown for context only.
struct ReferenceRow {
    const char* model;
    double acc[3];
    double dr[3];
    double far_percent[3];
    double auc[3];
};
std::span<const ReferenceRow> reference_rows();

}  // namespace tsg::eval
