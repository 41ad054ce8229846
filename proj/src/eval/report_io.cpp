#include "tsgraph/eval/report_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace tsg::eval {

namespace {

using nlohmann::ordered_json;

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json metrics_json(const ClassMetrics& m) {
    return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

ordered_json report_json(const EvalReport& r) {
    ordered_json j;
    j["samples"] = r.samples();
    j["acc"] = r.acc;
    j["dr"] = optional_json(r.dr);
    j["far"] = optional_json(r.far);
    j["far_percent"] = optional_json(r.far_percent());
    j["auc_macro"] = optional_json(r.auc_macro);
    j["normal_class"] = r.normal_class;
    j["macro"] = metrics_json(r.macro);
    j["micro"] = metrics_json(r.micro);
    ordered_json per_class = ordered_json::array();
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        auto m = metrics_json(r.per_class[c]);
        m["class"] = c;
        per_class.push_back(std::move(m));
    }
    j["per_class"] = std::move(per_class);
    ordered_json cm = ordered_json::array();
    for (std::size_t t = 0; t < r.confusion.classes(); ++t) {
        ordered_json row = ordered_json::array();
        for (std::size_t p = 0; p < r.confusion.classes(); ++p) row.push_back(r.confusion.at(t, p));
        cm.push_back(std::move(row));
    }
    j["confusion"] = std::move(cm);
    if (!r.auc_skipped.empty()) j["auc_skipped_classes"] = r.auc_skipped;
    return j;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string pct_or_dash(const std::optional<double>& v) { return v ? fmt("%8.2f", *v * 100.0) : "       -"; }

constexpr ReferenceRow kReference[] = {
    {"GNNBFD", {99.30, 98.60, 99.30}, {95.0, 90.0, 95.0}, {0.375, 0.750, 0.375}, {0.983, 0.967, 0.991}},
    {"SO-GAAL", {96.51, 96.51, 97.21}, {75.0, 75.0, 80.0}, {1.875, 1.875, 1.500}, {0.894, 0.863, 0.955}},
    {"CutPC", {97.21, 95.81, 95.81}, {80.0, 70.0, 70.0}, {1.500, 4.500, 2.250}, {0.962, 0.814, 0.909}},
    {"LOF", {93.72, 92.79, 96.28}, {55.0, 40.0, 73.33}, {3.375, 2.250, 2.000}, {0.710, 0.735, 0.946}},
    {"KNN", {93.02, 91.05, 95.12}, {50.0, 35.0, 65.0}, {3.750, 4.875, 2.625}, {0.658, 0.673, 0.8902}},
    {"IForest", {97.21, 97.21, 97.91}, {80.0, 80.0, 85.0}, {1.500, 1.500, 1.125}, {0.923, 0.874, 0.966}},
    {"ATBTSGM", {99.40, 100.0, 99.40}, {98.0, 97.5, 96.3}, {0.100, 0.100, 0.200}, {1.000, 1.000, 0.990}},
};

}  // namespace

std::span<const ReferenceRow> reference_rows() { return kReference; }

std::string report_to_json(const EvalReport& r) { return report_json(r).dump(2) + "\n"; }

std::string cross_validation_to_json(const CrossValidation& cv) {
    ordered_json j;
    j["k"] = cv.folds.size();
    j["aggregate"] = report_json(cv.aggregate);
    const auto& m = cv.fold_mean;
    j["fold_mean"] = {{"acc", m.acc},
                      {"macro_precision", m.macro_precision},
                      {"macro_recall", m.macro_recall},
                      {"macro_f1", m.macro_f1},
                      {"dr", optional_json(m.dr)},
                      {"far", optional_json(m.far)},
                      {"auc_macro", optional_json(m.auc_macro)}};
    ordered_json folds = ordered_json::array();
    for (const auto& f : cv.folds) {
        auto fj = report_json(f.report);
        fj["fold"] = f.fold;
        fj["test_indices"] = f.test_indices;
        folds.push_back(std::move(fj));
    }
    j["folds"] = std::move(folds);
    return j.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& r, const std::string& title) {
    std::ostringstream out;
    out << title << "\n" << std::string(title.size(), '=') << "\n";
    out << "samples " << r.samples() << "\n\n";
    out << "class  precision   recall       f1  support\n";
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        const auto& m = r.per_class[c];
        char line[128];
        std::snprintf(line, sizeof line, "%5zu  %9.4f %8.4f %8.4f %8zu\n", c, m.precision, m.recall, m.f1, m.support);
        out << line;
    }
    char line[160];
    std::snprintf(line, sizeof line, "macro  %9.4f %8.4f %8.4f %8zu\n", r.macro.precision, r.macro.recall, r.macro.f1,
                  r.macro.support);
    out << line;
    std::snprintf(line, sizeof line, "micro  %9.4f %8.4f %8.4f %8zu\n\n", r.micro.precision, r.micro.recall,
                  r.micro.f1, r.micro.support);
    out << line;
    out << "ACC (%) " << fmt("%8.2f", r.acc * 100.0) << "\n";
    out << "DR  (%) " << pct_or_dash(r.dr) << "\n";
    out << "FAR (%) " << pct_or_dash(r.far) << "\n";
    out << "AUC     " << (r.auc_macro ? fmt("%8.4f", *r.auc_macro) : "       -") << "\n\n";

    out << "confusion (rows = true, cols = predicted)\n";
    for (std::size_t t = 0; t < r.confusion.classes(); ++t) {
        for (std::size_t p = 0; p < r.confusion.classes(); ++p) {
            char cell[32];
            std::snprintf(cell, sizeof cell, "%6zu", r.confusion.at(t, p));
            out << cell;
        }
        out << "\n";
    }
    return out.str();
}

std::string cross_validation_to_text(const CrossValidation& cv) {
    std::ostringstream out;
    out << report_to_text(cv.aggregate, std::to_string(cv.folds.size()) + "-fold cross-validation (pooled)");
    const auto& m = cv.fold_mean;
    out << "\nfold means\n";
    out << "  ACC (%) " << fmt("%8.2f", m.acc * 100.0) << "\n";
    out << "  macro P/R/F1 " << fmt("%.4f", m.macro_precision) << " " << fmt("%.4f", m.macro_recall) << " "
        << fmt("%.4f", m.macro_f1) << "\n";
    out << "  DR  (%) " << pct_or_dash(m.dr) << "\n";
    out << "  FAR (%) " << pct_or_dash(m.far) << "\n";
    out << "  AUC     " << (m.auc_macro ? fmt("%8.4f", *m.auc_macro) : "       -") << "\n";
    for (const auto& f : cv.folds) {
        out << "  fold " << f.fold << ": ACC " << fmt("%.4f", f.report.acc) << " on " << f.report.samples()
            << " samples\n";
    }

    out << "\nreference results on full CWRU datasets A/B/C (external; not computed here)\n";
    out << "model        ACC% A   B      C      DR% A  B     C     FAR% A B     C     AUC A  B     C\n";
    for (const auto& row : reference_rows()) {
        char line[256];
        std::snprintf(line, sizeof line,
                      "%-10s %6.2f %6.2f %6.2f  %5.1f %5.1f %5.1f  %5.3f %5.3f %5.3f  %5.3f %5.3f %5.3f\n", row.model,
                      row.acc[0], row.acc[1], row.acc[2], row.dr[0], row.dr[1], row.dr[2], row.far_percent[0],
                      row.far_percent[1], row.far_percent[2], row.auc[0], row.auc[1], row.auc[2]);
        out << line;
    }
    return out.str();
}

std::string per_class_csv(const EvalReport& r) {
    std::ostringstream out;
    out << "class,precision,recall,f1,support\n";
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        const auto& m = r.per_class[c];
        out << c << "," << fmt("%.17g", m.precision) << "," << fmt("%.17g", m.recall) << "," << fmt("%.17g", m.f1)
            << "," << m.support << "\n";
    }
    return out.str();
}

std::string training_log_csv(std::span<const EpochRecord> log) {
    std::ostringstream out;
    out << "fold,epoch,loss\n";
    for (const auto& e : log) out << e.fold << "," << e.epoch << "," << fmt("%.17g", e.loss) << "\n";
    return out.str();
}

}  // namespace tsg::eval
