#include "refertriage/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "refertriage/errors.hpp"

namespace refertriage {

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

Json report_envelope(const std::string& schema, uint64_t master_seed, Json config) {
    Json j;
    j["schema"] = schema;
    j["timestamp"] = iso_timestamp();
    j["master_seed"] = master_seed;
    j["config"] = std::move(config);
    return j;
}

void write_report(const std::string& path, const Json& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << report.dump(2) << "\n";
    if (!out) throw DataError("write failed: " + path);
}

Json read_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("report is not valid JSON: " + path);
    return j;
}

namespace {

void require(const Json& j, const std::string& key, const char* schema) {
    if (!j.contains(key))
        throw DataError(std::string("report (") + schema + "): missing key '" + key + "'");
}

void require_summary_metrics(const Json& summary, const char* schema) {
    for (const std::string& name : metric_names()) {
        require(summary, name, schema);
        for (const char* k : {"mean", "ci_lower", "ci_upper"})
            require(summary.at(name), k, schema);
    }
}

} // namespace

void validate_report(const Json& report) {
    for (const char* k : {"schema", "timestamp", "master_seed", "config"})
        require(report, k, "envelope");
    const std::string schema = report.at("schema").get<std::string>();

    if (schema == kSchemaDatasetSummary) {
        require(report, "summary", kSchemaDatasetSummary);
        for (const char* k : {"n_total", "n_class0", "n_class1", "total_chars", "total_words",
                              "avg_chars", "avg_words", "minority_fraction", "minority_pct"})
            require(report.at("summary"), k, kSchemaDatasetSummary);
    } else if (schema == kSchemaEmbed) {
        for (const char* k : {"provider", "variant", "dim", "n_records", "embedding_file"})
            require(report, k, kSchemaEmbed);
    } else if (schema == kSchemaCvReport) {
        for (const char* k : {"variant", "k_folds", "threshold", "classifier", "resample",
                              "bootstrap", "folds", "summary"})
            require(report, k, kSchemaCvReport);
        require_summary_metrics(report.at("summary"), kSchemaCvReport);
    } else if (schema == kSchemaNoiseSweep) {
        require(report, "cells", kSchemaNoiseSweep);
        for (const auto& cell : report.at("cells"))
            for (const char* k : {"kind", "level", "summary"})
                require(cell, k, kSchemaNoiseSweep);
    } else if (schema == kSchemaBalanceCompare) {
        require(report, "strategies", kSchemaBalanceCompare);
        for (const auto& row : report.at("strategies"))
            for (const char* k : {"strategy", "summary"})
                require(row, k, kSchemaBalanceCompare);
    } else if (schema == kSchemaModelCompare) {
        require(report, "models", kSchemaModelCompare);
        require(report, "pairwise", kSchemaModelCompare);
        for (const auto& row : report.at("pairwise"))
            for (const char* k :
                 {"model_a", "model_b", "metric", "test", "m", "p_value", "q_value"})
                require(row, k, kSchemaModelCompare);
    } else if (schema == kSchemaThresholdSweep) {
        for (const char* k : {"optimal_threshold", "thresholds", "precision", "recall", "f1",
                              "curve_csv"})
            require(report, k, kSchemaThresholdSweep);
    } else if (schema == kSchemaProjection) {
        for (const char* k : {"method", "explained_variance_fractions", "projection_csv"})
            require(report, k, kSchemaProjection);
    } else if (schema == kSchemaSimulate) {
        for (const char* k : {"scenario", "rows", "p_value", "capture_csv"})
            require(report, k, kSchemaSimulate);
    } else {
        throw DataError("unknown report schema '" + schema + "'");
    }
}

Json to_json(const DatasetSummary& s) {
    return Json{{"n_total", s.n_total},
                {"n_class0", s.n_class0},
                {"n_class1", s.n_class1},
                {"total_chars", s.total_chars},
                {"total_words", s.total_words},
                {"avg_chars", s.avg_chars},
                {"avg_words", s.avg_words},
                {"minority_fraction", s.minority_fraction},
                {"minority_pct", s.minority_fraction * 100.0}};
}

Json to_json(const MetricSet& m) {
    Json j;
    for (const std::string& name : metric_names()) j[name] = metric_by_name(m, name);
    j["threshold_used"] = m.threshold_used;
    return j;
}

Json to_json(const CiEstimate& e) {
    return Json{{"mean", e.mean}, {"ci_lower", e.lower}, {"ci_upper", e.upper}};
}

Json to_json(const ClassifierSpec& spec) {
    Json params;
    switch (spec.kind) {
        case ModelKind::random_forest:
            params = {{"n_estimators", spec.forest.n_estimators},
                      {"max_depth", spec.forest.max_depth},
                      {"min_samples_split", spec.forest.min_samples_split},
                      {"min_samples_leaf", spec.forest.min_samples_leaf},
                      {"max_features", spec.forest.max_features},
                      {"bootstrap", spec.forest.bootstrap}};
            break;
        case ModelKind::gradient_boosting:
            params = {{"n_stages", spec.boost.n_stages},
                      {"max_depth", spec.boost.max_depth},
                      {"learning_rate", spec.boost.learning_rate}};
            break;
        case ModelKind::linear_margin:
            params = {{"l2", spec.linear.l2}, {"epochs", spec.linear.epochs}};
            break;
        case ModelKind::mlp:
            params = {{"hidden_units", spec.mlp.hidden_units},
                      {"epochs", spec.mlp.epochs},
                      {"batch_size", spec.mlp.batch_size},
                      {"learning_rate", spec.mlp.learning_rate}};
            break;
    }
    return Json{{"kind", to_string(spec.kind)}, {"params", params}, {"seed", spec.seed}};
}

Json to_json(const ResampleSpec& spec) {
    return Json{{"strategy", to_string(spec.strategy)},
                {"k_neighbors", spec.k_neighbors},
                {"target_ratio", spec.target},
                {"seed", spec.seed}};
}

Json to_json(const BootstrapSpec& spec) {
    return Json{{"n_resamples", spec.n_resamples}, {"alpha", spec.alpha}, {"seed", spec.seed}};
}

Json to_json(const CaptureScenario& s) {
    return Json{{"baseline_rate", s.baseline_rate},
                {"model_rate", s.model_rate},
                {"capture_levels", s.capture_levels},
                {"n_referrals", s.n_referrals},
                {"price_per_procedure", s.price_per_procedure}};
}

Json cv_report_json(const CvReport& report) {
    Json folds = Json::array();
    for (size_t f = 0; f < report.fold_metrics.size(); ++f) {
        Json fold = to_json(report.fold_metrics[f]);
        fold["fold"] = f;
        fold["n_test_pos"] = report.fold_counts[f].test_pos;
        fold["n_test_neg"] = report.fold_counts[f].test_neg;
        fold["n_train_raw"] = report.fold_counts[f].train_raw;
        fold["n_train_resampled"] = report.fold_counts[f].train_resampled;
        folds.push_back(std::move(fold));
    }

    Json summary;
    for (const std::string& name : metric_names())
        summary[name] = to_json(report.summary.at(name));

    Json j;
    j["variant"] = to_string(report.variant);
    j["k_folds"] = report.fold_metrics.size();
    j["threshold"] = report.threshold;
    j["classifier"] = to_json(report.classifier);
    j["resample"] = to_json(report.resample);
    j["bootstrap"] = to_json(report.boot);
    j["grid_search"] = report.grid_used;
    if (report.grid_used) {
        Json chosen = Json::array();
        for (size_t f = 0; f < report.grid_choices.size(); ++f)
            chosen.push_back(Json{{"fold", f},
                                  {"config_index", report.grid_best_per_fold[f]},
                                  {"spec", to_json(report.grid_choices[f])}});
        j["grid_chosen"] = std::move(chosen);
    }
    j["folds"] = std::move(folds);
    j["summary"] = std::move(summary);
    return j;
}

} // namespace refertriage
