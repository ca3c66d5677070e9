// refertriage: referral-to-procedure prediction toolkit.
//
// Subcommands map onto the experiment surfaces: dataset statistics, embedding
// generation, cross-validated evaluation (optionally with nested grid
// search), noise and threshold sweeps, balancing and model comparisons, 2-D
// projection, and the capture-efficiency simulation. Every report embeds the
// full effective configuration and master seed; reruns with the same seed are
// byte-identical apart from the timestamp field.

#include <fcntl.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "refertriage/dataset.hpp"
#include "refertriage/econ.hpp"
#include "refertriage/embed.hpp"
#include "refertriage/errors.hpp"
#include "refertriage/eval.hpp"
#include "refertriage/model.hpp"
#include "refertriage/perturb.hpp"
#include "refertriage/project.hpp"
#include "refertriage/report.hpp"
#include "refertriage/resample.hpp"
#include "refertriage/rng.hpp"
#include "refertriage/stats.hpp"

namespace fs = std::filesystem;
using namespace refertriage;

namespace {

// seed-stream tags for the pipeline stages
enum : uint64_t { kSeedFolds = 20, kSeedModel = 21, kSeedResample = 22, kSeedBoot = 23,
                  kSeedNoise = 24 };

struct RunConfig {
    std::string data_path;
    std::string dict_path;
    std::string out_dir;
    uint64_t seed = 0;
    std::string variant = "base";
    std::string provider = "hashing";
    std::string embedding_file;
    std::string endpoint;              // or REFERTRIAGE_EMBED_ENDPOINT
    size_t dim = 384;
    size_t ngram_min = 3;
    size_t ngram_max = 5;
    std::string balance = "smote";
    size_t k_neighbors = 5;
    double target_ratio = 1.0;
    std::string model = "random_forest";
    bool grid = false;
    size_t k_folds = 5;
    size_t n_boot = 1000;
    double alpha = 0.05;
    double threshold = 0.5;
    double threshold_grid_step = 0.01;
    std::string noise_kind;            // empty = all kinds (noise-sweep) / none (cv)
    std::vector<double> noise_levels;
    std::string external_coords;       // project: externally computed 2-D layout
    std::string scenario_path;         // simulate
    CaptureScenario scenario;
};

// Returns true when the file supplies a seed.
bool apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open config: " + path);
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("config is not valid JSON: " + path);

    cfg.data_path = j.value("data", cfg.data_path);
    cfg.dict_path = j.value("dict", cfg.dict_path);
    cfg.out_dir = j.value("out", cfg.out_dir);
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    cfg.variant = j.value("variant", cfg.variant);
    cfg.provider = j.value("provider", cfg.provider);
    cfg.embedding_file = j.value("embedding_file", cfg.embedding_file);
    cfg.endpoint = j.value("endpoint", cfg.endpoint);
    cfg.dim = j.value("dim", cfg.dim);
    cfg.ngram_min = j.value("ngram_min", cfg.ngram_min);
    cfg.ngram_max = j.value("ngram_max", cfg.ngram_max);
    cfg.balance = j.value("balance", cfg.balance);
    cfg.k_neighbors = j.value("k_neighbors", cfg.k_neighbors);
    cfg.target_ratio = j.value("target_ratio", cfg.target_ratio);
    cfg.model = j.value("model", cfg.model);
    cfg.grid = j.value("grid", cfg.grid);
    cfg.k_folds = j.value("k_folds", cfg.k_folds);
    cfg.n_boot = j.value("n_boot", cfg.n_boot);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.threshold = j.value("threshold", cfg.threshold);
    cfg.threshold_grid_step = j.value("threshold_grid_step", cfg.threshold_grid_step);
    cfg.noise_kind = j.value("noise_kind", cfg.noise_kind);
    if (j.contains("noise_levels"))
        cfg.noise_levels = j.at("noise_levels").get<std::vector<double>>();
    cfg.external_coords = j.value("external_coords", cfg.external_coords);
    if (j.contains("scenario")) {
        const auto& s = j.at("scenario");
        cfg.scenario.baseline_rate = s.value("baseline_rate", cfg.scenario.baseline_rate);
        cfg.scenario.model_rate = s.value("model_rate", cfg.scenario.model_rate);
        if (s.contains("capture_levels"))
            cfg.scenario.capture_levels = s.at("capture_levels").get<std::vector<double>>();
        cfg.scenario.n_referrals = s.value("n_referrals", cfg.scenario.n_referrals);
        cfg.scenario.price_per_procedure =
            s.value("price_per_procedure", cfg.scenario.price_per_procedure);
    }
    return j.contains("seed");
}

Json config_json(const RunConfig& cfg) {
    Json j;
    j["data"] = cfg.data_path;
    j["dict"] = cfg.dict_path;
    j["out"] = cfg.out_dir;
    j["seed"] = cfg.seed;
    j["variant"] = cfg.variant;
    j["provider"] = cfg.provider;
    j["embedding_file"] = cfg.embedding_file;
    j["endpoint"] = cfg.endpoint;
    j["dim"] = cfg.dim;
    j["ngram_min"] = cfg.ngram_min;
    j["ngram_max"] = cfg.ngram_max;
    j["balance"] = cfg.balance;
    j["k_neighbors"] = cfg.k_neighbors;
    j["target_ratio"] = cfg.target_ratio;
    j["model"] = cfg.model;
    j["grid"] = cfg.grid;
    j["k_folds"] = cfg.k_folds;
    j["n_boot"] = cfg.n_boot;
    j["alpha"] = cfg.alpha;
    j["threshold"] = cfg.threshold;
    j["threshold_grid_step"] = cfg.threshold_grid_step;
    j["noise_kind"] = cfg.noise_kind;
    j["noise_levels"] = cfg.noise_levels;
    j["external_coords"] = cfg.external_coords;
    return j;
}

// One run per output directory, enforced with an exclusive lock file.
class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) {
        fs::create_directories(dir_);
        lock_path_ = (fs::path(dir_) / ".refertriage.lock").string();
        fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw DataError("output directory is locked by another run: " + lock_path_);
    }
    ~OutputDir() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(lock_path_.c_str());
        }
    }
    std::string file(const std::string& name) const {
        return (fs::path(dir_) / name).string();
    }

private:
    std::string dir_;
    std::string lock_path_;
    int fd_ = -1;
};

ReferralDataset load_variant(const RunConfig& cfg) {
    if (cfg.data_path.empty()) throw InvalidArgument("no dataset given (--data)");
    ReferralDataset ds = load_referrals(cfg.data_path);
    if (cfg.variant == "hyde") {
        if (cfg.dict_path.empty())
            throw InvalidArgument("variant hyde requires a code dictionary (--dict)");
        ds = enrich_hyde(ds, load_code_dictionary(cfg.dict_path));
    } else if (cfg.variant != "base") {
        throw InvalidArgument("unknown variant '" + cfg.variant + "'");
    }
    return ds;
}

HashingEmbedderConfig hashing_config(const RunConfig& cfg) {
    HashingEmbedderConfig h;
    h.dim = cfg.dim;
    h.ngram_min = cfg.ngram_min;
    h.ngram_max = cfg.ngram_max;
    return h;
}

EmbeddedDataset embed_dataset(const RunConfig& cfg, const ReferralDataset& ds) {
    std::vector<std::string> texts;
    texts.reserve(ds.size());
    for (const auto& rec : ds.records) texts.push_back(rec.diagnosis_text);

    EmbeddedDataset out;
    out.variant = variant_from_string(cfg.variant);
    if (cfg.provider == "hashing") {
        out.matrix = embed_hashing(texts, hashing_config(cfg));
    } else if (cfg.provider == "file") {
        if (cfg.embedding_file.empty())
            throw InvalidArgument("provider file requires --embedding-file");
        EmbeddingMatrix m = load_embedding_file(cfg.embedding_file);
        // align file rows to dataset order by record_id
        std::map<std::string, size_t> row_of;
        for (size_t i = 0; i < m.record_ids.size(); ++i) row_of[m.record_ids[i]] = i;
        out.matrix.dim = m.dim;
        out.matrix.vectors = Matrix(ds.size(), m.dim);
        for (size_t i = 0; i < ds.size(); ++i) {
            const auto it = row_of.find(ds.records[i].record_id);
            if (it == row_of.end())
                throw DataError("embedding file is missing record '" +
                                ds.records[i].record_id + "'");
            const auto src = m.vectors.row(it->second);
            std::copy(src.begin(), src.end(), out.matrix.vectors.row(i).begin());
        }
    } else if (cfg.provider == "remote") {
        RemoteEmbedderConfig remote;
        remote.endpoint = cfg.endpoint;
        if (remote.endpoint.empty()) {
            const char* env = std::getenv("REFERTRIAGE_EMBED_ENDPOINT");
            if (env) remote.endpoint = env;
        }
        if (remote.endpoint.empty())
            throw InvalidArgument(
                "provider remote requires --endpoint or REFERTRIAGE_EMBED_ENDPOINT");
        out.matrix = fetch_remote_embeddings(remote, texts);
    } else {
        throw InvalidArgument("unknown provider '" + cfg.provider + "'");
    }

    out.matrix.record_ids.clear();
    for (const auto& rec : ds.records) out.matrix.record_ids.push_back(rec.record_id);
    out.labels.clear();
    for (const auto& rec : ds.records) out.labels.push_back(rec.label);
    return out;
}

ClassifierSpec classifier_spec(const RunConfig& cfg) {
    ClassifierSpec spec;
    spec.kind = model_kind_from_string(cfg.model);
    spec.seed = derive_seed(cfg.seed, kSeedModel);
    return spec;
}

ResampleSpec resample_spec(const RunConfig& cfg) {
    ResampleSpec spec;
    spec.strategy = balance_from_string(cfg.balance);
    spec.k_neighbors = cfg.k_neighbors;
    spec.target = cfg.target_ratio;
    spec.seed = derive_seed(cfg.seed, kSeedResample);
    return spec;
}

BootstrapSpec bootstrap_spec(const RunConfig& cfg) {
    BootstrapSpec spec;
    spec.n_resamples = cfg.n_boot;
    spec.alpha = cfg.alpha;
    spec.seed = derive_seed(cfg.seed, kSeedBoot);
    return spec;
}

CvRun run_pipeline_cv(const RunConfig& cfg, const EmbeddedDataset& data,
                      const ClassifierSpec& classifier, const ResampleSpec& resample) {
    const FoldPlan plan =
        stratified_folds(data.labels, cfg.k_folds, derive_seed(cfg.seed, kSeedFolds));
    CvOptions options;
    options.threshold = cfg.threshold;
    if (cfg.grid) options.grid = default_forest_grid(classifier.seed);
    return run_cv(data, classifier, resample, plan, bootstrap_spec(cfg), options);
}

// ---------------------------------------------------------------- commands

int cmd_stats(const RunConfig& cfg) {
    OutputDir out(cfg.out_dir);
    const DatasetSummary summary = describe(load_variant(cfg));
    Json report = report_envelope(kSchemaDatasetSummary, cfg.seed, config_json(cfg));
    report["summary"] = to_json(summary);
    validate_report(report);
    write_report(out.file("report.json"), report);
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_embed(const RunConfig& cfg) {
    OutputDir out(cfg.out_dir);
    const auto data = embed_dataset(cfg, load_variant(cfg));
    const std::string embed_path = out.file("embeddings.csv");
    write_embedding_file(embed_path, data.matrix);

    Json report = report_envelope(kSchemaEmbed, cfg.seed, config_json(cfg));
    report["provider"] = cfg.provider;
    report["variant"] = cfg.variant;
    report["dim"] = data.matrix.dim;
    report["n_records"] = data.matrix.vectors.rows();
    report["embedding_file"] = embed_path;
    validate_report(report);
    write_report(out.file("report.json"), report);
    std::cout << "wrote " << embed_path << "\n";
    return 0;
}

int cmd_cv(const RunConfig& cfg) {
    OutputDir out(cfg.out_dir);
    ReferralDataset ds = load_variant(cfg);
    if (!cfg.noise_kind.empty()) {
        NoiseSpec noise;
        noise.kind = noise_kind_from_string(cfg.noise_kind);
        noise.level = cfg.noise_levels.empty() ? 0.0 : cfg.noise_levels.front();
        noise.seed = derive_seed(cfg.seed, kSeedNoise);
        ds = perturb_dataset(ds, noise);
    }
    const auto data = embed_dataset(cfg, ds);
    const CvRun run = run_pipeline_cv(cfg, data, classifier_spec(cfg), resample_spec(cfg));

    Json report = report_envelope(kSchemaCvReport, cfg.seed, config_json(cfg));
    report.update(cv_report_json(run.report));
    validate_report(report);
    write_report(out.file("report.json"), report);
    std::cout << "mean roc_auc " << run.report.summary.at("roc_auc").mean << ", mcc "
              << run.report.summary.at("mcc").mean << "\n";
    return 0;
}

int cmd_noise_sweep(const RunConfig& cfg) {
    OutputDir out(cfg.out_dir);
    if (cfg.provider == "file")
        throw InvalidArgument(
            "noise-sweep re-embeds perturbed text; the file provider cannot do that");
    const ReferralDataset ds = load_variant(cfg);

    std::vector<NoiseKind> kinds;
    if (cfg.noise_kind.empty())
        kinds = {NoiseKind::char_sub, NoiseKind::char_del, NoiseKind::word_swap,
                 NoiseKind::word_del};
    else
        kinds = {noise_kind_from_string(cfg.noise_kind)};
    std::vector<double> levels = cfg.noise_levels;
    if (levels.empty()) levels = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};

    const ClassifierSpec classifier = classifier_spec(cfg);
    const ResampleSpec resample = resample_spec(cfg);

    Json cells = Json::array();
    std::ofstream csv(out.file("noise_sweep.csv"), std::ios::binary);
    csv << "kind,level,roc_auc_mean,roc_auc_ci_lower,roc_auc_ci_upper\n";

    for (size_t ki = 0; ki < kinds.size(); ++ki) {
        for (size_t li = 0; li < levels.size(); ++li) {
            NoiseSpec noise;
            noise.kind = kinds[ki];
            noise.level = levels[li];
            noise.seed = derive_seed(cfg.seed, kSeedNoise, ki * 100 + li);
            const auto data = embed_dataset(cfg, perturb_dataset(ds, noise));
            const CvRun run = run_pipeline_cv(cfg, data, classifier, resample);

            const auto& auc = run.report.summary.at("roc_auc");
            Json cell;
            cell["kind"] = to_string(kinds[ki]);
            cell["level"] = levels[li];
            cell["summary"] = cv_report_json(run.report)["summary"];
            cells.push_back(std::move(cell));
            csv << to_string(kinds[ki]) << ',' << levels[li] << ',' << auc.mean << ','
                << auc.lower << ',' << auc.upper << "\n";
            std::cout << to_string(kinds[ki]) << " @ " << levels[li] << ": roc_auc "
                      << auc.mean << "\n";
        }
    }

    Json report = report_envelope(kSchemaNoiseSweep, cfg.seed, config_json(cfg));
    report["cells"] = std::move(cells);
    validate_report(report);
    write_report(out.file("report.json"), report);
    return 0;
}

int cmd_balance_compare(const RunConfig& cfg) {
    OutputDir out(cfg.out_dir);
    const auto data = embed_dataset(cfg, load_variant(cfg));
    const ClassifierSpec classifier = classifier_spec(cfg);

    Json rows = Json::array();
    std::ofstream csv(out.file("balance_compare.csv"), std::ios::binary);
    csv << "strategy";
    for (const auto& name : metric_names()) csv << ',' << name << "_mean";
    csv << "\n";

    for (BalanceStrategy strategy :
         {BalanceStrategy::smote, BalanceStrategy::adasyn, BalanceStrategy::undersample}) {
        ResampleSpec resample = resample_spec(cfg);
        resample.strategy = strategy;
        const CvRun run = run_pipeline_cv(cfg, data, classifier, resample);

        Json row;
        row["strategy"] = to_string(strategy);
        row["summary"] = cv_report_json(run.report)["summary"];
        rows.push_back(std::move(row));
        csv << to_string(strategy);
        for (const auto& name : metric_names()) csv << ',' << run.report.summary.at(name).mean;
        csv << "\n";
        std::cout << to_string(strategy) << ": roc_auc "
                  << run.report.summary.at("roc_auc").mean << "\n";
    }

    Json report = report_envelope(kSchemaBalanceCompare, cfg.seed, config_json(cfg));
    report["strategies"] = std::move(rows);
    validate_report(report);
    write_report(out.file("report.json"), report);
    return 0;
}

int cmd_model_compare(const RunConfig& cfg) {
    OutputDir out(cfg.out_dir);
    const auto data = embed_dataset(cfg, load_variant(cfg));
    const ResampleSpec resample = resample_spec(cfg);

    const std::vector<ModelKind> kinds = {ModelKind::random_forest,
                                          ModelKind::gradient_boosting,
                                          ModelKind::linear_margin, ModelKind::mlp};
    std::vector<CvRun> runs;
    Json rows = Json::array();
    std::ofstream csv(out.file("model_compare.csv"), std::ios::binary);
    csv << "model";
    for (const auto& name : metric_names()) csv << ',' << name << "_mean";
    csv << "\n";

    for (ModelKind kind : kinds) {
        ClassifierSpec spec = classifier_spec(cfg);
        spec.kind = kind;
        runs.push_back(run_pipeline_cv(cfg, data, spec, resample));
        const CvReport& rep = runs.back().report;

        Json row;
        row["model"] = to_string(kind);
        row["summary"] = cv_report_json(rep)["summary"];
        rows.push_back(std::move(row));
        csv << to_string(kind);
        for (const auto& name : metric_names()) csv << ',' << rep.summary.at(name).mean;
        csv << "\n";
        std::cout << to_string(kind) << ": roc_auc " << rep.summary.at("roc_auc").mean
                  << "\n";
    }

    // pairwise Wilcoxon on per-fold ROC-AUC, BH-adjusted across the pairs
    std::vector<std::pair<size_t, size_t>> pairs;
    std::vector<double> p_values;
    for (size_t a = 0; a < kinds.size(); ++a) {
        for (size_t b = a + 1; b < kinds.size(); ++b) {
            PairedSample sample;
            for (size_t f = 0; f < cfg.k_folds; ++f) {
                sample.a.push_back(runs[a].report.fold_metrics[f].roc_auc);
                sample.b.push_back(runs[b].report.fold_metrics[f].roc_auc);
            }
            double p = 1.0;
            try {
                p = wilcoxon_signed_rank(sample);
            } catch (const InvalidArgument&) {
                // identical fold metrics: no evidence of any difference
            }
            pairs.emplace_back(a, b);
            p_values.push_back(p);
        }
    }
    const auto q_values = benjamini_hochberg(p_values);

    Json pairwise = Json::array();
    for (size_t i = 0; i < pairs.size(); ++i) {
        pairwise.push_back(Json{{"model_a", to_string(kinds[pairs[i].first])},
                                {"model_b", to_string(kinds[pairs[i].second])},
                                {"metric", "roc_auc"},
                                {"test", "wilcoxon_signed_rank"},
                                {"m", cfg.k_folds},
                                {"p_value", p_values[i]},
                                {"q_value", q_values[i]}});
    }

    Json report = report_envelope(kSchemaModelCompare, cfg.seed, config_json(cfg));
    report["models"] = std::move(rows);
    report["pairwise"] = std::move(pairwise);
    validate_report(report);
    write_report(out.file("report.json"), report);
    return 0;
}

int cmd_threshold_sweep(const RunConfig& cfg) {
    OutputDir out(cfg.out_dir);
    const auto data = embed_dataset(cfg, load_variant(cfg));
    const CvRun run = run_pipeline_cv(cfg, data, classifier_spec(cfg), resample_spec(cfg));
    const ThresholdCurve curve = threshold_sweep(run.fold_scores, cfg.threshold_grid_step);

    const std::string csv_path = out.file("threshold_curve.csv");
    write_threshold_csv(csv_path, curve);

    Json report = report_envelope(kSchemaThresholdSweep, cfg.seed, config_json(cfg));
    report["optimal_threshold"] = curve.optimal_threshold;
    report["thresholds"] = curve.thresholds;
    report["precision"] = curve.precision;
    report["recall"] = curve.recall;
    report["f1"] = curve.f1;
    report["curve_csv"] = csv_path;
    validate_report(report);
    write_report(out.file("report.json"), report);
    std::cout << "optimal threshold " << curve.optimal_threshold << "\n";
    return 0;
}

int cmd_project(const RunConfig& cfg) {
    OutputDir out(cfg.out_dir);
    const ReferralDataset ds = load_variant(cfg);

    Projection2D proj;
    if (!cfg.external_coords.empty()) {
        const EmbeddingMatrix coords = load_embedding_file(cfg.external_coords);
        if (coords.dim != 2)
            throw DataError("external coordinates must have exactly 2 columns");
        proj = external_projection(coords.vectors);
    } else {
        const auto data = embed_dataset(cfg, ds);
        proj = pca_project(data.matrix.vectors);
    }

    std::vector<std::string> ids;
    std::vector<int> labels;
    for (const auto& rec : ds.records) {
        ids.push_back(rec.record_id);
        labels.push_back(rec.label);
    }
    const std::string csv_path = out.file("projection.csv");
    write_projection_csv(csv_path, proj, ids, labels);

    Json report = report_envelope(kSchemaProjection, cfg.seed, config_json(cfg));
    report["method"] = proj.method_tag;
    report["explained_variance_fractions"] = proj.explained_variance_fractions;
    report["projection_csv"] = csv_path;
    validate_report(report);
    write_report(out.file("report.json"), report);
    std::cout << "explained variance " << proj.explained_variance_fractions[0] << " + "
              << proj.explained_variance_fractions[1] << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    OutputDir out(cfg.out_dir);
    CaptureScenario scenario = cfg.scenario;
    if (!cfg.scenario_path.empty()) scenario = scenario_from_json_file(cfg.scenario_path);

    const auto rows = simulate_capture(scenario);
    const std::string csv_path = out.file("capture_table.csv");
    write_capture_csv(csv_path, rows);

    Json rows_json = Json::array();
    for (const auto& row : rows) {
        rows_json.push_back(Json{{"capture", row.capture},
                                 {"effective_rate", row.effective_rate},
                                 {"pct_increase", row.pct_increase},
                                 {"procedures", row.procedures},
                                 {"revenue_increase", row.revenue_increase}});
    }

    Json report = report_envelope(kSchemaSimulate, cfg.seed, config_json(cfg));
    report["scenario"] = to_json(scenario);
    report["rows"] = std::move(rows_json);
    report["p_value"] = compare_rates(scenario);
    report["capture_csv"] = csv_path;
    validate_report(report);
    write_report(out.file("report.json"), report);
    std::cout << "wrote " << csv_path << " (p = " << report["p_value"].get<double>() << ")\n";
    return 0;
}

void add_common_options(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
    sub->add_option("--config", config_path, "JSON config file; flags override its values");
    sub->add_option("--data", cfg.data_path, "referral CSV");
    sub->add_option("--dict", cfg.dict_path, "ICD-10-CM dictionary CSV");
    sub->add_option("--out", cfg.out_dir, "output directory")->required();
    sub->add_option("--seed", cfg.seed, "master seed (required; no wall-clock default)");
    sub->add_option("--variant", cfg.variant, "text variant: base or hyde");
    sub->add_option("--provider", cfg.provider, "embedding provider: hashing, file or remote");
    sub->add_option("--embedding-file", cfg.embedding_file, "embedding CSV (provider file)");
    sub->add_option("--endpoint", cfg.endpoint, "embedding service URL (provider remote)");
    sub->add_option("--dim", cfg.dim, "hashing embedder dimension");
    sub->add_option("--balance", cfg.balance, "none, smote, adasyn or undersample");
    sub->add_option("--k-neighbors", cfg.k_neighbors, "SMOTE/ADASYN neighbor count");
    sub->add_option("--target-ratio", cfg.target_ratio, "minority:majority ratio after resampling");
    sub->add_option("--model", cfg.model,
                    "random_forest, gradient_boosting, linear_margin or mlp");
    sub->add_flag("--grid", cfg.grid, "nested grid search over the 81-config forest grid");
    sub->add_option("--k-folds", cfg.k_folds, "outer fold count");
    sub->add_option("--n-boot", cfg.n_boot, "bootstrap resample count");
    sub->add_option("--threshold", cfg.threshold, "decision threshold for confusion metrics");
    sub->add_option("--threshold-grid-step", cfg.threshold_grid_step, "threshold sweep step");
    sub->add_option("--noise-kind", cfg.noise_kind,
                    "char_sub, char_del, word_swap or word_del");
    sub->add_option("--noise-level", cfg.noise_levels, "noise level(s) in [0, 0.5]");
    sub->add_option("--external-coords", cfg.external_coords,
                    "record_id,x,y CSV of externally computed 2-D coordinates");
    sub->add_option("--scenario", cfg.scenario_path, "capture scenario JSON");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"referral-to-procedure prediction toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    struct Command {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&);
    };
    const std::vector<Command> commands = {
        {"stats", "dataset summary statistics", cmd_stats},
        {"embed", "write an embedding file", cmd_embed},
        {"cv", "cross-validated evaluation", cmd_cv},
        {"noise-sweep", "noise kind x level robustness grid", cmd_noise_sweep},
        {"balance-compare", "compare balancing strategies", cmd_balance_compare},
        {"model-compare", "compare classifier families", cmd_model_compare},
        {"threshold-sweep", "precision/recall/F1 across thresholds", cmd_threshold_sweep},
        {"project", "2-D projection of the embedding space", cmd_project},
        {"simulate", "capture-efficiency economics", cmd_simulate},
    };

    std::map<std::string, int (*)(const RunConfig&)> handlers;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_common_options(sub, cfg, config_path);
        handlers[c.name] = c.fn;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1; // usage errors exit 1, --help exits 0
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string sub_name = sub->get_name();
    const bool seed_flag = sub->get_option("--seed")->count() > 0;

    try {
        bool seed_from_config = false;
        if (!config_path.empty()) {
            // precedence: defaults < config file < explicit flags. The second
            // parse rewrites exactly the options present on the command line.
            seed_from_config = apply_config_file(cfg, config_path);
            app.clear();
            app.parse(argc, argv);
        }
        if (!seed_flag && !seed_from_config) {
            std::cerr << "error: a master seed is required (--seed or config; no wall-clock "
                         "default)\n";
            return 1;
        }
        return handlers.at(sub_name)(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
