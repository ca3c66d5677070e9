#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "refertriage/dataset.hpp"
#include "refertriage/econ.hpp"
#include "refertriage/eval.hpp"

namespace refertriage {

using Json = nlohmann::ordered_json;

// Report schema identifiers. A version bump accompanies any key change.
inline constexpr const char* kSchemaDatasetSummary = "refertriage.dataset_summary/1";
inline constexpr const char* kSchemaEmbed = "refertriage.embed/1";
inline constexpr const char* kSchemaCvReport = "refertriage.cv_report/1";
inline constexpr const char* kSchemaNoiseSweep = "refertriage.noise_sweep/1";
inline constexpr const char* kSchemaBalanceCompare = "refertriage.balance_compare/1";
inline constexpr const char* kSchemaModelCompare = "refertriage.model_compare/1";
inline constexpr const char* kSchemaThresholdSweep = "refertriage.threshold_sweep/1";
inline constexpr const char* kSchemaProjection = "refertriage.projection/1";
inline constexpr const char* kSchemaSimulate = "refertriage.simulate/1";

// Common header: schema id, ISO-8601 timestamp (the one field excluded from
// byte-identity checks), master seed and the full effective configuration.
Json report_envelope(const std::string& schema, uint64_t master_seed, Json config);

void write_report(const std::string& path, const Json& report);
Json read_report(const std::string& path);

// Checks the report against the published key set for its schema id; throws
// DataError on any missing or mistyped field.
void validate_report(const Json& report);

Json to_json(const DatasetSummary& summary);
Json to_json(const MetricSet& metrics);
Json to_json(const CiEstimate& estimate);
Json to_json(const ClassifierSpec& spec);
Json to_json(const ResampleSpec& spec);
Json to_json(const BootstrapSpec& spec);
Json to_json(const CaptureScenario& scenario);
Json cv_report_json(const CvReport& report);

} // namespace refertriage
