#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace refertriage {

struct ReferralRecord {
    std::string record_id;
    std::string diagnosis_text;               // never absent; missing source becomes ""
    std::vector<std::string> icd10_codes;
    int label = 0;                            // 0 = no procedure, 1 = with procedure

    bool operator==(const ReferralRecord&) const = default;
};

struct ReferralDataset {
    std::vector<ReferralRecord> records;
    bool enriched = false;                    // base vs HyDE-enriched text variant

    size_t size() const { return records.size(); }
    bool operator==(const ReferralDataset&) const = default;
};

// ICD-10-CM code -> long description.
struct CodeDictionary {
    std::map<std::string, std::string> entries;
};

struct DatasetSummary {
    size_t n_total = 0;
    size_t n_class0 = 0;
    size_t n_class1 = 0;
    size_t total_chars = 0;
    size_t total_words = 0;
    double avg_chars = 0.0;
    double avg_words = 0.0;
    double minority_fraction = 0.0;
};

// Column names in a referral file; override to ingest foreign headers.
struct ReferralSchema {
    std::string record_id = "record_id";
    std::string diagnosis_text = "diagnosis_text";
    std::string icd10_codes = "icd10_codes";
    std::string label = "label";
};

struct EnrichStats {
    size_t records_enriched = 0;
    size_t codes_missing = 0;                 // code occurrences without a dictionary entry
};

// Loads a UTF-8, RFC-4180 referral file. Missing/blank text cells become empty
// strings; labels must parse as 0/1; duplicate record ids are rejected. Errors
// name the offending line.
ReferralDataset load_referrals(const std::string& path, const ReferralSchema& schema = {});
ReferralDataset parse_referrals(const std::string& csv_text, const ReferralSchema& schema = {});

// Dictionary file with header `code,description`.
CodeDictionary load_code_dictionary(const std::string& path);
CodeDictionary parse_code_dictionary(const std::string& csv_text);

// Appends each record's code descriptions (code order, duplicate codes dropped)
// to its text with " | " separators. Records without matching codes are left
// unchanged. Input must not already be enriched; the input is not mutated.
ReferralDataset enrich_hyde(const ReferralDataset& dataset, const CodeDictionary& dict,
                            EnrichStats* stats = nullptr);

// Corpus summary over diagnosis_text. Words are maximal runs of
// non-whitespace.
DatasetSummary describe(const ReferralDataset& dataset);

size_t count_words(const std::string& text);

} // namespace refertriage
