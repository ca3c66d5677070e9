#include "refertriage/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "refertriage/csv.hpp"
#include "refertriage/errors.hpp"

namespace refertriage {

namespace {

size_t find_column(const CsvRow& header, const std::string& name, const std::string& path) {
    for (size_t i = 0; i < header.fields.size(); ++i)
        if (header.fields[i] == name) return i;
    throw DataError(path + ": header is missing column '" + name + "'");
}

std::vector<std::string> split_codes(const std::string& cell) {
    std::vector<std::string> codes;
    std::string cur;
    for (char c : cell) {
        if (c == ';') {
            if (!cur.empty()) codes.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) codes.push_back(cur);
    return codes;
}

} // namespace

ReferralDataset parse_referrals(const std::string& csv_text, const ReferralSchema& schema) {
    const auto rows = parse_csv(csv_text);
    if (rows.empty()) throw DataError("referral file is empty (no header row)");

    const CsvRow& header = rows[0];
    const size_t ncols = header.fields.size();
    const size_t c_id = find_column(header, schema.record_id, "referral file");
    const size_t c_text = find_column(header, schema.diagnosis_text, "referral file");
    const size_t c_codes = find_column(header, schema.icd10_codes, "referral file");
    const size_t c_label = find_column(header, schema.label, "referral file");

    ReferralDataset dataset;
    dataset.records.reserve(rows.size() - 1);
    std::unordered_set<std::string> seen_ids;

    for (size_t r = 1; r < rows.size(); ++r) {
        const CsvRow& row = rows[r];
        const std::string where = "line " + std::to_string(row.line);
        if (row.fields.size() != ncols)
            throw DataError(where + ": expected " + std::to_string(ncols) + " columns, got " +
                            std::to_string(row.fields.size()));

        ReferralRecord rec;
        rec.record_id = row.fields[c_id];
        if (rec.record_id.empty()) throw DataError(where + ": empty record_id");
        if (!seen_ids.insert(rec.record_id).second)
            throw DataError(where + ": duplicate record_id '" + rec.record_id + "'");

        rec.diagnosis_text = row.fields[c_text]; // empty cell stays ""
        rec.icd10_codes = split_codes(row.fields[c_codes]);

        const std::string& lab = row.fields[c_label];
        if (lab == "0") {
            rec.label = 0;
        } else if (lab == "1") {
            rec.label = 1;
        } else {
            throw DataError(where + ": label must be 0 or 1, got '" + lab + "'");
        }
        dataset.records.push_back(std::move(rec));
    }
    return dataset;
}

ReferralDataset load_referrals(const std::string& path, const ReferralSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_referrals(ss.str(), schema);
}

CodeDictionary parse_code_dictionary(const std::string& csv_text) {
    const auto rows = parse_csv(csv_text);
    if (rows.empty()) throw DataError("dictionary file is empty (no header row)");
    const size_t c_code = find_column(rows[0], "code", "dictionary file");
    const size_t c_desc = find_column(rows[0], "description", "dictionary file");
    const size_t ncols = rows[0].fields.size();

    CodeDictionary dict;
    for (size_t r = 1; r < rows.size(); ++r) {
        const CsvRow& row = rows[r];
        const std::string where = "line " + std::to_string(row.line);
        if (row.fields.size() != ncols)
            throw DataError(where + ": expected " + std::to_string(ncols) + " columns, got " +
                            std::to_string(row.fields.size()));
        const std::string& code = row.fields[c_code];
        const std::string& desc = row.fields[c_desc];
        if (code.empty()) throw DataError(where + ": empty code");
        if (desc.empty()) throw DataError(where + ": empty description for code '" + code + "'");
        if (!dict.entries.emplace(code, desc).second)
            throw DataError(where + ": duplicate code '" + code + "'");
    }
    return dict;
}

CodeDictionary load_code_dictionary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_code_dictionary(ss.str());
}

ReferralDataset enrich_hyde(const ReferralDataset& dataset, const CodeDictionary& dict,
                            EnrichStats* stats) {
    if (dataset.enriched)
        throw InvalidArgument("dataset is already HyDE-enriched; enrichment is applied once");

    EnrichStats local;
    ReferralDataset out = dataset;
    out.enriched = true;

    for (ReferralRecord& rec : out.records) {
        std::vector<std::string> appended;
        std::unordered_set<std::string> seen_codes;
        for (const std::string& code : rec.icd10_codes) {
            if (!seen_codes.insert(code).second) continue; // duplicate code: once
            auto it = dict.entries.find(code);
            if (it == dict.entries.end()) {
                ++local.codes_missing;
                continue;
            }
            appended.push_back(it->second);
        }
        if (appended.empty()) continue;
        for (const std::string& desc : appended) {
            rec.diagnosis_text += " | ";
            rec.diagnosis_text += desc;
        }
        ++local.records_enriched;
    }
    if (stats) *stats = local;
    return out;
}

size_t count_words(const std::string& text) {
    size_t words = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        const bool ws = std::isspace(c) != 0;
        if (!ws && !in_word) ++words;
        in_word = !ws;
    }
    return words;
}

DatasetSummary describe(const ReferralDataset& dataset) {
    if (dataset.records.empty()) throw InvalidArgument("describe: empty dataset");

    DatasetSummary s;
    s.n_total = dataset.records.size();
    for (const ReferralRecord& rec : dataset.records) {
        if (rec.label == 1)
            ++s.n_class1;
        else
            ++s.n_class0;
        s.total_chars += rec.diagnosis_text.size();
        s.total_words += count_words(rec.diagnosis_text);
    }
    s.avg_chars = static_cast<double>(s.total_chars) / static_cast<double>(s.n_total);
    s.avg_words = static_cast<double>(s.total_words) / static_cast<double>(s.n_total);
    s.minority_fraction = static_cast<double>(s.n_class1) / static_cast<double>(s.n_total);
    return s;
}

} // namespace refertriage
