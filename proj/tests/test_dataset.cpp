#include <doctest.h>

#include <set>

#include "refertriage/csv.hpp"
#include "refertriage/dataset.hpp"
#include "refertriage/errors.hpp"

using namespace refertriage;

namespace {

const char* kSmallFile =
    "record_id,diagnosis_text,icd10_codes,label\n"
    "a1,knee pain,M17.11,0\n"
    "a2,hip pain,M16.11;M25.551,1\n"
    "a3,,,0\n";

} // namespace

TEST_CASE("csv parser handles RFC-4180 quoting") {
    const auto rows = parse_csv("a,\"b,c\",\"say \"\"hi\"\"\"\nd,\"line\nbreak\",e\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].fields == std::vector<std::string>{"a", "b,c", "say \"hi\""});
    CHECK(rows[1].fields == std::vector<std::string>{"d", "line\nbreak", "e"});
    CHECK(rows[1].line == 2);

    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("a,b") == "\"a,b\"");
    const std::string tricky = "quote\" and,\ncomma";
    CHECK(parse_csv(csv_join({tricky, "x"}) + "\n")[0].fields[0] == tricky);
}

TEST_CASE("load_referrals parses rows in order") {
    const auto ds = parse_referrals(kSmallFile);
    REQUIRE(ds.size() == 3);
    CHECK(ds.records[0].record_id == "a1");
    CHECK(ds.records[1].icd10_codes == std::vector<std::string>{"M16.11", "M25.551"});
    size_t n1 = 0;
    for (const auto& r : ds.records) n1 += static_cast<size_t>(r.label);
    CHECK(n1 == 1);
    CHECK_FALSE(ds.enriched);
}

TEST_CASE("missing diagnosis text becomes the empty string") {
    const auto ds = parse_referrals(kSmallFile);
    CHECK(ds.records[2].diagnosis_text == "");
    CHECK(ds.records[2].icd10_codes.empty());
}

TEST_CASE("non-binary label is rejected with its line number") {
    const char* bad =
        "record_id,diagnosis_text,icd10_codes,label\n"
        "a1,x,,0\n"
        "a2,y,,2\n";
    CHECK_THROWS_WITH_AS(parse_referrals(bad), doctest::Contains("line 3"), DataError);
}

TEST_CASE("duplicate record_id is rejected with its line number") {
    const char* bad =
        "record_id,diagnosis_text,icd10_codes,label\n"
        "a1,x,,0\n"
        "a1,y,,1\n";
    CHECK_THROWS_WITH_AS(parse_referrals(bad), doctest::Contains("line 3"), DataError);
}

TEST_CASE("wrong column count is rejected with its line number") {
    const char* bad =
        "record_id,diagnosis_text,icd10_codes,label\n"
        "a1,x,0\n";
    CHECK_THROWS_WITH_AS(parse_referrals(bad), doctest::Contains("line 2"), DataError);
}

TEST_CASE("enrich_hyde appends descriptions with the | separator") {
    ReferralDataset ds;
    ds.records.push_back({"r1", "knee pain", {"M17.11"}, 0});
    CodeDictionary dict;
    dict.entries["M17.11"] = "Unilateral primary osteoarthritis, right knee";

    const auto enriched = enrich_hyde(ds, dict);
    CHECK(enriched.records[0].diagnosis_text ==
          "knee pain | Unilateral primary osteoarthritis, right knee");
    CHECK(enriched.enriched);
    CHECK(ds.records[0].diagnosis_text == "knee pain"); // input untouched
}

TEST_CASE("enrich_hyde leaves records without codes unchanged") {
    ReferralDataset ds;
    ds.records.push_back({"r1", "foot pain", {}, 0});
    const auto enriched = enrich_hyde(ds, CodeDictionary{});
    CHECK(enriched.records[0].diagnosis_text == "foot pain");
}

TEST_CASE("duplicate codes append their description once") {
    ReferralDataset ds;
    ds.records.push_back({"r1", "knee pain", {"M17.11", "M17.11"}, 0});
    CodeDictionary dict;
    dict.entries["M17.11"] = "OA right knee";

    const auto enriched = enrich_hyde(ds, dict);
    // oracle: the appended description set equals the unique-code description set
    const std::set<std::string> unique_codes(ds.records[0].icd10_codes.begin(),
                                             ds.records[0].icd10_codes.end());
    size_t occurrences = 0;
    std::string::size_type pos = 0;
    while ((pos = enriched.records[0].diagnosis_text.find("OA right knee", pos)) !=
           std::string::npos) {
        ++occurrences;
        pos += 1;
    }
    CHECK(occurrences == unique_codes.size());
    CHECK(enriched.records[0].diagnosis_text == "knee pain | OA right knee");
}

TEST_CASE("missing codes are skipped and counted") {
    ReferralDataset ds;
    ds.records.push_back({"r1", "text", {"NOPE", "M54.5"}, 0});
    CodeDictionary dict;
    dict.entries["M54.5"] = "Low back pain";

    EnrichStats stats;
    const auto enriched = enrich_hyde(ds, dict, &stats);
    CHECK(enriched.records[0].diagnosis_text == "text | Low back pain");
    CHECK(stats.codes_missing == 1);
    CHECK(stats.records_enriched == 1);
}

TEST_CASE("enriching an enriched dataset is rejected") {
    ReferralDataset ds;
    ds.records.push_back({"r1", "text", {}, 0});
    ds.enriched = true;
    CHECK_THROWS_AS(enrich_hyde(ds, CodeDictionary{}), InvalidArgument);
}

TEST_CASE("describe computes counts and exact averages") {
    ReferralDataset ds;
    ds.records.push_back({"r1", "ab", {}, 0});
    ds.records.push_back({"r2", "cd", {}, 1});

    const auto s = describe(ds);
    CHECK(s.n_total == 2);
    CHECK(s.n_class0 == 1);
    CHECK(s.n_class1 == 1);
    CHECK(s.total_chars == 4);
    CHECK(s.avg_chars == 2.0);
    CHECK(s.total_words == 2);
    CHECK(s.minority_fraction == 0.5);
}

TEST_CASE("describe satisfies avg_chars = total_chars / n_total exactly") {
    // the identity holds at full precision; rounding happens only at display
    // (181,431 chars over 2,086 records shows as 86.98)
    ReferralDataset ds;
    for (size_t i = 0; i < 4; ++i)
        ds.records.push_back({"r" + std::to_string(i), std::string(i + 1, 'x'), {}, 0});
    ds.records[0].label = 1;
    const auto s = describe(ds);
    CHECK(s.avg_chars == static_cast<double>(s.total_chars) / static_cast<double>(s.n_total));
    CHECK(181431.0 / 2086.0 == doctest::Approx(86.98).epsilon(1e-4));
}

TEST_CASE("word counting uses maximal non-whitespace runs") {
    CHECK(count_words("") == 0);
    CHECK(count_words("   ") == 0);
    CHECK(count_words("one") == 1);
    CHECK(count_words("  a\tb\nc  d ") == 4);
}

TEST_CASE("describe rejects an empty dataset") {
    CHECK_THROWS_AS(describe(ReferralDataset{}), InvalidArgument);
}

TEST_CASE("the bundled fixture reproduces the reference corpus statistics") {
    const auto ds = load_referrals(std::string(REFERTRIAGE_DATA_DIR) + "/referrals_synthetic.csv");
    const auto s = describe(ds);
    CHECK(s.n_total == 2086);
    CHECK(s.n_class1 == 235);
    CHECK(s.minority_fraction * 100.0 == doctest::Approx(11.27).epsilon(1e-3));
    CHECK(s.avg_words == doctest::Approx(12.0).epsilon(0.05));
}

TEST_CASE("enrichment never decreases total characters") {
    ReferralDataset ds;
    ds.records.push_back({"r1", "alpha", {"C1"}, 0});
    ds.records.push_back({"r2", "beta", {}, 1});
    CodeDictionary dict;
    dict.entries["C1"] = "gamma delta";

    const auto before = describe(ds);
    const auto after = describe(enrich_hyde(ds, dict));
    CHECK(after.total_chars >= before.total_chars);
}
