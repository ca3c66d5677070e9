#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "refertriage/perturb.hpp"
#include "refertriage/rng.hpp"

using namespace refertriage;

namespace {

std::multiset<std::string> word_multiset(const std::string& text) {
    std::multiset<std::string> words;
    std::istringstream in(text);
    std::string w;
    while (in >> w) words.insert(w);
    return words;
}

size_t word_count(const std::string& text) {
    return word_multiset(text).size();
}

} // namespace

TEST_CASE("level 0 is the identity for every kind") {
    const std::string text = "some  text with\tweird   spacing";
    for (NoiseKind kind : {NoiseKind::char_sub, NoiseKind::char_del, NoiseKind::word_swap,
                           NoiseKind::word_del}) {
        NoiseSpec spec{kind, 0.0, 17};
        CHECK(perturb_text(text, spec) == text);
    }
}

TEST_CASE("char_del removes exactly floor(rho * len) characters") {
    // oracle: floor(0.5 * 4) = 2
    NoiseSpec spec{NoiseKind::char_del, 0.5, 3};
    CHECK(perturb_text("abcd", spec).size() == 2);
}

TEST_CASE("word_del keeps exactly W - floor(rho * W) words") {
    // oracle: floor(0.5 * 4) = 2 removed, 2 remain
    NoiseSpec spec{NoiseKind::word_del, 0.5, 3};
    CHECK(word_count(perturb_text("a b c d", spec)) == 2);
}

TEST_CASE("char_sub preserves length and changes exactly the budgeted positions") {
    const std::string text = "orthopedic referral for left knee pain";
    NoiseSpec spec{NoiseKind::char_sub, 0.3, 11};
    const std::string out = perturb_text(text, spec);
    REQUIRE(out.size() == text.size());
    size_t changed = 0;
    for (size_t i = 0; i < text.size(); ++i)
        if (out[i] != text[i]) ++changed;
    CHECK(changed == static_cast<size_t>(0.3 * static_cast<double>(text.size())));
}

TEST_CASE("substituted characters are lowercase and differ from the original") {
    NoiseSpec spec{NoiseKind::char_sub, 0.5, 5};
    const std::string text = "zzzzzzzzzz";
    const std::string out = perturb_text(text, spec);
    for (size_t i = 0; i < text.size(); ++i)
        if (out[i] != text[i]) {
            CHECK(out[i] >= 'a');
            CHECK(out[i] <= 'z');
            CHECK(out[i] != 'z');
        }
}

TEST_CASE("word_swap preserves the word multiset") {
    const std::string text = "alpha beta gamma delta epsilon zeta";
    NoiseSpec spec{NoiseKind::word_swap, 0.5, 23};
    const std::string out = perturb_text(text, spec);
    CHECK(word_multiset(out) == word_multiset(text));
}

TEST_CASE("perturbation count is exact over random inputs") {
    Rng rng(424242);
    for (int trial = 0; trial < 50; ++trial) {
        std::string text;
        const size_t n_words = 1 + rng.below(12);
        for (size_t w = 0; w < n_words; ++w) {
            if (w) text += ' ';
            const size_t len = 1 + rng.below(8);
            for (size_t c = 0; c < len; ++c) text += static_cast<char>('a' + rng.below(26));
        }
        const double level = static_cast<double>(rng.below(6)) / 10.0;

        NoiseSpec del{NoiseKind::char_del, level, rng.next_u64()};
        const size_t expect_char_removed =
            static_cast<size_t>(level * static_cast<double>(text.size()));
        CHECK(perturb_text(text, del).size() == text.size() - expect_char_removed);

        NoiseSpec wdel{NoiseKind::word_del, level, rng.next_u64()};
        const size_t expect_word_removed =
            static_cast<size_t>(level * static_cast<double>(word_count(text)));
        CHECK(word_count(perturb_text(text, wdel)) == word_count(text) - expect_word_removed);
    }
}

TEST_CASE("empty text passes through unchanged") {
    NoiseSpec spec{NoiseKind::char_sub, 0.5, 1};
    CHECK(perturb_text("", spec) == "");
}

TEST_CASE("noise level outside [0, 0.5] is rejected") {
    CHECK_THROWS(perturb_text("x", NoiseSpec{NoiseKind::char_sub, 0.6, 1}));
    CHECK_THROWS(perturb_text("x", NoiseSpec{NoiseKind::char_sub, -0.1, 1}));
}

namespace {

ReferralDataset small_dataset() {
    ReferralDataset ds;
    ds.records.push_back({"r1", "left knee pain after fall", {}, 0});
    ds.records.push_back({"r2", "chronic shoulder stiffness months", {}, 1});
    ds.records.push_back({"r3", "lumbar radiculopathy right leg", {}, 0});
    return ds;
}

} // namespace

TEST_CASE("perturb_dataset at level 0 returns an equal dataset") {
    const auto ds = small_dataset();
    CHECK(perturb_dataset(ds, NoiseSpec{NoiseKind::word_swap, 0.0, 9}) == ds);
}

TEST_CASE("perturb_dataset is deterministic") {
    const auto ds = small_dataset();
    NoiseSpec spec{NoiseKind::char_sub, 0.4, 77};
    CHECK(perturb_dataset(ds, spec) == perturb_dataset(ds, spec));
}

TEST_CASE("perturb_dataset leaves labels and ids untouched") {
    const auto ds = small_dataset();
    const auto out = perturb_dataset(ds, NoiseSpec{NoiseKind::char_del, 0.5, 5});
    for (size_t i = 0; i < ds.size(); ++i) {
        CHECK(out.records[i].record_id == ds.records[i].record_id);
        CHECK(out.records[i].label == ds.records[i].label);
    }
}

TEST_CASE("removing a record does not change the others' perturbation") {
    const auto full = small_dataset();
    ReferralDataset subset = full;
    subset.records.erase(subset.records.begin() + 1);

    NoiseSpec spec{NoiseKind::char_sub, 0.5, 123};
    const auto full_out = perturb_dataset(full, spec);
    const auto subset_out = perturb_dataset(subset, spec);

    CHECK(subset_out.records[0] == full_out.records[0]);
    CHECK(subset_out.records[1] == full_out.records[2]);
}
