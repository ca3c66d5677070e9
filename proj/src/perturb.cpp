#include "refertriage/perturb.hpp"

#include <algorithm>
#include <cctype>

#include "refertriage/errors.hpp"
#include "refertriage/rng.hpp"

namespace refertriage {

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::char_sub: return "char_sub";
        case NoiseKind::char_del: return "char_del";
        case NoiseKind::word_swap: return "word_swap";
        case NoiseKind::word_del: return "word_del";
    }
    return "?";
}

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "char_sub") return NoiseKind::char_sub;
    if (s == "char_del") return NoiseKind::char_del;
    if (s == "word_swap") return NoiseKind::word_swap;
    if (s == "word_del") return NoiseKind::word_del;
    throw InvalidArgument("unknown noise kind '" + s +
                          "' (expected char_sub, char_del, word_swap or word_del)");
}

void NoiseSpec::validate() const {
    if (level < 0.0 || level > 0.5)
        throw InvalidArgument("noise level must lie in [0, 0.5], got " + std::to_string(level));
}

namespace {

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            if (!cur.empty()) words.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += static_cast<char>(c);
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

std::string perturb_chars(const std::string& text, const NoiseSpec& spec, Rng& rng) {
    const size_t count = static_cast<size_t>(spec.level * static_cast<double>(text.size()));
    if (count == 0) return text;

    auto positions = rng.sample_without_replacement(text.size(), count);
    if (spec.kind == NoiseKind::char_sub) {
        std::string out = text;
        for (size_t pos : positions) {
            const char orig = out[pos];
            // uniform over the 25 (or 26) lowercase letters differing from orig
            char c;
            do {
                c = static_cast<char>('a' + rng.below(26));
            } while (c == orig);
            out[pos] = c;
        }
        return out;
    }
    // char_del
    std::sort(positions.begin(), positions.end());
    std::string out;
    out.reserve(text.size() - count);
    size_t next = 0;
    for (size_t i = 0; i < text.size(); ++i) {
        if (next < positions.size() && positions[next] == i) {
            ++next;
            continue;
        }
        out += text[i];
    }
    return out;
}

std::string perturb_words(const std::string& text, const NoiseSpec& spec, Rng& rng) {
    std::vector<std::string> words = split_words(text);
    const size_t count = static_cast<size_t>(spec.level * static_cast<double>(words.size()));
    if (count == 0) return text;

    if (spec.kind == NoiseKind::word_swap) {
        for (size_t s = 0; s < count; ++s) {
            const size_t a = static_cast<size_t>(rng.below(words.size()));
            size_t b;
            do {
                b = static_cast<size_t>(rng.below(words.size()));
            } while (b == a);
            std::swap(words[a], words[b]);
        }
        return join_words(words);
    }
    // word_del
    auto doomed = rng.sample_without_replacement(words.size(), count);
    std::sort(doomed.begin(), doomed.end());
    std::vector<std::string> kept;
    kept.reserve(words.size() - count);
    size_t next = 0;
    for (size_t i = 0; i < words.size(); ++i) {
        if (next < doomed.size() && doomed[next] == i) {
            ++next;
            continue;
        }
        kept.push_back(std::move(words[i]));
    }
    return join_words(kept);
}

} // namespace

std::string perturb_text(const std::string& text, const NoiseSpec& spec) {
    spec.validate();
    if (spec.level == 0.0 || text.empty()) return text;

    Rng rng(spec.seed);
    switch (spec.kind) {
        case NoiseKind::char_sub:
        case NoiseKind::char_del:
            return perturb_chars(text, spec, rng);
        case NoiseKind::word_swap:
        case NoiseKind::word_del:
            return perturb_words(text, spec, rng);
    }
    return text;
}

namespace {

NoiseSpec record_spec(const NoiseSpec& spec, const std::string& record_id) {
    NoiseSpec per = spec;
    per.seed = spec.seed ^ hash_bytes(record_id.data(), record_id.size());
    return per;
}

} // namespace

ReferralDataset perturb_dataset(const ReferralDataset& dataset, const NoiseSpec& spec) {
    spec.validate();
    ReferralDataset out = dataset;
    const int64_t n = static_cast<int64_t>(out.records.size());
#pragma omp parallel for schedule(dynamic, 32)
    for (int64_t i = 0; i < n; ++i) {
        ReferralRecord& rec = out.records[static_cast<size_t>(i)];
        rec.diagnosis_text = perturb_text(rec.diagnosis_text, record_spec(spec, rec.record_id));
    }
    return out;
}

ReferralDataset perturb_dataset_serial(const ReferralDataset& dataset, const NoiseSpec& spec) {
    spec.validate();
    ReferralDataset out = dataset;
    for (ReferralRecord& rec : out.records)
        rec.diagnosis_text = perturb_text(rec.diagnosis_text, record_spec(spec, rec.record_id));
    return out;
}

} // namespace refertriage
