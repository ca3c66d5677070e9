#pragma once

#include <cstdint>
#include <string>

#include "refertriage/dataset.hpp"

namespace refertriage {

enum class NoiseKind { char_sub, char_del, word_swap, word_del };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& s);

struct NoiseSpec {
    NoiseKind kind = NoiseKind::char_sub;
    double level = 0.0;   // rho in [0, 0.5]
    uint64_t seed = 0;

    void validate() const;
};

// Applies floor(level * n) perturbations, n being the character or word count.
// level 0 (or a zero count) returns the input unchanged, byte for byte.
// char_sub replaces distinct positions with random lowercase letters differing
// from the original; char_del removes distinct positions; word_swap performs
// sequential swaps of two distinct word positions; word_del removes distinct
// word indices. Word operations rejoin surviving words with single spaces.
std::string perturb_text(const std::string& text, const NoiseSpec& spec);

// Per-record streams are derived from spec.seed and a hash of record_id, so a
// record's perturbation is independent of which other records are present.
ReferralDataset perturb_dataset(const ReferralDataset& dataset, const NoiseSpec& spec);
ReferralDataset perturb_dataset_serial(const ReferralDataset& dataset, const NoiseSpec& spec);

} // namespace refertriage
