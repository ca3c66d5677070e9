#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "refertriage/matrix.hpp"

namespace refertriage {

struct EmbeddingMatrix {
    std::vector<std::string> record_ids;
    size_t dim = 0;
    Matrix vectors; // record_ids.size() x dim

    bool operator==(const EmbeddingMatrix&) const = default;
};

enum class VariantTag { base, hyde };

std::string to_string(VariantTag tag);
VariantTag variant_from_string(const std::string& s);

struct EmbeddedDataset {
    EmbeddingMatrix matrix;
    std::vector<int> labels; // aligned to matrix.record_ids
    VariantTag variant = VariantTag::base;
};

// Signed feature hashing over character n-grams. Deterministic, offline
// stand-in for sentence encoders; degrades smoothly under character noise.
struct HashingEmbedderConfig {
    size_t dim = 384;       // mirrors BGE-small output width
    size_t ngram_min = 3;
    size_t ngram_max = 5;
    bool lowercase = true;
    bool signed_hash = true;

    void validate() const;
};

// Each non-empty text maps to an L2-normalized vector; empty text maps to the
// zero vector. Bit-exact for a given (texts, config) regardless of thread count.
EmbeddingMatrix embed_hashing(const std::vector<std::string>& texts,
                              const HashingEmbedderConfig& config = {});
EmbeddingMatrix embed_hashing_serial(const std::vector<std::string>& texts,
                                     const HashingEmbedderConfig& config = {});

// Embeds one text into `out` (length config.dim). Shared by both drivers.
void embed_one_text(const std::string& text, const HashingEmbedderConfig& config,
                    std::span<double> out);

// File carrier for externally computed vectors.
// Header `record_id,d0,...,d{D-1}`; values are shortest-round-trip decimal
// doubles, so write->read is bit-exact.
EmbeddingMatrix load_embedding_file(const std::string& path);
void write_embedding_file(const std::string& path, const EmbeddingMatrix& matrix);

// HTTP client for a sentence-embedding service.
// POST {endpoint}/embed  body {"texts":[...]}  ->  {"vectors":[[...],...]}
struct RemoteEmbedderConfig {
    std::string endpoint;       // e.g. http://localhost:8089
    size_t batch_size = 16;
    size_t max_retries = 3;     // per batch, on transport failure or non-200
    size_t backoff_initial_ms = 100; // doubles per retry
};

EmbeddingMatrix fetch_remote_embeddings(const RemoteEmbedderConfig& config,
                                        const std::vector<std::string>& texts);

} // namespace refertriage
