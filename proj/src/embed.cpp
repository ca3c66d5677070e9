#include "refertriage/embed.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <unordered_set>

#include "refertriage/csv.hpp"
#include "refertriage/errors.hpp"
#include "refertriage/rng.hpp"

namespace refertriage {

std::string to_string(VariantTag tag) {
    return tag == VariantTag::base ? "base" : "hyde";
}

VariantTag variant_from_string(const std::string& s) {
    if (s == "base") return VariantTag::base;
    if (s == "hyde") return VariantTag::hyde;
    throw InvalidArgument("unknown variant '" + s + "' (expected base or hyde)");
}

void HashingEmbedderConfig::validate() const {
    if (dim < 2) throw InvalidArgument("hashing embedder: dim must be >= 2");
    if (ngram_min < 1 || ngram_min > ngram_max)
        throw InvalidArgument("hashing embedder: need 1 <= ngram_min <= ngram_max");
}

namespace {

void accumulate_gram(const char* data, size_t len, size_t dim, bool signed_hash,
                     std::span<double> out) {
    const uint64_t h = hash_bytes(data, len);
    const size_t bucket = static_cast<size_t>(h % dim);
    const double sign = (!signed_hash || ((h >> 63) == 0)) ? 1.0 : -1.0;
    out[bucket] += sign;
}

} // namespace

void embed_one_text(const std::string& text, const HashingEmbedderConfig& config,
                    std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (text.empty()) return; // deliberate: empty entries stay as zero vectors

    std::string buf;
    if (config.lowercase) {
        buf.resize(text.size());
        std::transform(text.begin(), text.end(), buf.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    }
    const std::string& s = config.lowercase ? buf : text;

    if (s.size() < config.ngram_min) {
        // Too short for any configured gram: hash the whole text once.
        accumulate_gram(s.data(), s.size(), config.dim, config.signed_hash, out);
    } else {
        for (size_t n = config.ngram_min; n <= config.ngram_max && n <= s.size(); ++n)
            for (size_t i = 0; i + n <= s.size(); ++i)
                accumulate_gram(s.data() + i, n, config.dim, config.signed_hash, out);
    }

    double norm = l2_norm(out);
    if (norm == 0.0) {
        // Signed buckets cancelled exactly; fall back to one whole-text bucket
        // so the unit-norm contract holds for every non-empty text.
        accumulate_gram(s.data(), s.size(), config.dim, false, out);
        norm = 1.0;
    }
    for (double& v : out) v /= norm;
}

static EmbeddingMatrix hashing_matrix_shell(const std::vector<std::string>& texts,
                                            const HashingEmbedderConfig& config) {
    config.validate();
    EmbeddingMatrix m;
    m.dim = config.dim;
    m.record_ids.resize(texts.size());
    for (size_t i = 0; i < texts.size(); ++i) m.record_ids[i] = std::to_string(i);
    m.vectors = Matrix(texts.size(), config.dim);
    return m;
}

EmbeddingMatrix embed_hashing(const std::vector<std::string>& texts,
                              const HashingEmbedderConfig& config) {
    EmbeddingMatrix m = hashing_matrix_shell(texts, config);
    const int64_t n = static_cast<int64_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t i = 0; i < n; ++i)
        embed_one_text(texts[static_cast<size_t>(i)], config,
                       m.vectors.row(static_cast<size_t>(i)));
    return m;
}

EmbeddingMatrix embed_hashing_serial(const std::vector<std::string>& texts,
                                     const HashingEmbedderConfig& config) {
    EmbeddingMatrix m = hashing_matrix_shell(texts, config);
    for (size_t i = 0; i < texts.size(); ++i)
        embed_one_text(texts[i], config, m.vectors.row(i));
    return m;
}

EmbeddingMatrix load_embedding_file(const std::string& path) {
    const auto rows = read_csv(path);
    if (rows.empty()) throw DataError("embedding file is empty (no header row)");

    const CsvRow& header = rows[0];
    if (header.fields.size() < 2 || header.fields[0] != "record_id")
        throw DataError("embedding file: header must be record_id,d0,...,d{D-1}");
    const size_t dim = header.fields.size() - 1;

    EmbeddingMatrix m;
    m.dim = dim;
    m.vectors = Matrix(rows.size() - 1, dim);
    m.record_ids.reserve(rows.size() - 1);
    std::unordered_set<std::string> seen;

    for (size_t r = 1; r < rows.size(); ++r) {
        const CsvRow& row = rows[r];
        const std::string where = "line " + std::to_string(row.line);
        if (row.fields.size() != dim + 1)
            throw DataError(where + ": expected " + std::to_string(dim + 1) + " values, got " +
                            std::to_string(row.fields.size()));
        const std::string& id = row.fields[0];
        if (id.empty()) throw DataError(where + ": empty record_id");
        if (!seen.insert(id).second) throw DataError(where + ": duplicate record_id '" + id + "'");
        m.record_ids.push_back(id);

        for (size_t c = 0; c < dim; ++c) {
            const std::string& cell = row.fields[c + 1];
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
                throw DataError(where + ": non-numeric cell '" + cell + "'");
            if (!std::isfinite(v)) throw DataError(where + ": non-finite value '" + cell + "'");
            m.vectors.at(r - 1, c) = v;
        }
    }
    return m;
}

void write_embedding_file(const std::string& path, const EmbeddingMatrix& matrix) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);

    out << "record_id";
    for (size_t c = 0; c < matrix.dim; ++c) out << ",d" << c;
    out << "\n";

    char buf[32];
    for (size_t r = 0; r < matrix.vectors.rows(); ++r) {
        out << csv_quote(matrix.record_ids[r]);
        for (size_t c = 0; c < matrix.dim; ++c) {
            // shortest decimal that round-trips the exact double
            const auto res = std::to_chars(buf, buf + sizeof buf, matrix.vectors.at(r, c));
            out << ',';
            out.write(buf, res.ptr - buf);
        }
        out << "\n";
    }
    if (!out) throw DataError("write failed: " + path);
}

} // namespace refertriage
