#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "refertriage/embed.hpp"
#include "refertriage/errors.hpp"

namespace refertriage {

namespace {

using nlohmann::json;

struct EndpointParts {
    std::string scheme_host_port;
    std::string path_prefix; // "" or "/api" style prefix before /embed
};

EndpointParts split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw InvalidArgument("remote embedder: endpoint must include a scheme: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, path_start), prefix};
}

json post_batch(httplib::Client& client, const std::string& path,
                const std::vector<std::string>& batch, const RemoteEmbedderConfig& config) {
    const std::string body = json{{"texts", batch}}.dump();
    std::string last_error;
    for (size_t attempt = 0; attempt <= config.max_retries; ++attempt) {
        if (attempt > 0) {
            const auto delay = config.backoff_initial_ms << (attempt - 1);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
        auto res = client.Post(path, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue; // non-200 is retryable per protocol
        }
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("vectors") || !parsed["vectors"].is_array())
            throw DataError("remote embedder: malformed response body");
        return parsed["vectors"];
    }
    throw DataError("remote embedder: giving up after " + std::to_string(config.max_retries + 1) +
                    " attempts (" + last_error + ")");
}

} // namespace

EmbeddingMatrix fetch_remote_embeddings(const RemoteEmbedderConfig& config,
                                        const std::vector<std::string>& texts) {
    if (config.endpoint.empty())
        throw InvalidArgument("remote embedder: no endpoint configured");
    if (config.batch_size == 0)
        throw InvalidArgument("remote embedder: batch_size must be >= 1");

    const auto parts = split_endpoint(config.endpoint);
    httplib::Client client(parts.scheme_host_port);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    const std::string path = parts.path_prefix + "/embed";

    std::vector<std::vector<double>> collected;
    collected.reserve(texts.size());
    size_t dim = 0;

    for (size_t start = 0; start < texts.size(); start += config.batch_size) {
        const size_t end = std::min(texts.size(), start + config.batch_size);
        const std::vector<std::string> batch(texts.begin() + static_cast<long>(start),
                                             texts.begin() + static_cast<long>(end));
        const json vectors = post_batch(client, path, batch, config);
        if (vectors.size() != batch.size())
            throw DataError("remote embedder: sent " + std::to_string(batch.size()) +
                            " texts, got " + std::to_string(vectors.size()) + " vectors");
        for (const auto& vec : vectors) {
            if (!vec.is_array()) throw DataError("remote embedder: vector is not an array");
            std::vector<double> v;
            v.reserve(vec.size());
            for (const auto& x : vec) {
                if (!x.is_number()) throw DataError("remote embedder: non-numeric component");
                v.push_back(x.get<double>());
            }
            if (dim == 0)
                dim = v.size();
            else if (v.size() != dim)
                throw DataError("remote embedder: inconsistent dimensionality (" +
                                std::to_string(v.size()) + " vs " + std::to_string(dim) + ")");
            collected.push_back(std::move(v));
        }
    }
    if (dim == 0 && !texts.empty())
        throw DataError("remote embedder: service returned zero-length vectors");

    EmbeddingMatrix m;
    m.dim = dim;
    m.record_ids.resize(texts.size());
    m.vectors = Matrix(texts.size(), dim);
    for (size_t i = 0; i < collected.size(); ++i) {
        m.record_ids[i] = std::to_string(i);
        std::copy(collected[i].begin(), collected[i].end(), m.vectors.row(i).begin());
    }
    return m;
}

} // namespace refertriage
