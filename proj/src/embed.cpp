#include "adam/embed.hpp"

#include <cmath>
#include <sstream>

#include "adam/io.hpp"
#include "httplib.h"
#include "json.hpp"

namespace adam {

namespace {

// splitmix64 over an FNV-1a digest of the input keyed by (seed, lane).
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
    std::uint64_t h = 1469598103934665603ULL ^ seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

StubEmbedder::StubEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim < 2) throw std::invalid_argument("stub embedder dim must be >= 2");
}

EmbeddingVector StubEmbedder::embed(const std::string& text) const {
    return stub_embed(text, dim_, seed_);
}

EmbeddingVector stub_embed(const std::string& text, std::size_t dim, std::uint64_t seed) {
    if (dim < 2) throw std::invalid_argument("stub_embed dim must be >= 2");
    std::uint64_t key = fnv1a(text, seed);
    std::vector<double> values(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        std::uint64_t bits = splitmix64(key + 0x9E3779B97F4A7C15ULL * (i + 1));
        // uniform in [-1, 1)
        values[i] = static_cast<double>(bits >> 11) / static_cast<double>(1ULL << 52) - 1.0;
    }
    return EmbeddingVector(std::move(values)).normalized();
}

RemoteTextEmbedder::RemoteTextEmbedder(std::string endpoint, std::size_t dim,
                                       std::size_t max_batch)
    : endpoint_(std::move(endpoint)), dim_(dim), max_batch_(max_batch) {}

EmbeddingVector RemoteTextEmbedder::embed(const std::string& text) const {
    return embed_batch({text}).front();
}

std::vector<EmbeddingVector> RemoteTextEmbedder::embed_batch(
    const std::vector<std::string>& texts) const {
    using Kind = EmbedClientError::Kind;
    if (texts.size() > max_batch_)
        throw EmbedClientError(Kind::Transport, "batch exceeds configured max");

    httplib::Client client(endpoint_);
    nlohmann::json body;
    body["texts"] = texts;
    auto res = client.Post("/embed", body.dump(), "application/json");
    if (!res) throw EmbedClientError(Kind::Transport, "embedding endpoint unreachable");
    if (res->status != 200)
        throw EmbedClientError(Kind::BadResponse,
                               "embedding endpoint status " + std::to_string(res->status));

    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(res->body);
    } catch (const std::exception& e) {
        throw EmbedClientError(Kind::BadResponse, std::string("bad JSON: ") + e.what());
    }
    if (!parsed.contains("vectors") || !parsed["vectors"].is_array() ||
        parsed["vectors"].size() != texts.size())
        throw EmbedClientError(Kind::BadResponse, "response vector count mismatch");

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& v : parsed["vectors"]) {
        std::vector<double> values = v.get<std::vector<double>>();
        if (values.size() != dim_)
            throw EmbedClientError(Kind::DimensionMismatch,
                                   "expected dim " + std::to_string(dim_) + ", got " +
                                       std::to_string(values.size()));
        out.push_back(EmbeddingVector(std::move(values)).normalized());
    }
    return out;
}

void write_sidecar(const std::string& path,
                   const std::map<std::string, EmbeddingVector>& embeddings, std::size_t dim) {
    std::ostringstream buf;
    buf << "dim=" << dim << "\n";
    buf.precision(17);
    for (const auto& [qid, vec] : embeddings) {
        if (vec.dim() != dim)
            throw std::invalid_argument("sidecar vector dim mismatch for " + qid);
        buf << qid << '\t';
        for (std::size_t i = 0; i < vec.dim(); ++i) {
            if (i) buf << ',';
            buf << vec[i];
        }
        buf << '\n';
    }
    io::atomic_write(path, buf.str());
}

std::map<std::string, EmbeddingVector> read_sidecar(const std::string& path,
                                                    std::size_t* dim_out) {
    std::vector<std::string> lines = io::read_lines(path);
    if (lines.empty() || lines[0].rfind("dim=", 0) != 0)
        throw std::runtime_error("sidecar missing dim header: " + path);
    std::size_t dim = std::stoul(lines[0].substr(4));
    if (dim_out) *dim_out = dim;

    std::map<std::string, EmbeddingVector> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto tab = lines[i].find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("malformed sidecar line " + std::to_string(i + 1));
        std::string qid = lines[i].substr(0, tab);
        std::vector<double> values;
        values.reserve(dim);
        for (const std::string& f : io::split(lines[i].substr(tab + 1), ','))
            values.push_back(std::stod(f));
        if (values.size() != dim)
            throw std::runtime_error("sidecar dim mismatch for " + qid);
        out.emplace(std::move(qid), EmbeddingVector(std::move(values)));
    }
    return out;
}

}  // namespace adam
