#pragma once
// Pluggable embedding providers: deterministic stubs for hermetic runs and an
// HTTP client for an external embedding service.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "adam/domain.hpp"

namespace adam {

class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual EmbeddingVector embed(const std::string& text) const = 0;
    virtual std::size_t dim() const = 0;
};

class FaceEmbedder {
public:
    virtual ~FaceEmbedder() = default;
    virtual EmbeddingVector embed(const std::string& image_bytes) const = 0;
    virtual std::size_t dim() const = 0;
};

// Pure function of (input, seed): a keyed hash expanded to dim floats, then
// L2-normalized. Serves both the text and face interfaces.
class StubEmbedder : public TextEmbedder, public FaceEmbedder {
public:
    explicit StubEmbedder(std::size_t dim = 64, std::uint64_t seed = 0);

    EmbeddingVector embed(const std::string& text) const override;
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

EmbeddingVector stub_embed(const std::string& text, std::size_t dim, std::uint64_t seed);

struct EmbedClientError : std::runtime_error {
    enum class Kind { Transport, BadResponse, DimensionMismatch };
    Kind kind;
    EmbedClientError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// Client for a remote embedding service speaking
// POST {"texts":[...]} -> {"vectors":[[...],...]}. Vectors are normalized
// locally if the service returns unnormalized values.
class RemoteTextEmbedder : public TextEmbedder {
public:
    RemoteTextEmbedder(std::string endpoint, std::size_t dim, std::size_t max_batch = 64);

    EmbeddingVector embed(const std::string& text) const override;
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const;
    std::size_t dim() const override { return dim_; }

private:
    std::string endpoint_;
    std::size_t dim_;
    std::size_t max_batch_;
};

// Embedding sidecar file: header "dim=<int>", then "qid<TAB>v0,v1,..." lines.
void write_sidecar(const std::string& path,
                   const std::map<std::string, EmbeddingVector>& embeddings, std::size_t dim);
std::map<std::string, EmbeddingVector> read_sidecar(const std::string& path,
                                                    std::size_t* dim_out = nullptr);

}  // namespace adam
