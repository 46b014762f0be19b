#pragma once
// Immutable in-memory knowledge-store index: exact multilingual alias lookup
// and exact cosine k-NN over per-channel embedding matrices.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "adam/domain.hpp"

namespace adam {

enum class Channel { Biography, Face };

const char* to_string(Channel c);

struct ScoredHit {
    std::string qid;
    double score = 0.0;  // cosine similarity in [-1, 1]
    Channel channel = Channel::Biography;
};

class StoreIndex {
public:
    // Every record needs a biography embedding; face embeddings are optional
    // per record. Throws MissingEmbedding / DimensionMismatch as
    // std::invalid_argument.
    static StoreIndex build(std::vector<PersonRecord> records,
                            const std::map<std::string, EmbeddingVector>& biography_embeddings,
                            const std::map<std::string, EmbeddingVector>& face_embeddings = {});

    const PersonRecord* find(const std::string& qid) const;
    std::size_t size() const { return records_.size(); }
    const std::vector<PersonRecord>& records() const { return records_; }

    // Qids whose canonicalized alias (any language) equals the canonicalized
    // query; empty set when none.
    std::set<std::string> exact_lookup(const std::string& name) const;

    // Exact brute-force cosine ranking: min(k, channel size) hits sorted by
    // (score desc, qid asc).
    std::vector<ScoredHit> knn(Channel channel, const EmbeddingVector& query,
                               std::size_t k) const;

    std::size_t channel_dim(Channel channel) const;
    std::size_t channel_size(Channel channel) const;
    const EmbeddingVector* embedding(Channel channel, const std::string& qid) const;

private:
    StoreIndex() = default;

    struct ChannelData {
        std::vector<std::string> qids;       // sorted ascending
        std::vector<EmbeddingVector> rows;   // parallel to qids, unit-norm
        std::size_t dim = 0;
    };

    const ChannelData& channel_data(Channel channel) const;

    std::vector<PersonRecord> records_;                // sorted by qid
    std::map<std::string, std::size_t> by_qid_;
    std::map<std::string, std::set<std::string>> aliases_;  // canonical name -> qids
    ChannelData biography_;
    ChannelData face_;
};

}  // namespace adam
