#include "adam/index.hpp"

#include <algorithm>
#include <stdexcept>

namespace adam {

const char* to_string(Channel c) {
    return c == Channel::Biography ? "biography" : "face";
}

StoreIndex StoreIndex::build(std::vector<PersonRecord> records,
                             const std::map<std::string, EmbeddingVector>& biography_embeddings,
                             const std::map<std::string, EmbeddingVector>& face_embeddings) {
    StoreIndex index;
    std::sort(records.begin(), records.end(),
              [](const PersonRecord& a, const PersonRecord& b) { return a.qid < b.qid; });
    index.records_ = std::move(records);

    for (std::size_t i = 0; i < index.records_.size(); ++i) {
        const PersonRecord& rec = index.records_[i];
        if (!index.by_qid_.emplace(rec.qid, i).second)
            throw std::invalid_argument("duplicate qid " + rec.qid);
        for (const auto& [lang, name] : rec.names)
            index.aliases_[canonical_name(name)].insert(rec.qid);
    }

    auto build_channel = [&](const std::map<std::string, EmbeddingVector>& embeddings,
                             bool required) {
        ChannelData data;
        for (const PersonRecord& rec : index.records_) {
            auto it = embeddings.find(rec.qid);
            if (it == embeddings.end()) {
                if (required)
                    throw std::invalid_argument("MissingEmbedding: " + rec.qid);
                continue;
            }
            const EmbeddingVector& vec = it->second;
            if (data.dim == 0) data.dim = vec.dim();
            if (vec.dim() != data.dim)
                throw std::invalid_argument("DimensionMismatch for " + rec.qid);
            data.qids.push_back(rec.qid);
            data.rows.push_back(vec);
        }
        return data;
    };

    index.biography_ = build_channel(biography_embeddings, true);
    index.face_ = build_channel(face_embeddings, false);
    return index;
}

const PersonRecord* StoreIndex::find(const std::string& qid) const {
    auto it = by_qid_.find(qid);
    return it == by_qid_.end() ? nullptr : &records_[it->second];
}

std::set<std::string> StoreIndex::exact_lookup(const std::string& name) const {
    auto it = aliases_.find(canonical_name(name));
    return it == aliases_.end() ? std::set<std::string>{} : it->second;
}

const StoreIndex::ChannelData& StoreIndex::channel_data(Channel channel) const {
    return channel == Channel::Biography ? biography_ : face_;
}

std::size_t StoreIndex::channel_dim(Channel channel) const { return channel_data(channel).dim; }
std::size_t StoreIndex::channel_size(Channel channel) const {
    return channel_data(channel).qids.size();
}

const EmbeddingVector* StoreIndex::embedding(Channel channel, const std::string& qid) const {
    const ChannelData& data = channel_data(channel);
    auto it = std::lower_bound(data.qids.begin(), data.qids.end(), qid);
    if (it == data.qids.end() || *it != qid) return nullptr;
    return &data.rows[static_cast<std::size_t>(it - data.qids.begin())];
}

std::vector<ScoredHit> StoreIndex::knn(Channel channel, const EmbeddingVector& query,
                                       std::size_t k) const {
    const ChannelData& data = channel_data(channel);
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (data.dim != 0 && query.dim() != data.dim)
        throw std::invalid_argument("DimensionMismatch: query dim " +
                                    std::to_string(query.dim()));

    std::vector<ScoredHit> hits;
    hits.reserve(data.qids.size());
    for (std::size_t i = 0; i < data.qids.size(); ++i)
        hits.push_back({data.qids[i], query.dot(data.rows[i]), channel});

    std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.qid < b.qid;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

}  // namespace adam
