#include "adam/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace adam {

const char* to_string(Stage stage) {
    switch (stage) {
        case Stage::ExactMatch: return "ExactMatch";
        case Stage::Semantic: return "Semantic";
        case Stage::NationalityFilter: return "NationalityFilter";
        case Stage::BirthdateFilter: return "BirthdateFilter";
        case Stage::ContextCosine: return "ContextCosine";
        case Stage::FaceKnn: return "FaceKnn";
        case Stage::PopularityRank: return "PopularityRank";
    }
    return "?";
}

namespace {

void sort_candidates(std::vector<Candidate>& candidates) {
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.qid < b.qid;
    });
}

// Metadata filters shared by text and face paths; absent query fields skip
// the corresponding filter.
void apply_metadata_filters(std::vector<Candidate>& candidates, const RetrievalQuery& query,
                            const StoreIndex& index, const RagConfig& cfg) {
    if (query.nationality) {
        std::erase_if(candidates, [&](const Candidate& c) {
            const PersonRecord* rec = index.find(c.qid);
            return !rec || rec->nationality != *query.nationality;
        });
        for (Candidate& c : candidates) c.provenance.push_back(Stage::NationalityFilter);
    }
    if (query.birth_year) {
        std::erase_if(candidates, [&](const Candidate& c) {
            const PersonRecord* rec = index.find(c.qid);
            return !rec ||
                   std::abs(rec->birth_date.year - *query.birth_year) > cfg.birth_window_years;
        });
        for (Candidate& c : candidates) c.provenance.push_back(Stage::BirthdateFilter);
    }
}

}  // namespace

std::vector<Candidate> disambiguate_text(const RetrievalQuery& query, const StoreIndex& index,
                                         const TextEmbedder& embedder, const RagConfig& cfg) {
    using Kind = RetrievalError::Kind;
    if (!query.name && !query.context)
        throw RetrievalError(Kind::EmptyQuery, "text disambiguation needs a name or context");

    // Stage 1: exact alias match; unambiguous hit short-circuits the cascade.
    if (query.name) {
        std::set<std::string> exact = index.exact_lookup(*query.name);
        if (exact.size() == 1)
            return {Candidate{*exact.begin(), 1.0, {Stage::ExactMatch}}};
    }

    // Stage 2: semantic retrieval over biography embeddings.
    std::string semantic_query;
    if (query.name) semantic_query = *query.name;
    if (query.context) {
        if (!semantic_query.empty()) semantic_query += ' ';
        semantic_query += *query.context;
    }
    EmbeddingVector qvec = embedder.embed(semantic_query);
    std::vector<ScoredHit> hits = index.knn(Channel::Biography, qvec, cfg.semantic_k);

    std::vector<Candidate> candidates;
    candidates.reserve(hits.size());
    for (const ScoredHit& hit : hits)
        candidates.push_back({hit.qid, hit.score, {Stage::Semantic}});

    // Stages 3-4.
    apply_metadata_filters(candidates, query, index, cfg);

    // Stage 5: re-rank survivors by context cosine when context is present.
    if (query.context && !candidates.empty()) {
        EmbeddingVector ctx = embedder.embed(*query.context);
        for (Candidate& c : candidates) {
            const EmbeddingVector* bio = index.embedding(Channel::Biography, c.qid);
            c.score = bio ? ctx.dot(*bio) : -1.0;
            c.provenance.push_back(Stage::ContextCosine);
        }
        sort_candidates(candidates);
    }

    if (candidates.empty())
        throw RetrievalError(Kind::NoCandidates, "all candidates filtered out");
    return candidates;
}

std::vector<Candidate> retrieve_by_face(const RetrievalQuery& query, const StoreIndex& index,
                                        const RagConfig& cfg) {
    using Kind = RetrievalError::Kind;
    if (!query.face) throw RetrievalError(Kind::EmptyQuery, "face query missing embedding");
    if (index.channel_size(Channel::Face) == 0)
        throw RetrievalError(Kind::NoFaceChannel, "index has no face embeddings");

    std::vector<ScoredHit> hits = index.knn(Channel::Face, *query.face, cfg.face_k);
    std::vector<Candidate> candidates;
    candidates.reserve(hits.size());
    for (const ScoredHit& hit : hits)
        candidates.push_back({hit.qid, hit.score, {Stage::FaceKnn}});

    apply_metadata_filters(candidates, query, index, cfg);

    if (candidates.empty())
        throw RetrievalError(Kind::NoCandidates, "all face candidates filtered out");
    if (candidates.size() > cfg.face_final) candidates.resize(cfg.face_final);
    return candidates;
}

std::vector<Candidate> popularity_rank(std::vector<Candidate> candidates,
                                       const StoreIndex& index, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must be in [0, 1]");
    if (candidates.empty()) return candidates;

    std::int64_t max_pop = 0;
    for (const Candidate& c : candidates) {
        const PersonRecord* rec = index.find(c.qid);
        if (rec) max_pop = std::max(max_pop, rec->popularity);
    }
    double denom = std::log10(1.0 + static_cast<double>(max_pop));

    for (Candidate& c : candidates) {
        const PersonRecord* rec = index.find(c.qid);
        double pop_term = 0.0;
        if (rec && denom > 0.0)
            pop_term = std::log10(1.0 + static_cast<double>(rec->popularity)) / denom;
        c.score = (1.0 - lambda) * c.score + lambda * pop_term;
        c.provenance.push_back(Stage::PopularityRank);
    }
    sort_candidates(candidates);
    return candidates;
}

namespace {

// Truncate to at most budget codepoints, never splitting a UTF-8 sequence.
std::string truncate_utf8(const std::string& text, std::size_t budget) {
    std::size_t chars = 0, i = 0;
    while (i < text.size() && chars < budget) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        std::size_t len = (c < 0x80) ? 1 : (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : 4;
        i += len;
        ++chars;
    }
    if (i >= text.size()) return text;
    return text.substr(0, i) + "…";
}

}  // namespace

std::string augment_prompt(const std::string& question_text,
                           const std::vector<const PersonRecord*>& candidates,
                           std::size_t biography_budget) {
    if (candidates.empty())
        throw std::invalid_argument("augment_prompt requires at least one candidate");

    std::ostringstream out;
    out << "CONTEXT:\n";
    for (const PersonRecord* rec : candidates) {
        std::string name = rec->names.count("en") ? rec->names.at("en")
                                                  : rec->names.begin()->second;
        out << "- Name: " << name << "\n"
            << "  Born: " << rec->birth_date.year << " in " << rec->birthplace << "\n"
            << "  Nationality: " << rec->nationality << "\n"
            << "  Biography: " << truncate_utf8(rec->biography, biography_budget) << "\n";
    }
    out << "QUESTION: " << question_text << "\n";
    return out.str();
}

std::string candidates_to_json(const std::vector<Candidate>& candidates) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Candidate& c : candidates) {
        nlohmann::json stages = nlohmann::json::array();
        for (Stage s : c.provenance) stages.push_back(to_string(s));
        arr.push_back({{"qid", c.qid}, {"score", c.score}, {"provenance", stages}});
    }
    return arr.dump(2);
}

}  // namespace adam
