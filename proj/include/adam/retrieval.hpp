#pragma once
// Retrieval pipeline: text disambiguation cascade (exact match, semantic
// k-NN, nationality and birthdate filters, context cosine ranking), the face
// retrieval path, popularity-weighted re-ranking, and prompt augmentation.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adam/domain.hpp"
#include "adam/embed.hpp"
#include "adam/index.hpp"

namespace adam {

struct RetrievalQuery {
    std::optional<std::string> name;
    std::optional<std::string> context;
    std::optional<std::string> nationality;
    std::optional<int> birth_year;
    std::optional<EmbeddingVector> face;
    std::optional<std::string> language;
};

enum class Stage {
    ExactMatch,
    Semantic,
    NationalityFilter,
    BirthdateFilter,
    ContextCosine,
    FaceKnn,
    PopularityRank,
};

const char* to_string(Stage stage);

struct Candidate {
    std::string qid;
    double score = 0.0;
    std::vector<Stage> provenance;  // stages passed, in pipeline order
};

struct RagConfig {
    std::size_t semantic_k = 50;
    std::size_t face_k = 100;
    std::size_t face_final = 5;
    int birth_window_years = 20;
    double popularity_weight = 0.3;  // lambda in [0, 1]
    std::size_t biography_budget = 1500;  // chars per candidate in prompts
};

struct RetrievalError : std::runtime_error {
    enum class Kind { EmptyQuery, NoCandidates, NoFaceChannel };
    Kind kind;
    RetrievalError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// Exact match first; if absent or ambiguous, semantic retrieval over the
// biography channel followed by nationality and inclusive ±window birth-year
// filters, then context-cosine re-ranking. Filters only remove.
std::vector<Candidate> disambiguate_text(const RetrievalQuery& query, const StoreIndex& index,
                                         const TextEmbedder& embedder, const RagConfig& cfg);

// Face k-NN, then the same metadata filters, capped at cfg.face_final.
std::vector<Candidate> retrieve_by_face(const RetrievalQuery& query, const StoreIndex& index,
                                        const RagConfig& cfg);

// score' = (1-lambda)*score + lambda*log10(1+pop)/log10(1+max_pop); sorted
// desc with qid tie-break.
std::vector<Candidate> popularity_rank(std::vector<Candidate> candidates,
                                       const StoreIndex& index, double lambda);

// Deterministic CONTEXT/QUESTION prompt; biographies truncated at a UTF-8
// character boundary with a trailing ellipsis.
std::string augment_prompt(const std::string& question_text,
                           const std::vector<const PersonRecord*>& candidates,
                           std::size_t biography_budget = 1500);

std::string candidates_to_json(const std::vector<Candidate>& candidates);

}  // namespace adam
