#pragma once
// Evaluation harness: answer-prompt construction under RAG/image/language
// conditions, response grading, stratified accuracy aggregation, and report
// rendering.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adam/benchgen.hpp"
#include "adam/domain.hpp"
#include "adam/retrieval.hpp"
#include "adam/sampler.hpp"

namespace adam {

struct EvalCondition {
    bool rag = false;
    bool image = false;
    LanguageVariant variant = LanguageVariant::English;
    std::string model_id;
};

struct EvalOutcome {
    std::string item_id;
    EvalCondition condition;
    std::optional<int> choice;  // nullopt = abstention, counted incorrect
    bool correct = false;
    bool rag_degraded = false;  // retrieval found no candidates, answered without context
};

struct ReportCell {
    BloomLevel bloom = BloomLevel::Remembering;
    LanguageVariant variant = LanguageVariant::English;
    PopularityTier tier = PopularityTier::High;
    bool rag = false;
    bool image = false;
    std::size_t n = 0;
    std::size_t correct = 0;

    double accuracy() const { return static_cast<double>(correct) / static_cast<double>(n); }
};

struct AnswerPrompt {
    std::string text;
    std::optional<std::string> image_url;
    bool rag_degraded = false;
};

struct HarnessConfig {
    RagConfig rag;
    std::string few_shot_preamble;  // prepended verbatim; see default_few_shot()
};

std::string default_few_shot();

// Builds the prompt for one item under the given condition. With rag on, the
// subject is disambiguated through the retrieval cascade (query = subject
// name + question text, metadata from the manifest entry) and the augmented
// context is prepended; NoCandidates degrades to the non-RAG prompt.
AnswerPrompt make_answer_prompt(const BenchmarkItem& item, const EvalCondition& condition,
                                const StoreIndex& index, const TextEmbedder& embedder,
                                const std::map<std::string, ManifestEntry>& manifest_by_qid,
                                const HarnessConfig& cfg);

// Parses the first standalone letter A-D (case-insensitive); unparsable
// responses are abstentions and count as incorrect.
EvalOutcome grade(const std::string& response, const BenchmarkItem& item,
                  const EvalCondition& condition);

// One cell per populated (bloom, variant, tier, rag, image) stratum.
std::vector<ReportCell> aggregate(const std::vector<EvalOutcome>& outcomes,
                                  const std::vector<BenchmarkItem>& items,
                                  const std::map<std::string, ManifestEntry>& manifest_by_qid);

// Pooled accuracy over a subset of outcomes; marginals are re-aggregated from
// raw outcomes, never averaged over cells.
double pooled_accuracy(const std::vector<EvalOutcome>& outcomes);

std::string report_to_csv(const std::vector<ReportCell>& cells);
std::string report_to_table(const std::vector<ReportCell>& cells);

std::string outcomes_to_jsonl(const std::vector<EvalOutcome>& outcomes);
std::vector<EvalOutcome> outcomes_from_jsonl(const std::string& path);

// Full run of one condition over a benchmark with a model client.
std::vector<EvalOutcome> run_condition(const std::vector<BenchmarkItem>& items,
                                       const EvalCondition& condition, const StoreIndex& index,
                                       const TextEmbedder& embedder, const LlmClient& model,
                                       const std::map<std::string, ManifestEntry>& manifest_by_qid,
                                       const HarnessConfig& cfg);

// Fixed-letter stub model for hermetic harness tests.
class FixedAnswerModel : public LlmClient {
public:
    explicit FixedAnswerModel(char letter) : letter_(letter) {}
    std::string complete(const std::string& prompt, const GenerationParams&) const override {
        (void)prompt;
        return std::string(1, letter_);
    }

private:
    char letter_;
};

std::map<std::string, ManifestEntry> manifest_lookup(const std::vector<ManifestEntry>& manifest);

}  // namespace adam
