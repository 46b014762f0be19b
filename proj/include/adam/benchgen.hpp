#pragma once
// Benchmark generation: biography-synthesis + question-generation prompt,
// LLM clients (deterministic stub and HTTP), and strict parsing of generated
// multiple-choice items.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "adam/domain.hpp"
#include "adam/sampler.hpp"

namespace adam {

struct GenerationParams {
    int max_tokens = 2048;
};

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const std::string& prompt, const GenerationParams& params) const = 0;
};

// Deterministic stub: emits a valid 12-item JSON array derived from a hash of
// the prompt, so generation is byte-reproducible without any model.
class StubLlmClient : public LlmClient {
public:
    explicit StubLlmClient(std::uint64_t seed = 0) : seed_(seed) {}
    std::string complete(const std::string& prompt, const GenerationParams& params) const override;

private:
    std::uint64_t seed_;
};

// HTTP client: POST {"prompt":...,"max_tokens":...} -> {"text":...}.
class RemoteLlmClient : public LlmClient {
public:
    explicit RemoteLlmClient(std::string endpoint) : endpoint_(std::move(endpoint)) {}
    std::string complete(const std::string& prompt, const GenerationParams& params) const override;

private:
    std::string endpoint_;
};

struct BenchmarkItem {
    std::string id;  // "<qid>:<bloom>:<variant>"
    std::string subject_qid;
    BloomLevel bloom = BloomLevel::Remembering;
    LanguageVariant variant = LanguageVariant::English;
    std::string question;
    std::array<std::string, 4> options;
    int answer_index = 0;  // 0-3
    bool uses_image = false;
};

// Deterministic generation prompt requesting a concise biography plus one
// MCQ per (Bloom level, language variant) as a strict JSON array.
std::string build_generation_prompt(const PersonRecord& subject, const std::string& summary,
                                    const std::string& original_language);

struct ParseIssue {
    enum class Kind { NoJsonFound, SchemaViolation, MissingLevelVariant };
    Kind kind;
    std::string detail;
};

struct ParsedItems {
    std::vector<BenchmarkItem> items;
    std::vector<ParseIssue> issues;

    bool complete() const { return issues.empty() && items.size() == 12; }
};

// Extracts the first balanced top-level JSON array and validates every
// element; deficits are reported per (level, variant).
ParsedItems parse_items(const std::string& llm_output, const std::string& subject_qid,
                        bool subject_has_image);

struct BenchGenConfig {
    // Bloom levels whose items may reference the subject's image.
    std::vector<BloomLevel> image_levels = {BloomLevel::Remembering, BloomLevel::Understanding};
};

// Generates items for every manifest subject, ordered by (country, qid).
std::vector<BenchmarkItem> generate_benchmark(const std::vector<ManifestEntry>& manifest,
                                              const std::vector<PersonRecord>& db,
                                              const LlmClient& llm, const BenchGenConfig& cfg);

std::string item_to_json(const BenchmarkItem& item);
BenchmarkItem item_from_json(const std::string& line);
std::string bench_to_jsonl(const std::vector<BenchmarkItem>& items);
std::vector<BenchmarkItem> bench_from_jsonl(const std::string& path);

}  // namespace adam
