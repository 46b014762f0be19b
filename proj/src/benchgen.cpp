#include "adam/benchgen.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "adam/io.hpp"
#include "httplib.h"
#include "json.hpp"

namespace adam {

using nlohmann::json;

namespace {

std::uint64_t hash64(const std::string& s, std::uint64_t seed) {
    std::uint64_t h = 1469598103934665603ULL ^ seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::string StubLlmClient::complete(const std::string& prompt,
                                    const GenerationParams& params) const {
    (void)params;
    // Pull the subject tag out of the prompt when present so item text stays
    // tied to the subject; otherwise fall back to the prompt hash alone.
    std::string subject = "subject";
    auto pos = prompt.find("[subject:");
    if (pos != std::string::npos) {
        auto end = prompt.find(']', pos);
        if (end != std::string::npos) subject = prompt.substr(pos + 9, end - pos - 9);
    }

    std::uint64_t h = hash64(prompt, seed_);
    json items = json::array();
    for (BloomLevel level : kAllBloomLevels) {
        for (LanguageVariant variant : {LanguageVariant::English, LanguageVariant::Original}) {
            std::uint64_t hv = hash64(std::string(to_string(level)) + to_string(variant), h);
            json item;
            item["bloom"] = to_string(level);
            item["variant"] = to_string(variant);
            item["question"] = std::string("About ") + subject + " (" + to_string(level) + "/" +
                               to_string(variant) + "): which statement is correct?";
            json options = json::array();
            for (int o = 0; o < 4; ++o)
                options.push_back("Statement " + std::to_string((hv >> (8 * o)) % 997) + "-" +
                                  std::to_string(o));
            item["options"] = options;
            item["answer_index"] = static_cast<int>(hv % 4);
            items.push_back(item);
        }
    }
    return "Concise biography of " + subject + ".\n" + items.dump(1) + "\n";
}

std::string RemoteLlmClient::complete(const std::string& prompt,
                                      const GenerationParams& params) const {
    httplib::Client client(endpoint_);
    json body{{"prompt", prompt}, {"max_tokens", params.max_tokens}};
    auto res = client.Post("/complete", body.dump(), "application/json");
    if (!res) throw std::runtime_error("LLM endpoint unreachable: " + endpoint_);
    if (res->status != 200)
        throw std::runtime_error("LLM endpoint status " + std::to_string(res->status));
    json parsed = json::parse(res->body);
    return parsed.at("text").get<std::string>();
}

std::string build_generation_prompt(const PersonRecord& subject, const std::string& summary,
                                    const std::string& original_language) {
    if (summary.empty()) throw std::invalid_argument("generation prompt needs a summary");
    if (original_language.empty())
        throw std::invalid_argument("MissingOriginalLanguage for " + subject.qid);

    std::ostringstream out;
    out << "[subject:" << subject.qid << "]\n";
    out << "You are given information about one person.\n\nNames:\n";
    for (const auto& [lang, name] : subject.names) out << "- " << lang << ": " << name << "\n";
    out << "\nSummary:\n" << summary << "\n\n";
    out << "Tasks:\n"
        << "1. Synthesize a concise biography of this person.\n"
        << "2. Generate multiple-choice questions covering these cognitive levels:\n";
    for (BloomLevel level : kAllBloomLevels) out << "   - " << to_string(level) << "\n";
    out << "For each level write one question in English (variant \"en\") and one in "
        << original_language << " (variant \"org\"), 12 questions total.\n"
        << "Emit the questions as a strict JSON array; each element must have fields "
        << "\"bloom\", \"variant\", \"question\", \"options\" (exactly 4 distinct strings), "
        << "and \"answer_index\" (0-3).\n";
    return out.str();
}

namespace {

// First balanced top-level JSON array in free text, respecting strings.
std::optional<std::string> extract_json_array(const std::string& text) {
    std::size_t start = text.find('[');
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false, escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (escaped) {
                escaped = false;
                continue;
            }
            if (in_string) {
                if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '[') ++depth;
            else if (c == ']') {
                --depth;
                if (depth == 0) return text.substr(start, i - start + 1);
            }
        }
        start = text.find('[', start + 1);
    }
    return std::nullopt;
}

}  // namespace

ParsedItems parse_items(const std::string& llm_output, const std::string& subject_qid,
                        bool subject_has_image) {
    using Kind = ParseIssue::Kind;
    ParsedItems result;

    auto array_text = extract_json_array(llm_output);
    if (!array_text) {
        result.issues.push_back({Kind::NoJsonFound, "no top-level JSON array in output"});
        return result;
    }
    json arr;
    try {
        arr = json::parse(*array_text);
    } catch (const std::exception& e) {
        result.issues.push_back({Kind::NoJsonFound, std::string("array parse failed: ") + e.what()});
        return result;
    }

    std::set<std::pair<BloomLevel, LanguageVariant>> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& el = arr[i];
        auto violation = [&](const std::string& field) {
            result.issues.push_back(
                {Kind::SchemaViolation, "item " + std::to_string(i) + ": " + field});
        };
        if (!el.is_object()) {
            violation("not an object");
            continue;
        }
        auto bloom = el.contains("bloom") && el["bloom"].is_string()
                         ? bloom_from_string(el["bloom"].get<std::string>())
                         : std::nullopt;
        if (!bloom) {
            violation("bloom");
            continue;
        }
        auto variant = el.contains("variant") && el["variant"].is_string()
                           ? variant_from_string(el["variant"].get<std::string>())
                           : std::nullopt;
        if (!variant) {
            violation("variant");
            continue;
        }
        if (!el.contains("question") || !el["question"].is_string() ||
            el["question"].get<std::string>().empty()) {
            violation("question");
            continue;
        }
        if (!el.contains("options") || !el["options"].is_array() || el["options"].size() != 4) {
            violation("options");
            continue;
        }
        std::array<std::string, 4> options;
        bool options_ok = true;
        std::set<std::string> distinct;
        for (int o = 0; o < 4; ++o) {
            if (!el["options"][o].is_string()) {
                options_ok = false;
                break;
            }
            options[o] = el["options"][o].get<std::string>();
            distinct.insert(options[o]);
        }
        if (!options_ok || distinct.size() != 4) {
            violation("options");
            continue;
        }
        if (!el.contains("answer_index") || !el["answer_index"].is_number_integer()) {
            violation("answer_index");
            continue;
        }
        int answer = el["answer_index"].get<int>();
        if (answer < 0 || answer > 3) {
            violation("answer_index");
            continue;
        }

        BenchmarkItem item;
        item.subject_qid = subject_qid;
        item.bloom = *bloom;
        item.variant = *variant;
        item.id = subject_qid + ":" + to_string(item.bloom) + ":" + to_string(item.variant);
        item.question = el["question"].get<std::string>();
        item.options = options;
        item.answer_index = answer;
        item.uses_image = false;
        (void)subject_has_image;
        seen.insert({item.bloom, item.variant});
        result.items.push_back(std::move(item));
    }

    for (BloomLevel level : kAllBloomLevels)
        for (LanguageVariant variant : {LanguageVariant::English, LanguageVariant::Original})
            if (!seen.contains({level, variant}))
                result.issues.push_back({Kind::MissingLevelVariant,
                                         std::string(to_string(level)) + "/" + to_string(variant)});
    return result;
}

std::vector<BenchmarkItem> generate_benchmark(const std::vector<ManifestEntry>& manifest,
                                              const std::vector<PersonRecord>& db,
                                              const LlmClient& llm, const BenchGenConfig& cfg) {
    std::map<std::string, const PersonRecord*> by_qid;
    for (const PersonRecord& rec : db) by_qid[rec.qid] = &rec;

    std::vector<ManifestEntry> ordered = manifest;
    std::sort(ordered.begin(), ordered.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
        return std::tie(a.country, a.qid) < std::tie(b.country, b.qid);
    });

    std::vector<BenchmarkItem> all;
    for (const ManifestEntry& entry : ordered) {
        auto it = by_qid.find(entry.qid);
        if (it == by_qid.end()) throw std::runtime_error("manifest qid not in db: " + entry.qid);
        const PersonRecord& subject = *it->second;

        std::string prompt =
            build_generation_prompt(subject, subject.biography, entry.original_language);
        std::string output = llm.complete(prompt, GenerationParams{});
        ParsedItems parsed = parse_items(output, subject.qid, !subject.image_urls.empty());
        for (const ParseIssue& issue : parsed.issues)
            throw std::runtime_error("generation failed for " + subject.qid + ": " + issue.detail);

        for (BenchmarkItem& item : parsed.items) {
            if (!subject.image_urls.empty() &&
                std::find(cfg.image_levels.begin(), cfg.image_levels.end(), item.bloom) !=
                    cfg.image_levels.end())
                item.uses_image = true;
            all.push_back(std::move(item));
        }
    }
    return all;
}

std::string item_to_json(const BenchmarkItem& item) {
    json j{{"id", item.id},
           {"subject_qid", item.subject_qid},
           {"bloom", to_string(item.bloom)},
           {"variant", to_string(item.variant)},
           {"question", item.question},
           {"options", item.options},
           {"answer_index", item.answer_index},
           {"uses_image", item.uses_image}};
    return j.dump();
}

BenchmarkItem item_from_json(const std::string& line) {
    json j = json::parse(line);
    BenchmarkItem item;
    item.id = j.at("id").get<std::string>();
    item.subject_qid = j.at("subject_qid").get<std::string>();
    auto bloom = bloom_from_string(j.at("bloom").get<std::string>());
    auto variant = variant_from_string(j.at("variant").get<std::string>());
    if (!bloom || !variant) throw std::runtime_error("bad bloom/variant in item: " + line);
    item.bloom = *bloom;
    item.variant = *variant;
    item.question = j.at("question").get<std::string>();
    auto opts = j.at("options").get<std::vector<std::string>>();
    if (opts.size() != 4) throw std::runtime_error("item must have 4 options: " + line);
    std::copy(opts.begin(), opts.end(), item.options.begin());
    item.answer_index = j.at("answer_index").get<int>();
    if (item.answer_index < 0 || item.answer_index > 3)
        throw std::runtime_error("bad answer_index: " + line);
    item.uses_image = j.at("uses_image").get<bool>();
    return item;
}

std::string bench_to_jsonl(const std::vector<BenchmarkItem>& items) {
    std::string out;
    for (const BenchmarkItem& item : items) {
        out += item_to_json(item);
        out += '\n';
    }
    return out;
}

std::vector<BenchmarkItem> bench_from_jsonl(const std::string& path) {
    std::vector<BenchmarkItem> out;
    for (const std::string& line : io::read_lines(path)) {
        if (line.empty()) continue;
        out.push_back(item_from_json(line));
    }
    return out;
}

}  // namespace adam
