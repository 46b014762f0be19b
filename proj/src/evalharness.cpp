#include "adam/evalharness.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "adam/io.hpp"
#include "json.hpp"

namespace adam {

using nlohmann::json;

std::string default_few_shot() {
    return "Answer biographical multiple-choice questions with a single letter.\n"
           "\n"
           "QUESTION: In which field did the physicist work?\n"
           "A) Botany  B) Physics  C) Law  D) Painting\n"
           "ANSWER: B\n"
           "\n"
           "QUESTION: Which century saw the composer's birth?\n"
           "A) 17th  B) 18th  C) 19th  D) 20th\n"
           "ANSWER: C\n"
           "\n";
}

AnswerPrompt make_answer_prompt(const BenchmarkItem& item, const EvalCondition& condition,
                                const StoreIndex& index, const TextEmbedder& embedder,
                                const std::map<std::string, ManifestEntry>& manifest_by_qid,
                                const HarnessConfig& cfg) {
    AnswerPrompt prompt;
    std::ostringstream out;
    out << (cfg.few_shot_preamble.empty() ? default_few_shot() : cfg.few_shot_preamble);

    if (condition.rag) {
        const PersonRecord* subject = index.find(item.subject_qid);
        RetrievalQuery query;
        if (subject && !subject->names.empty()) {
            query.name = subject->names.count("en") ? subject->names.at("en")
                                                    : subject->names.begin()->second;
        }
        query.context = item.question;
        if (auto it = manifest_by_qid.find(item.subject_qid); it != manifest_by_qid.end()) {
            if (subject) {
                query.nationality = subject->nationality;
                query.birth_year = subject->birth_date.year;
            }
        }
        try {
            std::vector<Candidate> candidates =
                disambiguate_text(query, index, embedder, cfg.rag);
            std::vector<const PersonRecord*> records;
            for (const Candidate& c : candidates) {
                if (const PersonRecord* rec = index.find(c.qid)) records.push_back(rec);
                if (records.size() >= 3) break;
            }
            out << augment_prompt(item.question, records, cfg.rag.biography_budget);
        } catch (const RetrievalError&) {
            prompt.rag_degraded = true;
            out << "QUESTION: " << item.question << "\n";
        }
    } else {
        out << "QUESTION: " << item.question << "\n";
    }

    static const char kLabels[4] = {'A', 'B', 'C', 'D'};
    for (int o = 0; o < 4; ++o)
        out << kLabels[o] << ") " << item.options[static_cast<std::size_t>(o)] << "\n";
    out << "Answer with a single letter (A, B, C, or D).\nANSWER:";

    if (condition.image && item.uses_image) {
        const PersonRecord* subject = index.find(item.subject_qid);
        if (subject && !subject->image_urls.empty()) {
            prompt.image_url = subject->image_urls.front();
            out << "\n[image: " << *prompt.image_url << "]";
        }
    }
    prompt.text = out.str();
    return prompt;
}

EvalOutcome grade(const std::string& response, const BenchmarkItem& item,
                  const EvalCondition& condition) {
    EvalOutcome outcome;
    outcome.item_id = item.id;
    outcome.condition = condition;

    // First standalone letter A-D: delimited by non-alphanumerics on both sides.
    auto is_alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    for (std::size_t i = 0; i < response.size(); ++i) {
        char c = response[i];
        char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (upper < 'A' || upper > 'D') continue;
        bool left_ok = (i == 0) || !is_alnum(response[i - 1]);
        bool right_ok = (i + 1 == response.size()) || !is_alnum(response[i + 1]);
        if (left_ok && right_ok) {
            outcome.choice = upper - 'A';
            break;
        }
    }
    outcome.correct = outcome.choice && *outcome.choice == item.answer_index;
    return outcome;
}

std::map<std::string, ManifestEntry> manifest_lookup(const std::vector<ManifestEntry>& manifest) {
    std::map<std::string, ManifestEntry> out;
    for (const ManifestEntry& e : manifest) out.emplace(e.qid, e);
    return out;
}

std::vector<ReportCell> aggregate(const std::vector<EvalOutcome>& outcomes,
                                  const std::vector<BenchmarkItem>& items,
                                  const std::map<std::string, ManifestEntry>& manifest_by_qid) {
    std::map<std::string, const BenchmarkItem*> by_id;
    for (const BenchmarkItem& item : items) by_id[item.id] = &item;

    // Stratum key: (bloom, variant, tier, rag, image).
    std::map<std::tuple<int, int, int, bool, bool>, ReportCell> cells;
    for (const EvalOutcome& outcome : outcomes) {
        auto it = by_id.find(outcome.item_id);
        if (it == by_id.end()) throw std::runtime_error("UnknownItem: " + outcome.item_id);
        const BenchmarkItem& item = *it->second;
        auto mit = manifest_by_qid.find(item.subject_qid);
        if (mit == manifest_by_qid.end())
            throw std::runtime_error("UnknownItem: subject not in manifest: " + item.subject_qid);

        auto key = std::make_tuple(static_cast<int>(item.bloom), static_cast<int>(item.variant),
                                   static_cast<int>(mit->second.tier), outcome.condition.rag,
                                   outcome.condition.image);
        ReportCell& cell = cells[key];
        cell.bloom = item.bloom;
        cell.variant = item.variant;
        cell.tier = mit->second.tier;
        cell.rag = outcome.condition.rag;
        cell.image = outcome.condition.image;
        ++cell.n;
        if (outcome.correct) ++cell.correct;
    }

    std::vector<ReportCell> out;
    out.reserve(cells.size());
    for (const auto& [key, cell] : cells) out.push_back(cell);
    return out;
}

double pooled_accuracy(const std::vector<EvalOutcome>& outcomes) {
    if (outcomes.empty()) return 0.0;
    std::size_t correct = 0;
    for (const EvalOutcome& o : outcomes)
        if (o.correct) ++correct;
    return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

namespace {

std::string format_accuracy(double acc) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << acc;
    return out.str();
}

}  // namespace

std::string report_to_csv(const std::vector<ReportCell>& cells) {
    if (cells.empty()) throw std::invalid_argument("report needs at least one cell");
    std::ostringstream out;
    out << "bloom,variant,tier,rag,image,n,accuracy\n";
    for (const ReportCell& cell : cells)
        out << to_string(cell.bloom) << ',' << to_string(cell.variant) << ','
            << to_string(cell.tier) << ',' << (cell.rag ? 1 : 0) << ',' << (cell.image ? 1 : 0)
            << ',' << cell.n << ',' << format_accuracy(cell.accuracy()) << '\n';
    return out.str();
}

std::string report_to_table(const std::vector<ReportCell>& cells) {
    if (cells.empty()) throw std::invalid_argument("report needs at least one cell");
    std::ostringstream out;
    out << std::left << std::setw(14) << "bloom" << std::setw(9) << "variant" << std::setw(8)
        << "tier" << std::setw(5) << "rag" << std::setw(7) << "image" << std::right
        << std::setw(6) << "n" << std::setw(10) << "accuracy" << "\n";
    for (const ReportCell& cell : cells)
        out << std::left << std::setw(14) << to_string(cell.bloom) << std::setw(9)
            << to_string(cell.variant) << std::setw(8) << to_string(cell.tier) << std::setw(5)
            << (cell.rag ? "1" : "0") << std::setw(7) << (cell.image ? "1" : "0") << std::right
            << std::setw(6) << cell.n << std::setw(10) << format_accuracy(cell.accuracy())
            << "\n";
    return out.str();
}

std::string outcomes_to_jsonl(const std::vector<EvalOutcome>& outcomes) {
    std::string out;
    for (const EvalOutcome& o : outcomes) {
        json j{{"item_id", o.item_id},
               {"rag", o.condition.rag},
               {"image", o.condition.image},
               {"variant", to_string(o.condition.variant)},
               {"model_id", o.condition.model_id},
               {"correct", o.correct},
               {"rag_degraded", o.rag_degraded}};
        if (o.choice) j["choice"] = *o.choice;
        else j["choice"] = nullptr;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<EvalOutcome> outcomes_from_jsonl(const std::string& path) {
    std::vector<EvalOutcome> out;
    for (const std::string& line : io::read_lines(path)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        EvalOutcome o;
        o.item_id = j.at("item_id").get<std::string>();
        o.condition.rag = j.at("rag").get<bool>();
        o.condition.image = j.at("image").get<bool>();
        auto variant = variant_from_string(j.at("variant").get<std::string>());
        if (!variant) throw std::runtime_error("bad variant in outcome: " + line);
        o.condition.variant = *variant;
        o.condition.model_id = j.value("model_id", "");
        if (!j.at("choice").is_null()) o.choice = j["choice"].get<int>();
        o.correct = j.at("correct").get<bool>();
        o.rag_degraded = j.value("rag_degraded", false);
        out.push_back(std::move(o));
    }
    return out;
}

std::vector<EvalOutcome> run_condition(const std::vector<BenchmarkItem>& items,
                                       const EvalCondition& condition, const StoreIndex& index,
                                       const TextEmbedder& embedder, const LlmClient& model,
                                       const std::map<std::string, ManifestEntry>& manifest_by_qid,
                                       const HarnessConfig& cfg) {
    std::vector<EvalOutcome> outcomes;
    outcomes.reserve(items.size());
    for (const BenchmarkItem& item : items) {
        if (item.variant != condition.variant) continue;
        AnswerPrompt prompt =
            make_answer_prompt(item, condition, index, embedder, manifest_by_qid, cfg);
        std::string response = model.complete(prompt.text, GenerationParams{});
        EvalOutcome outcome = grade(response, item, condition);
        outcome.rag_degraded = prompt.rag_degraded;
        outcomes.push_back(std::move(outcome));
    }
    return outcomes;
}

}  // namespace adam
