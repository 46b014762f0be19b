#pragma once
// WikiDB-style table pipeline: person-column detection, row extraction,
// name-based merging, Q-ID deduplication by modal values, enrichment, and
// per-country coverage validation.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adam/domain.hpp"

namespace adam {

struct SourceColumn {
    std::string header;
    std::vector<std::string> cells;
    bool foreign_key = false;
};

struct SourceTable {
    std::string name;
    std::vector<SourceColumn> columns;

    bool rectangular() const;
    std::size_t row_count() const { return columns.empty() ? 0 : columns[0].cells.size(); }
};

// Entity label for name validation.
enum class NerLabel { Person, Other };

class NerTagger {
public:
    virtual ~NerTagger() = default;
    virtual NerLabel tag(const std::string& text) const = 0;
};

// Heuristic tagger for hermetic runs: a cell looks like a person name when it
// has 2-4 capitalized alphabetic words.
class HeuristicNerTagger : public NerTagger {
public:
    NerLabel tag(const std::string& text) const override;
};

// One (row, person column) cell with source provenance plus any biographical
// fields scraped from sibling columns of the same row.
struct RawMention {
    std::string name;
    std::string table;
    std::size_t row = 0;
    std::size_t column = 0;
    std::map<std::string, std::string> fields;  // biography, nationality, birthplace, birth_year
};

// Candidate values per field for one Q-ID, as multisets.
struct DuplicateGroup {
    std::string qid;
    std::map<std::string, std::string> names;  // language -> name (first seen wins)
    std::vector<std::string> biographies;
    std::vector<std::string> nationalities;
    std::vector<Date> birth_dates;
    std::vector<std::string> birthplaces;
};

struct DetectConfig {
    std::vector<std::string> patterns = {"surname",   "forename", "first_name", "last_name",
                                         "full_name", "person",   "author",     "player",
                                         "actor",     "director"};
    double threshold = 0.5;       // PERSON dominance fraction, strict >
    std::size_t sample_size = 100;  // cells sampled per column (prefix)
};

// A column is selected iff its header contains a pattern (case-insensitive) or
// the fraction of sampled non-empty cells tagged PERSON exceeds the threshold.
std::set<std::size_t> detect_person_columns(const SourceTable& table, const DetectConfig& cfg,
                                            const NerTagger& tagger);

std::vector<RawMention> extract_raw_records(const SourceTable& table,
                                            const std::set<std::size_t>& person_columns);

// Groups mentions by canonical name (see canonical_name); insertion order of
// the input does not affect group contents.
std::map<std::string, std::vector<RawMention>> merge_by_name(
    const std::vector<RawMention>& mentions);

// Modal-value consolidation. Ties break to the lexicographically smallest
// value (earliest date). Throws on an empty group or missing qid.
RawPersonRecord consolidate(const DuplicateGroup& group);

// Mode of a string multiset under the consolidation tie-break rule.
std::optional<std::string> modal_value(const std::vector<std::string>& values);
std::optional<Date> modal_date(const std::vector<Date>& values);

// Extends the names map; existing entries are never overwritten.
PersonRecord attach_names(PersonRecord record,
                          const std::map<std::string, std::string>& translations);

// Sets popularity from page views; zero views is a typed rejection.
ValidationResult enrich_popularity(PersonRecord record, std::int64_t views);

struct CoverageReport {
    std::map<std::string, std::size_t> counts;  // country -> record count
    std::set<std::string> flagged;              // countries below the minimum

    bool eligible(const std::string& country) const { return !flagged.contains(country); }
};

// Flags countries below min_per_country; records are never dropped here.
CoverageReport coverage_report(const std::vector<PersonRecord>& records,
                               std::size_t min_per_country = 10);

std::string coverage_to_csv(const CoverageReport& report);
CoverageReport coverage_from_csv(const std::string& csv);

// Static historical-name -> modern ISO 3166-1 alpha-2 normalization. Unknown
// values pass through unchanged; two-letter codes are uppercased.
class CountryNormalizer {
public:
    CountryNormalizer();  // built-in table
    explicit CountryNormalizer(const std::string& mapping_tsv_path);

    std::string normalize(const std::string& raw) const;

private:
    std::map<std::string, std::string> mapping_;  // canonical_name(alias) -> code
};

struct IngestInputs {
    std::vector<SourceTable> tables;
    std::map<std::string, std::string> name_to_qid;       // canonical name -> qid
    std::map<std::string, std::map<std::string, std::string>> translations;  // qid -> lang -> name
    std::map<std::string, std::int64_t> pageviews;        // qid -> annual views
    std::map<std::string, std::vector<std::string>> image_urls;  // qid -> urls
    DetectConfig detect;
    std::size_t min_per_country = 10;
};

struct RejectionEntry {
    std::string qid;
    Rejection rejection;
};

struct IngestResult {
    std::vector<PersonRecord> records;       // sorted by qid
    std::vector<RejectionEntry> rejections;  // sorted by qid
    CoverageReport coverage;
    std::size_t mention_count = 0;
    std::size_t unmatched_names = 0;  // merged names with no qid mapping
    std::size_t ner_failures = 0;     // canonical names failing the PERSON re-check
};

// Full deterministic pipeline; output is independent of table order.
IngestResult run_ingest(const IngestInputs& inputs, const NerTagger& tagger,
                        const CountryNormalizer& normalizer);

// JSONL table file: {"name":..., "columns":[{"header":...,"cells":[...],"fk":bool}]}
SourceTable table_from_json(const std::string& line);
std::string table_to_json(const SourceTable& table);
std::vector<SourceTable> read_tables_jsonl(const std::string& path);

}  // namespace adam
