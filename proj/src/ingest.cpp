#include "adam/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include "adam/io.hpp"
#include "json.hpp"

namespace adam {

using nlohmann::json;

bool SourceTable::rectangular() const {
    for (const SourceColumn& col : columns)
        if (col.cells.size() != row_count()) return false;
    return true;
}

namespace {

std::string ascii_lower(const std::string& s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool header_matches(const std::string& header, const std::vector<std::string>& patterns) {
    std::string h = ascii_lower(header);
    for (const std::string& p : patterns)
        if (h.find(p) != std::string::npos) return true;
    return false;
}

}  // namespace

NerLabel HeuristicNerTagger::tag(const std::string& text) const {
    int words = 0;
    bool word_ok = false;
    bool any_bad = false;
    bool at_start = true;
    for (unsigned char c : text) {
        if (c == ' ') {
            if (!at_start) {
                ++words;
                if (!word_ok) any_bad = true;
            }
            at_start = true;
            word_ok = false;
            continue;
        }
        if (at_start) {
            word_ok = std::isupper(c) || c >= 0x80;  // allow non-ASCII initials
            at_start = false;
        } else if (!std::isalpha(c) && c < 0x80 && c != '-' && c != '\'' && c != '.') {
            any_bad = true;
        }
    }
    if (!at_start) {
        ++words;
        if (!word_ok) any_bad = true;
    }
    return (words >= 2 && words <= 4 && !any_bad) ? NerLabel::Person : NerLabel::Other;
}

std::set<std::size_t> detect_person_columns(const SourceTable& table, const DetectConfig& cfg,
                                            const NerTagger& tagger) {
    if (table.columns.empty() || table.row_count() == 0)
        throw std::invalid_argument("EmptyTable: " + table.name);
    if (cfg.patterns.empty() || cfg.threshold <= 0.0 || cfg.threshold > 1.0)
        throw std::invalid_argument("invalid detect config");

    std::set<std::size_t> selected;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const SourceColumn& col = table.columns[c];
        if (header_matches(col.header, cfg.patterns)) {
            selected.insert(c);
            continue;
        }
        std::size_t sampled = 0, person = 0;
        for (const std::string& cell : col.cells) {
            if (sampled >= cfg.sample_size) break;
            if (cell.empty()) continue;
            ++sampled;
            if (tagger.tag(cell) == NerLabel::Person) ++person;
        }
        if (sampled > 0 &&
            static_cast<double>(person) / static_cast<double>(sampled) > cfg.threshold)
            selected.insert(c);
    }
    return selected;
}

namespace {

enum class FieldKind { None, Biography, Nationality, Birthplace, BirthDate };

FieldKind classify_header(const std::string& header) {
    std::string h = ascii_lower(header);
    auto has = [&](const char* s) { return h.find(s) != std::string::npos; };
    if (has("biography") || has("bio") || has("summary") || has("description"))
        return FieldKind::Biography;
    if (has("birth_place") || has("birthplace") || has("place_of_birth") || has("born_in"))
        return FieldKind::Birthplace;
    if (has("birth") || has("born") || has("dob")) return FieldKind::BirthDate;
    if (has("nationality") || has("country") || has("citizen")) return FieldKind::Nationality;
    return FieldKind::None;
}

}  // namespace

std::vector<RawMention> extract_raw_records(const SourceTable& table,
                                            const std::set<std::size_t>& person_columns) {
    for (std::size_t c : person_columns)
        if (c >= table.columns.size())
            throw std::invalid_argument("person column out of range in " + table.name);

    std::vector<RawMention> out;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        // Sibling biographical fields for this row, shared by all mentions.
        std::map<std::string, std::string> fields;
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (person_columns.contains(c)) continue;
            const std::string& cell = table.columns[c].cells[r];
            if (cell.empty()) continue;
            switch (classify_header(table.columns[c].header)) {
                case FieldKind::Biography: fields.emplace("biography", cell); break;
                case FieldKind::Nationality: fields.emplace("nationality", cell); break;
                case FieldKind::Birthplace: fields.emplace("birthplace", cell); break;
                case FieldKind::BirthDate: fields.emplace("birth_date", cell); break;
                case FieldKind::None: break;
            }
        }
        for (std::size_t c : person_columns) {
            const std::string& cell = table.columns[c].cells[r];
            if (cell.empty()) continue;
            out.push_back(RawMention{cell, table.name, r, c, fields});
        }
    }
    return out;
}

std::map<std::string, std::vector<RawMention>> merge_by_name(
    const std::vector<RawMention>& mentions) {
    std::map<std::string, std::vector<RawMention>> groups;
    for (const RawMention& m : mentions) groups[canonical_name(m.name)].push_back(m);
    // Stable contents regardless of input order.
    for (auto& [name, group] : groups) {
        std::sort(group.begin(), group.end(), [](const RawMention& a, const RawMention& b) {
            return std::tie(a.table, a.row, a.column) < std::tie(b.table, b.row, b.column);
        });
    }
    return groups;
}

std::optional<std::string> modal_value(const std::vector<std::string>& values) {
    if (values.empty()) return std::nullopt;
    std::map<std::string, std::size_t> counts;
    for (const std::string& v : values) ++counts[v];
    const std::string* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [value, count] : counts) {
        // map iterates in lexicographic order, so strict > keeps the smallest tie.
        if (count > best_count) {
            best = &value;
            best_count = count;
        }
    }
    return *best;
}

std::optional<Date> modal_date(const std::vector<Date>& values) {
    if (values.empty()) return std::nullopt;
    std::map<Date, std::size_t> counts;
    for (const Date& v : values) ++counts[v];
    const Date* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [value, count] : counts) {
        if (count > best_count) {
            best = &value;
            best_count = count;
        }
    }
    return *best;
}

RawPersonRecord consolidate(const DuplicateGroup& group) {
    if (group.qid.empty()) throw std::invalid_argument("NoQid: consolidate needs a qid");
    RawPersonRecord rec;
    rec.qid = group.qid;
    rec.names = group.names;
    rec.biography = modal_value(group.biographies);
    rec.nationality = modal_value(group.nationalities);
    rec.birth_date = modal_date(group.birth_dates);
    rec.birthplace = modal_value(group.birthplaces);
    return rec;
}

PersonRecord attach_names(PersonRecord record,
                          const std::map<std::string, std::string>& translations) {
    for (const auto& [lang, name] : translations) record.names.emplace(lang, name);
    return record;
}

ValidationResult enrich_popularity(PersonRecord record, std::int64_t views) {
    if (views < 1) return Rejection{Rejection::Kind::ZeroPopularity, ""};
    record.popularity = views;
    return record;
}

CoverageReport coverage_report(const std::vector<PersonRecord>& records,
                               std::size_t min_per_country) {
    CoverageReport report;
    for (const PersonRecord& rec : records) ++report.counts[rec.nationality];
    for (const auto& [country, count] : report.counts)
        if (count < min_per_country) report.flagged.insert(country);
    return report;
}

std::string coverage_to_csv(const CoverageReport& report) {
    std::ostringstream out;
    out << "country,count,flagged\n";
    for (const auto& [country, count] : report.counts)
        out << country << ',' << count << ',' << (report.flagged.contains(country) ? 1 : 0)
            << '\n';
    return out.str();
}

CoverageReport coverage_from_csv(const std::string& csv) {
    CoverageReport report;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        auto fields = io::split(line, ',');
        if (fields.size() != 3) throw std::runtime_error("malformed coverage row: " + line);
        report.counts[fields[0]] = std::stoul(fields[1]);
        if (fields[2] == "1") report.flagged.insert(fields[0]);
    }
    return report;
}

namespace {

// Historical states and common country names -> modern ISO alpha-2.
const std::pair<const char*, const char*> kBuiltinCountryMap[] = {
    {"prussia", "DE"},           {"west germany", "DE"},    {"east germany", "DE"},
    {"germany", "DE"},           {"soviet union", "RU"},    {"ussr", "RU"},
    {"russian empire", "RU"},    {"russia", "RU"},          {"czechoslovakia", "CZ"},
    {"bohemia", "CZ"},           {"yugoslavia", "RS"},      {"ottoman empire", "TR"},
    {"turkey", "TR"},            {"persia", "IR"},          {"iran", "IR"},
    {"austria-hungary", "AT"},   {"austria", "AT"},         {"hungary", "HU"},
    {"kingdom of italy", "IT"},  {"italy", "IT"},           {"france", "FR"},
    {"united kingdom", "GB"},    {"great britain", "GB"},   {"england", "GB"},
    {"scotland", "GB"},          {"wales", "GB"},           {"united states", "US"},
    {"usa", "US"},               {"america", "US"},         {"congress poland", "PL"},
    {"poland", "PL"},            {"spain", "ES"},           {"portugal", "PT"},
    {"netherlands", "NL"},       {"holland", "NL"},         {"belgium", "BE"},
    {"sweden", "SE"},            {"norway", "NO"},          {"denmark", "DK"},
    {"finland", "FI"},           {"greece", "GR"},          {"egypt", "EG"},
    {"china", "CN"},             {"japan", "JP"},           {"korea", "KR"},
    {"south korea", "KR"},       {"india", "IN"},           {"brazil", "BR"},
    {"argentina", "AR"},         {"mexico", "MX"},          {"canada", "CA"},
    {"australia", "AU"},         {"new zealand", "NZ"},     {"south africa", "ZA"},
    {"ireland", "IE"},           {"switzerland", "CH"},     {"ukraine", "UA"},
};

}  // namespace

CountryNormalizer::CountryNormalizer() {
    for (const auto& [alias, code] : kBuiltinCountryMap) mapping_[alias] = code;
}

CountryNormalizer::CountryNormalizer(const std::string& mapping_tsv_path) : CountryNormalizer() {
    for (const std::string& line : io::read_lines(mapping_tsv_path)) {
        if (line.empty() || line[0] == '#') continue;
        auto fields = io::split(line, '\t');
        if (fields.size() != 2) throw std::runtime_error("malformed mapping line: " + line);
        mapping_[canonical_name(fields[0])] = fields[1];
    }
}

std::string CountryNormalizer::normalize(const std::string& raw) const {
    std::string key = canonical_name(raw);
    if (auto it = mapping_.find(key); it != mapping_.end()) return it->second;
    if (key.size() == 2) {
        std::string code = key;
        for (char& c : code) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return code;
    }
    return raw;
}

namespace {

std::optional<Date> parse_date_cell(const std::string& cell) {
    // Accepts "YYYY", "YYYY-MM", "YYYY-MM-DD"; also a leading minus for BCE.
    int year = 0;
    const char* begin = cell.data();
    const char* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, year);
    if (ec != std::errc{} || ptr == begin) return std::nullopt;
    Date d{year, std::nullopt, std::nullopt};
    if (ptr != end && *ptr == '-') {
        int month = 0;
        auto [p2, ec2] = std::from_chars(ptr + 1, end, month);
        if (ec2 != std::errc{}) return d;
        d.month = month;
        if (p2 != end && *p2 == '-') {
            int day = 0;
            auto [p3, ec3] = std::from_chars(p2 + 1, end, day);
            if (ec3 == std::errc{}) d.day = day;
            (void)p3;
        }
    }
    return d;
}

}  // namespace

IngestResult run_ingest(const IngestInputs& inputs, const NerTagger& tagger,
                        const CountryNormalizer& normalizer) {
    IngestResult result;

    std::vector<RawMention> mentions;
    for (const SourceTable& table : inputs.tables) {
        if (table.columns.empty() || table.row_count() == 0) continue;
        std::set<std::size_t> cols = detect_person_columns(table, inputs.detect, tagger);
        auto extracted = extract_raw_records(table, cols);
        mentions.insert(mentions.end(), extracted.begin(), extracted.end());
    }
    result.mention_count = mentions.size();

    auto name_groups = merge_by_name(mentions);

    // Fold name groups into per-qid duplicate groups.
    std::map<std::string, DuplicateGroup> by_qid;
    for (const auto& [cname, group] : name_groups) {
        auto qit = inputs.name_to_qid.find(cname);
        if (qit == inputs.name_to_qid.end()) {
            ++result.unmatched_names;
            continue;
        }
        if (tagger.tag(group.front().name) != NerLabel::Person) ++result.ner_failures;

        DuplicateGroup& dup = by_qid[qit->second];
        dup.qid = qit->second;
        // Smallest original spelling across mentions keeps the pick order-free.
        std::string display = group.front().name;
        for (const RawMention& m : group) display = std::min(display, m.name);
        auto nit = dup.names.find("en");
        if (nit == dup.names.end() || display < nit->second) dup.names["en"] = display;

        for (const RawMention& m : group) {
            if (auto it = m.fields.find("biography"); it != m.fields.end())
                dup.biographies.push_back(it->second);
            if (auto it = m.fields.find("nationality"); it != m.fields.end())
                dup.nationalities.push_back(normalizer.normalize(it->second));
            if (auto it = m.fields.find("birthplace"); it != m.fields.end())
                dup.birthplaces.push_back(it->second);
            if (auto it = m.fields.find("birth_date"); it != m.fields.end())
                if (auto d = parse_date_cell(it->second)) dup.birth_dates.push_back(*d);
        }
    }

    for (const auto& [qid, dup] : by_qid) {
        RawPersonRecord raw = consolidate(dup);
        auto pv = inputs.pageviews.find(qid);
        raw.popularity = (pv != inputs.pageviews.end()) ? std::optional(pv->second)
                                                        : std::optional<std::int64_t>(0);
        if (auto it = inputs.image_urls.find(qid); it != inputs.image_urls.end())
            raw.image_urls = it->second;

        ValidationResult vr = validate_record(raw);
        if (std::holds_alternative<Rejection>(vr)) {
            result.rejections.push_back({qid, std::get<Rejection>(vr)});
            continue;
        }
        PersonRecord rec = std::get<PersonRecord>(vr);
        if (auto it = inputs.translations.find(qid); it != inputs.translations.end())
            rec = attach_names(std::move(rec), it->second);
        result.records.push_back(std::move(rec));
    }

    result.coverage = coverage_report(result.records, inputs.min_per_country);
    return result;
}

SourceTable table_from_json(const std::string& line) {
    json j = json::parse(line);
    SourceTable table;
    table.name = j.at("name").get<std::string>();
    for (const auto& col : j.at("columns")) {
        SourceColumn c;
        c.header = col.at("header").get<std::string>();
        c.cells = col.at("cells").get<std::vector<std::string>>();
        c.foreign_key = col.value("fk", false);
        table.columns.push_back(std::move(c));
    }
    if (!table.rectangular()) throw std::runtime_error("non-rectangular table " + table.name);
    return table;
}

std::string table_to_json(const SourceTable& table) {
    json cols = json::array();
    for (const SourceColumn& c : table.columns)
        cols.push_back({{"header", c.header}, {"cells", c.cells}, {"fk", c.foreign_key}});
    return json{{"name", table.name}, {"columns", cols}}.dump();
}

std::vector<SourceTable> read_tables_jsonl(const std::string& path) {
    std::vector<SourceTable> out;
    for (const std::string& line : io::read_lines(path)) {
        if (line.empty()) continue;
        out.push_back(table_from_json(line));
    }
    return out;
}

}  // namespace adam
