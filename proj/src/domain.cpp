#include "adam/domain.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "adam/io.hpp"
#include "json.hpp"

namespace adam {

using nlohmann::json;

const char* to_string(PopularityTier tier) {
    switch (tier) {
        case PopularityTier::High: return "high";
        case PopularityTier::Medium: return "medium";
        case PopularityTier::Low: return "low";
    }
    return "?";
}

std::optional<PopularityTier> tier_from_string(const std::string& s) {
    if (s == "high") return PopularityTier::High;
    if (s == "medium") return PopularityTier::Medium;
    if (s == "low") return PopularityTier::Low;
    return std::nullopt;
}

const char* to_string(BloomLevel level) {
    switch (level) {
        case BloomLevel::Remembering: return "Remembering";
        case BloomLevel::Understanding: return "Understanding";
        case BloomLevel::Applying: return "Applying";
        case BloomLevel::Analyzing: return "Analyzing";
        case BloomLevel::Evaluating: return "Evaluating";
        case BloomLevel::Creating: return "Creating";
    }
    return "?";
}

std::optional<BloomLevel> bloom_from_string(const std::string& s) {
    for (BloomLevel level : kAllBloomLevels)
        if (s == to_string(level)) return level;
    return std::nullopt;
}

const char* to_string(LanguageVariant v) {
    return v == LanguageVariant::English ? "en" : "org";
}

std::optional<LanguageVariant> variant_from_string(const std::string& s) {
    if (s == "en") return LanguageVariant::English;
    if (s == "org") return LanguageVariant::Original;
    return std::nullopt;
}

std::string Rejection::describe() const {
    switch (kind) {
        case Kind::MissingField: return "MissingField(" + field + ")";
        case Kind::ZeroPopularity: return "ZeroPopularity";
        case Kind::MalformedDate: return "MalformedDate";
    }
    return "?";
}

ValidationResult validate_record(const RawPersonRecord& raw) {
    if (raw.names.empty())
        return Rejection{Rejection::Kind::MissingField, "names"};
    if (!raw.biography || raw.biography->empty())
        return Rejection{Rejection::Kind::MissingField, "biography"};
    if (!raw.birth_date)
        return Rejection{Rejection::Kind::MissingField, "birth_date"};
    const Date& d = *raw.birth_date;
    if ((d.month && (*d.month < 1 || *d.month > 12)) || (d.day && (*d.day < 1 || *d.day > 31)))
        return Rejection{Rejection::Kind::MalformedDate, ""};
    if (!raw.birthplace || raw.birthplace->empty())
        return Rejection{Rejection::Kind::MissingField, "birthplace"};
    if (!raw.nationality || raw.nationality->empty())
        return Rejection{Rejection::Kind::MissingField, "nationality"};
    if (!raw.popularity)
        return Rejection{Rejection::Kind::MissingField, "popularity"};
    if (*raw.popularity < 1)
        return Rejection{Rejection::Kind::ZeroPopularity, ""};

    PersonRecord rec;
    rec.qid = raw.qid;
    rec.names = raw.names;
    rec.biography = *raw.biography;
    rec.birth_date = *raw.birth_date;
    rec.birthplace = *raw.birthplace;
    rec.nationality = *raw.nationality;
    rec.popularity = *raw.popularity;
    rec.image_urls = raw.image_urls;
    if (rec.image_urls.size() > 2) rec.image_urls.resize(2);
    return rec;
}

namespace {

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::u32string decode_utf8(const std::string& s) {
    std::u32string out;
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        char32_t cp = 0;
        int extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            // invalid byte, keep as replacement
            cp = 0xFFFD;
        }
        ++i;
        for (int k = 0; k < extra && i < s.size(); ++k, ++i) {
            unsigned char cc = static_cast<unsigned char>(s[i]);
            if ((cc & 0xC0) != 0x80) break;
            cp = (cp << 6) | (cc & 0x3F);
        }
        out.push_back(cp);
    }
    return out;
}

// Compatibility fold for the codepoints we actually see in names: fullwidth
// ASCII, exotic spaces, and simple Latin case folding. Full Unicode NFKC is
// out of scope for this store.
char32_t fold_codepoint(char32_t cp) {
    // fullwidth ASCII block -> ASCII
    if (cp >= 0xFF01 && cp <= 0xFF5E) cp = cp - 0xFF01 + 0x21;
    // NBSP and unicode space separators -> space
    if (cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x202F || cp == 0x205F ||
        cp == 0x3000)
        return U' ';
    // ASCII lowercase
    if (cp >= U'A' && cp <= U'Z') return cp + 32;
    // Latin-1 supplement uppercase (except multiplication sign)
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 32;
    // Latin Extended-A: even codepoints are uppercase counterparts
    if (cp >= 0x0100 && cp <= 0x0177 && (cp % 2) == 0) return cp + 1;
    // Greek and Cyrillic basic uppercase ranges
    if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 32;
    if (cp >= 0x0410 && cp <= 0x042F) return cp + 32;
    return cp;
}

bool is_space_cp(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' || cp == U'\v';
}

}  // namespace

std::string canonical_name(const std::string& name) {
    std::u32string cps = decode_utf8(name);
    for (char32_t& cp : cps) cp = fold_codepoint(cp);

    std::string out;
    bool pending_space = false;
    bool started = false;
    for (char32_t cp : cps) {
        if (is_space_cp(cp)) {
            pending_space = started;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        append_utf8(out, cp);
        started = true;
    }
    return out;
}

namespace {

json date_to_json(const Date& d) {
    json j;
    j["year"] = d.year;
    if (d.month) j["month"] = *d.month;
    if (d.day) j["day"] = *d.day;
    return j;
}

Date date_from_json(const json& j) {
    Date d;
    d.year = j.at("year").get<int>();
    if (j.contains("month") && !j["month"].is_null()) d.month = j["month"].get<int>();
    if (j.contains("day") && !j["day"].is_null()) d.day = j["day"].get<int>();
    return d;
}

}  // namespace

std::string record_to_json(const PersonRecord& rec) {
    json j;
    j["qid"] = rec.qid;
    j["names"] = rec.names;
    j["biography"] = rec.biography;
    j["birth_date"] = date_to_json(rec.birth_date);
    j["birthplace"] = rec.birthplace;
    j["nationality"] = rec.nationality;
    j["popularity"] = rec.popularity;
    j["image_urls"] = rec.image_urls;
    return j.dump();
}

PersonRecord record_from_json(const std::string& line) {
    json j = json::parse(line);
    PersonRecord rec;
    rec.qid = j.at("qid").get<std::string>();
    rec.names = j.at("names").get<std::map<std::string, std::string>>();
    rec.biography = j.at("biography").get<std::string>();
    rec.birth_date = date_from_json(j.at("birth_date"));
    rec.birthplace = j.at("birthplace").get<std::string>();
    rec.nationality = j.at("nationality").get<std::string>();
    rec.popularity = j.at("popularity").get<std::int64_t>();
    rec.image_urls = j.at("image_urls").get<std::vector<std::string>>();
    return rec;
}

std::vector<PersonRecord> read_records_jsonl(const std::string& path) {
    std::vector<PersonRecord> out;
    for (const std::string& line : io::read_lines(path)) {
        if (line.empty()) continue;
        out.push_back(record_from_json(line));
    }
    return out;
}

void write_records_jsonl(const std::string& path, const std::vector<PersonRecord>& records) {
    std::string buf;
    for (const PersonRecord& rec : records) {
        buf += record_to_json(rec);
        buf += '\n';
    }
    io::atomic_write(path, buf);
}

}  // namespace adam
