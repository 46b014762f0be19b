#pragma once
// Core biographical domain types shared by every module: person records,
// embedding vectors, popularity tiers, Bloom levels, and record validation.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace adam {

// Calendar date with mandatory year. All date arithmetic in the pipeline is
// year-granular, so month/day are carried but never computed on.
struct Date {
    int year = 0;
    std::optional<int> month;
    std::optional<int> day;

    bool operator==(const Date&) const = default;
    auto operator<=>(const Date&) const = default;
};

// One deduplicated individual in the knowledge store.
struct PersonRecord {
    std::string qid;
    std::map<std::string, std::string> names;  // language code -> name
    std::string biography;
    Date birth_date;
    std::string birthplace;
    std::string nationality;  // ISO 3166-1 alpha-2
    std::int64_t popularity = 0;  // annual page views, >= 1 after ingestion
    std::vector<std::string> image_urls;  // at most 2

    bool operator==(const PersonRecord&) const = default;
};

// Fixed-dimension L2-normalized vector.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t dim() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    double norm() const {
        double s = 0.0;
        for (double v : values_) s += v * v;
        return std::sqrt(s);
    }

    bool is_unit(double tol = 1e-6) const { return std::abs(norm() - 1.0) <= tol; }

    // Returns the normalized copy; throws on the zero vector.
    EmbeddingVector normalized() const {
        double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
        std::vector<double> out(values_);
        for (double& v : out) v /= n;
        return EmbeddingVector(std::move(out));
    }

    double dot(const EmbeddingVector& other) const {
        if (other.dim() != dim()) throw std::invalid_argument("dimension mismatch in dot");
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * other.values_[i];
        return s;
    }

    bool operator==(const EmbeddingVector&) const = default;

private:
    std::vector<double> values_;
};

enum class PopularityTier { High, Medium, Low };

const char* to_string(PopularityTier tier);
std::optional<PopularityTier> tier_from_string(const std::string& s);

// Bloom's taxonomy levels, ordinal 1-6.
enum class BloomLevel {
    Remembering = 1,
    Understanding = 2,
    Applying = 3,
    Analyzing = 4,
    Evaluating = 5,
    Creating = 6,
};

inline constexpr BloomLevel kAllBloomLevels[] = {
    BloomLevel::Remembering, BloomLevel::Understanding, BloomLevel::Applying,
    BloomLevel::Analyzing,   BloomLevel::Evaluating,    BloomLevel::Creating,
};

const char* to_string(BloomLevel level);
std::optional<BloomLevel> bloom_from_string(const std::string& s);

// Every benchmark item exists in both variants.
enum class LanguageVariant { English, Original };

const char* to_string(LanguageVariant v);
std::optional<LanguageVariant> variant_from_string(const std::string& s);

// Partially-filled record as produced by the ingest pipeline before
// completeness validation.
struct RawPersonRecord {
    std::string qid;
    std::map<std::string, std::string> names;
    std::optional<std::string> biography;
    std::optional<Date> birth_date;
    std::optional<std::string> birthplace;
    std::optional<std::string> nationality;
    std::optional<std::int64_t> popularity;
    std::vector<std::string> image_urls;
};

// Typed rejection naming the first failed completeness rule.
struct Rejection {
    enum class Kind { MissingField, ZeroPopularity, MalformedDate };
    Kind kind;
    std::string field;  // set for MissingField

    std::string describe() const;
};

using ValidationResult = std::variant<PersonRecord, Rejection>;

// Total function: every raw record yields exactly one of {record, rejection}.
// Accepted iff biography, birth_date, birthplace, nationality are all present
// and popularity >= 1.
ValidationResult validate_record(const RawPersonRecord& raw);

// Unicode-normalizing name canonicalization: compatibility folding for common
// variants, case folding, whitespace collapse. Shared by ingest merging and
// the alias index.
std::string canonical_name(const std::string& name);

// JSONL person schema (one record per line).
std::string record_to_json(const PersonRecord& rec);
PersonRecord record_from_json(const std::string& line);

std::vector<PersonRecord> read_records_jsonl(const std::string& path);
void write_records_jsonl(const std::string& path, const std::vector<PersonRecord>& records);

}  // namespace adam
