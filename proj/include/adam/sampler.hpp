#pragma once
// Benchmark subject selection: proportional cluster counts, per-country
// popularity tiering, masked-biography feature vectors, per-tier k-means
// (Lloyd with k-means++ seeding), and representative selection.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adam/domain.hpp"
#include "adam/embed.hpp"
#include "adam/ingest.hpp"

namespace adam {

// k = ceil(5p + 0.01); at least one cluster for every country.
int cluster_count(double population_proportion);

// Nearest multiple of 50; exact midpoints round up.
int quantize_year(int year);

struct TierAssignment {
    std::vector<std::string> high;    // qids, popularity-descending
    std::vector<std::string> medium;
    std::vector<std::string> low;
};

// Within one country, sorted by (popularity desc, qid asc): High = top
// min(5k, n); Medium = through ceil(0.75 n), excluding High; Low = rest.
TierAssignment tier_split(std::vector<const PersonRecord*> country_records, int k);

// Biography text with explicit age/nationality mentions masked, embedded and
// concatenated with the weighted quantized birth-year coordinate.
struct FeatureConfig {
    double date_weight = 1.0;
};

std::string mask_biography(const std::string& biography);

std::vector<std::vector<double>> build_features(const std::vector<const PersonRecord*>& records,
                                                const TextEmbedder& embedder,
                                                const FeatureConfig& cfg);

struct KMeansResult {
    std::vector<std::size_t> assignments;         // point -> cluster
    std::vector<std::vector<double>> centroids;   // k rows
    std::vector<double> inertia_history;          // per Lloyd iteration
};

// Lloyd iterations with k-means++ seeding; deterministic for a given seed.
KMeansResult kmeans(const std::vector<std::vector<double>>& features, std::size_t k,
                    std::uint64_t seed, std::size_t max_iter = 100, double tol = 1e-9);

// High/Medium: the point nearest each centroid; Low: the most popular point
// per cluster. Ties break to the smaller qid.
std::vector<std::string> select_representatives(PopularityTier tier,
                                                const KMeansResult& clustering,
                                                const std::vector<const PersonRecord*>& records,
                                                const std::vector<std::vector<double>>& features);

struct ManifestEntry {
    std::string qid;
    std::string country;
    PopularityTier tier = PopularityTier::High;
    std::size_t cluster = 0;
    std::string original_language;
};

struct SamplerConfig {
    std::uint64_t seed = 0;
    FeatureConfig features;
    std::map<std::string, std::string> country_language;  // country -> language hint
};

// Full selection over every coverage-eligible country. Deterministic under
// the seed; country processing order does not matter (per-country derived
// seeds).
std::vector<ManifestEntry> sample_benchmark(const std::vector<PersonRecord>& db,
                                            const std::map<std::string, double>& population,
                                            const CoverageReport& coverage,
                                            const TextEmbedder& embedder,
                                            const SamplerConfig& cfg);

// Population table CSV: "country,proportion" with a header row.
std::map<std::string, double> read_population_csv(const std::string& path);

std::string manifest_to_jsonl(const std::vector<ManifestEntry>& manifest);
std::vector<ManifestEntry> manifest_from_jsonl(const std::string& path);

}  // namespace adam
