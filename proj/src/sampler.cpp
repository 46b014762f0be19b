#include "adam/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "adam/io.hpp"
#include "json.hpp"

namespace adam {

int cluster_count(double population_proportion) {
    if (population_proportion < 0.0 || population_proportion > 1.0)
        throw std::out_of_range("population proportion must be in [0, 1]");
    return static_cast<int>(std::ceil(5.0 * population_proportion + 0.01));
}

int quantize_year(int year) {
    // floor((y + 25) / 50) * 50, with floor division correct for negatives.
    int shifted = year + 25;
    int q = shifted / 50;
    if (shifted % 50 < 0) --q;
    return q * 50;
}

TierAssignment tier_split(std::vector<const PersonRecord*> country_records, int k) {
    if (country_records.empty()) throw std::invalid_argument("tier_split on empty country");
    if (k < 1) throw std::invalid_argument("tier_split needs k >= 1");

    std::sort(country_records.begin(), country_records.end(),
              [](const PersonRecord* a, const PersonRecord* b) {
                  if (a->popularity != b->popularity) return a->popularity > b->popularity;
                  return a->qid < b->qid;
              });

    const std::size_t n = country_records.size();
    const std::size_t high_end = std::min<std::size_t>(5 * static_cast<std::size_t>(k), n);
    const std::size_t med_end = std::max<std::size_t>(
        high_end, static_cast<std::size_t>(std::ceil(0.75 * static_cast<double>(n))));

    TierAssignment tiers;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& qid = country_records[i]->qid;
        if (i < high_end)
            tiers.high.push_back(qid);
        else if (i < med_end)
            tiers.medium.push_back(qid);
        else
            tiers.low.push_back(qid);
    }
    return tiers;
}

namespace {

const std::regex& year_pattern() {
    static const std::regex re("\\b\\d{3,4}\\b");
    return re;
}

const std::regex& age_pattern() {
    static const std::regex re("\\b(?:age|aged)\\s+\\d+\\b", std::regex::icase);
    return re;
}

// Demonyms and country names stripped before embedding so clustering does not
// trivially key on nationality.
const std::regex& demonym_pattern() {
    static const std::regex re(
        "\\b(?:american|british|english|scottish|welsh|irish|french|german|prussian|italian|"
        "spanish|portuguese|dutch|belgian|swiss|austrian|hungarian|polish|czech|russian|"
        "soviet|ukrainian|swedish|norwegian|danish|finnish|greek|turkish|persian|iranian|"
        "egyptian|chinese|japanese|korean|indian|brazilian|argentine|argentinian|mexican|"
        "canadian|australian|united\\s+states|united\\s+kingdom|america|britain|england|"
        "scotland|wales|ireland|france|germany|prussia|italy|spain|portugal|netherlands|"
        "belgium|switzerland|austria|hungary|poland|russia|ukraine|sweden|norway|denmark|"
        "finland|greece|turkey|iran|persia|egypt|china|japan|korea|india|brazil|argentina|"
        "mexico|canada|australia)\\b",
        std::regex::icase);
    return re;
}

}  // namespace

std::string mask_biography(const std::string& biography) {
    std::string out = std::regex_replace(biography, age_pattern(), "");
    out = std::regex_replace(out, year_pattern(), "");
    out = std::regex_replace(out, demonym_pattern(), "");
    return out;
}

std::vector<std::vector<double>> build_features(const std::vector<const PersonRecord*>& records,
                                                const TextEmbedder& embedder,
                                                const FeatureConfig& cfg) {
    std::vector<std::vector<double>> features;
    features.reserve(records.size());
    for (const PersonRecord* rec : records) {
        EmbeddingVector bio = embedder.embed(mask_biography(rec->biography));
        std::vector<double> f = bio.values();
        // Order-1 date coordinate against a unit-norm embedding.
        double date =
            cfg.date_weight * (static_cast<double>(quantize_year(rec->birth_date.year)) - 1000.0) /
            1000.0;
        f.push_back(date);
        features.push_back(std::move(f));
    }
    return features;
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Deterministic weighted pick from a uniform double in [0, 1).
std::size_t weighted_pick(const std::vector<double>& weights, double total, double u) {
    double target = u * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (target < acc) return i;
    }
    return weights.size() - 1;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& features, std::size_t k,
                    std::uint64_t seed, std::size_t max_iter, double tol) {
    const std::size_t n = features.size();
    if (k < 1 || k > n) throw std::invalid_argument("KTooLarge: k must be in [1, n]");
    const std::size_t dim = features[0].size();

    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        return static_cast<double>(rng() >> 11) / static_cast<double>(1ULL << 53);
    };

    // k-means++ seeding.
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    centroids.push_back(features[static_cast<std::size_t>(uniform() * static_cast<double>(n))]);
    std::vector<double> d2(n);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& centroid : centroids)
                best = std::min(best, sq_dist(features[i], centroid));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = (total > 0.0)
                               ? weighted_pick(d2, total, uniform())
                               : static_cast<std::size_t>(uniform() * static_cast<double>(n));
        centroids.push_back(features[pick]);
    }

    KMeansResult result;
    result.assignments.assign(n, 0);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // Assignment step.
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                double d = sq_dist(features[i], centroids[c]);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            result.assignments[i] = best_c;
            inertia += best;
        }
        result.inertia_history.push_back(inertia);

        // Update step.
        std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t c = result.assignments[i];
            ++counts[c];
            for (std::size_t j = 0; j < dim; ++j) next[c][j] += features[i][j];
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                next[c] = centroids[c];  // empty cluster keeps its centroid
                continue;
            }
            for (std::size_t j = 0; j < dim; ++j)
                next[c][j] /= static_cast<double>(counts[c]);
            shift += sq_dist(next[c], centroids[c]);
        }
        centroids = std::move(next);
        if (shift < tol) break;
    }

    // Final assignment against converged centroids.
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_c = 0;
        for (std::size_t c = 0; c < k; ++c) {
            double d = sq_dist(features[i], centroids[c]);
            if (d < best) {
                best = d;
                best_c = c;
            }
        }
        result.assignments[i] = best_c;
        inertia += best;
    }
    result.inertia_history.push_back(inertia);
    result.centroids = std::move(centroids);
    return result;
}

std::vector<std::string> select_representatives(
    PopularityTier tier, const KMeansResult& clustering,
    const std::vector<const PersonRecord*>& records,
    const std::vector<std::vector<double>>& features) {
    const std::size_t k = clustering.centroids.size();
    std::vector<std::string> reps;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t best_i = records.size();
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (clustering.assignments[i] != c) continue;
            if (best_i == records.size()) {
                best_i = i;
                continue;
            }
            if (tier == PopularityTier::Low) {
                auto key = [&](std::size_t idx) {
                    return std::make_pair(-records[idx]->popularity, records[idx]->qid);
                };
                if (key(i) < key(best_i)) best_i = i;
            } else {
                double di = sq_dist(features[i], clustering.centroids[c]);
                double db = sq_dist(features[best_i], clustering.centroids[c]);
                if (di < db || (di == db && records[i]->qid < records[best_i]->qid)) best_i = i;
            }
        }
        if (best_i < records.size()) reps.push_back(records[best_i]->qid);
    }
    return reps;
}

namespace {

std::uint64_t country_seed(std::uint64_t base, const std::string& country) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : country) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return base ^ h;
}

}  // namespace

std::vector<ManifestEntry> sample_benchmark(const std::vector<PersonRecord>& db,
                                            const std::map<std::string, double>& population,
                                            const CoverageReport& coverage,
                                            const TextEmbedder& embedder,
                                            const SamplerConfig& cfg) {
    std::map<std::string, std::vector<const PersonRecord*>> by_country;
    for (const PersonRecord& rec : db) by_country[rec.nationality].push_back(&rec);

    std::vector<ManifestEntry> manifest;
    for (const auto& [country, records] : by_country) {
        if (!coverage.eligible(country)) continue;
        double p = 0.0;
        if (auto it = population.find(country); it != population.end()) p = it->second;
        const int k = cluster_count(p);
        TierAssignment tiers = tier_split(records, k);

        std::map<std::string, const PersonRecord*> lookup;
        for (const PersonRecord* rec : records) lookup[rec->qid] = rec;

        std::string language = "en";
        if (auto it = cfg.country_language.find(country); it != cfg.country_language.end())
            language = it->second;

        auto process_tier = [&](PopularityTier tier, const std::vector<std::string>& qids,
                                std::uint64_t tier_salt) {
            if (qids.empty()) return;
            std::vector<const PersonRecord*> members;
            members.reserve(qids.size());
            for (const std::string& qid : qids) members.push_back(lookup.at(qid));
            std::sort(members.begin(), members.end(),
                      [](const PersonRecord* a, const PersonRecord* b) { return a->qid < b->qid; });

            const std::size_t k_tier = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                             members.size());
            auto features = build_features(members, embedder, cfg.features);
            KMeansResult clustering =
                kmeans(features, k_tier, country_seed(cfg.seed, country) ^ tier_salt);
            std::vector<std::string> reps =
                select_representatives(tier, clustering, members, features);
            for (std::size_t c = 0; c < reps.size(); ++c)
                manifest.push_back({reps[c], country, tier, c, language});
        };

        process_tier(PopularityTier::High, tiers.high, 0x48u);
        process_tier(PopularityTier::Medium, tiers.medium, 0x4Du);
        process_tier(PopularityTier::Low, tiers.low, 0x4Cu);
    }

    std::sort(manifest.begin(), manifest.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
        return std::tie(a.country, a.qid) < std::tie(b.country, b.qid);
    });
    return manifest;
}

std::map<std::string, double> read_population_csv(const std::string& path) {
    std::map<std::string, double> out;
    bool header = true;
    for (const std::string& line : io::read_lines(path)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        auto fields = io::split(line, ',');
        if (fields.size() != 2) throw std::runtime_error("malformed population row: " + line);
        out[fields[0]] = std::stod(fields[1]);
    }
    return out;
}

std::string manifest_to_jsonl(const std::vector<ManifestEntry>& manifest) {
    std::ostringstream out;
    for (const ManifestEntry& e : manifest) {
        nlohmann::json j{{"qid", e.qid},
                         {"country", e.country},
                         {"tier", to_string(e.tier)},
                         {"cluster", e.cluster},
                         {"original_language", e.original_language}};
        out << j.dump() << '\n';
    }
    return out.str();
}

std::vector<ManifestEntry> manifest_from_jsonl(const std::string& path) {
    std::vector<ManifestEntry> out;
    for (const std::string& line : io::read_lines(path)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        ManifestEntry e;
        e.qid = j.at("qid").get<std::string>();
        e.country = j.at("country").get<std::string>();
        auto tier = tier_from_string(j.at("tier").get<std::string>());
        if (!tier) throw std::runtime_error("bad tier in manifest: " + line);
        e.tier = *tier;
        e.cluster = j.at("cluster").get<std::size_t>();
        e.original_language = j.value("original_language", "en");
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace adam
