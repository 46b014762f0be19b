// adam: biographical knowledge-store CLI.
// Subcommands: ingest, index, retrieve, sample, generate, evaluate, report,
// selftest. Diagnostics go to stderr; data to files or stdout.
// Exit codes: 0 success, 1 validation error, 2 I/O or endpoint failure.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "adam/benchgen.hpp"
#include "adam/domain.hpp"
#include "adam/embed.hpp"
#include "adam/evalharness.hpp"
#include "adam/index.hpp"
#include "adam/ingest.hpp"
#include "adam/io.hpp"
#include "adam/retrieval.hpp"
#include "adam/sampler.hpp"

namespace {

using namespace adam;

struct Paths {
    std::string db;
    std::string embeddings;
    std::string face_embeddings;
};

StoreIndex load_index(const Paths& paths) {
    auto records = read_records_jsonl(paths.db);
    auto bio = read_sidecar(paths.embeddings);
    std::map<std::string, EmbeddingVector> face;
    if (!paths.face_embeddings.empty()) face = read_sidecar(paths.face_embeddings);
    return StoreIndex::build(std::move(records), bio, face);
}

std::unique_ptr<TextEmbedder> make_embedder(std::size_t dim, std::uint64_t seed) {
    if (const char* endpoint = std::getenv("EMBED_ENDPOINT"); endpoint && *endpoint)
        return std::make_unique<RemoteTextEmbedder>(endpoint, dim);
    return std::make_unique<StubEmbedder>(dim, seed);
}

std::unique_ptr<LlmClient> make_llm(const std::string& endpoint_flag, std::uint64_t seed) {
    if (!endpoint_flag.empty()) return std::make_unique<RemoteLlmClient>(endpoint_flag);
    if (const char* endpoint = std::getenv("LLM_ENDPOINT"); endpoint && *endpoint)
        return std::make_unique<RemoteLlmClient>(endpoint);
    return std::make_unique<StubLlmClient>(seed);
}

int run_selftest();

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adam: multilingual biographical knowledge store and benchmark harness"};
    app.require_subcommand(1);

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "Build the person store from source tables");
    std::string tables_path, qids_path, translations_path, pageviews_path, images_path;
    std::string country_map_path;
    std::string out_db = "db.jsonl", out_rejects = "rejections.jsonl", out_coverage = "coverage.csv";
    double detect_threshold = 0.5;
    ingest_cmd->add_option("--tables", tables_path, "JSONL source tables")->required();
    ingest_cmd->add_option("--qids", qids_path, "name<TAB>qid mapping TSV")->required();
    ingest_cmd->add_option("--translations", translations_path, "per-qid name translations JSONL");
    ingest_cmd->add_option("--pageviews", pageviews_path, "qid<TAB>views TSV")->required();
    ingest_cmd->add_option("--images", images_path, "qid<TAB>url TSV (up to 2 per qid)");
    ingest_cmd->add_option("--country-map", country_map_path, "extra historical-country TSV");
    ingest_cmd->add_option("--threshold", detect_threshold, "PERSON dominance threshold");
    ingest_cmd->add_option("--out", out_db, "output person JSONL");
    ingest_cmd->add_option("--rejects", out_rejects, "rejection log JSONL");
    ingest_cmd->add_option("--coverage", out_coverage, "coverage report CSV");

    // index
    auto* index_cmd = app.add_subcommand("index", "Compute biography embeddings sidecar");
    std::string idx_db, idx_out = "embeddings.tsv";
    std::size_t idx_dim = 64;
    std::uint64_t idx_seed = 0;
    index_cmd->add_option("--db", idx_db, "person JSONL")->required();
    index_cmd->add_option("--out", idx_out, "embedding sidecar output");
    index_cmd->add_option("--dim", idx_dim, "embedding dimension");
    index_cmd->add_option("--seed", idx_seed, "stub embedder seed");

    // retrieve
    auto* retrieve_cmd = app.add_subcommand("retrieve", "Disambiguate a person query");
    Paths rp;
    std::string r_name, r_context, r_nationality, r_face_file;
    int r_birth_year = 0;
    bool r_has_birth_year = false;
    std::size_t r_k = 50;
    double r_lambda = 0.0;
    bool r_json = false;
    std::uint64_t r_seed = 0;
    retrieve_cmd->add_option("--db", rp.db, "person JSONL")->required();
    retrieve_cmd->add_option("--embeddings", rp.embeddings, "biography sidecar")->required();
    retrieve_cmd->add_option("--face-embeddings", rp.face_embeddings, "face sidecar");
    retrieve_cmd->add_option("--name", r_name, "person name");
    retrieve_cmd->add_option("--context", r_context, "query context");
    retrieve_cmd->add_option("--nationality", r_nationality, "country filter");
    retrieve_cmd->add_option("--birth-year", r_birth_year, "birth-year filter (±20 years)")
        ->each([&](const std::string&) { r_has_birth_year = true; });
    retrieve_cmd->add_option("--face-embedding-file", r_face_file,
                             "file with one comma-separated face vector");
    retrieve_cmd->add_option("--k", r_k, "semantic candidate count");
    retrieve_cmd->add_option("--lambda", r_lambda, "popularity weight in [0,1]");
    retrieve_cmd->add_flag("--json", r_json, "emit JSON (default)");
    retrieve_cmd->add_option("--seed", r_seed, "stub embedder seed");

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "Select benchmark subjects");
    std::string s_db, s_embeddings, s_population, s_coverage, s_languages;
    std::string s_out = "manifest.jsonl";
    std::uint64_t s_seed = 0;
    bool s_seed_set = false;
    double s_date_weight = 1.0;
    sample_cmd->add_option("--db", s_db, "person JSONL")->required();
    sample_cmd->add_option("--population", s_population, "country,proportion CSV")->required();
    sample_cmd->add_option("--coverage", s_coverage, "coverage CSV from ingest");
    sample_cmd->add_option("--languages", s_languages, "country<TAB>language TSV");
    sample_cmd->add_option("--seed", s_seed, "sampler seed")
        ->each([&](const std::string&) { s_seed_set = true; });
    sample_cmd->add_option("--date-weight", s_date_weight, "birth-date feature weight");
    sample_cmd->add_option("--out", s_out, "manifest JSONL output");

    // generate
    auto* generate_cmd = app.add_subcommand("generate", "Generate benchmark questions");
    std::string g_db, g_manifest, g_out = "bench.jsonl", g_endpoint;
    std::uint64_t g_seed = 0;
    generate_cmd->add_option("--db", g_db, "person JSONL")->required();
    generate_cmd->add_option("--manifest", g_manifest, "subject manifest JSONL")->required();
    generate_cmd->add_option("--endpoint", g_endpoint, "LLM endpoint (default: stub)");
    generate_cmd->add_option("--seed", g_seed, "stub LLM seed");
    generate_cmd->add_option("--out", g_out, "benchmark JSONL output");

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Run a model over the benchmark");
    std::string e_bench, e_manifest, e_db, e_embeddings, e_endpoint, e_variant = "en";
    std::string e_out = "outcomes.jsonl", e_fixed_answer = "A", e_few_shot_file;
    bool e_rag = false, e_image = false;
    evaluate_cmd->add_option("--bench", e_bench, "benchmark JSONL")->required();
    evaluate_cmd->add_option("--manifest", e_manifest, "subject manifest JSONL")->required();
    evaluate_cmd->add_option("--db", e_db, "person JSONL")->required();
    evaluate_cmd->add_option("--embeddings", e_embeddings, "biography sidecar")->required();
    evaluate_cmd->add_option("--model-endpoint", e_endpoint, "model endpoint (default: stub)");
    evaluate_cmd->add_option("--fixed-answer", e_fixed_answer, "stub model answer letter");
    evaluate_cmd->add_option("--few-shot", e_few_shot_file, "few-shot preamble file");
    evaluate_cmd->add_flag("--rag", e_rag, "retrieval-augmented condition");
    evaluate_cmd->add_flag("--image", e_image, "attach image references");
    evaluate_cmd->add_option("--variant", e_variant, "language variant: en|org");
    evaluate_cmd->add_option("--out", e_out, "outcomes JSONL output");

    // report
    auto* report_cmd = app.add_subcommand("report", "Aggregate outcomes into a report");
    std::string rep_outcomes, rep_bench, rep_manifest, rep_out = "report.csv";
    report_cmd->add_option("--outcomes", rep_outcomes, "outcomes JSONL")->required();
    report_cmd->add_option("--bench", rep_bench, "benchmark JSONL")->required();
    report_cmd->add_option("--manifest", rep_manifest, "subject manifest JSONL")->required();
    report_cmd->add_option("--out", rep_out, "report CSV output");

    auto* selftest_cmd = app.add_subcommand("selftest", "Run built-in consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*ingest_cmd) {
            IngestInputs inputs;
            inputs.tables = read_tables_jsonl(tables_path);
            inputs.detect.threshold = detect_threshold;
            for (const std::string& line : io::read_lines(qids_path)) {
                if (line.empty()) continue;
                auto fields = io::split(line, '\t');
                if (fields.size() != 2) throw std::runtime_error("malformed qid row: " + line);
                inputs.name_to_qid[canonical_name(fields[0])] = fields[1];
            }
            if (!translations_path.empty()) {
                for (const std::string& line : io::read_lines(translations_path)) {
                    if (line.empty()) continue;
                    auto j = nlohmann::json::parse(line);
                    inputs.translations[j.at("qid").get<std::string>()] =
                        j.at("names").get<std::map<std::string, std::string>>();
                }
            }
            for (const std::string& line : io::read_lines(pageviews_path)) {
                if (line.empty()) continue;
                auto fields = io::split(line, '\t');
                if (fields.size() != 2) throw std::runtime_error("malformed pageview row: " + line);
                inputs.pageviews[fields[0]] = std::stoll(fields[1]);
            }
            if (!images_path.empty()) {
                for (const std::string& line : io::read_lines(images_path)) {
                    if (line.empty()) continue;
                    auto fields = io::split(line, '\t');
                    if (fields.size() != 2) throw std::runtime_error("malformed image row: " + line);
                    auto& urls = inputs.image_urls[fields[0]];
                    if (urls.size() < 2) urls.push_back(fields[1]);
                }
            }

            HeuristicNerTagger tagger;
            CountryNormalizer normalizer = country_map_path.empty()
                                               ? CountryNormalizer()
                                               : CountryNormalizer(country_map_path);
            IngestResult result = run_ingest(inputs, tagger, normalizer);

            write_records_jsonl(out_db, result.records);
            std::string rejects;
            for (const RejectionEntry& r : result.rejections) {
                nlohmann::json j{{"qid", r.qid}, {"reason", r.rejection.describe()}};
                rejects += j.dump();
                rejects += '\n';
            }
            io::atomic_write(out_rejects, rejects);
            io::atomic_write(out_coverage, coverage_to_csv(result.coverage));
            std::cerr << "ingest: " << result.records.size() << " records, "
                      << result.rejections.size() << " rejections, "
                      << result.coverage.flagged.size() << " under-covered countries\n";
        } else if (*index_cmd) {
            auto records = read_records_jsonl(idx_db);
            auto embedder = make_embedder(idx_dim, idx_seed);
            std::map<std::string, EmbeddingVector> embeddings;
            for (const PersonRecord& rec : records)
                embeddings.emplace(rec.qid, embedder->embed(rec.biography));
            write_sidecar(idx_out, embeddings, idx_dim);
            std::cerr << "index: wrote " << embeddings.size() << " vectors to " << idx_out << "\n";
        } else if (*retrieve_cmd) {
            StoreIndex index = load_index(rp);
            RagConfig cfg;
            cfg.semantic_k = r_k;
            RetrievalQuery query;
            if (!r_name.empty()) query.name = r_name;
            if (!r_context.empty()) query.context = r_context;
            if (!r_nationality.empty()) query.nationality = r_nationality;
            if (r_has_birth_year) query.birth_year = r_birth_year;

            std::vector<Candidate> candidates;
            if (!r_face_file.empty()) {
                auto lines = io::read_lines(r_face_file);
                if (lines.empty()) throw std::runtime_error("empty face embedding file");
                std::vector<double> values;
                for (const std::string& f : io::split(lines[0], ','))
                    values.push_back(std::stod(f));
                query.face = EmbeddingVector(std::move(values)).normalized();
                candidates = retrieve_by_face(query, index, cfg);
            } else {
                auto embedder = make_embedder(index.channel_dim(Channel::Biography), r_seed);
                candidates = disambiguate_text(query, index, *embedder, cfg);
            }
            if (r_lambda > 0.0) candidates = popularity_rank(candidates, index, r_lambda);
            std::cout << candidates_to_json(candidates) << "\n";
        } else if (*sample_cmd) {
            if (!s_seed_set) {
                std::cerr << "error: --seed is required for sample\n";
                return 1;
            }
            auto db = read_records_jsonl(s_db);
            auto population = read_population_csv(s_population);
            CoverageReport coverage;
            if (!s_coverage.empty()) {
                std::ostringstream buf;
                for (const std::string& line : io::read_lines(s_coverage)) buf << line << '\n';
                coverage = coverage_from_csv(buf.str());
            } else {
                coverage = coverage_report(db);
            }
            SamplerConfig cfg;
            cfg.seed = s_seed;
            cfg.features.date_weight = s_date_weight;
            if (!s_languages.empty()) {
                for (const std::string& line : io::read_lines(s_languages)) {
                    if (line.empty() || line[0] == '#') continue;
                    auto fields = io::split(line, '\t');
                    if (fields.size() != 2)
                        throw std::runtime_error("malformed language row: " + line);
                    cfg.country_language[fields[0]] = fields[1];
                }
            }
            StubEmbedder embedder(64, s_seed);
            auto manifest = sample_benchmark(db, population, coverage, embedder, cfg);
            io::atomic_write(s_out, manifest_to_jsonl(manifest));
            std::cerr << "sample: " << manifest.size() << " subjects -> " << s_out << "\n";
        } else if (*generate_cmd) {
            auto db = read_records_jsonl(g_db);
            auto manifest = manifest_from_jsonl(g_manifest);
            auto llm = make_llm(g_endpoint, g_seed);
            auto items = generate_benchmark(manifest, db, *llm, BenchGenConfig{});
            io::atomic_write(g_out, bench_to_jsonl(items));
            std::cerr << "generate: " << items.size() << " items -> " << g_out << "\n";
        } else if (*evaluate_cmd) {
            auto items = bench_from_jsonl(e_bench);
            auto manifest = manifest_lookup(manifest_from_jsonl(e_manifest));
            Paths paths{e_db, e_embeddings, ""};
            StoreIndex index = load_index(paths);
            auto embedder = make_embedder(index.channel_dim(Channel::Biography), 0);

            EvalCondition condition;
            condition.rag = e_rag;
            condition.image = e_image;
            auto variant = variant_from_string(e_variant);
            if (!variant) {
                std::cerr << "error: --variant must be en or org\n";
                return 1;
            }
            condition.variant = *variant;

            HarnessConfig cfg;
            if (!e_few_shot_file.empty()) {
                std::string preamble;
                for (const std::string& line : io::read_lines(e_few_shot_file))
                    preamble += line + "\n";
                cfg.few_shot_preamble = preamble;
            }

            std::unique_ptr<LlmClient> model;
            if (!e_endpoint.empty()) {
                condition.model_id = e_endpoint;
                model = std::make_unique<RemoteLlmClient>(e_endpoint);
            } else {
                condition.model_id = "stub-fixed-" + e_fixed_answer;
                model = std::make_unique<FixedAnswerModel>(e_fixed_answer.empty() ? 'A'
                                                                                  : e_fixed_answer[0]);
            }

            auto outcomes = run_condition(items, condition, index, *embedder, *model, manifest, cfg);
            io::atomic_write(e_out, outcomes_to_jsonl(outcomes));
            std::cerr << "evaluate: " << outcomes.size() << " outcomes, pooled accuracy "
                      << pooled_accuracy(outcomes) << " -> " << e_out << "\n";
        } else if (*report_cmd) {
            auto outcomes = outcomes_from_jsonl(rep_outcomes);
            auto items = bench_from_jsonl(rep_bench);
            auto manifest = manifest_lookup(manifest_from_jsonl(rep_manifest));
            auto cells = aggregate(outcomes, items, manifest);
            io::atomic_write(rep_out, report_to_csv(cells));
            std::cout << report_to_table(cells);
        } else if (*selftest_cmd) {
            return run_selftest();
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

namespace {

int run_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::cerr << (ok ? "ok   " : "FAIL ") << what << "\n";
        if (!ok) ++failures;
    };

    check(cluster_count(0.0) == 1 && cluster_count(0.2) == 2 && cluster_count(1.0) == 6,
          "cluster count table");
    check(quantize_year(1879) == 1900 && quantize_year(1824) == 1800 && quantize_year(1875) == 1900,
          "year quantization");
    check(stub_embed("a", 8, 0).is_unit() && stub_embed("a", 8, 0) == stub_embed("a", 8, 0),
          "stub embedding determinism and norm");
    check(canonical_name("MARIE  curie") == "marie curie", "name canonicalization");

    // Tiny index round trip.
    std::vector<PersonRecord> records;
    std::map<std::string, EmbeddingVector> embeddings;
    for (int i = 0; i < 20; ++i) {
        PersonRecord rec;
        rec.qid = "Q" + std::to_string(100 + i);
        rec.names = {{"en", "Person " + std::to_string(i)}};
        rec.biography = "Biography number " + std::to_string(i);
        rec.birth_date = {1900 + i, std::nullopt, std::nullopt};
        rec.birthplace = "Town";
        rec.nationality = "US";
        rec.popularity = 10 + i;
        embeddings.emplace(rec.qid, stub_embed(rec.biography, 16, 7));
        records.push_back(std::move(rec));
    }
    StoreIndex index = StoreIndex::build(records, embeddings);
    auto hits = index.knn(Channel::Biography, embeddings.at("Q105"), 3);
    check(hits.size() == 3 && hits[0].qid == "Q105" && hits[0].score > 1.0 - 1e-6,
          "knn self-similarity");

    std::cerr << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace
