#include "adam/retrieval.hpp"

#include <algorithm>

#include "doctest.h"

using namespace adam;

namespace {

PersonRecord make_record(const std::string& qid, const std::string& name, int year,
                         const std::string& country, std::int64_t pop = 100,
                         const std::string& bio = "") {
    PersonRecord rec;
    rec.qid = qid;
    rec.names = {{"en", name}};
    rec.biography = bio.empty() ? ("Life of " + name + " " + qid) : bio;
    rec.birth_date = {year, std::nullopt, std::nullopt};
    rec.birthplace = "Town";
    rec.nationality = country;
    rec.popularity = pop;
    return rec;
}

struct Fixture {
    std::vector<PersonRecord> records;
    std::map<std::string, EmbeddingVector> bio;
    std::map<std::string, EmbeddingVector> face;
    StubEmbedder embedder{64, 0};

    void add(PersonRecord rec, bool with_face = false) {
        bio.emplace(rec.qid, embedder.embed(rec.biography));
        if (with_face) face.emplace(rec.qid, stub_embed("face:" + rec.qid, 32, 9));
        records.push_back(std::move(rec));
    }

    StoreIndex build() { return StoreIndex::build(records, bio, face); }
};

}  // namespace

TEST_CASE("unique exact match short-circuits the cascade") {
    Fixture fx;
    fx.add(make_record("Q1", "Marie Curie", 1867, "PL"));
    fx.add(make_record("Q2", "Pierre Curie", 1859, "FR"));
    auto index = fx.build();

    RetrievalQuery query;
    query.name = "MARIE curie";
    auto candidates = disambiguate_text(query, index, fx.embedder, RagConfig{});
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].qid == "Q1");
    CHECK(candidates[0].provenance == std::vector<Stage>{Stage::ExactMatch});
}

TEST_CASE("homonyms disambiguated by nationality and birth year") {
    Fixture fx;
    fx.add(make_record("Q1", "John Smith", 1950, "US"));
    fx.add(make_record("Q2", "John Smith", 1820, "GB"));
    auto index = fx.build();

    RetrievalQuery query;
    query.name = "John Smith";
    query.nationality = "GB";
    query.birth_year = 1825;
    auto candidates = disambiguate_text(query, index, fx.embedder, RagConfig{});
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].qid == "Q2");
    // ambiguous exact match falls through to the semantic cascade
    CHECK(candidates[0].provenance.front() == Stage::Semantic);
    CHECK(std::find(candidates[0].provenance.begin(), candidates[0].provenance.end(),
                    Stage::NationalityFilter) != candidates[0].provenance.end());
}

TEST_CASE("birth window is inclusive at 20 and exclusive at 21") {
    RagConfig cfg;
    for (int delta : {20, 21}) {
        Fixture fx;
        fx.add(make_record("Q1", "John Smith", 1900, "US"));
        fx.add(make_record("Q2", "John Smith", 1700, "US"));
        auto index = fx.build();

        RetrievalQuery query;
        query.name = "John Smith";
        query.birth_year = 1900 + delta;
        if (delta == 20) {
            auto candidates = disambiguate_text(query, index, fx.embedder, cfg);
            REQUIRE(candidates.size() == 1);
            CHECK(candidates[0].qid == "Q1");
        } else {
            CHECK_THROWS_AS(disambiguate_text(query, index, fx.embedder, cfg), RetrievalError);
        }
    }
}

TEST_CASE("empty query is rejected") {
    Fixture fx;
    fx.add(make_record("Q1", "A B", 1900, "US"));
    auto index = fx.build();
    CHECK_THROWS_AS(disambiguate_text(RetrievalQuery{}, index, fx.embedder, RagConfig{}),
                    RetrievalError);
}

TEST_CASE("filters only remove candidates") {
    Fixture fx;
    for (int i = 0; i < 30; ++i)
        fx.add(make_record("Q" + std::to_string(10 + i), "Person " + std::to_string(i),
                           1850 + i * 5, i % 2 ? "US" : "FR"));
    auto index = fx.build();

    RetrievalQuery unfiltered;
    unfiltered.name = "Person";
    unfiltered.context = "scientist";
    auto all = disambiguate_text(unfiltered, index, fx.embedder, RagConfig{});

    RetrievalQuery filtered = unfiltered;
    filtered.nationality = "FR";
    auto fr_only = disambiguate_text(filtered, index, fx.embedder, RagConfig{});
    CHECK(fr_only.size() <= all.size());
    std::set<std::string> all_qids;
    for (const auto& c : all) all_qids.insert(c.qid);
    for (const auto& c : fr_only) {
        CHECK(all_qids.contains(c.qid));
        CHECK(index.find(c.qid)->nationality == "FR");
    }
}

TEST_CASE("context cosine re-ranks the survivors") {
    Fixture fx;
    fx.add(make_record("Q1", "John Smith", 1900, "US", 100, "A celebrated portrait painter."));
    fx.add(make_record("Q2", "John Smith", 1900, "US", 100, "A professional cricket player."));
    auto index = fx.build();

    RetrievalQuery query;
    query.name = "John Smith";
    query.context = "A celebrated portrait painter.";
    auto candidates = disambiguate_text(query, index, fx.embedder, RagConfig{});
    REQUIRE(candidates.size() >= 1);
    // exact biography text as context puts that record first with cosine 1
    CHECK(candidates[0].qid == "Q1");
    CHECK(candidates[0].score == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(candidates[0].provenance.back() == Stage::ContextCosine);
}

TEST_CASE("face retrieval returns the query subject first, capped at five") {
    Fixture fx;
    for (int i = 0; i < 20; ++i)
        fx.add(make_record("Q" + std::to_string(10 + i), "P " + std::to_string(i), 1900, "US"),
               true);
    auto index = fx.build();

    RetrievalQuery query;
    query.face = fx.face.at("Q15");
    auto candidates = retrieve_by_face(query, index, RagConfig{});
    CHECK(candidates.size() == 5);
    CHECK(candidates[0].qid == "Q15");
    CHECK(candidates[0].provenance.front() == Stage::FaceKnn);
}

TEST_CASE("face retrieval matches a brute-force oracle under filters") {
    // 300 records; filters keep one nationality so only some of the top-100
    // face hits survive; result must equal the oracle's top-5 of the
    // filtered top-100.
    Fixture fx;
    for (int i = 0; i < 300; ++i)
        fx.add(make_record("Q" + std::to_string(1000 + i), "P " + std::to_string(i), 1900,
                           i % 25 == 0 ? "FR" : "US"),
               true);
    auto index = fx.build();

    RagConfig cfg;
    auto query_vec = stub_embed("probe", 32, 4);
    RetrievalQuery query;
    query.face = query_vec;
    query.nationality = "FR";

    // independent oracle: rank all faces by cosine, take 100, filter, take 5
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& [qid, vec] : fx.face) {
        double s = 0.0;
        for (std::size_t d = 0; d < vec.dim(); ++d) s += query_vec[d] * vec[d];
        scored.push_back({s, qid});
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    scored.resize(100);
    std::vector<std::string> expected;
    for (const auto& [s, qid] : scored) {
        int i = std::stoi(qid.substr(1)) - 1000;
        if (i % 25 == 0) expected.push_back(qid);
        if (expected.size() == 5) break;
    }

    auto candidates = retrieve_by_face(query, index, cfg);
    REQUIRE(candidates.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(candidates[i].qid == expected[i]);
    for (const auto& c : candidates) CHECK(index.find(c.qid)->nationality == "FR");
}

TEST_CASE("face retrieval yields fewer than five when filters bite hard") {
    Fixture fx;
    for (int i = 0; i < 40; ++i)
        fx.add(make_record("Q" + std::to_string(10 + i), "P " + std::to_string(i), 1900,
                           i < 3 ? "FR" : "US"),
               true);
    auto index = fx.build();

    RetrievalQuery query;
    query.face = stub_embed("probe", 32, 4);
    query.nationality = "FR";
    auto candidates = retrieve_by_face(query, index, RagConfig{});
    CHECK(candidates.size() == 3);
}

TEST_CASE("face retrieval without a face channel") {
    Fixture fx;
    fx.add(make_record("Q1", "A B", 1900, "US"));
    auto index = fx.build();
    RetrievalQuery query;
    query.face = stub_embed("probe", 32, 4);
    try {
        retrieve_by_face(query, index, RagConfig{});
        FAIL("expected NoFaceChannel");
    } catch (const RetrievalError& e) {
        CHECK(e.kind == RetrievalError::Kind::NoFaceChannel);
    }
}

TEST_CASE("popularity_rank with lambda 0 preserves the ordering") {
    Fixture fx;
    for (int i = 0; i < 10; ++i)
        fx.add(make_record("Q" + std::to_string(10 + i), "P " + std::to_string(i), 1900, "US",
                           (i + 1) * 1000));
    auto index = fx.build();

    std::vector<Candidate> candidates;
    for (int i = 0; i < 10; ++i)
        candidates.push_back({"Q" + std::to_string(10 + i), 0.9 - 0.05 * i, {Stage::Semantic}});
    auto ranked = popularity_rank(candidates, index, 0.0);
    for (std::size_t i = 0; i < candidates.size(); ++i)
        CHECK(ranked[i].qid == candidates[i].qid);
}

TEST_CASE("popularity_rank with lambda 1 orders by popularity") {
    Fixture fx;
    fx.add(make_record("Q1", "A B", 1900, "US", 10));
    fx.add(make_record("Q2", "C D", 1900, "US", 1000000));
    auto index = fx.build();
    std::vector<Candidate> candidates{{"Q1", 0.5, {Stage::Semantic}},
                                      {"Q2", 0.5, {Stage::Semantic}}};
    auto ranked = popularity_rank(candidates, index, 1.0);
    CHECK(ranked[0].qid == "Q2");
}

TEST_CASE("popularity_rank hand-computed convex combination") {
    // lambda=0.5, pops {99, 9999}, cosines {0.9, 0.8}, max_pop 9999:
    // scores 0.5*0.9 + 0.5*(2/4) = 0.70 and 0.5*0.8 + 0.5*1 = 0.90.
    Fixture fx;
    fx.add(make_record("Q1", "A B", 1900, "US", 99));
    fx.add(make_record("Q2", "C D", 1900, "US", 9999));
    auto index = fx.build();
    std::vector<Candidate> candidates{{"Q1", 0.9, {Stage::Semantic}},
                                      {"Q2", 0.8, {Stage::Semantic}}};
    auto ranked = popularity_rank(candidates, index, 0.5);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].qid == "Q2");
    CHECK(ranked[0].score == doctest::Approx(0.90).epsilon(1e-9));
    CHECK(ranked[1].score == doctest::Approx(0.70).epsilon(1e-9));
}

TEST_CASE("augment_prompt is deterministic and truncates long biographies") {
    PersonRecord rec = make_record("Q1", "Marie Curie", 1867, "PL", 100, "Short biography.");
    auto prompt = augment_prompt("What did she study?", {&rec});
    CHECK(prompt.find("CONTEXT:") == 0);
    CHECK(prompt.find("Short biography.") != std::string::npos);
    CHECK(prompt.find("QUESTION: What did she study?") != std::string::npos);
    CHECK(augment_prompt("What did she study?", {&rec}) == prompt);

    PersonRecord longrec = make_record("Q2", "A B", 1900, "US", 1, std::string(5000, 'x'));
    auto truncated = augment_prompt("q", {&longrec}, 1500);
    CHECK(truncated.find(std::string(1500, 'x') + "…") != std::string::npos);
    CHECK(truncated.find(std::string(1501, 'x')) == std::string::npos);

    CHECK_THROWS_AS(augment_prompt("q", {}), std::invalid_argument);
}

TEST_CASE("whole-pipeline determinism") {
    Fixture fx;
    for (int i = 0; i < 50; ++i)
        fx.add(make_record("Q" + std::to_string(100 + i), "Person " + std::to_string(i),
                           1850 + i, i % 3 ? "US" : "FR", 10 + i));
    auto index = fx.build();

    RetrievalQuery query;
    query.name = "Person";
    query.context = "a notable life";
    query.nationality = "FR";
    auto a = disambiguate_text(query, index, fx.embedder, RagConfig{});
    auto b = disambiguate_text(query, index, fx.embedder, RagConfig{});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].qid == b[i].qid);
        CHECK(a[i].score == b[i].score);
    }
    CHECK(candidates_to_json(a) == candidates_to_json(b));
}
