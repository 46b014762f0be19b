#include "adam/evalharness.hpp"

#include "adam/io.hpp"
#include "doctest.h"

using namespace adam;

namespace {

PersonRecord make_record(const std::string& qid, const std::string& name,
                         const std::string& country = "US", int year = 1900,
                         bool with_image = false) {
    PersonRecord rec;
    rec.qid = qid;
    rec.names = {{"en", name}};
    rec.biography = "Biography of " + name + ".";
    rec.birth_date = {year, std::nullopt, std::nullopt};
    rec.birthplace = "Town";
    rec.nationality = country;
    rec.popularity = 100;
    if (with_image) rec.image_urls = {"https://example.org/" + qid + ".jpg"};
    return rec;
}

BenchmarkItem make_item(const std::string& qid, BloomLevel bloom, LanguageVariant variant,
                        int answer, bool uses_image = false) {
    BenchmarkItem item;
    item.subject_qid = qid;
    item.bloom = bloom;
    item.variant = variant;
    item.id = qid + ":" + to_string(bloom) + ":" + to_string(variant);
    item.question = "Question about " + qid + "?";
    item.options = {"opt0", "opt1", "opt2", "opt3"};
    item.answer_index = answer;
    item.uses_image = uses_image;
    return item;
}

struct Fixture {
    std::vector<PersonRecord> records;
    std::map<std::string, EmbeddingVector> bio;
    StubEmbedder embedder{32, 0};
    std::vector<ManifestEntry> manifest;

    void add(PersonRecord rec, PopularityTier tier) {
        bio.emplace(rec.qid, embedder.embed(rec.biography));
        manifest.push_back({rec.qid, rec.nationality, tier, 0, "en"});
        records.push_back(std::move(rec));
    }

    StoreIndex build() { return StoreIndex::build(records, bio); }
};

}  // namespace

TEST_CASE("grading parses standalone letters") {
    auto item = make_item("Q1", BloomLevel::Remembering, LanguageVariant::English, 1);
    EvalCondition cond;

    CHECK(grade("B", item, cond).correct);
    CHECK(grade("b", item, cond).correct);
    CHECK(grade("The answer is (B).", item, cond).correct);
    CHECK_FALSE(grade("A", item, cond).correct);

    auto item_c = make_item("Q1", BloomLevel::Remembering, LanguageVariant::English, 2);
    CHECK(grade("The answer is (c)", item_c, cond).correct);

    // letters inside words do not count
    auto out = grade("I am not sure", item, cond);
    CHECK_FALSE(out.choice.has_value());
    CHECK_FALSE(out.correct);
}

TEST_CASE("grading is a pure function") {
    auto item = make_item("Q1", BloomLevel::Applying, LanguageVariant::Original, 3);
    EvalCondition cond;
    auto a = grade("Answer: D", item, cond);
    auto b = grade("Answer: D", item, cond);
    CHECK(a.choice == b.choice);
    CHECK(a.correct);
}

TEST_CASE("prompt without rag has no context block") {
    Fixture fx;
    fx.add(make_record("Q1", "Marie Curie"), PopularityTier::High);
    auto index = fx.build();
    auto manifest = manifest_lookup(fx.manifest);

    auto item = make_item("Q1", BloomLevel::Remembering, LanguageVariant::English, 0);
    EvalCondition cond;
    auto prompt = make_answer_prompt(item, cond, index, fx.embedder, manifest, HarnessConfig{});
    CHECK(prompt.text.find("CONTEXT:") == std::string::npos);
    CHECK(prompt.text.find("A) opt0") != std::string::npos);
    CHECK(prompt.text.find("D) opt3") != std::string::npos);
}

TEST_CASE("prompt with rag contains the subject biography") {
    Fixture fx;
    fx.add(make_record("Q1", "Marie Curie", "PL", 1867), PopularityTier::High);
    fx.add(make_record("Q2", "Pierre Curie", "FR", 1859), PopularityTier::High);
    auto index = fx.build();
    auto manifest = manifest_lookup(fx.manifest);

    auto item = make_item("Q1", BloomLevel::Remembering, LanguageVariant::English, 0);
    EvalCondition cond;
    cond.rag = true;
    auto prompt = make_answer_prompt(item, cond, index, fx.embedder, manifest, HarnessConfig{});
    CHECK_FALSE(prompt.rag_degraded);
    CHECK(prompt.text.find("CONTEXT:") != std::string::npos);
    CHECK(prompt.text.find("Biography of Marie Curie.") != std::string::npos);
}

TEST_CASE("image condition attaches the first image url") {
    Fixture fx;
    fx.add(make_record("Q1", "Marie Curie", "PL", 1867, true), PopularityTier::High);
    auto index = fx.build();
    auto manifest = manifest_lookup(fx.manifest);

    auto item = make_item("Q1", BloomLevel::Remembering, LanguageVariant::English, 0, true);
    EvalCondition cond;
    cond.image = true;
    auto prompt = make_answer_prompt(item, cond, index, fx.embedder, manifest, HarnessConfig{});
    REQUIRE(prompt.image_url.has_value());
    CHECK(*prompt.image_url == "https://example.org/Q1.jpg");
    CHECK(prompt.text.find("[image: https://example.org/Q1.jpg]") != std::string::npos);
}

TEST_CASE("aggregate pools correctly and marginals re-aggregate") {
    Fixture fx;
    fx.add(make_record("Q1", "Person One"), PopularityTier::High);
    auto index = fx.build();
    auto manifest = manifest_lookup(fx.manifest);

    std::vector<BenchmarkItem> items{
        make_item("Q1", BloomLevel::Remembering, LanguageVariant::English, 0)};
    EvalCondition cond;

    std::vector<EvalOutcome> outcomes;
    for (int i = 0; i < 4; ++i) {
        EvalOutcome o;
        o.item_id = items[0].id;
        o.condition = cond;
        o.correct = i < 3;  // 3 of 4 correct
        outcomes.push_back(o);
    }
    auto cells = aggregate(outcomes, items, manifest);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].n == 4);
    CHECK(cells[0].accuracy() == doctest::Approx(0.75));
}

TEST_CASE("pooled marginal is weighted, not an average of cell accuracies") {
    // strata (n=10, acc=0.5) and (n=90, acc=0.9) pool to 0.86
    std::vector<EvalOutcome> outcomes;
    EvalCondition cond;
    auto push = [&](int n, int correct, const std::string& id) {
        for (int i = 0; i < n; ++i) {
            EvalOutcome o;
            o.item_id = id;
            o.condition = cond;
            o.correct = i < correct;
            outcomes.push_back(o);
        }
    };
    push(10, 5, "a");
    push(90, 81, "b");
    CHECK(pooled_accuracy(outcomes) == doctest::Approx(0.86));
}

TEST_CASE("aggregate rejects unknown items") {
    std::vector<EvalOutcome> outcomes(1);
    outcomes[0].item_id = "nope";
    CHECK_THROWS(aggregate(outcomes, {}, {}));
}

TEST_CASE("report rendering is deterministic with 3-decimal accuracy") {
    ReportCell cell;
    cell.bloom = BloomLevel::Understanding;
    cell.variant = LanguageVariant::English;
    cell.tier = PopularityTier::Medium;
    cell.n = 3;
    cell.correct = 2;
    auto csv = report_to_csv({cell});
    CHECK(csv.find("bloom,variant,tier,rag,image,n,accuracy\n") == 0);
    CHECK(csv.find("Understanding,en,medium,0,0,3,0.667") != std::string::npos);
    CHECK(report_to_csv({cell}) == csv);
    CHECK(report_to_table({cell}) == report_to_table({cell}));
    CHECK_THROWS_AS(report_to_csv({}), std::invalid_argument);
}

TEST_CASE("outcome JSONL round trip") {
    EvalOutcome o;
    o.item_id = "Q1:Remembering:en";
    o.condition.rag = true;
    o.condition.variant = LanguageVariant::Original;
    o.condition.model_id = "stub";
    o.choice = 2;
    o.correct = false;
    o.rag_degraded = true;

    auto text = outcomes_to_jsonl({o});
    io::atomic_write("/tmp/adam_outcomes_test.jsonl", text);
    auto back = outcomes_from_jsonl("/tmp/adam_outcomes_test.jsonl");
    REQUIRE(back.size() == 1);
    CHECK(back[0].item_id == o.item_id);
    CHECK(back[0].condition.rag);
    CHECK(back[0].choice == 2);
    CHECK(back[0].rag_degraded);
    CHECK(outcomes_to_jsonl(back) == text);
}

TEST_CASE("fixed-answer stub model yields exactly computable accuracy") {
    Fixture fx;
    for (int i = 0; i < 4; ++i)
        fx.add(make_record("Q" + std::to_string(i), "Person " + std::to_string(i)),
               PopularityTier::High);
    auto index = fx.build();
    auto manifest = manifest_lookup(fx.manifest);

    // answer keys 0,1,2,3 -> a model always answering "A" scores exactly 1/4
    std::vector<BenchmarkItem> items;
    for (int i = 0; i < 4; ++i)
        items.push_back(
            make_item("Q" + std::to_string(i), BloomLevel::Remembering, LanguageVariant::English, i));

    EvalCondition cond;
    FixedAnswerModel model('A');
    auto outcomes =
        run_condition(items, cond, index, fx.embedder, model, manifest, HarnessConfig{});
    REQUIRE(outcomes.size() == 4);
    CHECK(pooled_accuracy(outcomes) == doctest::Approx(0.25));
}

TEST_CASE("run_condition filters by language variant") {
    Fixture fx;
    fx.add(make_record("Q1", "Person One"), PopularityTier::High);
    auto index = fx.build();
    auto manifest = manifest_lookup(fx.manifest);

    std::vector<BenchmarkItem> items{
        make_item("Q1", BloomLevel::Remembering, LanguageVariant::English, 0),
        make_item("Q1", BloomLevel::Remembering, LanguageVariant::Original, 0)};
    EvalCondition cond;
    cond.variant = LanguageVariant::Original;
    FixedAnswerModel model('A');
    auto outcomes =
        run_condition(items, cond, index, fx.embedder, model, manifest, HarnessConfig{});
    REQUIRE(outcomes.size() == 1);
    CHECK(outcomes[0].item_id == items[1].id);
    CHECK(outcomes[0].correct);
}
