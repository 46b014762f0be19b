// End-to-end tests of the adam binary: fixture files in a temp directory,
// subcommands spawned via std::system.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adam/domain.hpp"
#include "adam/embed.hpp"
#include "adam/io.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace adam;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("adam_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
    std::string cmd = std::string(ADAM_CLI_PATH) + " " + args + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Small fixture world: 30 people in 3 countries with qid maps and pageviews.
void write_fixtures(const TempDir& dir) {
    std::string tables, qids, pageviews;
    int qid = 100;
    for (int t = 0; t < 3; ++t) {
        nlohmann::json cols = nlohmann::json::array();
        std::vector<std::string> names, bios, countries, born, places;
        for (int i = 0; i < 10; ++i) {
            std::string name = "Person T" + std::to_string(t) + "n" + std::to_string(i);
            names.push_back(name);
            bios.push_back("Held profession " + std::to_string(i) + " in district " +
                           std::to_string(t) + ".");
            countries.push_back(t == 0 ? "France" : (t == 1 ? "Germany" : "Poland"));
            born.push_back(std::to_string(1800 + 7 * i));
            places.push_back("City" + std::to_string(i));
            qids += name + "\tQ" + std::to_string(qid) + "\n";
            pageviews += "Q" + std::to_string(qid) + "\t" + std::to_string(100 + qid) + "\n";
            ++qid;
        }
        cols.push_back({{"header", "full_name"}, {"cells", names}, {"fk", false}});
        cols.push_back({{"header", "biography"}, {"cells", bios}, {"fk", false}});
        cols.push_back({{"header", "country"}, {"cells", countries}, {"fk", false}});
        cols.push_back({{"header", "born"}, {"cells", born}, {"fk", false}});
        cols.push_back({{"header", "birthplace"}, {"cells", places}, {"fk", false}});
        tables += nlohmann::json{{"name", "t" + std::to_string(t)}, {"columns", cols}}.dump() + "\n";
    }
    io::atomic_write(dir.file("tables.jsonl"), tables);
    io::atomic_write(dir.file("qids.tsv"), qids);
    io::atomic_write(dir.file("pageviews.tsv"), pageviews);
    io::atomic_write(dir.file("population.csv"), "country,proportion\nFR,0.3\nDE,0.4\nPL,0.3\n");
}

}  // namespace

TEST_CASE("cli pipeline: ingest -> index -> retrieve -> sample -> generate -> evaluate -> report") {
    TempDir dir;
    write_fixtures(dir);

    CHECK(run_cli("ingest --tables " + dir.file("tables.jsonl") + " --qids " + dir.file("qids.tsv") +
                  " --pageviews " + dir.file("pageviews.tsv") + " --out " + dir.file("db.jsonl") +
                  " --rejects " + dir.file("rej.jsonl") + " --coverage " + dir.file("cov.csv")) ==
          0);
    auto db = read_records_jsonl(dir.file("db.jsonl"));
    CHECK(db.size() == 30);
    for (const auto& rec : db) {
        CHECK((rec.nationality == "FR" || rec.nationality == "DE" || rec.nationality == "PL"));
        CHECK(rec.popularity >= 1);
    }

    CHECK(run_cli("index --db " + dir.file("db.jsonl") + " --out " + dir.file("emb.tsv")) == 0);
    std::size_t dim = 0;
    CHECK(read_sidecar(dir.file("emb.tsv"), &dim).size() == 30);
    CHECK(dim == 64);

    // retrieve emits a JSON candidate list on stdout
    std::string retrieve_cmd = std::string(ADAM_CLI_PATH) + " retrieve --db " +
                               dir.file("db.jsonl") + " --embeddings " + dir.file("emb.tsv") +
                               " --name \"Person T0n3\" --json > " + dir.file("cands.json") +
                               " 2>/dev/null";
    CHECK(WEXITSTATUS(std::system(retrieve_cmd.c_str())) == 0);
    auto cands = nlohmann::json::parse(slurp(dir.file("cands.json")));
    REQUIRE(cands.is_array());
    REQUIRE(cands.size() == 1);
    CHECK(cands[0]["provenance"][0] == "ExactMatch");

    // sample twice with the same seed -> identical manifests
    std::string sample_args = "sample --db " + dir.file("db.jsonl") + " --population " +
                              dir.file("population.csv") + " --coverage " + dir.file("cov.csv") +
                              " --seed 42 --out ";
    CHECK(run_cli(sample_args + dir.file("m1.jsonl")) == 0);
    CHECK(run_cli(sample_args + dir.file("m2.jsonl")) == 0);
    auto m1 = slurp(dir.file("m1.jsonl"));
    CHECK(m1 == slurp(dir.file("m2.jsonl")));
    CHECK_FALSE(m1.empty());

    CHECK(run_cli("generate --db " + dir.file("db.jsonl") + " --manifest " + dir.file("m1.jsonl") +
                  " --out " + dir.file("bench.jsonl")) == 0);
    CHECK_FALSE(slurp(dir.file("bench.jsonl")).empty());

    CHECK(run_cli("evaluate --bench " + dir.file("bench.jsonl") + " --manifest " +
                  dir.file("m1.jsonl") + " --db " + dir.file("db.jsonl") + " --embeddings " +
                  dir.file("emb.tsv") + " --rag --out " + dir.file("outcomes.jsonl")) == 0);

    CHECK(run_cli("report --outcomes " + dir.file("outcomes.jsonl") + " --bench " +
                  dir.file("bench.jsonl") + " --manifest " + dir.file("m1.jsonl") + " --out " +
                  dir.file("report.csv")) == 0);
    auto report = slurp(dir.file("report.csv"));
    CHECK(report.rfind("bloom,variant,tier,rag,image,n,accuracy\n", 0) == 0);
}

TEST_CASE("cli exit codes") {
    CHECK(run_cli("selftest") == 0);
    // missing required flag -> parse error from CLI11 (nonzero)
    CHECK(run_cli("sample --db /nonexistent.jsonl") != 0);
    // missing input file -> I/O failure
    CHECK(run_cli("index --db /nonexistent/db.jsonl --out /tmp/never.tsv") == 2);
    // sample without --seed -> validation error
    TempDir dir;
    io::atomic_write(dir.file("db.jsonl"), "");
    io::atomic_write(dir.file("pop.csv"), "country,proportion\n");
    CHECK(run_cli("sample --db " + dir.file("db.jsonl") + " --population " + dir.file("pop.csv")) ==
          1);
}
