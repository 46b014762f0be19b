#include "adam/embed.hpp"

#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"

using namespace adam;

TEST_CASE("stub_embed is deterministic") {
    auto a = stub_embed("a", 8, 0);
    auto b = stub_embed("a", 8, 0);
    CHECK(a == b);
    StubEmbedder embedder(8, 0);
    CHECK(embedder.embed("a") == a);
}

TEST_CASE("stub_embed outputs unit vectors") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        std::string text = "text-" + std::to_string(rng());
        std::size_t dim = 2 + rng() % 256;
        auto v = stub_embed(text, dim, rng());
        CHECK(v.dim() == dim);
        CHECK(std::abs(v.norm() - 1.0) <= 1e-6);
    }
}

TEST_CASE("stub_embed separates distinct inputs") {
    auto a = stub_embed("a", 64, 0);
    auto b = stub_embed("b", 64, 0);
    CHECK(a.dot(b) < 1.0 - 1e-6);
    // distinct seeds change the vector too
    CHECK(stub_embed("a", 64, 1).dot(a) < 1.0 - 1e-6);
}

TEST_CASE("stub_embed rejects dim < 2") {
    CHECK_THROWS_AS(stub_embed("x", 1, 0), std::invalid_argument);
}

TEST_CASE("sidecar round trip") {
    std::map<std::string, EmbeddingVector> embeddings;
    for (int i = 0; i < 10; ++i)
        embeddings.emplace("Q" + std::to_string(i), stub_embed(std::to_string(i), 16, 3));

    auto path = (std::filesystem::temp_directory_path() / "adam_sidecar_test.tsv").string();
    write_sidecar(path, embeddings, 16);
    std::size_t dim = 0;
    auto back = read_sidecar(path, &dim);
    CHECK(dim == 16);
    REQUIRE(back.size() == embeddings.size());
    for (const auto& [qid, vec] : embeddings) {
        REQUIRE(back.count(qid) == 1);
        for (std::size_t j = 0; j < vec.dim(); ++j)
            CHECK(back.at(qid)[j] == doctest::Approx(vec[j]).epsilon(1e-15));
    }
    std::filesystem::remove(path);
}

TEST_CASE("sidecar rejects wrong dimension on write") {
    std::map<std::string, EmbeddingVector> embeddings;
    embeddings.emplace("Q1", stub_embed("x", 8, 0));
    auto path = (std::filesystem::temp_directory_path() / "adam_sidecar_bad.tsv").string();
    CHECK_THROWS(write_sidecar(path, embeddings, 16));
}

TEST_CASE("remote embedder reports transport errors") {
    RemoteTextEmbedder client("http://127.0.0.1:1", 8);
    try {
        client.embed("hello");
        FAIL("expected transport error");
    } catch (const EmbedClientError& e) {
        CHECK(e.kind == EmbedClientError::Kind::Transport);
    }
}
