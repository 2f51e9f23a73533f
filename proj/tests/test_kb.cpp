// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "natlm/kb.hpp"

using namespace natlm;
using namespace natlm::kb;
using nn::Vector;

namespace {

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

Vector random_vector(std::mt19937_64& rng, int dim) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = dist(rng);
    if (v.norm() == 0.0) v(0) = 1.0;
    return v;
}

VectorStore random_store(std::mt19937_64& rng, size_t entries, int dim) {
    VectorStore store(dim);
    for (size_t i = 0; i < entries; ++i) {
        KbEntry e;
        e.defect_type = static_cast<oracle::DefectType>(rng() % 4);
        e.vector = random_vector(rng, dim);
        e.snippet_source = "snippet-" + std::to_string(i);
        e.contract_name = "contract-" + std::to_string(i);
        e.provenance = "oracle";
        store.insert(std::move(e));
    }
    return store;
}

// Exhaustive reference scorer, independent of VectorStore::retrieve.
std::vector<uint64_t> brute_force_ranking(const VectorStore& store, const Vector& query,
                                          size_t k, const ScoreWeights& weights) {
    struct Scored {
        uint64_t id;
        double score;
    };
    std::vector<Scored> scored;
    for (const auto& e : store.entries()) {
        double dot = 0, qn = 0, en = 0, dist2 = 0;
        for (Eigen::Index i = 0; i < query.size(); ++i) {
            dot += query(i) * e.vector(i);
            qn += query(i) * query(i);
            en += e.vector(i) * e.vector(i);
            double d = query(i) - e.vector(i);
            dist2 += d * d;
        }
        double cos = dot / (std::sqrt(qn) * std::sqrt(en));
        double score = weights.cosine_weight * cos +
                       weights.distance_weight / (1.0 + std::sqrt(dist2));
        scored.push_back({e.id, score});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    std::vector<uint64_t> ids;
    for (size_t i = 0; i < std::min(k, scored.size()); ++i) ids.push_back(scored[i].id);
    return ids;
}

}  // namespace

TEST_SUITE("kb") {

TEST_CASE("cosine identities") {
    Vector a = vec({3, -1, 2});
    CHECK(cosine(a, a) == doctest::Approx(1.0));
    CHECK(cosine(vec({1, 0}), vec({0, 1})) == doctest::Approx(0.0));
    // Hand arithmetic: 32 / (sqrt(14) * sqrt(77)).
    double expected = 32.0 / (std::sqrt(14.0) * std::sqrt(77.0));
    CHECK(cosine(vec({1, 2, 3}), vec({4, 5, 6})) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.9746).epsilon(1e-4));
}

TEST_CASE("cosine rejects zero vectors and mismatched dims") {
    CHECK_THROWS_WITH_AS(cosine(vec({0, 0}), vec({1, 2})),
                         "undefined cosine for zero vector", Error);
    CHECK_THROWS_AS(cosine(vec({1}), vec({1, 2})), Error);
}

TEST_CASE("cosine is scale invariant for positive scales") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        Vector a = random_vector(rng, 8), b = random_vector(rng, 8);
        std::uniform_real_distribution<double> scale(0.1, 10.0);
        double c = scale(rng);
        CHECK(cosine(c * a, b) == doctest::Approx(cosine(a, b)).epsilon(1e-9));
    }
}

TEST_CASE("euclidean identities and properties") {
    Vector a = vec({1, 2, 3});
    CHECK(euclidean(a, a) == 0.0);
    CHECK(euclidean(vec({0, 0}), vec({3, 4})) == doctest::Approx(5.0));
    CHECK_THROWS_AS(euclidean(vec({1}), vec({1, 2})), Error);

    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        Vector x = random_vector(rng, 6), y = random_vector(rng, 6),
               shift = random_vector(rng, 6);
        CHECK(euclidean(x, y) == doctest::Approx(euclidean(y, x)).epsilon(1e-12));
        // Translation invariance under a common shift.
        CHECK(euclidean(x + shift, y + shift) == doctest::Approx(euclidean(x, y)).epsilon(1e-9));
    }
}

TEST_CASE("retrieve: exact match ranks first") {
    std::mt19937_64 rng(3);
    VectorStore store = random_store(rng, 20, 8);
    Vector query = store.entries()[7].vector;
    auto hits = store.retrieve(query, 5);
    REQUIRE(hits.size() == 5);
    CHECK(hits[0].entry_id == 7);
    CHECK(hits[0].cosine == doctest::Approx(1.0));
    CHECK(hits[0].euclidean == doctest::Approx(0.0));
}

TEST_CASE("retrieve: k larger than the store returns everything sorted") {
    std::mt19937_64 rng(4);
    VectorStore store = random_store(rng, 5, 4);
    auto hits = store.retrieve(random_vector(rng, 4), 50);
    CHECK(hits.size() == 5);
    for (size_t i = 1; i < hits.size(); ++i) CHECK(hits[i - 1].score >= hits[i].score);
}

TEST_CASE("retrieve on an empty store is an error") {
    VectorStore store(4);
    std::mt19937_64 rng(5);
    CHECK_THROWS_WITH_AS(store.retrieve(random_vector(rng, 4), 3), "knowledge base empty",
                         Error);
}

TEST_CASE("retrieve equals brute force on random stores") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 25; ++trial) {
        size_t n = 1 + rng() % 60;
        VectorStore store = random_store(rng, n, 16);
        Vector query = random_vector(rng, 16);
        size_t k = 1 + rng() % 10;
        auto hits = store.retrieve(query, k);
        auto expected = brute_force_ranking(store, query, k, {});
        REQUIRE(hits.size() == expected.size());
        for (size_t i = 0; i < hits.size(); ++i) CHECK(hits[i].entry_id == expected[i]);
    }
}

TEST_CASE("ties break by lower entry id") {
    VectorStore store(2);
    for (int i = 0; i < 3; ++i) {
        KbEntry e;
        e.defect_type = oracle::DefectType::PublicBurn;
        e.vector = vec({1, 0});  // identical vectors: identical scores
        e.provenance = "manual";
        store.insert(std::move(e));
    }
    auto hits = store.retrieve(vec({2, 0}), 3);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].entry_id == 0);
    CHECK(hits[1].entry_id == 1);
    CHECK(hits[2].entry_id == 2);
}

TEST_CASE("score monotonicity: higher cosine at fixed distance never ranks lower") {
    ScoreWeights weights;
    double base = combined_score(0.2, 1.5, weights);
    for (double cos = 0.2; cos <= 1.0; cos += 0.1)
        CHECK(combined_score(cos, 1.5, weights) >= base);
}

TEST_CASE("persist/load round-trips bit-exactly") {
    VectorStore empty(3);
    Bytes data = empty.persist();
    VectorStore reloaded_empty = VectorStore::load(data);
    CHECK(reloaded_empty.size() == 0);
    CHECK(reloaded_empty.dim() == 3);

    std::mt19937_64 rng(7);
    VectorStore store = random_store(rng, 3, 5);
    Bytes bytes = store.persist();
    VectorStore reloaded = VectorStore::load(bytes);
    REQUIRE(reloaded.size() == 3);
    CHECK(reloaded.persist() == bytes);  // byte-identical round trip
    for (size_t i = 0; i < 3; ++i) {
        CHECK(reloaded.entries()[i].vector == store.entries()[i].vector);
        CHECK(reloaded.entries()[i].snippet_source == store.entries()[i].snippet_source);
        CHECK(reloaded.entries()[i].defect_type == store.entries()[i].defect_type);
    }
}

TEST_CASE("corrupted magic bytes fail to load") {
    std::mt19937_64 rng(8);
    Bytes bytes = random_store(rng, 2, 4).persist();
    bytes[0] = 'X';
    CHECK_THROWS_AS(VectorStore::load(bytes), IoError);
}

TEST_CASE("version mismatch and truncation fail to load") {
    std::mt19937_64 rng(9);
    Bytes bytes = random_store(rng, 2, 4).persist();
    Bytes bad_version = bytes;
    bad_version[8] = 99;
    CHECK_THROWS_AS(VectorStore::load(bad_version), IoError);
    Bytes truncated(bytes.begin(), bytes.begin() + 30);
    CHECK_THROWS_AS(VectorStore::load(truncated), IoError);
}

TEST_CASE("insert rejects mismatched dimensions") {
    VectorStore store(4);
    KbEntry e;
    e.vector = vec({1, 2});
    e.provenance = "manual";
    CHECK_THROWS_AS(store.insert(std::move(e)), Error);
}

}  // TEST_SUITE
