#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "p2k/error.hpp"
#include "p2k/pipeline.hpp"
#include "p2k/ranking.hpp"

using namespace p2k;
using namespace p2k::testing;

TEST(Relevance, Formula) {
    IntentWeights w;
    EXPECT_DOUBLE_EQ(relevance_score(w, 1.0, 0.0, 0.0), 0.7);
    EXPECT_DOUBLE_EQ(relevance_score(w, 0.0, 1.0, 0.0), 0.3);
    EXPECT_NEAR(relevance_score(w, 0.0, 0.0, 1.0), -0.3, 1e-15);
    EXPECT_NEAR(relevance_score({0.5, 0.2}, 0.4, 0.5, 0.6), 0.5 * 0.4 + 0.2 * 0.5 - 0.5 * 0.6, 1e-15);
}

TEST(Relevance, WeightValidation) {
    EXPECT_THROW((IntentWeights{1.5, 0.3}.validate()), Error);
    EXPECT_THROW((IntentWeights{0.5, -0.1}.validate()), Error);
    EXPECT_NO_THROW((IntentWeights{0.0, 0.0}.validate()));
    EXPECT_THROW((RerankParams{0.0, 5, 10}.validate()), Error);
    EXPECT_THROW((RerankParams{1.1, 5, 1}.validate()), Error);
}

TEST(ScorePool, ComponentsAreCosinesAgainstSubsets) {
    EmbedderConfig cfg;
    std::vector<GalleryItem> items{{"a", dict("color:red; pattern:plain"), {}},
                                   {"b", dict("color:blue; pattern:striped"), {}},
                                   {"c", dict("color:red; pattern:striped"), {}}};
    auto index = build_index(items, cfg);
    auto query = merge(dict("color:blue; fit:slim"), updates("+color:red; -pattern:striped"));
    auto pool = score_pool(query, index, IntentWeights{}, cfg, 10);
    ASSERT_EQ(pool.size(), 3u);
    for (const auto& c : pool) {
        auto row = index.row(c.row);
        EXPECT_NEAR(c.p, oracle_dot(embed("color:red", cfg).components(), row), 1e-12);
        EXPECT_NEAR(c.o, oracle_dot(embed("fit:slim", cfg).components(), row), 1e-12);
        EXPECT_NEAR(c.n, oracle_dot(embed("pattern:striped", cfg).components(), row), 1e-12);
        EXPECT_NEAR(c.relevance, 0.7 * c.p + 0.3 * c.o - 0.3 * c.n, 1e-12);
    }
    EXPECT_EQ(pool.front().id, "a");
}

TEST(ScorePool, EmptySubsetsContributeZero) {
    EmbedderConfig cfg;
    auto index = build_index({{"a", dict("color:red"), {}}}, cfg);
    auto pool = score_pool(QueryDictionary(updates("+color:red")), index, IntentWeights{}, cfg, 5);
    EXPECT_EQ(pool.front().o, 0.0);
    EXPECT_EQ(pool.front().n, 0.0);
    EXPECT_NEAR(pool.front().p, 1.0, 1e-6);
}

TEST(ScorePool, TruncatesAndOrdersWithIdTieBreak) {
    EmbedderConfig cfg;
    std::vector<GalleryItem> items;
    for (int i = 9; i >= 0; --i) items.push_back({"id" + std::to_string(i), dict("color:red"), {}});
    auto index = build_index(items, cfg);
    auto pool = score_pool(QueryDictionary(updates("+color:red")), index, IntentWeights{}, cfg, 4);
    ASSERT_EQ(pool.size(), 4u);
    EXPECT_EQ(pool[0].id, "id0");
    EXPECT_EQ(pool[3].id, "id3");
}

TEST(ScorePool, FingerprintMismatch) {
    EmbedderConfig cfg;
    auto index = build_index({{"a", dict("color:red"), {}}}, cfg);
    EmbedderConfig other;
    other.dimension = 64;
    EXPECT_THROW(score_pool(QueryDictionary{}, index, IntentWeights{}, other, 5), Error);
}

TEST(NormalizeRelevance, MinMaxAndConstantPool) {
    std::vector<ScoredCandidate> pool(3);
    pool[0].relevance = 2.0;
    pool[1].relevance = 1.0;
    pool[2].relevance = 1.5;
    EXPECT_EQ(normalize_relevance(pool), (std::vector<double>{1.0, 0.0, 0.5}));
    for (auto& c : pool) c.relevance = 0.3;
    EXPECT_EQ(normalize_relevance(pool), (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(Mmr, Errors) {
    std::mt19937_64 rng(1);
    auto index = build_index(random_gallery(rng, 5), EmbedderConfig{});
    auto pool = random_pool(rng, index, 3);
    auto code = [&](std::span<const ScoredCandidate> p, RerankParams params) {
        try {
            mmr_rerank(p, index, params);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    EXPECT_EQ(code({}, {0.5, 10, 1}), ErrorCode::EmptyPool);
    EXPECT_EQ(code(pool, {0.5, 10, 4}), ErrorCode::KTooLarge);
    EXPECT_EQ(code(pool, {-0.1, 10, 1}), ErrorCode::InvalidArgument);
}

TEST(Mmr, LambdaZeroIsRelevanceOrder) {
    std::mt19937_64 rng(2);
    auto index = build_index(random_gallery(rng, 40), EmbedderConfig{});
    for (int trial = 0; trial < 50; ++trial) {
        auto pool = random_pool(rng, index, 20);
        std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
            return a.relevance != b.relevance ? a.relevance > b.relevance : a.id < b.id;
        });
        auto got = mmr_rerank(pool, index, {0.0, 20, 10});
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], pool[i].id);
    }
}

TEST(Mmr, LambdaOnePicksFarthestFromSelection) {
    // With lambda = 1 relevance is ignored: the first pick is the smallest id
    // (all min distances start at 1), and duplicates of it are avoided.
    EmbedderConfig cfg;
    auto index = build_index({{"a", dict("color:red"), {}},
                              {"b", dict("color:red"), {}},
                              {"c", dict("pattern:striped"), {}}},
                             cfg);
    std::vector<ScoredCandidate> pool(3);
    for (std::size_t i = 0; i < 3; ++i) pool[i].id = index.item(i).id;
    pool[1].relevance = 1.0;
    EXPECT_EQ(mmr_rerank(pool, index, {1.0, 3, 2}), (std::vector<std::string>{"a", "c"}));
}

TEST(Mmr, AgreesWithExhaustiveOracle) {
    std::mt19937_64 rng(3);
    auto index = build_index(random_gallery(rng, 30), EmbedderConfig{});
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng() % 8;
        auto pool = random_pool(rng, index, n);
        std::size_t k = 1 + rng() % std::min<std::size_t>(4, pool.size());
        double lambda = static_cast<double>(rng() % 5) / 4.0;
        EXPECT_EQ(mmr_rerank(pool, index, {lambda, 200, k}), mmr_oracle(pool, index, lambda, k));
    }
}

TEST(Mmr, OutputIsDistinctSubsetOfPool) {
    std::mt19937_64 rng(4);
    auto index = build_index(random_gallery(rng, 50), EmbedderConfig{});
    for (int trial = 0; trial < 50; ++trial) {
        auto pool = random_pool(rng, index, 25);
        auto got = mmr_rerank(pool, index, {0.6, 200, 12});
        std::set<std::string> uniq(got.begin(), got.end());
        EXPECT_EQ(uniq.size(), got.size());
        for (const auto& id : got) {
            EXPECT_TRUE(std::any_of(pool.begin(), pool.end(), [&](const auto& c) { return c.id == id; }));
        }
    }
}

TEST(Retrieve, EndToEnd) {
    EmbedderConfig cfg;
    std::vector<GalleryItem> items{{"blue-floral", dict("color:blue; pattern:floral"), {}},
                                   {"red-floral", dict("color:red; pattern:floral"), {}},
                                   {"red-striped", dict("color:red; pattern:striped"), {}},
                                   {"green-plain", dict("color:green; pattern:plain"), {}}};
    auto index = build_index(items, cfg);
    RetrievalOptions opts;
    opts.rerank.k = 3;
    auto res = retrieve(index, cfg, dict("color:blue; pattern:floral"), parse_edit("change color to red"), opts);
    ASSERT_EQ(res.results.size(), 3u);
    EXPECT_EQ(res.results.front().id, "red-floral");
    EXPECT_EQ(res.results.front().rank, 1u);
    EXPECT_EQ(triples(res.merged_query), triples("+color:red; 0pattern:floral"));
}

TEST(Retrieve, ClipsKToPoolAndHonoursToggles) {
    EmbedderConfig cfg;
    auto index = build_index({{"a", dict("color:red"), {}}, {"b", dict("pattern:striped"), {}}}, cfg);
    RetrievalOptions opts;
    opts.toggles.use_neg = false;
    auto res = retrieve(index, cfg, dict("fit:slim"), parse_edit("-pattern:striped"), opts);
    EXPECT_EQ(res.results.size(), 2u);
    for (const auto& c : res.pool) EXPECT_EQ(c.n, 0.0);
}

TEST(Retrieve, NoMmrMatchesPoolPrefix) {
    std::mt19937_64 rng(5);
    EmbedderConfig cfg;
    auto index = build_index(random_gallery(rng, 60), cfg);
    RetrievalOptions opts;
    opts.use_mmr = false;
    opts.rerank.k = 10;
    auto res = retrieve(index, cfg, dict("color:red; fit:plain"), parse_edit("+pattern:striped"), opts);
    for (std::size_t i = 0; i < res.results.size(); ++i) {
        EXPECT_EQ(res.results[i].id, res.pool[i].id);
        EXPECT_EQ(res.results[i].pool_rank, i + 1);
    }
}
