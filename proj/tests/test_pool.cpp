#include <doctest.h>

#include <map>

#include "galaxy/errors.hpp"
#include "galaxy/pool.hpp"
#include "support/fixtures.hpp"

using namespace galaxy;

namespace {

TestCase named(const std::string& id) {
    TestCase tc = testing::falsifiable_linear_fixture();
    tc.id = id;
    return tc;
}

}  // namespace

TEST_CASE("strategy names round-trip") {
    for (SelectionStrategy s :
         {SelectionStrategy::Random, SelectionStrategy::RecencyAware, SelectionStrategy::Mixed})
        CHECK(selection_strategy_from_name(selection_strategy_name(s)) == s);
    CHECK_THROWS_AS(selection_strategy_from_name("greedy"), InvalidConfig);
}

TEST_CASE("add preserves order and rejects duplicate ids") {
    Pool pool;
    pool.add_seed(named("a"));
    pool.add({named("b"), named("c")});
    CHECK(pool.size() == 3);
    CHECK(pool.at(0).id == "a");
    CHECK(pool.at(2).id == "c");
    CHECK(pool.seed_at(0));
    CHECK_FALSE(pool.seed_at(1));
    CHECK(pool.contains("b"));

    CHECK_THROWS_AS(pool.add({named("b")}), DuplicateId);
    CHECK(pool.size() == 3);  // failed add leaves the pool unchanged

    // a batch with an internal duplicate is rejected whole
    CHECK_THROWS_AS(pool.add({named("d"), named("d")}), DuplicateId);
    CHECK_FALSE(pool.contains("d"));
}

TEST_CASE("selection is non-destructive and follows the strategy") {
    Pool pool;
    pool.add_seed(named("a"));
    pool.add({named("b"), named("c")});
    Rng rng(1);

    SUBCASE("recency always picks the newest entry") {
        for (int i = 0; i < 10; ++i)
            CHECK(pool.select(SelectionStrategy::RecencyAware, rng).id == "c");
        CHECK(pool.size() == 3);
    }
    SUBCASE("random is uniform over all entries") {
        std::map<std::string, int> hits;
        const int n = 30000;
        for (int i = 0; i < n; ++i) ++hits[pool.select(SelectionStrategy::Random, rng).id];
        for (const auto& [id, count] : hits)
            CHECK(std::abs(count / double(n) - 1.0 / 3.0) < 0.02);
        CHECK(hits.size() == 3);
    }
    SUBCASE("mixed respects its bias") {
        std::map<std::string, int> hits;
        const int n = 30000;
        for (int i = 0; i < n; ++i)
            ++hits[pool.select(SelectionStrategy::Mixed, rng, 0.5).id];
        // newest gets 1/2 + 1/2 * 1/3 = 2/3, others 1/6 each
        CHECK(std::abs(hits["c"] / double(n) - 2.0 / 3.0) < 0.02);
        CHECK(std::abs(hits["a"] / double(n) - 1.0 / 6.0) < 0.02);

        hits.clear();
        for (int i = 0; i < n; ++i)
            ++hits[pool.select(SelectionStrategy::Mixed, rng, 1.0).id];
        CHECK(hits["c"] == n);  // bias 1 degenerates to recency
    }
    SUBCASE("empty pool") {
        Pool empty;
        CHECK_THROWS_AS(empty.select(SelectionStrategy::Random, rng), EmptyPool);
    }
}

TEST_CASE("single-entry pool: every strategy returns it") {
    Pool pool;
    pool.add_seed(named("only"));
    Rng rng(2);
    CHECK(pool.select(SelectionStrategy::Random, rng).id == "only");
    CHECK(pool.select(SelectionStrategy::RecencyAware, rng).id == "only");
    CHECK(pool.select(SelectionStrategy::Mixed, rng).id == "only");
}

TEST_CASE("capacity evicts the oldest non-seed entries") {
    Pool pool(std::optional<std::size_t>{3});
    pool.add_seed(named("seed"));
    pool.add({named("m1"), named("m2")});
    CHECK(pool.size() == 3);
    pool.add({named("m3")});
    CHECK(pool.size() == 3);
    CHECK(pool.contains("seed"));  // seeds survive eviction
    CHECK_FALSE(pool.contains("m1"));
    CHECK(pool.contains("m2"));
    CHECK(pool.contains("m3"));
    // index stays coherent after eviction
    CHECK(pool.at(pool.size() - 1).id == "m3");
    Rng rng(3);
    CHECK(pool.select(SelectionStrategy::RecencyAware, rng).id == "m3");
}

TEST_CASE("determinism: identical seeds give identical selection streams") {
    Pool pool;
    pool.add_seed(named("a"));
    pool.add({named("b"), named("c"), named("d")});
    Rng r1(99), r2(99);
    for (int i = 0; i < 200; ++i)
        CHECK(pool.select(SelectionStrategy::Mixed, r1).id ==
              pool.select(SelectionStrategy::Mixed, r2).id);
}
