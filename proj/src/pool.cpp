#include "galaxy/pool.hpp"

#include <unordered_set>

#include "galaxy/errors.hpp"

namespace galaxy {

std::string selection_strategy_name(SelectionStrategy s) {
    switch (s) {
        case SelectionStrategy::Random: return "random";
        case SelectionStrategy::RecencyAware: return "recency";
        case SelectionStrategy::Mixed: return "mixed";
    }
    return "?";
}

SelectionStrategy selection_strategy_from_name(const std::string& name) {
    if (name == "random") return SelectionStrategy::Random;
    if (name == "recency") return SelectionStrategy::RecencyAware;
    if (name == "mixed") return SelectionStrategy::Mixed;
    throw InvalidConfig("unknown selection strategy: " + name);
}

void Pool::add(const std::vector<TestCase>& tcs) {
    std::unordered_set<std::string> batch;
    for (const TestCase& tc : tcs) {
        if (index_.count(tc.id) || !batch.insert(tc.id).second)
            throw DuplicateId("pool: duplicate id " + tc.id);
    }
    for (const TestCase& tc : tcs) insert(tc, false);
}

void Pool::add_seed(const TestCase& tc) {
    if (index_.count(tc.id)) throw DuplicateId("pool: duplicate id " + tc.id);
    insert(tc, true);
}

void Pool::insert(TestCase tc, bool seed) {
    index_.emplace(tc.id, entries_.size());
    entries_.push_back(std::move(tc));
    is_seed_.push_back(seed);
    evict_if_needed();
}

void Pool::evict_if_needed() {
    if (!capacity_ || entries_.size() <= *capacity_) return;
    // Evict the oldest non-seed entry; seeds are never evicted.
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (is_seed_[i]) continue;
        index_.erase(entries_[i].id);
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
        is_seed_.erase(is_seed_.begin() + static_cast<std::ptrdiff_t>(i));
        for (auto& [id, pos] : index_)
            if (pos > i) --pos;
        return;
    }
}

const TestCase& Pool::select(SelectionStrategy strategy, Rng& rng, double mixed_bias) const {
    if (entries_.empty()) throw EmptyPool("select on empty pool");
    switch (strategy) {
        case SelectionStrategy::RecencyAware:
            return entries_.back();
        case SelectionStrategy::Random:
            return entries_[rng.index(entries_.size())];
        case SelectionStrategy::Mixed:
            if (rng.bernoulli(mixed_bias)) return entries_.back();
            return entries_[rng.index(entries_.size())];
    }
    return entries_.back();
}

}  // namespace galaxy
