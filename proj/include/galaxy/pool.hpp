#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "galaxy/rng.hpp"
#include "galaxy/spec.hpp"

namespace galaxy {

enum class SelectionStrategy { Random, RecencyAware, Mixed };

std::string selection_strategy_name(SelectionStrategy s);
SelectionStrategy selection_strategy_from_name(const std::string& name);

/// Insertion-ordered test case pool. Selection never removes entries; an
/// optional capacity evicts the oldest non-seed entries.
class Pool {
  public:
    Pool() = default;
    explicit Pool(std::optional<std::size_t> capacity) : capacity_(capacity) {}

    /// Appends in the given order. Throws DuplicateId.
    void add(const std::vector<TestCase>& tcs);
    void add_seed(const TestCase& tc);

    /// Random: uniform over entries. RecencyAware: last added. Mixed: the
    /// recency branch with probability mixed_bias, else random.
    const TestCase& select(SelectionStrategy strategy, Rng& rng, double mixed_bias = 0.5) const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const TestCase& at(std::size_t i) const { return entries_[i]; }
    bool seed_at(std::size_t i) const { return is_seed_[i]; }
    bool contains(const std::string& id) const { return index_.count(id) != 0; }

  private:
    void insert(TestCase tc, bool seed);
    void evict_if_needed();

    struct Entry; // not needed; entries carry seed flags in parallel vector
    std::vector<TestCase> entries_;
    std::vector<bool> is_seed_;
    std::unordered_map<std::string, std::size_t> index_;
    std::optional<std::size_t> capacity_;
};

}  // namespace galaxy
