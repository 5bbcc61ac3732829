#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "galaxy/mutation.hpp"
#include "galaxy/pool.hpp"
#include "galaxy/verifiers.hpp"

namespace galaxy {

enum class BugKind { Inconsistency, InvalidCounterexample, CrashBug };

std::string bug_kind_name(BugKind k);

struct NamedVerdict {
    std::string verifier;
    Verdict verdict;
    bool external = false;  // tolerant counterexample validation applies
};

struct BugReport {
    BugKind kind = BugKind::Inconsistency;
    TestCase test_case;
    std::vector<NamedVerdict> verdicts;
    std::vector<std::string> implicated;  // sorted
    std::size_t iteration = 0;
    std::size_t occurrences = 1;  // filled by dedup

    /// (kind, implicated set, postcondition type, last lineage operator).
    std::string dedup_key() const;
};

struct CampaignConfig {
    std::size_t max_iter = 200;
    SelectionStrategy selection = SelectionStrategy::Mixed;
    double mixed_bias = 0.5;
    MutationConfig mutation;
    std::uint64_t rng_seed = 0;
    bool stop_on_first_bug = false;
    bool strict_alg1 = false;  // literal loop: skip pool add on bug, return on first bug
    double external_cex_tol = 1e-6;
    std::optional<std::size_t> pool_capacity;

    void validate(std::size_t roster_size) const;
};

struct CampaignResult {
    std::vector<BugReport> bugs;
    std::vector<double> round_wall_ms;
    std::map<std::string, std::map<std::string, std::size_t>> verdict_counts;  // verifier -> kind -> n
    std::size_t iterations_run = 0;
    std::size_t pool_size_end = 0;
    std::size_t skipped_mutants = 0;
    Pool final_pool;  // for snapshot export / resumption

    double mean_round_ms() const;
};

/// Classifies one round of verdicts. Every Violated counterexample is
/// revalidated first: failures become InvalidCounterexample findings and the
/// verdict is excluded from the differential comparison. Crash verdicts become
/// CrashBug. A validated Violated against any Holds is an Inconsistency
/// implicating the Holds side; Unknown and Timeout conflict with nothing.
std::vector<BugReport> compare_verdicts(const TestCase& tc, const std::vector<NamedVerdict>& verdicts,
                                        double external_tol = 1e-6);

/// The selection / mutation / verification / comparison loop. Deterministic in
/// (seeds, cfg) for in-tree rosters. `log` gets one line per iteration.
CampaignResult run_campaign(const std::vector<TestCase>& seeds, const CampaignConfig& cfg,
                            const std::vector<std::unique_ptr<Verifier>>& roster,
                            std::ostream* log = nullptr,
                            const std::vector<TestCase>* resumed = nullptr);

/// One representative per dedup key, occurrence counts aggregated, ordered by
/// first occurrence.
std::vector<BugReport> dedup(const std::vector<BugReport>& bugs);

/// Report directory: bugs_manifest.json (deterministic, byte-stable across
/// replays), summary.json (adds timing), and one subdirectory per deduped bug
/// with model/spec files, the verdict log, lineage and a replay command.
void write_report(const std::string& dir, const CampaignResult& result,
                  const std::string& resolved_config_json, const std::string& replay_command);

/// Pool snapshot for campaign resumption: model/spec pair per entry plus a
/// manifest with ids, lineage and insertion order.
void export_pool_snapshot(const Pool& pool, const std::string& dir);

/// Reads a seed directory: either a pool snapshot (manifest.json) or plain
/// `<stem>.model.json` / `<stem>.spec.json` pairs. is_seed, when given, is
/// filled per entry (plain pairs are all seeds).
std::vector<TestCase> load_seed_dir(const std::string& dir, std::vector<bool>* is_seed = nullptr);

}  // namespace galaxy
