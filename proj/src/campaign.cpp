#include "galaxy/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "galaxy/errors.hpp"

namespace galaxy {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string bug_kind_name(BugKind k) {
    switch (k) {
        case BugKind::Inconsistency: return "inconsistency";
        case BugKind::InvalidCounterexample: return "invalid-counterexample";
        case BugKind::CrashBug: return "crash";
    }
    return "?";
}

std::string BugReport::dedup_key() const {
    std::string post_type =
        std::holds_alternative<ArgmaxEqProperty>(test_case.spec.postcondition) ? "argmax_eq"
                                                                               : "linear_out";
    std::string key = bug_kind_name(kind) + "|";
    for (const std::string& v : implicated) key += v + ",";
    key += "|" + post_type + "|" + test_case.lineage.op;
    return key;
}

void CampaignConfig::validate(std::size_t roster_size) const {
    if (roster_size < 2) throw ConfigError("differential comparison needs at least 2 verifiers");
    if (max_iter == 0) throw ConfigError("max_iter must be positive");
    if (!(mixed_bias >= 0.0 && mixed_bias <= 1.0)) throw ConfigError("mixed_bias must be in [0, 1]");
    mutation.validate();
}

double CampaignResult::mean_round_ms() const {
    if (round_wall_ms.empty()) return 0.0;
    return std::accumulate(round_wall_ms.begin(), round_wall_ms.end(), 0.0) /
           static_cast<double>(round_wall_ms.size());
}

std::vector<BugReport> compare_verdicts(const TestCase& tc, const std::vector<NamedVerdict>& verdicts,
                                        double external_tol) {
    std::vector<BugReport> bugs;
    auto make_bug = [&](BugKind kind, std::vector<std::string> implicated) {
        BugReport b;
        b.kind = kind;
        b.test_case = tc;
        b.verdicts = verdicts;
        std::sort(implicated.begin(), implicated.end());
        b.implicated = std::move(implicated);
        return b;
    };

    std::vector<const NamedVerdict*> valid_violated;
    std::vector<std::string> holds_side;
    for (const NamedVerdict& nv : verdicts) {
        switch (nv.verdict.kind) {
            case VerdictKind::Crash:
                bugs.push_back(make_bug(BugKind::CrashBug, {nv.verifier}));
                break;
            case VerdictKind::Violated: {
                bool valid = false;
                if (nv.verdict.cex.size() == tc.spec.input_dim) {
                    valid = nv.external ? violates_tol(tc, nv.verdict.cex, external_tol)
                                        : violates(tc, nv.verdict.cex);
                }
                if (valid)
                    valid_violated.push_back(&nv);
                else
                    bugs.push_back(make_bug(BugKind::InvalidCounterexample, {nv.verifier}));
                break;
            }
            case VerdictKind::Holds:
                holds_side.push_back(nv.verifier);
                break;
            case VerdictKind::Unknown:
            case VerdictKind::Timeout:
                break;  // compatible with everything
        }
    }
    // A validated counterexample is ground truth, so the Holds side carries
    // the blame for the disagreement.
    if (!valid_violated.empty() && !holds_side.empty())
        bugs.push_back(make_bug(BugKind::Inconsistency, holds_side));
    return bugs;
}

CampaignResult run_campaign(const std::vector<TestCase>& seeds, const CampaignConfig& cfg,
                            const std::vector<std::unique_ptr<Verifier>>& roster,
                            std::ostream* log, const std::vector<TestCase>* resumed) {
    cfg.validate(roster.size());
    if (seeds.empty()) throw ConfigError("campaign needs at least one seed test case");
    for (const TestCase& s : seeds) s.validate();

    Pool pool(cfg.pool_capacity);
    for (const TestCase& s : seeds) pool.add_seed(s);
    if (resumed) pool.add(*resumed);

    CampaignResult result;
    Rng rng(cfg.rng_seed);
    // Resume past the highest tc-N already in the pool so new ids stay unique.
    std::uint64_t id_counter = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const std::string& id = pool.at(i).id;
        if (id.rfind("tc-", 0) != 0) continue;
        try {
            id_counter = std::max<std::uint64_t>(id_counter, std::stoull(id.substr(3)) + 1);
        } catch (const std::exception&) {
        }
    }
    MutationConfig mcfg = cfg.mutation;

    for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
        auto t0 = Clock::now();
        const TestCase& parent = pool.select(cfg.selection, rng, cfg.mixed_bias);
        const std::string parent_id = parent.id;  // pool.add below may reallocate
        std::vector<TestCase> mutants = mutate(parent, mcfg, rng, id_counter);
        result.skipped_mutants += mcfg.mutants_per_round - mutants.size();

        bool bug_this_iter = false;
        for (const TestCase& mutant : mutants) {
            std::vector<NamedVerdict> verdicts;
            for (const auto& v : roster) {
                Verdict verdict = run_verifier(*v, mutant);
                bool external = dynamic_cast<ExternalVerifier*>(v.get()) != nullptr;
                result.verdict_counts[v->name()][verdict_kind_name(verdict.kind)]++;
                verdicts.push_back({v->name(), std::move(verdict), external});
            }
            std::vector<BugReport> bugs = compare_verdicts(mutant, verdicts, cfg.external_cex_tol);
            for (BugReport& b : bugs) {
                b.iteration = iter;
                bug_this_iter = true;
                result.bugs.push_back(std::move(b));
            }
        }
        if (!(cfg.strict_alg1 && bug_this_iter)) pool.add(mutants);

        double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        result.round_wall_ms.push_back(ms);
        result.iterations_run = iter;
        if (log)
            *log << "iter " << iter << " parent=" << parent_id << " mutants=" << mutants.size()
                 << " pool=" << pool.size() << " bugs=" << result.bugs.size() << " round_ms=" << ms
                 << "\n";
        if (bug_this_iter && (cfg.stop_on_first_bug || cfg.strict_alg1)) break;
    }
    result.pool_size_end = pool.size();
    result.final_pool = std::move(pool);
    return result;
}

std::vector<BugReport> dedup(const std::vector<BugReport>& bugs) {
    std::vector<BugReport> out;
    std::map<std::string, std::size_t> by_key;
    for (const BugReport& b : bugs) {
        std::string key = b.dedup_key();
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            by_key.emplace(key, out.size());
            out.push_back(b);
            out.back().occurrences = 1;
        } else {
            out[it->second].occurrences++;
        }
    }
    return out;
}

namespace {

json verdict_to_json(const Verdict& v) {
    json j;
    j["kind"] = verdict_kind_name(v.kind);
    if (v.kind == VerdictKind::Violated) j["cex"] = v.cex;
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

json lineage_to_json(const Lineage& l) {
    return {{"parent", l.parent_id}, {"op", l.op}, {"rng_seed", l.rng_seed}};
}

Lineage lineage_from_json(const json& j) {
    return Lineage{j.at("parent").get<std::string>(), j.at("op").get<std::string>(),
                   j.at("rng_seed").get<std::uint64_t>()};
}

json bug_manifest_entry(const BugReport& b, const std::string& dir_name) {
    json j;
    j["dir"] = dir_name;
    j["kind"] = bug_kind_name(b.kind);
    j["implicated"] = b.implicated;
    j["iteration"] = b.iteration;
    j["occurrences"] = b.occurrences;
    j["test_case_id"] = b.test_case.id;
    j["lineage"] = lineage_to_json(b.test_case.lineage);
    json verdicts = json::object();
    for (const NamedVerdict& nv : b.verdicts) verdicts[nv.verifier] = verdict_to_json(nv.verdict);
    j["verdicts"] = verdicts;
    return j;
}

}  // namespace

void write_report(const std::string& dir, const CampaignResult& result,
                  const std::string& resolved_config_json, const std::string& replay_command) {
    fs::create_directories(dir);
    std::vector<BugReport> unique_bugs = dedup(result.bugs);

    json manifest;
    manifest["bug_count"] = unique_bugs.size();
    manifest["bug_occurrences"] = result.bugs.size();
    manifest["bugs"] = json::array();
    // Table-shaped rollup: bug kind counts per implicated verifier.
    std::map<std::string, std::map<std::string, std::size_t>> per_verifier;
    for (std::size_t i = 0; i < unique_bugs.size(); ++i) {
        const BugReport& b = unique_bugs[i];
        char num[16];
        std::snprintf(num, sizeof(num), "%03zu", i);
        std::string dir_name = "bugs/bug-" + std::string(num) + "-" + bug_kind_name(b.kind);
        manifest["bugs"].push_back(bug_manifest_entry(b, dir_name));
        for (const std::string& v : b.implicated) per_verifier[v][bug_kind_name(b.kind)]++;

        fs::path bug_dir = fs::path(dir) / dir_name;
        fs::create_directories(bug_dir);
        save_network(b.test_case.network, (bug_dir / "model.json").string());
        save_spec(b.test_case.spec, (bug_dir / "spec.json").string());
        json verdict_log = json::object();
        for (const NamedVerdict& nv : b.verdicts)
            verdict_log[nv.verifier] = verdict_to_json(nv.verdict);
        std::ofstream((bug_dir / "verdicts.json").string()) << verdict_log.dump(2) << "\n";
        std::ofstream((bug_dir / "lineage.json").string())
            << lineage_to_json(b.test_case.lineage).dump(2) << "\n";
        std::ofstream((bug_dir / "replay.txt").string()) << replay_command << "\n";
    }
    manifest["per_verifier"] = per_verifier;
    std::ofstream(fs::path(dir) / "bugs_manifest.json") << manifest.dump(2) << "\n";

    json summary = manifest;
    summary["iterations"] = result.iterations_run;
    summary["mean_round_ms"] = result.mean_round_ms();
    summary["pool_size_end"] = result.pool_size_end;
    summary["skipped_mutants"] = result.skipped_mutants;
    summary["verdict_counts"] = result.verdict_counts;
    summary["config"] = json::parse(resolved_config_json);
    summary["replay"] = replay_command;
    std::ofstream(fs::path(dir) / "summary.json") << summary.dump(2) << "\n";
}

void export_pool_snapshot(const Pool& pool, const std::string& dir) {
    fs::create_directories(dir);
    json manifest;
    manifest["entries"] = json::array();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const TestCase& tc = pool.at(i);
        std::string stem = "entry-" + std::to_string(i);
        save_network(tc.network, (fs::path(dir) / (stem + ".model.json")).string());
        save_spec(tc.spec, (fs::path(dir) / (stem + ".spec.json")).string());
        manifest["entries"].push_back({{"id", tc.id},
                                       {"stem", stem},
                                       {"index", i},
                                       {"seed", pool.seed_at(i)},
                                       {"lineage", lineage_to_json(tc.lineage)}});
    }
    std::ofstream(fs::path(dir) / "manifest.json") << manifest.dump(2) << "\n";
}

std::vector<TestCase> load_seed_dir(const std::string& dir, std::vector<bool>* is_seed) {
    if (!fs::is_directory(dir)) throw IoError("seed directory not found: " + dir);
    std::vector<TestCase> out;
    fs::path manifest_path = fs::path(dir) / "manifest.json";
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        json manifest = json::parse(in, nullptr, false);
        if (manifest.is_discarded()) throw ParseError("bad snapshot manifest: " + manifest_path.string());
        for (const json& e : manifest.at("entries")) {
            std::string stem = e.at("stem").get<std::string>();
            TestCase tc;
            tc.network = load_network((fs::path(dir) / (stem + ".model.json")).string());
            tc.spec = load_spec((fs::path(dir) / (stem + ".spec.json")).string());
            tc.id = e.at("id").get<std::string>();
            tc.lineage = lineage_from_json(e.at("lineage"));
            tc.validate();
            out.push_back(std::move(tc));
            if (is_seed) is_seed->push_back(e.value("seed", true));
        }
        return out;
    }
    std::vector<std::string> stems;
    for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
        std::string name = e.path().filename().string();
        const std::string suffix = ".model.json";
        if (name.size() > suffix.size() && name.ends_with(suffix))
            stems.push_back(name.substr(0, name.size() - suffix.size()));
    }
    std::sort(stems.begin(), stems.end());
    for (const std::string& stem : stems) {
        TestCase tc;
        tc.network = load_network((fs::path(dir) / (stem + ".model.json")).string());
        tc.spec = load_spec((fs::path(dir) / (stem + ".spec.json")).string());
        tc.id = stem;
        tc.validate();
        out.push_back(std::move(tc));
        if (is_seed) is_seed->push_back(true);
    }
    if (out.empty()) throw ConfigError("no seed test cases in " + dir);
    return out;
}

}  // namespace galaxy
