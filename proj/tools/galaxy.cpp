#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "galaxy/campaign.hpp"
#include "galaxy/errors.hpp"
#include "galaxy/mutation.hpp"
#include "galaxy/nn.hpp"
#include "galaxy/verifiers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace galaxy;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitCrash = 4;
constexpr int kExitInconclusive = 5;
constexpr int kExitMutationExhausted = 6;

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

/// Config-file fallback: for options not given on the command line or via
/// the GALAXY_* environment (CLI11 resolves both during parse), take the
/// value from the JSON config. Precedence: flags > env > config > defaults.
class ConfigFile {
  public:
    explicit ConfigFile(const std::string& path) {
        if (path.empty()) return;
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        data_ = json::parse(in, nullptr, false);
        if (data_.is_discarded() || !data_.is_object())
            throw ConfigError("config file is not a JSON object: " + path);
    }

    template <typename T>
    void apply(const CLI::App& app, const std::string& flag, T& value) const {
        const CLI::Option* opt = app.get_option("--" + flag);
        if (opt->count() > 0) return;
        if (data_.contains(flag)) value = data_.at(flag).get<T>();
    }

  private:
    json data_ = json::object();
};

std::string env_name(const std::string& flag) {
    std::string out = "GALAXY_";
    for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(c));
    return out;
}

TestCase load_test_case(const std::string& model_path, const std::string& spec_path) {
    TestCase tc;
    tc.network = load_network(model_path);
    tc.spec = load_spec(spec_path);
    tc.id = fs::path(model_path).stem().string();
    tc.validate();
    return tc;
}

json resolved_run_config(const CampaignConfig& cfg, const std::vector<std::string>& verifiers,
                         const std::string& seeds_dir, std::int64_t timeout_ms) {
    json j;
    j["seeds"] = seeds_dir;
    j["verifiers"] = verifiers;
    j["max_iter"] = cfg.max_iter;
    j["selection"] = selection_strategy_name(cfg.selection);
    j["mixed_bias"] = cfg.mixed_bias;
    j["mutants_per_round"] = cfg.mutation.mutants_per_round;
    j["rng_seed"] = cfg.rng_seed;
    j["stop_on_first_bug"] = cfg.stop_on_first_bug;
    j["strict_alg1"] = cfg.strict_alg1;
    j["timeout_ms"] = timeout_ms;
    json ops = json::array();
    for (MutationOp op : cfg.mutation.allowed_ops) ops.push_back(mutation_op_name(op));
    j["operators"] = ops;
    return j;
}

int cmd_run(const CLI::App& sub, const ConfigFile& config) {
    std::string seeds_dir = sub.get_option("--seeds")->as<std::string>();
    std::string out_dir = sub.get_option("--out")->as<std::string>();
    std::string verifiers_csv = sub.get_option("--verifiers")->as<std::string>();
    std::string selection = sub.get_option("--selection")->as<std::string>();
    std::string operators_csv = sub.get_option("--operators")->as<std::string>();
    std::string resume_dir = sub.get_option("--resume")->as<std::string>();
    std::size_t max_iter = sub.get_option("--max-iter")->as<std::size_t>();
    std::uint64_t rng_seed = sub.get_option("--rng-seed")->as<std::uint64_t>();
    double mixed_bias = sub.get_option("--mixed-bias")->as<double>();
    std::size_t mutants_per_round = sub.get_option("--mutants-per-round")->as<std::size_t>();
    std::int64_t timeout_ms = sub.get_option("--timeout-ms")->as<std::int64_t>();
    bool stop_on_first_bug = sub.get_option("--stop-on-first-bug")->count() > 0;
    bool strict_alg1 = sub.get_option("--strict-alg1")->count() > 0;
    bool verbose = sub.get_option("--verbose")->count() > 0;

    config.apply(sub, "verifiers", verifiers_csv);
    config.apply(sub, "selection", selection);
    config.apply(sub, "operators", operators_csv);
    config.apply(sub, "max-iter", max_iter);
    config.apply(sub, "rng-seed", rng_seed);
    config.apply(sub, "mixed-bias", mixed_bias);
    config.apply(sub, "mutants-per-round", mutants_per_round);
    config.apply(sub, "timeout-ms", timeout_ms);

    CampaignConfig cfg;
    cfg.max_iter = max_iter;
    cfg.selection = selection_strategy_from_name(selection);
    cfg.mixed_bias = mixed_bias;
    cfg.rng_seed = rng_seed;
    cfg.stop_on_first_bug = stop_on_first_bug;
    cfg.strict_alg1 = strict_alg1;
    cfg.mutation.mutants_per_round = mutants_per_round;
    for (const std::string& op : split_csv(operators_csv))
        cfg.mutation.allowed_ops.push_back(mutation_op_from_name(op));

    RosterOptions ropts;
    ropts.timeout_ms = timeout_ms;
    ropts.sampler_seed = rng_seed + 1;
    std::vector<std::string> verifier_names = split_csv(verifiers_csv);
    auto roster = make_roster(verifier_names, ropts);
    cfg.validate(roster.size());

    std::vector<bool> resumed_seed_flags;
    std::vector<TestCase> seeds = load_seed_dir(seeds_dir);
    std::vector<TestCase> resumed;
    if (!resume_dir.empty()) {
        std::vector<bool> flags;
        std::vector<TestCase> entries = load_seed_dir(resume_dir, &flags);
        // Snapshot seeds replace the seed list; the rest resumes the pool.
        std::vector<TestCase> snapshot_seeds;
        for (std::size_t i = 0; i < entries.size(); ++i)
            (flags[i] ? snapshot_seeds : resumed).push_back(entries[i]);
        if (!snapshot_seeds.empty()) seeds = std::move(snapshot_seeds);
    }

    json resolved = resolved_run_config(cfg, verifier_names, seeds_dir, timeout_ms);
    std::string replay = "galaxy run --seeds " + seeds_dir + " --verifiers " + verifiers_csv +
                         " --max-iter " + std::to_string(max_iter) + " --selection " + selection +
                         " --rng-seed " + std::to_string(rng_seed) + " --out " + out_dir;

    CampaignResult result =
        run_campaign(seeds, cfg, roster, verbose ? &std::cerr : nullptr,
                     resumed.empty() ? nullptr : &resumed);
    write_report(out_dir, result, resolved.dump(), replay);
    export_pool_snapshot(result.final_pool, (fs::path(out_dir) / "pool-snapshot").string());

    std::vector<BugReport> unique_bugs = dedup(result.bugs);
    std::cout << "iterations: " << result.iterations_run
              << "  mean round ms: " << result.mean_round_ms() << "\n";
    std::cout << "bugs (deduped): " << unique_bugs.size() << "  occurrences: " << result.bugs.size()
              << "\n";
    for (const BugReport& b : unique_bugs) {
        std::cout << "  " << bug_kind_name(b.kind) << "  x" << b.occurrences << "  implicating";
        for (const std::string& v : b.implicated) std::cout << " " << v;
        std::cout << "  (op " << b.test_case.lineage.op << ")\n";
    }
    std::cout << "report: " << out_dir << "\n";
    return kExitOk;
}

int cmd_verify(const CLI::App& sub) {
    std::string model = sub.get_option("--model")->as<std::string>();
    std::string spec = sub.get_option("--spec")->as<std::string>();
    std::string verifiers_csv = sub.get_option("--verifiers")->as<std::string>();
    std::int64_t timeout_ms = sub.get_option("--timeout-ms")->as<std::int64_t>();
    std::uint64_t rng_seed = sub.get_option("--rng-seed")->as<std::uint64_t>();

    TestCase tc = load_test_case(model, spec);
    RosterOptions ropts;
    ropts.timeout_ms = timeout_ms;
    ropts.sampler_seed = rng_seed + 1;
    auto roster = make_roster(split_csv(verifiers_csv), ropts);
    if (roster.empty()) throw ConfigError("no verifiers given");

    bool any_violated = false, any_crash = false, all_holds = true;
    for (const auto& v : roster) {
        Verdict verdict = run_verifier(*v, tc);
        std::cout << v->name() << ": " << verdict_kind_name(verdict.kind);
        if (verdict.kind == VerdictKind::Violated) {
            std::cout << " cex=[";
            for (std::size_t i = 0; i < verdict.cex.size(); ++i)
                std::cout << (i ? "," : "") << verdict.cex[i];
            std::cout << "] revalidates=" << (violates(tc, verdict.cex) ? "yes" : "no");
        }
        if (!verdict.note.empty()) std::cout << "  (" << verdict.note << ")";
        std::cout << "\n";
        any_violated |= verdict.kind == VerdictKind::Violated;
        any_crash |= verdict.kind == VerdictKind::Crash;
        all_holds &= verdict.kind == VerdictKind::Holds;
    }
    if (all_holds) return kExitOk;
    if (any_crash) return kExitCrash;
    if (any_violated) return kExitViolated;
    return kExitInconclusive;
}

int cmd_mutate(const CLI::App& sub) {
    std::string model = sub.get_option("--model")->as<std::string>();
    std::string spec_path = sub.get_option("--spec")->as<std::string>();
    std::string out_dir = sub.get_option("--out")->as<std::string>();
    std::string ops_csv = sub.get_option("--op")->as<std::string>();
    std::string ca_path = sub.get_option("--ca-path")->as<std::string>();
    double ca_delta = sub.get_option("--ca-delta")->as<double>();
    std::size_t count = sub.get_option("--count")->as<std::size_t>();
    std::uint64_t rng_seed = sub.get_option("--rng-seed")->as<std::uint64_t>();

    TestCase parent = load_test_case(model, spec_path);
    fs::create_directories(out_dir);

    if (!ca_path.empty()) {
        // Targeted constant addition: one mutant, no randomness.
        Specification mutated = mutate_ca_at(parent.spec, ca_path, ca_delta);
        save_network(parent.network, (fs::path(out_dir) / "mutant-0.model.json").string());
        save_spec(mutated, (fs::path(out_dir) / "mutant-0.spec.json").string());
        json manifest;
        manifest["mutants"] = json::array(
            {{{"stem", "mutant-0"}, {"op", "CA"}, {"path", ca_path}, {"delta", ca_delta}}});
        std::ofstream(fs::path(out_dir) / "manifest.json") << manifest.dump(2) << "\n";
        return kExitOk;
    }

    MutationConfig cfg;
    cfg.mutants_per_round = count;
    for (const std::string& op : split_csv(ops_csv))
        cfg.allowed_ops.push_back(mutation_op_from_name(op));
    Rng rng(rng_seed);
    std::uint64_t id_counter = 0;
    std::vector<TestCase> mutants = mutate(parent, cfg, rng, id_counter);

    json manifest;
    manifest["parent"] = parent.id;
    manifest["rng_seed"] = rng_seed;
    manifest["mutants"] = json::array();
    for (std::size_t i = 0; i < mutants.size(); ++i) {
        std::string stem = "mutant-" + std::to_string(i);
        save_network(mutants[i].network, (fs::path(out_dir) / (stem + ".model.json")).string());
        save_spec(mutants[i].spec, (fs::path(out_dir) / (stem + ".spec.json")).string());
        manifest["mutants"].push_back({{"stem", stem},
                                       {"id", mutants[i].id},
                                       {"op", mutants[i].lineage.op},
                                       {"rng_seed", mutants[i].lineage.rng_seed}});
    }
    std::ofstream(fs::path(out_dir) / "manifest.json") << manifest.dump(2) << "\n";
    std::cout << "wrote " << mutants.size() << " mutants to " << out_dir << "\n";
    return kExitOk;
}

int cmd_validate_cex(const CLI::App& sub) {
    std::string model = sub.get_option("--model")->as<std::string>();
    std::string spec_path = sub.get_option("--spec")->as<std::string>();
    std::string cex_csv = sub.get_option("--cex")->as<std::string>();

    TestCase tc = load_test_case(model, spec_path);
    std::vector<double> x;
    for (const std::string& part : split_csv(cex_csv)) x.push_back(std::stod(part));
    if (x.size() != tc.spec.input_dim) {
        std::cerr << "cex length " << x.size() << " != input_dim " << tc.spec.input_dim << "\n";
        return kExitIo;
    }

    bool pre_ok = eval_pre(tc.spec, x);
    std::cout << "precondition: " << (pre_ok ? "satisfied" : "unsatisfied") << "\n";
    for (std::size_t i = 0; i < tc.spec.preconditions.size(); ++i) {
        Specification one = tc.spec;
        one.preconditions = {tc.spec.preconditions[i]};
        std::cout << "  pre[" << i << "]: " << (eval_pre(one, x) ? "satisfied" : "unsatisfied")
                  << "\n";
    }
    std::vector<double> y = forward(tc.network, x);
    bool post_ok = eval_post(tc.spec, x, y);
    std::cout << "output: [";
    for (std::size_t i = 0; i < y.size(); ++i) std::cout << (i ? "," : "") << y[i];
    std::cout << "]\npostcondition: " << (post_ok ? "satisfied" : "violated") << "\n";
    bool is_cex = pre_ok && !post_ok;
    std::cout << "counterexample: " << (is_cex ? "valid" : "invalid") << "\n";
    return is_cex ? kExitOk : kExitViolated;
}

int cmd_gen_seeds(const CLI::App& sub) {
    std::string out_dir = sub.get_option("--out")->as<std::string>();
    std::size_t count = sub.get_option("--count")->as<std::size_t>();
    std::size_t input_dim = sub.get_option("--input-dim")->as<std::size_t>();
    std::string widths_csv = sub.get_option("--widths")->as<std::string>();
    double epsilon = sub.get_option("--epsilon")->as<double>();
    std::uint64_t rng_seed = sub.get_option("--rng-seed")->as<std::uint64_t>();

    SeedNetworkConfig net_cfg;
    net_cfg.input_dim = input_dim;
    net_cfg.layer_widths.clear();
    for (const std::string& w : split_csv(widths_csv))
        net_cfg.layer_widths.push_back(std::stoul(w));

    fs::create_directories(out_dir);
    Rng rng(rng_seed);
    for (std::size_t i = 0; i < count; ++i) {
        net_cfg.name = "seed-" + std::to_string(i);
        Network net = generate_seed_network(net_cfg, rng.next_u64());
        std::vector<double> center(input_dim);
        for (double& c : center) c = rng.uniform(-1.0, 1.0);
        // Label the network's own prediction at the center, so the query is
        // non-vacuous and holds at least at one point.
        std::size_t label = argmax_label(forward(net, center));
        Specification spec = robustness_spec(center, epsilon, label);
        std::string stem = "seed-" + std::to_string(i);
        save_network(net, (fs::path(out_dir) / (stem + ".model.json")).string());
        save_spec(spec, (fs::path(out_dir) / (stem + ".spec.json")).string());
    }
    std::cout << "wrote " << count << " seed pairs to " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differential fuzzing harness for neural-network verifiers"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags and GALAXY_* env override it)")
        ->envname("GALAXY_CONFIG");

    auto add_common = [&config_path](CLI::App* sub) {
        sub->add_option("--rng-seed", "RNG seed")->default_val("42")->envname(env_name("rng-seed"));
        sub->add_flag("--verbose", "per-iteration log on stderr");
        sub->add_option("--config", config_path, "JSON config file (flags and env override it)");
    };

    CLI::App* run = app.add_subcommand("run", "run a differential campaign");
    run->add_option("--seeds", "seed directory (model/spec pairs)")->required();
    run->add_option("--out", "report directory")->required();
    run->add_option("--verifiers", "comma list: ibp,bab,sampler,external:PATH, +fault suffixes")
        ->default_val("ibp,bab,sampler")
        ->envname(env_name("verifiers"));
    run->add_option("--max-iter", "campaign iterations")->default_val("200")->envname(env_name("max-iter"));
    run->add_option("--selection", "random|recency|mixed")->default_val("mixed")->envname(env_name("selection"));
    run->add_option("--mixed-bias", "recency branch probability for mixed")->default_val("0.5");
    run->add_option("--mutants-per-round", "mutants per iteration")->default_val("4");
    run->add_option("--operators", "operator filter, e.g. GF,CA")->default_val("");
    run->add_option("--timeout-ms", "per-verifier timeout")->default_val("10000")->envname(env_name("timeout-ms"));
    run->add_option("--resume", "pool snapshot directory to resume from")->default_val("");
    run->add_flag("--stop-on-first-bug", "stop after the first bug-triggering iteration");
    run->add_flag("--strict-alg1", "literal loop: return on first bug, skip pool add on bug");
    add_common(run);

    CLI::App* verify = app.add_subcommand("verify", "one verification query");
    verify->add_option("--model", "model file")->required();
    verify->add_option("--spec", "spec file")->required();
    verify->add_option("--verifiers", "comma list")->default_val("ibp,bab,sampler");
    verify->add_option("--timeout-ms", "per-verifier timeout")->default_val("10000");
    add_common(verify);

    CLI::App* mut = app.add_subcommand("mutate", "mutate a test case");
    mut->add_option("--model", "parent model file")->required();
    mut->add_option("--spec", "parent spec file")->required();
    mut->add_option("--out", "output directory")->required();
    mut->add_option("--op", "operator filter, e.g. CA or GF,WS")->default_val("");
    mut->add_option("--count", "number of mutants")->default_val("4");
    mut->add_option("--ca-path", "targeted CA: constant path, e.g. pre[0].radius")->default_val("");
    mut->add_option("--ca-delta", "targeted CA: delta to add")->default_val("0.05");
    add_common(mut);

    CLI::App* val = app.add_subcommand("validate-cex", "check a counterexample");
    val->add_option("--model", "model file")->required();
    val->add_option("--spec", "spec file")->required();
    val->add_option("--cex", "comma-separated input vector")->required();
    add_common(val);

    CLI::App* gen = app.add_subcommand("gen-seeds", "generate synthetic seed test cases");
    gen->add_option("--out", "output directory")->required();
    gen->add_option("--count", "number of seed pairs")->default_val("4");
    gen->add_option("--input-dim", "network input dimension")->default_val("2");
    gen->add_option("--widths", "layer widths, e.g. 3,2")->default_val("3,2");
    gen->add_option("--epsilon", "robustness radius")->default_val("0.1");
    add_common(gen);

    try {
        app.parse(argc, argv);
        ConfigFile config(config_path);
        if (run->parsed()) return cmd_run(*run, config);
        if (verify->parsed()) return cmd_verify(*verify);
        if (mut->parsed()) return cmd_mutate(*mut);
        if (val->parsed()) return cmd_validate_cex(*val);
        if (gen->parsed()) return cmd_gen_seeds(*gen);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    } catch (const MutationExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMutationExhausted;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidConfig& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ShapeError& e) {
        std::cerr << "shape error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DimensionMismatch& e) {
        std::cerr << "dimension error: " << e.what() << "\n";
        return kExitIo;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
