#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "galaxy/spec.hpp"
#include "galaxy/verdict.hpp"

namespace galaxy {

/// Per-layer interval enclosure. `empty` marks an empty region.
struct BoundsBox {
    std::vector<double> lower;
    std::vector<double> upper;
    bool empty = false;

    std::size_t dim() const { return lower.size(); }
    double width(std::size_t i) const { return upper[i] - lower[i]; }
    std::vector<double> center() const;
};

/// Bounding box of the precondition region: the domain clamp intersected with
/// every box and ball constraint. Linear constraints do not tighten the box.
BoundsBox precondition_bounding_box(const Specification& spec);

/// Sound interval propagation: for every x in input_box, forward(net, x) lies
/// inside the returned bounds. Affine steps use exact interval arithmetic;
/// ReLU and Sigmoid map bounds monotonically.
BoundsBox ibp_bounds(const Network& net, const BoundsBox& input_box);

/// True iff the output bounds certify the postcondition for every point of
/// the enclosure.
bool bounds_certify_post(const Specification& spec, const BoundsBox& out);

/// True iff `sub` is provably disjoint from some precondition constraint
/// (interval reasoning; handles box, ball and linear constraints).
bool box_disjoint_from_pre(const Specification& spec, const BoundsBox& sub);

class Verifier {
  public:
    virtual ~Verifier() = default;
    virtual const std::string& name() const { return name_; }
    virtual Verdict verify(const TestCase& tc) = 0;

  protected:
    explicit Verifier(std::string name) : name_(std::move(name)) {}
    std::string name_;
};

/// Catches any exception thrown by v.verify and turns it into Crash; a broken
/// verifier must never take the campaign down with it.
Verdict run_verifier(Verifier& v, const TestCase& tc);

struct IbpConfig {
    std::int64_t timeout_ms = 10000;
};

/// Incomplete certifier: interval bounds over the precondition bounding box,
/// plus a small deterministic point search for concrete counterexamples.
class IbpVerifier : public Verifier {
  public:
    explicit IbpVerifier(std::string name = "ibp", IbpConfig cfg = {})
        : Verifier(std::move(name)), cfg_(cfg) {}
    Verdict verify(const TestCase& tc) override;

  private:
    IbpConfig cfg_;
};

struct BabConfig {
    double min_box_width_frac = 1e-4;  // fraction of the initial box width
    std::size_t max_splits = 100000;
    std::int64_t timeout_ms = 10000;
};

/// Branch-and-bound input splitting with interval pruning. Complete whenever
/// the true decision margin exceeds the width resolution.
class BabVerifier : public Verifier {
  public:
    explicit BabVerifier(std::string name = "bab", BabConfig cfg = {})
        : Verifier(std::move(name)), cfg_(cfg) {}
    Verdict verify(const TestCase& tc) override;

  private:
    BabConfig cfg_;
};

struct SamplerConfig {
    std::size_t sample_count = 10000;
    std::uint64_t rng_seed = 0;
    std::int64_t timeout_ms = 10000;
};

/// Falsifier-only roster member: uniform sampling over the precondition
/// bounding box. Never returns Holds.
class SamplerVerifier : public Verifier {
  public:
    explicit SamplerVerifier(std::string name = "sampler", SamplerConfig cfg = {})
        : Verifier(std::move(name)), cfg_(cfg) {}
    Verdict verify(const TestCase& tc) override;

  private:
    SamplerConfig cfg_;
};

enum class FaultKind { FlipHoldsToViolated, FlipViolatedToHolds, DropConstraintIndex, RandomCrash };

struct FaultConfig {
    FaultKind kind = FaultKind::RandomCrash;
    std::size_t drop_index = 0;     // DropConstraintIndex
    double crash_probability = 0.0; // RandomCrash
    std::uint64_t rng_seed = 0;     // RandomCrash
};

/// Deliberately buggy wrapper used to prove the differential oracle detects
/// seeded defects.
class FaultInjectedVerifier : public Verifier {
  public:
    FaultInjectedVerifier(std::unique_ptr<Verifier> base, FaultConfig fault);
    Verdict verify(const TestCase& tc) override;

  private:
    std::unique_ptr<Verifier> base_;
    FaultConfig fault_;
    std::uint64_t crash_draws_ = 0;
};

struct ExternalConfig {
    std::vector<std::string> command;  // argv; command[0] is the executable
    std::int64_t timeout_ms = 10000;
};

/// Subprocess adapter: one request line on stdin, one response line on
/// stdout, exit code 0. Anything else is Crash; overruns are killed, reaped
/// and reported as Timeout.
class ExternalVerifier : public Verifier {
  public:
    ExternalVerifier(std::string name, ExternalConfig cfg);
    Verdict verify(const TestCase& tc) override;

  private:
    ExternalConfig cfg_;
};

/// Shared knobs for rosters built from textual descriptions.
struct RosterOptions {
    std::int64_t timeout_ms = 10000;
    std::size_t sampler_count = 10000;
    std::uint64_t sampler_seed = 1;
    BabConfig bab;
};

/// Builds a verifier from a description like "ibp", "bab", "sampler",
/// "external:/path/to/adapter", optionally wrapped: "bab+flip_vh",
/// "ibp+flip_hv", "bab+crash:0.2", "bab+drop:0". The description is the
/// verifier's roster name.
std::unique_ptr<Verifier> make_verifier(const std::string& description, const RosterOptions& opts);

std::vector<std::unique_ptr<Verifier>> make_roster(const std::vector<std::string>& descriptions,
                                                   const RosterOptions& opts);

}  // namespace galaxy
