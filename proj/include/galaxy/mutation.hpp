#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "galaxy/rng.hpp"
#include "galaxy/spec.hpp"

namespace galaxy {

enum class MutationOp { GF, WS, NEB, NAI, NS, CA, CR, CSB, CSW };

std::string mutation_op_name(MutationOp op);
MutationOp mutation_op_from_name(const std::string& name);
bool is_model_op(MutationOp op);

inline constexpr MutationOp kAllMutationOps[] = {
    MutationOp::GF, MutationOp::WS, MutationOp::NEB, MutationOp::NAI, MutationOp::NS,
    MutationOp::CA, MutationOp::CR, MutationOp::CSB, MutationOp::CSW};

struct MutationConfig {
    double gf_mu = 0.0;
    double gf_sigma = 0.5;
    double gf_rate = 0.1;
    double ca_delta_max = 0.1;
    std::size_t mutants_per_round = 4;
    std::uint64_t rng_seed = 0;
    /// Restrict spec-level operators to scalar thresholds (radius, rhs,
    /// box bounds), excluding ball-center coordinates.
    bool thresholds_only = false;
    /// Empty means all operators allowed.
    std::vector<MutationOp> allowed_ops;
    std::size_t max_retries = 8;

    void validate() const;
};

// Model-level operators.
Network mutate_gf(const Network& net, const MutationConfig& cfg, Rng& rng);
Network mutate_ws(const Network& net, Rng& rng);
Network mutate_neb(const Network& net, Rng& rng);
Network mutate_nai(const Network& net, Rng& rng);
Network mutate_ns(const Network& net, Rng& rng);

// Specification-level operators.
Specification mutate_ca(const Specification& spec, const MutationConfig& cfg, Rng& rng);
Specification mutate_csb(const Specification& spec, const MutationConfig& cfg, Rng& rng);
Specification mutate_cr(const Specification& spec, const MutationConfig& cfg, Rng& rng);
Specification mutate_csw(const Specification& spec, const MutationConfig& cfg, Rng& rng);

/// Targeted constant addition (the one-shot form behind `mutate --op CA` with
/// an explicit path): adds delta to the constant at `path`.
Specification mutate_ca_at(const Specification& spec, const std::string& path, double delta);

/// One round of mutation: cfg.mutants_per_round children of tc, dimension
/// chosen with probability 1/2, operator uniform within the dimension,
/// inapplicable draws retried up to cfg.max_retries then the slot is skipped.
/// Ids are assigned from id_counter. Throws MutationExhausted when no
/// operator applies at all.
std::vector<TestCase> mutate(const TestCase& tc, const MutationConfig& cfg, Rng& rng,
                             std::uint64_t& id_counter);

}  // namespace galaxy
