#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "galaxy/nn.hpp"

namespace galaxy {

enum class CmpOp { LE, GE };

std::string cmp_op_name(CmpOp op);
CmpOp cmp_op_from_name(const std::string& name);

/// Axis-aligned box over the inputs. lower_i > upper_i denotes the empty
/// region and is valid data (constant-switch mutants produce it).
struct BoxConstraint {
    std::vector<double> lower;
    std::vector<double> upper;
    bool operator==(const BoxConstraint&) const = default;
};

/// coeffs . x <= rhs  (or >=).
struct LinearConstraint {
    std::vector<double> coeffs;
    CmpOp op = CmpOp::LE;
    double rhs = 0.0;
    bool operator==(const LinearConstraint&) const = default;
};

/// L-infinity ball around a fixed center. Negative radius denotes the empty
/// region.
struct DistanceBallConstraint {
    std::vector<double> center;
    double radius = 0.0;
    bool operator==(const DistanceBallConstraint&) const = default;
};

using InputConstraint = std::variant<BoxConstraint, LinearConstraint, DistanceBallConstraint>;

struct ArgmaxEqProperty {
    std::size_t label = 0;
    bool operator==(const ArgmaxEqProperty&) const = default;
};

/// coeffs . y <= rhs  (or >=).
struct LinearOutProperty {
    std::vector<double> coeffs;
    CmpOp op = CmpOp::LE;
    double rhs = 0.0;
    bool operator==(const LinearOutProperty&) const = default;
};

using OutputProperty = std::variant<ArgmaxEqProperty, LinearOutProperty>;

/// One addressable numeric literal of a specification. Paths use a dotted
/// index syntax: pre[0].radius, pre[1].upper[3], pre[0].center[1], post.rhs.
struct ConstantRef {
    std::string path;
    double value = 0.0;
    bool operator==(const ConstantRef&) const = default;
};

/// forall x: pre(x) and y <- N(x)  implies  post(x, y). All analyses
/// additionally intersect the precondition with [-domain_bound, domain_bound]^n;
/// the bound travels in the spec file so external verifiers see the same
/// semantics.
struct Specification {
    std::size_t input_dim = 0;
    double domain_bound = 10.0;
    std::vector<InputConstraint> preconditions;
    OutputProperty postcondition;

    bool operator==(const Specification&) const = default;
};

/// The addressable constant table, derived from the structure in a stable
/// order. Coefficient vectors are not constants; bounds, radii, centers and
/// right-hand sides are.
std::vector<ConstantRef> spec_constants(const Specification& spec);

/// Resolves a constant path. Throws ParseError on unknown paths.
double get_constant(const Specification& spec, const std::string& path);
void set_constant(Specification& spec, const std::string& path, double value);

/// True iff the path addresses a scalar threshold (radius, rhs, box bound) as
/// opposed to a ball-center coordinate.
bool is_threshold_path(const std::string& path);

bool eval_pre(const Specification& spec, const std::vector<double>& x);
bool eval_post(const Specification& spec, const std::vector<double>& x,
               const std::vector<double>& y);

/// Same checks with a slack tolerance on every closed inequality; used for
/// counterexamples reported by external verifiers only.
bool eval_pre_tol(const Specification& spec, const std::vector<double>& x, double tol);
bool eval_post_tol(const Specification& spec, const std::vector<double>& x,
                   const std::vector<double>& y, double tol);

/// Analytic emptiness check over Box/ball constraints and the domain clamp.
/// (Linear constraints are ignored here; they can only shrink the region.)
bool precondition_definitely_empty(const Specification& spec);

/// L-infinity robustness query around `center`: ball radius epsilon, argmax
/// postcondition. Epsilon registers at path pre[0].radius.
Specification robustness_spec(const std::vector<double>& center, double epsilon,
                              std::size_t label, double domain_bound = 10.0);

Specification load_spec(const std::string& path);
void save_spec(const Specification& spec, const std::string& path);

std::string spec_to_json(const Specification& spec);
Specification spec_from_json_text(const std::string& text);

/// Lineage of a pool entry: how it was derived from its parent.
struct Lineage {
    std::string parent_id = "seed";
    std::string op = "seed";
    std::uint64_t rng_seed = 0;
    bool operator==(const Lineage&) const = default;
};

/// The (network, specification) pair a verifier consumes.
struct TestCase {
    Network network;
    Specification spec;
    Lineage lineage;
    std::string id;

    /// Throws ShapeError if spec and network dimensions disagree.
    void validate() const;
};

/// Ground-truth counterexample validator: x satisfies the precondition but
/// falsifies the postcondition on forward(network, x).
bool violates(const TestCase& tc, const std::vector<double>& x);

/// Tolerant variant for external-verifier counterexamples (slack on
/// constraint satisfaction only, default 1e-6).
bool violates_tol(const TestCase& tc, const std::vector<double>& x, double tol);

}  // namespace galaxy
