#include "galaxy/mutation.hpp"

#include <algorithm>
#include <numeric>

#include "galaxy/errors.hpp"

namespace galaxy {

std::string mutation_op_name(MutationOp op) {
    switch (op) {
        case MutationOp::GF: return "GF";
        case MutationOp::WS: return "WS";
        case MutationOp::NEB: return "NEB";
        case MutationOp::NAI: return "NAI";
        case MutationOp::NS: return "NS";
        case MutationOp::CA: return "CA";
        case MutationOp::CR: return "CR";
        case MutationOp::CSB: return "CSB";
        case MutationOp::CSW: return "CSW";
    }
    return "?";
}

MutationOp mutation_op_from_name(const std::string& name) {
    for (MutationOp op : kAllMutationOps)
        if (mutation_op_name(op) == name) return op;
    throw InvalidConfig("unknown mutation operator: " + name);
}

bool is_model_op(MutationOp op) {
    switch (op) {
        case MutationOp::GF:
        case MutationOp::WS:
        case MutationOp::NEB:
        case MutationOp::NAI:
        case MutationOp::NS:
            return true;
        default:
            return false;
    }
}

void MutationConfig::validate() const {
    if (!(gf_sigma > 0.0)) throw InvalidConfig("gf_sigma must be positive");
    if (!(gf_rate > 0.0 && gf_rate <= 1.0)) throw InvalidConfig("gf_rate must be in (0, 1]");
    if (!(ca_delta_max > 0.0)) throw InvalidConfig("ca_delta_max must be positive");
    if (mutants_per_round == 0) throw InvalidConfig("mutants_per_round must be positive");
}

Network mutate_gf(const Network& net, const MutationConfig& cfg, Rng& rng) {
    Network out = net;
    // Per-weight Bernoulli selection; redraw the whole mask if it comes up
    // empty so every GF mutant differs from its parent.
    std::vector<std::pair<std::size_t, std::size_t>> selected;
    while (selected.empty()) {
        for (std::size_t li = 0; li < net.layers.size(); ++li)
            for (std::size_t k = 0; k < net.layers[li].weights.data.size(); ++k)
                if (rng.bernoulli(cfg.gf_rate)) selected.emplace_back(li, k);
    }
    for (auto [li, k] : selected)
        out.layers[li].weights.data[k] += rng.normal(cfg.gf_mu, cfg.gf_sigma);
    out.validate();
    return out;
}

Network mutate_ws(const Network& net, Rng& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> eligible;
    for (std::size_t li = 0; li < net.layers.size(); ++li)
        if (net.layers[li].weights.cols >= 2)
            for (std::size_t r = 0; r < net.layers[li].weights.rows; ++r)
                eligible.emplace_back(li, r);
    if (eligible.empty()) throw NoEligibleNeuron("WS: every neuron has a single incoming weight");
    auto [li, r] = eligible[rng.index(eligible.size())];
    Network out = net;
    Matrix& w = out.layers[li].weights;
    std::vector<std::size_t> perm(w.cols);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> identity = perm;
    do {
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[rng.index(i)]);
    } while (perm == identity);
    std::vector<double> row(w.cols);
    for (std::size_t c = 0; c < w.cols; ++c) row[c] = w.at(r, perm[c]);
    for (std::size_t c = 0; c < w.cols; ++c) w.at(r, c) = row[c];
    out.validate();
    return out;
}

Network mutate_neb(const Network& net, Rng& rng) {
    if (net.layers.size() < 2)
        throw NoEligibleNeuron("NEB: network has no non-final layer");
    // Choose a neuron uniformly over all non-final layers.
    std::vector<std::pair<std::size_t, std::size_t>> eligible;
    for (std::size_t li = 0; li + 1 < net.layers.size(); ++li)
        for (std::size_t r = 0; r < net.layers[li].weights.rows; ++r)
            eligible.emplace_back(li, r);
    auto [li, r] = eligible[rng.index(eligible.size())];
    Network out = net;
    Matrix& next = out.layers[li + 1].weights;
    for (std::size_t row = 0; row < next.rows; ++row) next.at(row, r) = 0.0;
    out.validate();
    return out;
}

Network mutate_nai(const Network& net, Rng& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> all;
    for (std::size_t li = 0; li < net.layers.size(); ++li)
        for (std::size_t r = 0; r < net.layers[li].weights.rows; ++r)
            all.emplace_back(li, r);
    auto [li, r] = all[rng.index(all.size())];
    Network out = net;
    Matrix& w = out.layers[li].weights;
    for (std::size_t c = 0; c < w.cols; ++c) w.at(r, c) = -w.at(r, c);
    out.layers[li].bias[r] = -out.layers[li].bias[r];
    out.validate();
    return out;
}

Network mutate_ns(const Network& net, Rng& rng) {
    std::vector<std::size_t> eligible;
    for (std::size_t li = 0; li < net.layers.size(); ++li)
        if (net.layers[li].weights.rows >= 2) eligible.push_back(li);
    if (eligible.empty()) throw NoEligibleLayer("NS: no layer has two neurons");
    std::size_t li = eligible[rng.index(eligible.size())];
    Network out = net;
    Matrix& w = out.layers[li].weights;
    std::size_t i = rng.index(w.rows);
    std::size_t j = rng.index(w.rows - 1);
    if (j >= i) ++j;
    // Incoming rows and biases swap; outgoing columns deliberately stay put,
    // otherwise the mutant would compute the same function.
    for (std::size_t c = 0; c < w.cols; ++c) std::swap(w.at(i, c), w.at(j, c));
    std::swap(out.layers[li].bias[i], out.layers[li].bias[j]);
    out.validate();
    return out;
}

static std::vector<ConstantRef> eligible_constants(const Specification& spec,
                                                   const MutationConfig& cfg) {
    std::vector<ConstantRef> all = spec_constants(spec);
    if (!cfg.thresholds_only) return all;
    std::vector<ConstantRef> out;
    for (const ConstantRef& c : all)
        if (is_threshold_path(c.path)) out.push_back(c);
    return out;
}

static Specification add_to_constant(const Specification& spec, const MutationConfig& cfg,
                                     Rng& rng, double sign) {
    std::vector<ConstantRef> eligible = eligible_constants(spec, cfg);
    if (eligible.empty()) throw NoConstants("no constants in specification");
    const ConstantRef& target = eligible[rng.index(eligible.size())];
    double d = rng.uniform_positive(cfg.ca_delta_max);
    Specification out = spec;
    set_constant(out, target.path, target.value + sign * d);
    return out;
}

Specification mutate_ca(const Specification& spec, const MutationConfig& cfg, Rng& rng) {
    return add_to_constant(spec, cfg, rng, +1.0);
}

Specification mutate_csb(const Specification& spec, const MutationConfig& cfg, Rng& rng) {
    return add_to_constant(spec, cfg, rng, -1.0);
}

Specification mutate_ca_at(const Specification& spec, const std::string& path, double delta) {
    Specification out = spec;
    set_constant(out, path, get_constant(spec, path) + delta);
    return out;
}

Specification mutate_cr(const Specification& spec, const MutationConfig& cfg, Rng& rng) {
    std::vector<ConstantRef> all = eligible_constants(spec, cfg);
    if (all.empty()) throw NoConstants("no constants in specification");
    std::vector<ConstantRef> removable;
    for (const ConstantRef& c : all)
        if (c.path.rfind("pre[", 0) == 0) removable.push_back(c);
    if (removable.empty())
        throw NoRemovableConstant("CR: only postcondition constants present");
    const std::string path = removable[rng.index(removable.size())].path;

    std::size_t pre_index = std::stoul(path.substr(4, path.find(']') - 4));
    std::string field = path.substr(path.find('.') + 1);
    Specification out = spec;
    if (field.rfind("lower", 0) == 0 || field.rfind("upper", 0) == 0) {
        // Deleting one box-bound component relaxes it to the domain clamp.
        std::size_t j = std::stoul(field.substr(field.find('[') + 1));
        auto& box = std::get<BoxConstraint>(out.preconditions[pre_index]);
        if (field.rfind("lower", 0) == 0)
            box.lower[j] = -out.domain_bound;
        else
            box.upper[j] = out.domain_bound;
    } else {
        // rhs, radius, center: drop the whole atomic constraint.
        out.preconditions.erase(out.preconditions.begin() + static_cast<std::ptrdiff_t>(pre_index));
    }
    return out;
}

Specification mutate_csw(const Specification& spec, const MutationConfig& cfg, Rng& rng) {
    std::vector<ConstantRef> eligible = eligible_constants(spec, cfg);
    if (eligible.size() < 2) throw TooFewConstants("CSW: fewer than two constants");
    std::size_t i = rng.index(eligible.size());
    std::size_t j = rng.index(eligible.size() - 1);
    if (j >= i) ++j;
    Specification out = spec;
    set_constant(out, eligible[i].path, eligible[j].value);
    set_constant(out, eligible[j].path, eligible[i].value);
    return out;
}

static bool op_allowed(const MutationConfig& cfg, MutationOp op) {
    if (cfg.allowed_ops.empty()) return true;
    return std::find(cfg.allowed_ops.begin(), cfg.allowed_ops.end(), op) != cfg.allowed_ops.end();
}

static TestCase apply_operator(const TestCase& tc, MutationOp op, const MutationConfig& cfg,
                               Rng& rng) {
    TestCase out = tc;
    switch (op) {
        case MutationOp::GF: out.network = mutate_gf(tc.network, cfg, rng); break;
        case MutationOp::WS: out.network = mutate_ws(tc.network, rng); break;
        case MutationOp::NEB: out.network = mutate_neb(tc.network, rng); break;
        case MutationOp::NAI: out.network = mutate_nai(tc.network, rng); break;
        case MutationOp::NS: out.network = mutate_ns(tc.network, rng); break;
        case MutationOp::CA: out.spec = mutate_ca(tc.spec, cfg, rng); break;
        case MutationOp::CSB: out.spec = mutate_csb(tc.spec, cfg, rng); break;
        case MutationOp::CR: out.spec = mutate_cr(tc.spec, cfg, rng); break;
        case MutationOp::CSW: out.spec = mutate_csw(tc.spec, cfg, rng); break;
    }
    return out;
}

std::vector<TestCase> mutate(const TestCase& tc, const MutationConfig& cfg, Rng& rng,
                             std::uint64_t& id_counter) {
    cfg.validate();
    std::vector<MutationOp> model_ops, spec_ops;
    for (MutationOp op : kAllMutationOps) {
        if (!op_allowed(cfg, op)) continue;
        (is_model_op(op) ? model_ops : spec_ops).push_back(op);
    }
    if (model_ops.empty() && spec_ops.empty())
        throw MutationExhausted("operator filter excludes every operator");

    std::vector<TestCase> out;
    for (std::size_t slot = 0; slot < cfg.mutants_per_round; ++slot) {
        Rng slot_rng = rng.split();
        for (std::size_t attempt = 0; attempt < cfg.max_retries; ++attempt) {
            bool model_dim = slot_rng.bernoulli(0.5);
            const std::vector<MutationOp>& ops = model_dim ? model_ops : spec_ops;
            if (ops.empty()) continue;
            MutationOp op = ops[slot_rng.index(ops.size())];
            std::uint64_t op_seed = slot_rng.next_u64();
            Rng op_rng(op_seed);
            try {
                TestCase mutant = apply_operator(tc, op, cfg, op_rng);
                mutant.lineage = Lineage{tc.id, mutation_op_name(op), op_seed};
                mutant.id = "tc-" + std::to_string(id_counter++);
                mutant.validate();
                out.push_back(std::move(mutant));
                break;
            } catch (const NoEligibleNeuron&) {
            } catch (const NoEligibleLayer&) {
            } catch (const NoConstants&) {
            } catch (const NoRemovableConstant&) {
            } catch (const TooFewConstants&) {
            }
        }
    }
    if (out.empty()) throw MutationExhausted("no mutation operator applies to this test case");
    return out;
}

}  // namespace galaxy
