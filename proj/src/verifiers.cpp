#include "galaxy/verifiers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

#include "galaxy/errors.hpp"
#include "galaxy/rng.hpp"

namespace galaxy {

std::string verdict_kind_name(VerdictKind k) {
    switch (k) {
        case VerdictKind::Holds: return "holds";
        case VerdictKind::Violated: return "violated";
        case VerdictKind::Unknown: return "unknown";
        case VerdictKind::Timeout: return "timeout";
        case VerdictKind::Crash: return "crash";
    }
    return "?";
}

std::vector<double> BoundsBox::center() const {
    std::vector<double> c(lower.size());
    for (std::size_t i = 0; i < lower.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
    return c;
}

BoundsBox precondition_bounding_box(const Specification& spec) {
    BoundsBox box;
    box.lower.assign(spec.input_dim, -spec.domain_bound);
    box.upper.assign(spec.input_dim, spec.domain_bound);
    for (const InputConstraint& c : spec.preconditions) {
        if (const auto* b = std::get_if<BoxConstraint>(&c)) {
            for (std::size_t i = 0; i < spec.input_dim; ++i) {
                box.lower[i] = std::max(box.lower[i], b->lower[i]);
                box.upper[i] = std::min(box.upper[i], b->upper[i]);
            }
        } else if (const auto* ball = std::get_if<DistanceBallConstraint>(&c)) {
            if (ball->radius < 0.0) {
                box.empty = true;
                return box;
            }
            for (std::size_t i = 0; i < spec.input_dim; ++i) {
                box.lower[i] = std::max(box.lower[i], ball->center[i] - ball->radius);
                box.upper[i] = std::min(box.upper[i], ball->center[i] + ball->radius);
            }
        }
    }
    for (std::size_t i = 0; i < spec.input_dim; ++i)
        if (box.lower[i] > box.upper[i]) {
            box.empty = true;
            return box;
        }
    return box;
}

BoundsBox ibp_bounds(const Network& net, const BoundsBox& input_box) {
    if (input_box.empty) {
        BoundsBox out;
        out.empty = true;
        return out;
    }
    std::vector<double> lo = input_box.lower;
    std::vector<double> hi = input_box.upper;
    for (const Layer& l : net.layers) {
        std::vector<double> nlo(l.weights.rows), nhi(l.weights.rows);
        for (std::size_t r = 0; r < l.weights.rows; ++r) {
            double a = l.bias[r], b = l.bias[r];
            for (std::size_t c = 0; c < l.weights.cols; ++c) {
                double w = l.weights.at(r, c);
                if (w >= 0.0) {
                    a += w * lo[c];
                    b += w * hi[c];
                } else {
                    a += w * hi[c];
                    b += w * lo[c];
                }
            }
            nlo[r] = apply_activation(l.activation, a);
            nhi[r] = apply_activation(l.activation, b);
        }
        lo = std::move(nlo);
        hi = std::move(nhi);
    }
    BoundsBox out;
    out.lower = std::move(lo);
    out.upper = std::move(hi);
    return out;
}

bool bounds_certify_post(const Specification& spec, const BoundsBox& out) {
    if (out.empty) return true;
    if (const auto* am = std::get_if<ArgmaxEqProperty>(&spec.postcondition)) {
        std::size_t k = am->label;
        for (std::size_t j = 0; j < out.dim(); ++j) {
            if (j == k) continue;
            // argmax ties break to the smaller index, so indices below the
            // target must be beaten strictly.
            if (j < k ? !(out.lower[k] > out.upper[j]) : !(out.lower[k] >= out.upper[j]))
                return false;
        }
        return true;
    }
    const auto& lo = std::get<LinearOutProperty>(spec.postcondition);
    double worst = 0.0;
    for (std::size_t i = 0; i < lo.coeffs.size(); ++i) {
        double c = lo.coeffs[i];
        if (lo.op == CmpOp::LE)
            worst += c >= 0.0 ? c * out.upper[i] : c * out.lower[i];
        else
            worst += c >= 0.0 ? c * out.lower[i] : c * out.upper[i];
    }
    return lo.op == CmpOp::LE ? worst <= lo.rhs : worst >= lo.rhs;
}

bool box_disjoint_from_pre(const Specification& spec, const BoundsBox& sub) {
    if (sub.empty) return true;
    for (const InputConstraint& c : spec.preconditions) {
        if (const auto* b = std::get_if<BoxConstraint>(&c)) {
            for (std::size_t i = 0; i < sub.dim(); ++i)
                if (sub.lower[i] > b->upper[i] || sub.upper[i] < b->lower[i]) return true;
        } else if (const auto* ball = std::get_if<DistanceBallConstraint>(&c)) {
            if (ball->radius < 0.0) return true;
            for (std::size_t i = 0; i < sub.dim(); ++i)
                if (sub.lower[i] > ball->center[i] + ball->radius ||
                    sub.upper[i] < ball->center[i] - ball->radius)
                    return true;
        } else if (const auto* lin = std::get_if<LinearConstraint>(&c)) {
            double lo_dot = 0.0, hi_dot = 0.0;
            for (std::size_t i = 0; i < sub.dim(); ++i) {
                double w = lin->coeffs[i];
                if (w >= 0.0) {
                    lo_dot += w * sub.lower[i];
                    hi_dot += w * sub.upper[i];
                } else {
                    lo_dot += w * sub.upper[i];
                    hi_dot += w * sub.lower[i];
                }
            }
            if (lin->op == CmpOp::LE ? lo_dot > lin->rhs : hi_dot < lin->rhs) return true;
        }
    }
    return false;
}

Verdict run_verifier(Verifier& v, const TestCase& tc) {
    try {
        return v.verify(tc);
    } catch (const std::exception& e) {
        return Verdict::crash(std::string(v.name()) + ": " + e.what());
    } catch (...) {
        return Verdict::crash(std::string(v.name()) + ": unknown exception");
    }
}

namespace {

using Clock = std::chrono::steady_clock;

/// Center plus the box corners (corner enumeration capped at dim 12).
void deterministic_points(const BoundsBox& box, std::vector<std::vector<double>>& out) {
    out.clear();
    out.push_back(box.center());
    std::size_t n = box.dim();
    if (n > 12) return;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i)
            p[i] = (mask >> i) & 1 ? box.upper[i] : box.lower[i];
        out.push_back(std::move(p));
    }
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

Verdict IbpVerifier::verify(const TestCase& tc) {
    auto deadline = Clock::now() + std::chrono::milliseconds(cfg_.timeout_ms);
    BoundsBox box = precondition_bounding_box(tc.spec);
    if (box.empty) return Verdict::holds();  // vacuous
    BoundsBox out = ibp_bounds(tc.network, box);
    if (bounds_certify_post(tc.spec, out)) return Verdict::holds();
    std::vector<std::vector<double>> points;
    deterministic_points(box, points);
    for (const auto& p : points) {
        if (Clock::now() > deadline) return Verdict::timeout();
        if (violates(tc, p)) return Verdict::violated(p);
    }
    return Verdict::unknown("interval bounds do not certify the property");
}

Verdict BabVerifier::verify(const TestCase& tc) {
    auto deadline = Clock::now() + std::chrono::milliseconds(cfg_.timeout_ms);
    BoundsBox root = precondition_bounding_box(tc.spec);
    if (root.empty) return Verdict::holds();  // vacuous

    double max_width = 0.0;
    for (std::size_t i = 0; i < root.dim(); ++i) max_width = std::max(max_width, root.width(i));
    const double min_width = cfg_.min_box_width_frac * std::max(max_width, 1e-12);

    std::deque<BoundsBox> work{root};
    std::size_t splits = 0;
    bool resolution_exhausted = false;
    std::vector<std::vector<double>> points;
    while (!work.empty()) {
        if (Clock::now() > deadline) return Verdict::timeout();
        BoundsBox box = std::move(work.front());
        work.pop_front();
        if (box_disjoint_from_pre(tc.spec, box)) continue;
        BoundsBox out = ibp_bounds(tc.network, box);
        if (bounds_certify_post(tc.spec, out)) continue;
        deterministic_points(box, points);
        for (const auto& p : points)
            if (violates(tc, p)) return Verdict::violated(p);
        std::size_t widest = 0;
        for (std::size_t i = 1; i < box.dim(); ++i)
            if (box.width(i) > box.width(widest)) widest = i;
        if (box.width(widest) < min_width || splits >= cfg_.max_splits) {
            resolution_exhausted = true;
            continue;
        }
        ++splits;
        double mid = 0.5 * (box.lower[widest] + box.upper[widest]);
        BoundsBox left = box, right = box;
        left.upper[widest] = mid;
        right.lower[widest] = mid;
        work.push_back(std::move(left));
        work.push_back(std::move(right));
    }
    if (resolution_exhausted)
        return Verdict::unknown("split budget or width resolution exhausted");
    return Verdict::holds();
}

Verdict SamplerVerifier::verify(const TestCase& tc) {
    auto deadline = Clock::now() + std::chrono::milliseconds(cfg_.timeout_ms);
    BoundsBox box = precondition_bounding_box(tc.spec);
    if (box.empty) return Verdict::unknown("no admissible samples");
    Rng rng(cfg_.rng_seed ^ fnv1a(tc.id));
    std::vector<double> p(box.dim());
    for (std::size_t s = 0; s < cfg_.sample_count; ++s) {
        if ((s & 0xff) == 0 && Clock::now() > deadline) return Verdict::timeout();
        for (std::size_t i = 0; i < box.dim(); ++i)
            p[i] = box.lower[i] == box.upper[i] ? box.lower[i]
                                                : rng.uniform(box.lower[i], box.upper[i]);
        if (!eval_pre(tc.spec, p)) continue;
        if (violates(tc, p)) return Verdict::violated(p);
    }
    return Verdict::unknown("no violation among sampled points");
}

FaultInjectedVerifier::FaultInjectedVerifier(std::unique_ptr<Verifier> base, FaultConfig fault)
    : Verifier(base->name()), base_(std::move(base)), fault_(fault) {
    if (fault_.kind == FaultKind::RandomCrash &&
        !(fault_.crash_probability >= 0.0 && fault_.crash_probability <= 1.0))
        throw InvalidConfig("RandomCrash probability must be in [0, 1]");
}

Verdict FaultInjectedVerifier::verify(const TestCase& tc) {
    switch (fault_.kind) {
        case FaultKind::RandomCrash: {
            // Deterministic per (seed, call index, test case).
            Rng rng(fault_.rng_seed ^ fnv1a(tc.id) ^ (crash_draws_++ * 0x9e3779b97f4a7c15ULL));
            if (rng.bernoulli(fault_.crash_probability))
                return Verdict::crash("injected crash");
            return base_->verify(tc);
        }
        case FaultKind::DropConstraintIndex: {
            TestCase dropped = tc;
            if (fault_.drop_index < dropped.spec.preconditions.size())
                dropped.spec.preconditions.erase(dropped.spec.preconditions.begin() +
                                                 static_cast<std::ptrdiff_t>(fault_.drop_index));
            return base_->verify(dropped);
        }
        case FaultKind::FlipHoldsToViolated: {
            Verdict v = base_->verify(tc);
            if (v.kind == VerdictKind::Holds) {
                BoundsBox box = precondition_bounding_box(tc.spec);
                std::vector<double> fake =
                    box.empty ? std::vector<double>(tc.spec.input_dim, 0.0) : box.center();
                return Verdict::violated(fake);
            }
            return v;
        }
        case FaultKind::FlipViolatedToHolds: {
            Verdict v = base_->verify(tc);
            if (v.kind == VerdictKind::Violated) return Verdict::holds();
            return v;
        }
    }
    return Verdict::unknown("unreachable");
}

namespace {

FaultConfig parse_fault(const std::string& text) {
    FaultConfig f;
    auto colon = text.find(':');
    std::string kind = text.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "flip_hv") {
        f.kind = FaultKind::FlipHoldsToViolated;
    } else if (kind == "flip_vh") {
        f.kind = FaultKind::FlipViolatedToHolds;
    } else if (kind == "crash") {
        f.kind = FaultKind::RandomCrash;
        f.crash_probability = arg.empty() ? 1.0 : std::stod(arg);
    } else if (kind == "drop") {
        f.kind = FaultKind::DropConstraintIndex;
        f.drop_index = arg.empty() ? 0 : std::stoul(arg);
    } else {
        throw InvalidConfig("unknown fault kind: " + kind);
    }
    return f;
}

}  // namespace

std::unique_ptr<Verifier> make_verifier(const std::string& description, const RosterOptions& opts) {
    std::string base = description;
    std::string fault;
    if (auto plus = description.find('+'); plus != std::string::npos) {
        base = description.substr(0, plus);
        fault = description.substr(plus + 1);
    }
    std::unique_ptr<Verifier> v;
    if (base == "ibp") {
        v = std::make_unique<IbpVerifier>(description, IbpConfig{opts.timeout_ms});
    } else if (base == "bab") {
        BabConfig cfg = opts.bab;
        cfg.timeout_ms = opts.timeout_ms;
        v = std::make_unique<BabVerifier>(description, cfg);
    } else if (base == "sampler") {
        v = std::make_unique<SamplerVerifier>(
            description, SamplerConfig{opts.sampler_count, opts.sampler_seed, opts.timeout_ms});
    } else if (base.rfind("external:", 0) == 0) {
        ExternalConfig cfg;
        cfg.command = {base.substr(9)};
        cfg.timeout_ms = opts.timeout_ms;
        v = std::make_unique<ExternalVerifier>(description, cfg);
    } else {
        throw ConfigError("unknown verifier: " + base);
    }
    if (!fault.empty()) {
        FaultConfig f = parse_fault(fault);
        f.rng_seed = opts.sampler_seed;
        v = std::make_unique<FaultInjectedVerifier>(std::move(v), f);
    }
    return v;
}

std::vector<std::unique_ptr<Verifier>> make_roster(const std::vector<std::string>& descriptions,
                                                   const RosterOptions& opts) {
    std::vector<std::unique_ptr<Verifier>> out;
    for (const std::string& d : descriptions) out.push_back(make_verifier(d, opts));
    return out;
}

}  // namespace galaxy
