#include <doctest.h>

#include "galaxy/errors.hpp"
#include "galaxy/rng.hpp"
#include "galaxy/verifiers.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace galaxy;

namespace {

TestCase vacuous_case() {
    TestCase tc;
    tc.network = testing::identity_net(1);
    tc.spec.input_dim = 1;
    tc.spec.preconditions.push_back(BoxConstraint{{1.0}, {-1.0}});
    tc.spec.postcondition = LinearOutProperty{{1.0}, CmpOp::LE, -100.0};
    tc.id = "vacuous";
    return tc;
}

struct ThrowingVerifier : Verifier {
    ThrowingVerifier() : Verifier("boom") {}
    Verdict verify(const TestCase&) override { throw std::logic_error("internal assertion"); }
};

}  // namespace

TEST_CASE("precondition_bounding_box intersects clamp, boxes and balls") {
    Specification spec;
    spec.input_dim = 2;
    spec.preconditions.push_back(BoxConstraint{{-0.5, -3.0}, {2.0, 3.0}});
    spec.preconditions.push_back(DistanceBallConstraint{{0.0, 0.0}, 1.0});
    spec.postcondition = ArgmaxEqProperty{0};
    BoundsBox box = precondition_bounding_box(spec);
    CHECK_FALSE(box.empty);
    CHECK(box.lower == std::vector<double>{-0.5, -1.0});
    CHECK(box.upper == std::vector<double>{1.0, 1.0});

    // no constraints at all: the domain clamp
    Specification clamp_only;
    clamp_only.input_dim = 1;
    clamp_only.postcondition = ArgmaxEqProperty{0};
    BoundsBox whole = precondition_bounding_box(clamp_only);
    CHECK(whole.lower == std::vector<double>{-10.0});
    CHECK(whole.upper == std::vector<double>{10.0});

    Specification crossed;
    crossed.input_dim = 1;
    crossed.preconditions.push_back(BoxConstraint{{1.0}, {-1.0}});
    crossed.postcondition = ArgmaxEqProperty{0};
    CHECK(precondition_bounding_box(crossed).empty);
}

TEST_CASE("ibp_bounds: hand-checked single ReLU layer") {
    Network net = testing::single_relu_net();
    BoundsBox in{{0.0, 0.0}, {1.0, 1.0}, false};
    BoundsBox out = ibp_bounds(net, in);
    // pre-activation in [2*0 - 1 + 0.5, 2*1 - 0 + 0.5] = [-0.5, 2.5], ReLU'd
    CHECK(out.lower == std::vector<double>{0.0});
    CHECK(out.upper == std::vector<double>{2.5});
}

TEST_CASE("ibp_bounds: soundness against sampled points") {
    for (std::uint64_t seed = 30; seed < 45; ++seed) {
        Network net = testing::random_tiny_net(seed);
        Rng rng(seed);
        BoundsBox in;
        for (std::size_t i = 0; i < net.input_dim; ++i) {
            double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
            in.lower.push_back(std::min(a, b));
            in.upper.push_back(std::max(a, b));
        }
        BoundsBox out = ibp_bounds(net, in);
        for (int k = 0; k < 200; ++k) {
            std::vector<double> x(net.input_dim);
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] = rng.uniform(in.lower[i], in.upper[i]);
            std::vector<double> y = forward(net, x);
            for (std::size_t i = 0; i < y.size(); ++i) {
                CHECK(y[i] >= out.lower[i] - 1e-9);
                CHECK(y[i] <= out.upper[i] + 1e-9);
            }
        }
    }
}

TEST_CASE("bounds_certify_post") {
    Specification argmax;
    argmax.input_dim = 1;
    argmax.postcondition = ArgmaxEqProperty{0};
    // label 0 strictly above label 1 everywhere
    CHECK(bounds_certify_post(argmax, BoundsBox{{1.0, -1.0}, {2.0, 0.5}, false}));
    // overlap: not certified
    CHECK_FALSE(bounds_certify_post(argmax, BoundsBox{{1.0, -1.0}, {2.0, 1.5}, false}));
    // tie against a later label still satisfies argmax (smallest index wins)
    CHECK(bounds_certify_post(argmax, BoundsBox{{1.0, 0.0}, {2.0, 1.0}, false}));

    Specification lin;
    lin.input_dim = 1;
    lin.postcondition = LinearOutProperty{{1.0, -1.0}, CmpOp::LE, 1.0};
    // worst case 2.0 - 0.5 = 1.5 > 1
    CHECK_FALSE(bounds_certify_post(lin, BoundsBox{{1.0, 0.5}, {2.0, 2.0}, false}));
    CHECK(bounds_certify_post(lin, BoundsBox{{1.0, 1.5}, {2.0, 2.0}, false}));
}

TEST_CASE("box_disjoint_from_pre") {
    Specification spec;
    spec.input_dim = 2;
    spec.preconditions.push_back(DistanceBallConstraint{{0.0, 0.0}, 1.0});
    spec.postcondition = ArgmaxEqProperty{0};
    CHECK(box_disjoint_from_pre(spec, BoundsBox{{2.0, 2.0}, {3.0, 3.0}, false}));
    CHECK_FALSE(box_disjoint_from_pre(spec, BoundsBox{{0.5, 0.5}, {3.0, 3.0}, false}));

    spec.preconditions.push_back(LinearConstraint{{1.0, 0.0}, CmpOp::LE, 0.0});
    // entire box has x0 >= 0.1, so x0 <= 0 cannot hold anywhere in it
    CHECK(box_disjoint_from_pre(spec, BoundsBox{{0.1, 0.0}, {0.5, 0.5}, false}));
}

TEST_CASE("run_verifier shields the campaign from throwing verifiers") {
    ThrowingVerifier v;
    Verdict verdict = run_verifier(v, vacuous_case());
    CHECK(verdict.kind == VerdictKind::Crash);
    CHECK(verdict.note.find("internal assertion") != std::string::npos);
}

TEST_CASE("ibp verifier: certification, falsification, honesty") {
    IbpVerifier ibp;

    SUBCASE("certifies the robust fixture") {
        CHECK(ibp.verify(testing::holds_robustness_fixture()).kind == VerdictKind::Holds);
    }
    SUBCASE("finds the easy counterexample") {
        TestCase tc = testing::falsifiable_linear_fixture();
        Verdict v = ibp.verify(tc);
        REQUIRE(v.kind == VerdictKind::Violated);
        CHECK(violates(tc, v.cex));
    }
    SUBCASE("vacuous precondition holds") {
        CHECK(ibp.verify(vacuous_case()).kind == VerdictKind::Holds);
    }
    SUBCASE("never lies on margin fixtures") {
        // Incomplete: Unknown is fine, but Holds/Violated must be correct.
        for (const auto& f : testing::margin_fixtures(10)) {
            Verdict v = ibp.verify(f.tc);
            if (v.kind == VerdictKind::Holds) CHECK_FALSE(f.expect_violated);
            if (v.kind == VerdictKind::Violated) {
                CHECK(f.expect_violated);
                CHECK(violates(f.tc, v.cex));
            }
        }
    }
}

TEST_CASE("bab verifier: decides every margin fixture correctly") {
    BabConfig cfg;
    cfg.max_splits = 20000;
    BabVerifier bab("bab", cfg);
    for (const auto& f : testing::margin_fixtures(10)) {
        Verdict v = bab.verify(f.tc);
        if (f.expect_violated) {
            REQUIRE(v.kind == VerdictKind::Violated);
            CHECK(violates(f.tc, v.cex));
        } else {
            CHECK(v.kind == VerdictKind::Holds);
        }
    }
}

TEST_CASE("bab verifier: budget exhaustion reports Unknown, deadline Timeout") {
    // Tent function relu(x+1) - 2 relu(x): peak value 1 at x = 0, but interval
    // bounds stay loose on any box straddling 0. With rhs a hair above the true
    // maximum no point violates and no straddling box certifies, so the search
    // must burn its whole split budget.
    TestCase tc;
    tc.network.name = "tent";
    tc.network.input_dim = 1;
    Layer hidden;
    hidden.weights = Matrix(2, 1);
    hidden.weights.at(0, 0) = 1.0;
    hidden.weights.at(1, 0) = 1.0;
    hidden.bias = {1.0, 0.0};
    hidden.activation = Activation::ReLU;
    Layer out;
    out.weights = Matrix(1, 2);
    out.weights.at(0, 0) = 1.0;
    out.weights.at(0, 1) = -2.0;
    out.bias = {0.0};
    out.activation = Activation::Linear;
    tc.network.layers = {hidden, out};
    tc.network.validate();
    tc.spec.input_dim = 1;
    tc.spec.preconditions.push_back(BoxConstraint{{-1.0}, {1.0}});
    tc.spec.postcondition = LinearOutProperty{{1.0}, CmpOp::LE, 1.0 + 1e-12};
    tc.id = "thin";

    BabConfig tiny;
    tiny.max_splits = 8;
    Verdict v = BabVerifier("bab", tiny).verify(tc);
    CHECK(v.kind == VerdictKind::Unknown);

    BabConfig rushed;
    rushed.timeout_ms = 0;
    Verdict t = BabVerifier("bab", rushed).verify(tc);
    CHECK(t.kind == VerdictKind::Timeout);
}

TEST_CASE("bab verifier: determinism") {
    TestCase tc = testing::falsifiable_robustness_fixture();
    BabVerifier a, b;
    CHECK(a.verify(tc) == b.verify(tc));
}

TEST_CASE("sampler verifier") {
    SamplerConfig cfg;
    cfg.sample_count = 2000;
    cfg.rng_seed = 7;

    SUBCASE("finds large violation regions, and only reports real ones") {
        TestCase tc = testing::falsifiable_linear_fixture();  // violating mass 1/4 of the box
        Verdict v = SamplerVerifier("sampler", cfg).verify(tc);
        REQUIRE(v.kind == VerdictKind::Violated);
        CHECK(violates(tc, v.cex));
    }
    SUBCASE("never claims Holds") {
        Verdict v = SamplerVerifier("sampler", cfg).verify(testing::holds_robustness_fixture());
        CHECK(v.kind == VerdictKind::Unknown);
    }
    SUBCASE("empty region is reported Unknown, not Holds") {
        Verdict v = SamplerVerifier("sampler", cfg).verify(vacuous_case());
        CHECK(v.kind == VerdictKind::Unknown);
        CHECK(v.note.find("no admissible samples") != std::string::npos);
    }
    SUBCASE("deterministic per test case, decorrelated across ids") {
        TestCase tc = testing::falsifiable_linear_fixture();
        SamplerVerifier s1("sampler", cfg), s2("sampler", cfg);
        CHECK(s1.verify(tc) == s2.verify(tc));
        TestCase renamed = tc;
        renamed.id = "other-id";
        // same spec, different id: the sample stream must differ
        Verdict v1 = s1.verify(tc), v2 = s1.verify(renamed);
        CHECK(v1.cex != v2.cex);
    }
}

TEST_CASE("fault injection") {
    FaultConfig flip_vh;
    flip_vh.kind = FaultKind::FlipViolatedToHolds;
    Verdict v = FaultInjectedVerifier(std::make_unique<BabVerifier>(), flip_vh)
                    .verify(testing::falsifiable_linear_fixture());
    CHECK(v.kind == VerdictKind::Holds);

    FaultConfig flip_hv;
    flip_hv.kind = FaultKind::FlipHoldsToViolated;
    Verdict w = FaultInjectedVerifier(std::make_unique<IbpVerifier>(), flip_hv)
                    .verify(testing::holds_robustness_fixture());
    REQUIRE(w.kind == VerdictKind::Violated);
    // the fabricated point is not a real counterexample
    CHECK_FALSE(violates(testing::holds_robustness_fixture(), w.cex));

    FaultConfig crash;
    crash.kind = FaultKind::RandomCrash;
    crash.crash_probability = 1.0;
    Verdict c = FaultInjectedVerifier(std::make_unique<IbpVerifier>(), crash)
                    .verify(testing::holds_robustness_fixture());
    CHECK(c.kind == VerdictKind::Crash);

    FaultConfig never;
    never.kind = FaultKind::RandomCrash;
    never.crash_probability = 0.0;
    Verdict n = FaultInjectedVerifier(std::make_unique<IbpVerifier>(), never)
                    .verify(testing::holds_robustness_fixture());
    CHECK(n.kind == VerdictKind::Holds);
}

TEST_CASE("fault injection: dropped constraint widens the search region") {
    // Ball around a safe center; the full spec holds, but ignoring the ball
    // lets the verifier roam the whole clamp and "find" an inadmissible cex.
    TestCase tc = testing::holds_robustness_fixture();
    FaultConfig drop;
    drop.kind = FaultKind::DropConstraintIndex;
    drop.drop_index = 0;
    Verdict v = FaultInjectedVerifier(std::make_unique<BabVerifier>(), drop).verify(tc);
    if (v.kind == VerdictKind::Violated) CHECK_FALSE(violates(tc, v.cex));
}

TEST_CASE("make_verifier / make_roster parse descriptions") {
    RosterOptions opts;
    auto roster = make_roster({"ibp", "bab", "sampler", "bab+flip_vh", "ibp+crash:0.5"}, opts);
    REQUIRE(roster.size() == 5);
    CHECK(roster[0]->name() == "ibp");
    CHECK(roster[3]->name() == "bab+flip_vh");

    CHECK_THROWS_AS(make_verifier("z3", opts), ConfigError);
    CHECK_THROWS_AS(make_verifier("bab+unplug", opts), InvalidConfig);
    CHECK_THROWS_AS(make_verifier("bab+crash:2.0", opts), InvalidConfig);
    CHECK_THROWS_AS(make_verifier("external:/nonexistent/adapter", opts), AdapterNotFound);
}
