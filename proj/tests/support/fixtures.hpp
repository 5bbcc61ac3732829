#pragma once

// Deterministic test fixtures shared by the unit and acceptance suites.

#include <vector>

#include "galaxy/spec.hpp"

namespace galaxy::testing {

/// One hand-checkable ReLU layer: weights [[2,-1]], bias [0.5].
Network single_relu_net();

/// n-dim identity single linear layer.
Network identity_net(std::size_t n);

/// Zero weights and biases, 2 outputs: classifies everything as label 0.
Network constant_net(std::size_t input_dim);

/// Verification instance with a known expected decision and a comfortable
/// decision margin (the builder rejects candidates whose margin cannot be
/// guaranteed against the grid oracle step).
struct MarginFixture {
    TestCase tc;
    bool expect_violated = false;
};

/// At least `count` tiny ReLU instances over box preconditions, margins
/// > 1e-2 against a 1e-3 grid by construction. Deterministic.
std::vector<MarginFixture> margin_fixtures(std::size_t count = 20);

/// Robustness query that holds: biased classifier, small ball.
TestCase holds_robustness_fixture();

/// Robustness query with a large violation region inside the ball.
TestCase falsifiable_robustness_fixture();

/// Linear-output query on the identity net, falsifiable on (0.5, 1].
TestCase falsifiable_linear_fixture();

/// Seed set used by campaign tests: the three fixtures above.
std::vector<TestCase> campaign_seeds();

/// Random tiny network (dims 2-5, up to 3 hidden layers of up to 10 neurons)
/// from a seeded stream.
Network random_tiny_net(std::uint64_t seed);

}  // namespace galaxy::testing
