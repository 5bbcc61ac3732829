#include "support/fixtures.hpp"

#include "galaxy/rng.hpp"
#include "support/oracles.hpp"

namespace galaxy::testing {

namespace {

Layer make_layer(std::vector<std::vector<double>> rows, std::vector<double> bias, Activation act) {
    Layer l;
    l.weights.rows = rows.size();
    l.weights.cols = rows.empty() ? 0 : rows[0].size();
    for (const auto& r : rows)
        l.weights.data.insert(l.weights.data.end(), r.begin(), r.end());
    l.bias = std::move(bias);
    l.activation = act;
    return l;
}

}  // namespace

Network single_relu_net() {
    Network net;
    net.name = "single-relu";
    net.input_dim = 2;
    net.layers.push_back(make_layer({{2.0, -1.0}}, {0.5}, Activation::ReLU));
    net.validate();
    return net;
}

Network identity_net(std::size_t n) {
    Network net;
    net.name = "identity";
    net.input_dim = n;
    std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1.0;
    net.layers.push_back(make_layer(rows, std::vector<double>(n, 0.0), Activation::Linear));
    net.validate();
    return net;
}

Network constant_net(std::size_t input_dim) {
    Network net;
    net.name = "constant";
    net.input_dim = input_dim;
    net.layers.push_back(make_layer({std::vector<double>(input_dim, 0.0),
                                     std::vector<double>(input_dim, 0.0)},
                                    {0.0, 0.0}, Activation::Linear));
    net.validate();
    return net;
}

std::vector<MarginFixture> margin_fixtures(std::size_t count) {
    const double step = 1e-3;
    const double margin = 0.02;
    std::vector<MarginFixture> out;
    std::uint64_t seed = 1;
    while (out.size() < count) {
        bool two_dim = (out.size() % 10) >= 8;  // mostly 1-d, a few 2-d
        SeedNetworkConfig cfg;
        cfg.input_dim = two_dim ? 2 : 1;
        cfg.layer_widths = {3, 1};
        cfg.weight_stddev = 0.8;
        cfg.name = "margin-" + std::to_string(seed);
        Network net = generate_seed_network(cfg, seed++);

        std::vector<double> coeffs{1.0};
        double lip = lipschitz_bound(net, coeffs);
        // The grid sees the true maximum up to lip * step / 2; keep that well
        // below the decision margin or the fixture proves nothing.
        if (lip * step / 2.0 > margin / 4.0) continue;

        double extent = two_dim ? 0.5 : 1.0;
        Specification spec;
        spec.input_dim = cfg.input_dim;
        spec.preconditions.push_back(BoxConstraint{std::vector<double>(cfg.input_dim, -extent),
                                                   std::vector<double>(cfg.input_dim, extent)});
        spec.postcondition = LinearOutProperty{coeffs, CmpOp::LE, 0.0};
        double gmax = grid_max_linear_out(net, spec, coeffs, step);

        for (bool violated : {false, true}) {
            MarginFixture f;
            f.expect_violated = violated;
            f.tc.network = net;
            f.tc.spec = spec;
            std::get<LinearOutProperty>(f.tc.spec.postcondition).rhs =
                violated ? gmax - margin : gmax + margin;
            f.tc.id = "margin-" + std::to_string(out.size());
            f.tc.validate();
            out.push_back(std::move(f));
        }
    }
    out.resize(count);
    return out;
}

TestCase holds_robustness_fixture() {
    TestCase tc;
    tc.network.name = "biased-classifier";
    tc.network.input_dim = 2;
    tc.network.layers.push_back(
        make_layer({{0.3, 0.0}, {0.0, 0.3}}, {1.0, 0.0}, Activation::Linear));
    tc.network.validate();
    tc.spec = robustness_spec({0.0, 0.0}, 0.1, 0);
    tc.id = "seed-holds";
    tc.validate();
    return tc;
}

TestCase falsifiable_robustness_fixture() {
    TestCase tc;
    tc.network = identity_net(2);
    tc.spec = robustness_spec({0.1, 0.0}, 0.3, 0);
    tc.id = "seed-falsifiable";
    tc.validate();
    return tc;
}

TestCase falsifiable_linear_fixture() {
    TestCase tc;
    tc.network = identity_net(1);
    tc.spec.input_dim = 1;
    tc.spec.preconditions.push_back(BoxConstraint{{-1.0}, {1.0}});
    tc.spec.postcondition = LinearOutProperty{{1.0}, CmpOp::LE, 0.5};
    tc.id = "seed-linear";
    tc.validate();
    return tc;
}

std::vector<TestCase> campaign_seeds() {
    return {holds_robustness_fixture(), falsifiable_robustness_fixture(),
            falsifiable_linear_fixture()};
}

Network random_tiny_net(std::uint64_t seed) {
    Rng rng(seed);
    SeedNetworkConfig cfg;
    cfg.input_dim = 2 + rng.index(4);  // 2..5
    std::size_t hidden = 1 + rng.index(3);
    cfg.layer_widths.clear();
    for (std::size_t i = 0; i < hidden; ++i) cfg.layer_widths.push_back(1 + rng.index(10));
    cfg.layer_widths.push_back(2 + rng.index(3));  // output layer
    cfg.hidden_activation = rng.bernoulli(0.3) ? Activation::Sigmoid : Activation::ReLU;
    cfg.weight_stddev = 0.8;
    cfg.name = "tiny-" + std::to_string(seed);
    return generate_seed_network(cfg, rng.next_u64());
}

}  // namespace galaxy::testing
