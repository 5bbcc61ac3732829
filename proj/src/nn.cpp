#include "galaxy/nn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "galaxy/errors.hpp"

namespace galaxy {

using nlohmann::json;

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Linear: return "linear";
        case Activation::ReLU: return "relu";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "linear";
}

Activation activation_from_name(const std::string& name) {
    if (name == "linear") return Activation::Linear;
    if (name == "relu") return Activation::ReLU;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw ParseError("unknown activation: " + name);
}

double apply_activation(Activation a, double z) {
    switch (a) {
        case Activation::Linear: return z;
        case Activation::ReLU: return z > 0.0 ? z : 0.0;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    return z;
}

void Network::validate() const {
    if (input_dim == 0) throw ShapeError("network " + name + ": input_dim must be positive");
    if (layers.empty()) throw ShapeError("network " + name + ": no layers");
    std::size_t prev = input_dim;
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const Layer& l = layers[li];
        if (l.weights.rows == 0)
            throw ShapeError("layer " + std::to_string(li) + ": empty weight matrix");
        if (l.weights.cols != prev)
            throw ShapeError("layer " + std::to_string(li) + ": expected " + std::to_string(prev) +
                             " columns, got " + std::to_string(l.weights.cols));
        if (l.bias.size() != l.weights.rows)
            throw ShapeError("layer " + std::to_string(li) + ": bias length " +
                             std::to_string(l.bias.size()) + " != row count " +
                             std::to_string(l.weights.rows));
        for (double w : l.weights.data)
            if (!std::isfinite(w)) throw ShapeError("layer " + std::to_string(li) + ": non-finite weight");
        for (double b : l.bias)
            if (!std::isfinite(b)) throw ShapeError("layer " + std::to_string(li) + ": non-finite bias");
        prev = l.weights.rows;
    }
}

static std::vector<double> affine(const Layer& l, const std::vector<double>& in) {
    std::vector<double> out(l.weights.rows);
    for (std::size_t r = 0; r < l.weights.rows; ++r) {
        double acc = l.bias[r];
        for (std::size_t c = 0; c < l.weights.cols; ++c) acc += l.weights.at(r, c) * in[c];
        out[r] = acc;
    }
    return out;
}

std::vector<double> forward(const Network& net, const std::vector<double>& x) {
    if (x.size() != net.input_dim)
        throw DimensionMismatch("forward: input length " + std::to_string(x.size()) +
                                " != input_dim " + std::to_string(net.input_dim));
    for (double v : x)
        if (!std::isfinite(v)) throw NonFiniteValue("forward: non-finite input");
    std::vector<double> cur = x;
    for (const Layer& l : net.layers) {
        cur = affine(l, cur);
        for (double& v : cur) {
            v = apply_activation(l.activation, v);
            if (!std::isfinite(v)) throw NonFiniteValue("forward: non-finite intermediate");
        }
    }
    return cur;
}

std::vector<double> pre_activations(const Network& net, std::size_t layer_index,
                                    const std::vector<double>& x) {
    if (x.size() != net.input_dim) throw DimensionMismatch("pre_activations: input length");
    std::vector<double> cur = x;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const Layer& l = net.layers[li];
        std::vector<double> pre = affine(l, cur);
        if (li == layer_index) return pre;
        cur.resize(pre.size());
        for (std::size_t i = 0; i < pre.size(); ++i) cur[i] = apply_activation(l.activation, pre[i]);
    }
    throw DimensionMismatch("pre_activations: layer index out of range");
}

std::size_t argmax_label(const std::vector<double>& y) {
    if (y.empty()) throw EmptyVector("argmax_label: empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] > y[best]) best = i;
    return best;
}

static json network_to_json_obj(const Network& net) {
    json j;
    j["name"] = net.name;
    j["input_dim"] = net.input_dim;
    j["layers"] = json::array();
    for (const Layer& l : net.layers) {
        json jl;
        json rows = json::array();
        for (std::size_t r = 0; r < l.weights.rows; ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < l.weights.cols; ++c) row.push_back(l.weights.at(r, c));
            rows.push_back(std::move(row));
        }
        jl["weights"] = std::move(rows);
        jl["bias"] = l.bias;
        jl["activation"] = activation_name(l.activation);
        j["layers"].push_back(std::move(jl));
    }
    return j;
}

static Network network_from_json_obj(const json& j) {
    Network net;
    try {
        net.name = j.value("name", "");
        net.input_dim = j.at("input_dim").get<std::size_t>();
        for (const json& jl : j.at("layers")) {
            Layer l;
            const json& rows = jl.at("weights");
            l.weights.rows = rows.size();
            l.weights.cols = rows.empty() ? 0 : rows[0].size();
            for (const json& row : rows) {
                if (row.size() != l.weights.cols)
                    throw ShapeError("ragged weight matrix row");
                for (const json& v : row) {
                    if (!v.is_number()) throw ParseError("weight entry is not a number");
                    l.weights.data.push_back(v.get<double>());
                }
            }
            for (const json& v : jl.at("bias")) {
                if (!v.is_number()) throw ParseError("bias entry is not a number");
                l.bias.push_back(v.get<double>());
            }
            l.activation = activation_from_name(jl.at("activation").get<std::string>());
            net.layers.push_back(std::move(l));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
    net.validate();
    return net;
}

std::string network_to_json(const Network& net) {
    return network_to_json_obj(net).dump();
}

Network network_from_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("model: invalid JSON");
    return network_from_json_obj(j);
}

Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return network_from_json_text(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ShapeError& e) {
        throw ShapeError(path + ": " + e.what());
    }
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file: " + path);
    out << network_to_json_obj(net).dump(2) << "\n";
}

Network generate_seed_network(const SeedNetworkConfig& cfg, std::uint64_t rng_seed) {
    if (cfg.input_dim == 0) throw InvalidConfig("seed network: input_dim must be positive");
    if (cfg.layer_widths.empty()) throw InvalidConfig("seed network: need at least one layer");
    for (std::size_t w : cfg.layer_widths)
        if (w == 0) throw InvalidConfig("seed network: zero-width layer");
    if (!(cfg.weight_stddev > 0.0)) throw InvalidConfig("seed network: weight_stddev must be positive");

    Rng rng(rng_seed);
    Network net;
    net.input_dim = cfg.input_dim;
    net.name = cfg.name;
    std::size_t prev = cfg.input_dim;
    for (std::size_t li = 0; li < cfg.layer_widths.size(); ++li) {
        Layer l;
        std::size_t width = cfg.layer_widths[li];
        l.weights = Matrix(width, prev);
        for (double& w : l.weights.data) w = rng.normal(0.0, cfg.weight_stddev);
        l.bias.resize(width);
        for (double& b : l.bias) b = rng.normal(0.0, cfg.weight_stddev);
        // Output layer stays linear so argmax semantics are not squashed.
        l.activation = (li + 1 == cfg.layer_widths.size()) ? Activation::Linear : cfg.hidden_activation;
        l.weights.cols = prev;
        net.layers.push_back(std::move(l));
        prev = width;
    }
    net.validate();
    return net;
}

}  // namespace galaxy
