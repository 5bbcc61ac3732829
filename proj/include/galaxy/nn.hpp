#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "galaxy/rng.hpp"

namespace galaxy {

enum class Activation { Linear, ReLU, Sigmoid };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

double apply_activation(Activation a, double z);

/// Dense row-major matrix; rows = neurons of this layer, cols = width of the
/// previous layer.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool operator==(const Matrix&) const = default;
};

struct Layer {
    Matrix weights;
    std::vector<double> bias;
    Activation activation = Activation::ReLU;

    bool operator==(const Layer&) const = default;
};

/// Fully-connected feed-forward network. Immutable after construction by
/// convention; every producer runs validate() before handing one out.
struct Network {
    std::size_t input_dim = 0;
    std::vector<Layer> layers;
    std::string name;

    std::size_t output_dim() const { return layers.back().weights.rows; }

    /// Throws ShapeError on dimension-chain or finiteness violations.
    void validate() const;

    bool operator==(const Network&) const = default;
};

/// Evaluates the network on a concrete input. Pure; throws DimensionMismatch
/// on wrong input length and NonFiniteValue if an intermediate overflows.
std::vector<double> forward(const Network& net, const std::vector<double>& x);

/// Pre-activation values of one layer at input x (used by mutation-contract
/// checks). layer_index addresses net.layers.
std::vector<double> pre_activations(const Network& net, std::size_t layer_index,
                                    const std::vector<double>& x);

/// Smallest index attaining the maximum. Throws EmptyVector.
std::size_t argmax_label(const std::vector<double>& y);

Network load_network(const std::string& path);
void save_network(const Network& net, const std::string& path);

/// JSON forms used by both the on-disk model format and the external-verifier
/// wire protocol (declared as strings to keep nlohmann out of this header).
std::string network_to_json(const Network& net);
Network network_from_json_text(const std::string& text);

struct SeedNetworkConfig {
    std::size_t input_dim = 2;
    std::vector<std::size_t> layer_widths = {3, 2};
    Activation hidden_activation = Activation::ReLU;
    double weight_stddev = 1.0;
    std::string name = "seed";
};

/// Gaussian-initialized tiny network; deterministic in (config, rng_seed).
Network generate_seed_network(const SeedNetworkConfig& cfg, std::uint64_t rng_seed);

}  // namespace galaxy
