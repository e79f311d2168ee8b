#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace phidon {

enum class Activation { Tanh, Relu, Gelu, Identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Activation value and its first three derivatives at z.
struct ActDerivs {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

ActDerivs act_eval(Activation a, double z);

/// Dense matrix, row-major.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
    void set_zero() { std::fill(data.begin(), data.end(), 0.0); }
};

struct MlpSpec {
    int input_dim = 0;
    std::vector<int> hidden_widths;
    int output_dim = 0;
    Activation activation = Activation::Tanh;

    /// Layer sizes including input and output: [input, hidden..., output].
    std::vector<int> layer_dims() const;
    int num_layers() const { return static_cast<int>(hidden_widths.size()) + 1; }

    /// Throws std::invalid_argument on zero-width layers or bad dims.
    void validate() const;

    bool operator==(const MlpSpec&) const = default;
};

/// Dense multilayer perceptron. Hidden layers use spec.activation, the
/// output layer is linear. Immutable by convention once trained; the
/// optimizer is the only writer.
struct Mlp {
    MlpSpec spec;
    std::vector<Mat> weights;               // layer l: (dims[l+1] x dims[l])
    std::vector<std::vector<double>> biases;

    int num_layers() const { return static_cast<int>(weights.size()); }
    Activation layer_activation(int l) const {
        return l + 1 == num_layers() ? Activation::Identity : spec.activation;
    }
    std::size_t num_params() const;
};

/// Xavier-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
/// Pure function of (spec, seed): draws are made layer by layer in
/// row-major order from a single stream.
Mlp mlp_init(const MlpSpec& spec, std::uint64_t seed);

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> x);

/// Gradient container shaped like an Mlp's parameters.
struct MlpGrad {
    std::vector<Mat> dw;
    std::vector<std::vector<double>> db;

    void init_like(const Mlp& net);
    void set_zero();
};

nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

}  // namespace phidon
