#include "phidon/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "phidon/rng.hpp"

namespace phidon {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Gelu: return "gelu";
        case Activation::Identity: return "identity";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::Tanh;
    if (s == "relu") return Activation::Relu;
    if (s == "gelu") return Activation::Gelu;
    if (s == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + s);
}

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

ActDerivs act_eval(Activation a, double z) {
    ActDerivs d;
    switch (a) {
        case Activation::Identity:
            d.v = z;
            d.d1 = 1.0;
            break;
        case Activation::Relu:
            d.v = z > 0.0 ? z : 0.0;
            d.d1 = z > 0.0 ? 1.0 : 0.0;
            break;
        case Activation::Tanh: {
            const double t = std::tanh(z);
            const double s = 1.0 - t * t;  // sech^2
            d.v = t;
            d.d1 = s;
            d.d2 = -2.0 * t * s;
            d.d3 = -2.0 * s * (1.0 - 3.0 * t * t);
            break;
        }
        case Activation::Gelu: {
            // exact GELU: z * Phi(z) with the Gaussian CDF
            const double cdf = 0.5 * (1.0 + std::erf(z * kInvSqrt2));
            const double pdf = kInvSqrt2Pi * std::exp(-0.5 * z * z);
            d.v = z * cdf;
            d.d1 = cdf + z * pdf;
            d.d2 = (2.0 - z * z) * pdf;
            d.d3 = -z * (4.0 - z * z) * pdf;
            break;
        }
    }
    return d;
}

std::vector<int> MlpSpec::layer_dims() const {
    std::vector<int> dims;
    dims.reserve(hidden_widths.size() + 2);
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden_widths.begin(), hidden_widths.end());
    dims.push_back(output_dim);
    return dims;
}

void MlpSpec::validate() const {
    if (input_dim <= 0) throw std::invalid_argument("MlpSpec: input_dim must be positive");
    if (output_dim <= 0) throw std::invalid_argument("MlpSpec: output_dim must be positive");
    for (int w : hidden_widths)
        if (w <= 0) throw std::invalid_argument("MlpSpec: zero-width hidden layer");
}

std::size_t Mlp::num_params() const {
    std::size_t n = 0;
    for (int l = 0; l < num_layers(); ++l)
        n += weights[l].data.size() + biases[l].size();
    return n;
}

Mlp mlp_init(const MlpSpec& spec, std::uint64_t seed) {
    spec.validate();
    Mlp net;
    net.spec = spec;
    const auto dims = spec.layer_dims();
    Rng rng(mix_seed(seed, 0x6d6c70 /* "mlp" */));
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        const int fan_in = dims[l];
        const int fan_out = dims[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Mat w(fan_out, fan_in);
        for (double& v : w.data) v = rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> x) {
    if (static_cast<int>(x.size()) != net.spec.input_dim)
        throw std::invalid_argument("mlp_forward: input dimension mismatch");
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (int l = 0; l < net.num_layers(); ++l) {
        const Mat& w = net.weights[l];
        const auto& b = net.biases[l];
        const Activation act = net.layer_activation(l);
        next.assign(w.rows, 0.0);
        for (int i = 0; i < w.rows; ++i) {
            double z = b[i];
            const double* wrow = &w.data[static_cast<size_t>(i) * w.cols];
            for (int j = 0; j < w.cols; ++j) z += wrow[j] * cur[j];
            next[i] = act == Activation::Identity ? z : act_eval(act, z).v;
        }
        cur.swap(next);
    }
    return cur;
}

void MlpGrad::init_like(const Mlp& net) {
    dw.clear();
    db.clear();
    for (int l = 0; l < net.num_layers(); ++l) {
        dw.emplace_back(net.weights[l].rows, net.weights[l].cols);
        db.emplace_back(net.biases[l].size(), 0.0);
    }
}

void MlpGrad::set_zero() {
    for (auto& m : dw) m.set_zero();
    for (auto& v : db) std::fill(v.begin(), v.end(), 0.0);
}

nlohmann::json mlp_to_json(const Mlp& net) {
    nlohmann::json spec;
    spec["input_dim"] = net.spec.input_dim;
    spec["hidden_widths"] = net.spec.hidden_widths;
    spec["output_dim"] = net.spec.output_dim;
    spec["activation"] = to_string(net.spec.activation);

    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json biases = nlohmann::json::array();
    for (int l = 0; l < net.num_layers(); ++l) {
        const Mat& w = net.weights[l];
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < w.rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < w.cols; ++j) row.push_back(w(i, j));
            rows.push_back(std::move(row));
        }
        weights.push_back(std::move(rows));
        biases.push_back(net.biases[l]);
    }
    return {{"spec", spec}, {"weights", weights}, {"biases", biases}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
    Mlp net;
    const auto& spec = j.at("spec");
    net.spec.input_dim = spec.at("input_dim").get<int>();
    net.spec.hidden_widths = spec.at("hidden_widths").get<std::vector<int>>();
    net.spec.output_dim = spec.at("output_dim").get<int>();
    net.spec.activation = activation_from_string(spec.at("activation").get<std::string>());
    net.spec.validate();

    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    const auto dims = net.spec.layer_dims();
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        Mat w(dims[l + 1], dims[l]);
        const auto& rows = weights.at(l);
        if (static_cast<int>(rows.size()) != w.rows)
            throw std::invalid_argument("mlp_from_json: weight shape mismatch");
        for (int i = 0; i < w.rows; ++i) {
            const auto& row = rows.at(i);
            if (static_cast<int>(row.size()) != w.cols)
                throw std::invalid_argument("mlp_from_json: weight shape mismatch");
            for (int j2 = 0; j2 < w.cols; ++j2) w(i, j2) = row.at(j2).get<double>();
        }
        net.weights.push_back(std::move(w));
        net.biases.push_back(biases.at(l).get<std::vector<double>>());
        if (static_cast<int>(net.biases.back().size()) != dims[l + 1])
            throw std::invalid_argument("mlp_from_json: bias shape mismatch");
    }
    return net;
}

}  // namespace phidon
