#pragma once

#include <optional>
#include <vector>

#include "phidon/embedding.hpp"
#include "phidon/geometry.hpp"
#include "phidon/mlp.hpp"

namespace phidon {

/// One input-function realization: sensor values restricted per subdomain.
struct InputFunctionSample {
    std::vector<std::vector<double>> per_subdomain;

    std::vector<double> concatenated() const {
        std::vector<double> all;
        for (const auto& u : per_subdomain) all.insert(all.end(), u.begin(), u.end());
        return all;
    }
};

/// Product-of-branches DeepONet with an interface-aware trunk.
///
/// P branch networks map per-subdomain sensor values to K coefficients;
/// their elementwise product weights a trunk evaluated at (y, phi(y)).
/// The baseline variant uses a single branch on the concatenated sensor
/// vector and a trunk on y alone. With hard_bc the output is
/// reparameterized as lambda_s(y) * s + H(y), which pins the external
/// Dirichlet data exactly for any parameters.
struct OperatorModel {
    bool baseline = false;
    bool hard_bc = true;
    std::vector<Mlp> branches;  // size P, or 1 for the baseline
    Mlp trunk;                  // input dim d + D (d for the baseline), output K
    Embedding embedding;        // ignored by the baseline
    const DomainDecomposition* dec = nullptr;

    int num_basis() const { return trunk.spec.output_dim; }
    int spatial_dim() const { return dec->dim; }

    /// Throws std::invalid_argument on shape inconsistencies.
    void validate() const;
};

struct ModelConfig {
    std::vector<int> branch_hidden = {64, 64};
    std::vector<int> trunk_hidden = {64, 64, 64};
    int num_basis = 64;
    Activation activation = Activation::Tanh;
};

OperatorModel make_phi_deeponet(const DomainDecomposition& dec, Embedding embedding,
                                const std::vector<int>& sensors_per_subdomain,
                                const ModelConfig& cfg, bool hard_bc, std::uint64_t seed);

OperatorModel make_deeponet_baseline(const DomainDecomposition& dec, int total_sensors,
                                     const ModelConfig& cfg, bool hard_bc, std::uint64_t seed);

/// K branch products: B_k = prod_q br^q_k(u_q) (a single branch output for
/// the baseline).
std::vector<double> branch_coefficients(const OperatorModel& model,
                                        const InputFunctionSample& u);

/// s(y). When `side` is given the embedding one-hot is forced to that
/// subdomain, which is how two-sided interface values are produced.
double forward(const OperatorModel& model, const InputFunctionSample& u, const Point& y,
               std::optional<int> side = std::nullopt);

/// Baseline variant of forward (no embedding, no side).
double forward_baseline(const OperatorModel& model, const InputFunctionSample& u,
                        const Point& y);

struct SpatialEval {
    double value = 0.0;
    std::vector<double> grad;  // d(s)/dy, spatial components
    double lap = 0.0;          // spatial Laplacian
};

/// Value, spatial gradient and Laplacian of s at y. phi is piecewise
/// constant, so derivatives flow through the trunk's spatial inputs and the
/// hard-constraint factors only.
SpatialEval forward_with_spatial_derivatives(const OperatorModel& model,
                                             const InputFunctionSample& u, const Point& y,
                                             std::optional<int> side = std::nullopt);

/// Trunk input (y, phi) for a given side (or the natural side of y).
std::vector<double> trunk_input(const OperatorModel& model, const Point& y,
                                std::optional<int> side);

/// Gradients for every trainable parameter of a model, in optimizer order:
/// branch weights/biases, trunk weights/biases, embedding matrix.
struct ModelGrads {
    std::vector<MlpGrad> branches;
    MlpGrad trunk;
    Mat embedding;

    void init_like(const OperatorModel& model);
    void set_zero();
};

/// Mutable views over parameter or gradient storage, in a fixed order
/// shared by ModelGrads and the optimizers.
struct ParamBlock {
    double* data = nullptr;
    int rows = 0;
    int cols = 1;
    std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

std::vector<ParamBlock> parameter_blocks(OperatorModel& model);
std::vector<ParamBlock> gradient_blocks(ModelGrads& grads);

nlohmann::json model_to_json(const OperatorModel& model);
/// The decomposition handle is not serialized; rebind it after loading.
OperatorModel model_from_json(const nlohmann::json& j);

}  // namespace phidon
