#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "phidon/deeponet.hpp"
#include "phidon/physics.hpp"

namespace phidon {

enum class OptimizerKind { Adam, Soap };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

struct TrainConfig {
    double learning_rate = 5e-3;
    int epochs = 5000;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 0;
    /// Abort when the total loss exceeds this multiple of its initial value.
    double divergence_factor = 1e6;
    /// SOAP: eigenbasis refresh interval and covariance EMA rate.
    int precondition_every = 10;
    double shampoo_beta = 0.95;

    void validate() const;
};

struct TrainDivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bias-corrected Adam moments, one flat pair per parameter block.
struct AdamState {
    std::vector<std::vector<double>> m, v;
    long step = 0;

    void init(std::span<const ParamBlock> params);
};

/// One Adam update: m <- b1 m + (1-b1) g, v <- b2 v + (1-b2) g^2,
/// theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).
/// Throws on non-finite gradients.
void adam_step(AdamState& state, std::span<ParamBlock> params,
               std::span<const ParamBlock> grads, const TrainConfig& config);

/// Shampoo-style preconditioned Adam: per-block GG^T / G^TG accumulators
/// whose eigenbases rotate the gradient; Adam's second moment lives in the
/// rotated space. Optional extension; drop-in for adam_step.
struct SoapState {
    struct Block {
        Eigen::MatrixXd gg_left, gg_right;  // gradient covariance EMAs
        Eigen::MatrixXd ql, qr;             // current eigenbases
        Eigen::MatrixXd m;                  // first moment, original space
        Eigen::MatrixXd v;                  // second moment, rotated space
    };
    std::vector<Block> blocks;
    long step = 0;

    void init(std::span<const ParamBlock> params);
};

void soap_step(SoapState& state, std::span<ParamBlock> params,
               std::span<const ParamBlock> grads, const TrainConfig& config);

struct TrainHistory {
    std::vector<LossBreakdown> epochs;
    double seconds = 0.0;
};

/// Full-batch training of all model parameters (branches, trunk and the
/// embedding matrix jointly). Records one LossBreakdown per epoch, measured
/// before each step. Throws TrainDivergenceError when the total loss blows
/// past divergence_factor times its initial value.
TrainHistory train(OperatorModel& model, const PdeProblem& problem,
                   std::span<const InputFunctionSample> samples,
                   const std::vector<std::vector<double>>& u_at_pde,
                   const CollocationSet& colloc, const TrainConfig& config);

/// CSV with columns epoch, L_pde, L_bc, L_int, total, seconds.
void write_history_csv(const std::string& path, const TrainHistory& history);

}  // namespace phidon
