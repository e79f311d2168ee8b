#include "phidon/optim.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace phidon {

std::string to_string(OptimizerKind k) {
    return k == OptimizerKind::Adam ? "adam" : "soap";
}

OptimizerKind optimizer_from_string(const std::string& s) {
    if (s == "adam") return OptimizerKind::Adam;
    if (s == "soap") return OptimizerKind::Soap;
    throw std::invalid_argument("unknown optimizer: " + s);
}

void TrainConfig::validate() const {
    // lr = 0 is allowed: it makes train() an identity on parameters
    if (learning_rate < 0.0)
        throw std::invalid_argument("TrainConfig: learning_rate must be nonnegative");
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
}

void AdamState::init(std::span<const ParamBlock> params) {
    m.clear();
    v.clear();
    step = 0;
    for (const ParamBlock& p : params) {
        m.emplace_back(p.size(), 0.0);
        v.emplace_back(p.size(), 0.0);
    }
}

void adam_step(AdamState& state, std::span<ParamBlock> params,
               std::span<const ParamBlock> grads, const TrainConfig& config) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: block count mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    for (size_t bi = 0; bi < params.size(); ++bi) {
        double* theta = params[bi].data;
        const double* g = grads[bi].data;
        double* m = state.m[bi].data();
        double* v = state.v[bi].data();
        const size_t n = params[bi].size();
        for (size_t i = 0; i < n; ++i) {
            if (!std::isfinite(g[i]))
                throw std::runtime_error("adam_step: non-finite gradient entry");
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            theta[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.eps);
        }
    }
}

void SoapState::init(std::span<const ParamBlock> params) {
    blocks.clear();
    step = 0;
    for (const ParamBlock& p : params) {
        Block b;
        b.gg_left = Eigen::MatrixXd::Zero(p.rows, p.rows);
        b.gg_right = Eigen::MatrixXd::Zero(p.cols, p.cols);
        b.ql = Eigen::MatrixXd::Identity(p.rows, p.rows);
        b.qr = Eigen::MatrixXd::Identity(p.cols, p.cols);
        b.m = Eigen::MatrixXd::Zero(p.rows, p.cols);
        b.v = Eigen::MatrixXd::Zero(p.rows, p.cols);
        blocks.push_back(std::move(b));
    }
}

void soap_step(SoapState& state, std::span<ParamBlock> params,
               std::span<const ParamBlock> grads, const TrainConfig& config) {
    if (params.size() != grads.size() || params.size() != state.blocks.size())
        throw std::invalid_argument("soap_step: block count mismatch");
    const bool refresh = state.step % config.precondition_every == 0;
    state.step += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));

    for (size_t bi = 0; bi < params.size(); ++bi) {
        SoapState::Block& b = state.blocks[bi];
        const int rows = params[bi].rows;
        const int cols = params[bi].cols;
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            theta(params[bi].data, rows, cols);
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            g(grads[bi].data, rows, cols);
        if (!g.allFinite()) throw std::runtime_error("soap_step: non-finite gradient entry");

        b.gg_left = config.shampoo_beta * b.gg_left + (1.0 - config.shampoo_beta) * (g * g.transpose());
        b.gg_right = config.shampoo_beta * b.gg_right + (1.0 - config.shampoo_beta) * (g.transpose() * g);
        if (refresh) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> el(b.gg_left);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(b.gg_right);
            Eigen::MatrixXd ql = el.eigenvectors();
            Eigen::MatrixXd qr = er.eigenvectors();
            // canonical column signs keep the basis stable between refreshes
            for (Eigen::Index c = 0; c < ql.cols(); ++c) {
                Eigen::Index imax;
                ql.col(c).cwiseAbs().maxCoeff(&imax);
                if (ql(imax, c) < 0.0) ql.col(c) = -ql.col(c);
            }
            for (Eigen::Index c = 0; c < qr.cols(); ++c) {
                Eigen::Index imax;
                qr.col(c).cwiseAbs().maxCoeff(&imax);
                if (qr(imax, c) < 0.0) qr.col(c) = -qr.col(c);
            }
            // the second moment is tracked per eigen-slot (eigenvalues come
            // out sorted, so slot semantics drift slowly); no rotation
            b.ql = std::move(ql);
            b.qr = std::move(qr);
        }

        b.m = config.beta1 * b.m + (1.0 - config.beta1) * g.eval();
        const Eigen::MatrixXd g_rot = b.ql.transpose() * g * b.qr;
        b.v = config.beta2 * b.v + (1.0 - config.beta2) * g_rot.cwiseProduct(g_rot);

        const Eigen::MatrixXd m_rot = (b.ql.transpose() * b.m * b.qr) / bc1;
        const Eigen::MatrixXd denom =
            (b.v / bc2).cwiseSqrt().array().matrix() + Eigen::MatrixXd::Constant(rows, cols, config.eps);
        const Eigen::MatrixXd n_rot = m_rot.cwiseQuotient(denom);
        theta -= config.learning_rate * (b.ql * n_rot * b.qr.transpose());
    }
}

TrainHistory train(OperatorModel& model, const PdeProblem& problem,
                   std::span<const InputFunctionSample> samples,
                   const std::vector<std::vector<double>>& u_at_pde,
                   const CollocationSet& colloc, const TrainConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();

    ModelGrads grads;
    grads.init_like(model);
    auto params = parameter_blocks(model);
    auto gblocks = gradient_blocks(grads);

    AdamState adam;
    SoapState soap;
    if (config.optimizer == OptimizerKind::Adam)
        adam.init(params);
    else
        soap.init(params);

    TrainHistory history;
    history.epochs.reserve(config.epochs);
    double initial_total = -1.0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        grads.set_zero();
        const LossBreakdown loss =
            total_loss_and_gradient(problem, model, samples, u_at_pde, colloc, grads);
        history.epochs.push_back(loss);
        if (epoch == 0) initial_total = loss.total;
        if (loss.total > config.divergence_factor * initial_total)
            throw TrainDivergenceError("train: loss diverged at epoch " + std::to_string(epoch));

        if (config.optimizer == OptimizerKind::Adam)
            adam_step(adam, params, gblocks, config);
        else
            soap_step(soap, params, gblocks, config);
    }

    history.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return history;
}

void write_history_csv(const std::string& path, const TrainHistory& history) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw std::runtime_error("write_history_csv: cannot open " + path);
    std::fprintf(f, "epoch,L_pde,L_bc,L_int,total,seconds\n");
    const double per_epoch =
        history.epochs.empty() ? 0.0 : history.seconds / static_cast<double>(history.epochs.size());
    for (size_t e = 0; e < history.epochs.size(); ++e) {
        const LossBreakdown& l = history.epochs[e];
        std::fprintf(f, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", e, l.pde, l.bc,
                     l.interface_value + l.interface_flux, l.total,
                     per_epoch * static_cast<double>(e + 1));
    }
    std::fclose(f);
}

}  // namespace phidon
