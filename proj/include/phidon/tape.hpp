#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "phidon/mlp.hpp"
#include "phidon/mlp_autodiff.hpp"

namespace phidon {

/// Reverse-mode tape for scalar losses built from MLP evaluations.
///
/// Model evaluations enter as sources: add_eval runs the derivative-carrying
/// forward pass and exposes value / directional-derivative / Laplacian
/// components either as scalars or as length-K vector registers. Arithmetic
/// on scalars and dot products between vector registers build the loss;
/// backward() sweeps the graph once and then flushes each evaluation's
/// accumulated output adjoints through mlp_backward into its gradient sink.
/// Evaluations never consume tape values, so the flush order is free.
class Tape {
public:
    struct Scalar {
        std::int32_t id = -1;
    };
    struct Vr {
        std::int32_t id = -1;
    };
    struct EvalRef {
        std::int32_t idx = -1;
    };

    /// Drops all nodes and evals but keeps buffer capacity.
    void clear();

    Scalar constant(double v);
    Scalar add(Scalar a, Scalar b);
    Scalar sub(Scalar a, Scalar b);
    Scalar mul(Scalar a, Scalar b);
    Scalar div(Scalar a, Scalar b);
    Scalar neg(Scalar a);
    Scalar square(Scalar a);
    Scalar add_const(Scalar a, double c);
    Scalar mul_const(Scalar a, double c);
    Scalar sum(std::span<const Scalar> terms);
    /// weight * sum_i terms[i]^2, as one node.
    Scalar sum_squares(std::span<const Scalar> terms, double weight);

    double value(Scalar s) const { return val_[s.id]; }

    /// Registers a derivative-carrying evaluation of `net` at `x`.
    /// Parameter gradients flush into `sink`; if `input_bar_hook` is set it
    /// receives d(loss)/d(input) after the flush (used to chain embeddings).
    EvalRef add_eval(const Mlp& net, MlpGrad* sink, std::span<const double> x,
                     std::span<const double> dirs, int ndir, int order,
                     std::function<void(std::span<const double>)> input_bar_hook = nullptr);

    const MlpEval& eval(EvalRef e) const { return evals_[e.idx].ev; }

    Scalar eval_value(EvalRef e, int k);
    Scalar eval_jac(EvalRef e, int k, int dir);
    Scalar eval_hess(EvalRef e, int k, int d1, int d2);

    Vr vr_eval_values(EvalRef e);
    Vr vr_eval_jac(EvalRef e, int dir);
    Vr vr_eval_laplacian(EvalRef e);
    Vr vr_product(std::span<const Vr> factors);
    Scalar dot(Vr a, Vr b);

    std::span<const double> vr_values(Vr v) const;

    /// Reverse sweep seeded with d(root)/d(root) = 1. Returns value(root).
    /// Throws std::runtime_error if the root value is not finite.
    double backward(Scalar root);

private:
    enum class Op : std::uint8_t {
        Const,
        Add,
        Sub,
        Mul,
        Div,
        Neg,
        Square,
        AddC,
        MulC,
        Sum,
        SumSq,
        EvalRead,
        Dot,
        VrEvalValues,
        VrEvalJac,
        VrEvalLap,
        VrProduct,
    };

    struct Node {
        Op op;
        std::int32_t a = -1;   // operand / eval idx / vr idx
        std::int32_t b = -1;   // operand / dir / vr idx
        std::int32_t arg_ofs = 0;
        std::int32_t arg_len = 0;
        std::int32_t vr = -1;  // vector register owned by this node
        double c = 0.0;        // constant operand / weight
    };

    struct VrSlot {
        std::int32_t len = 0;
        std::int32_t ofs = 0;  // into vr_val_ and vr_adj_
    };

    struct EvalRecord {
        const Mlp* net = nullptr;
        MlpGrad* sink = nullptr;
        MlpEval ev;
        std::vector<double> vbar, jbar, hbar;
        bool seeded = false;
        std::function<void(std::span<const double>)> input_bar_hook;
    };

    // selectors for EvalRead, packed into args
    enum ReadKind : std::int32_t { kReadValue = 0, kReadJac = 1, kReadHess = 2 };

    Scalar push(Op op, double v, std::int32_t a = -1, std::int32_t b = -1);
    std::int32_t push_vr(Op op, std::int32_t len, std::int32_t a, std::int32_t b);
    std::int32_t store_args(const std::int32_t* p, std::int32_t n);
    void seed_value(EvalRecord& r, int k, double adj);
    void seed_jac(EvalRecord& r, int k, int dir, double adj);
    void seed_hess(EvalRecord& r, int k, int d1, int d2, double adj);

    std::vector<Node> nodes_;
    std::vector<double> val_;
    std::vector<double> adj_;
    std::vector<std::int32_t> args_;
    std::vector<VrSlot> vrs_;
    std::vector<double> vr_val_;
    std::vector<double> vr_adj_;
    std::vector<EvalRecord> evals_;
    std::vector<double> input_bar_scratch_;
};

/// Runs the reverse sweep for a tape-expressed loss and flushes gradients
/// into every registered sink. Returns the loss value.
double loss_gradient(Tape& tape, Tape::Scalar loss);

}  // namespace phidon
