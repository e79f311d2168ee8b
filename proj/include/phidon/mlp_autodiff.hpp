#pragma once

#include <span>
#include <vector>

#include "phidon/mlp.hpp"

namespace phidon {

/// Recorded forward evaluation of an Mlp at a point, optionally carrying
/// first and second directional derivatives along a set of seed directions.
/// Everything needed by the reverse pass (pre-activations and propagated
/// derivative stacks) is kept, so one eval supports both "read derivatives"
/// and "backpropagate a loss seed into parameter space".
///
/// Layout: per layer l, z/jz/hz are pre-activation quantities and a/ja/ha
/// post-activation; rows are unit indices, with jz row-major (i, dir) and
/// hz row-major (i, dir, dir).
struct MlpEval {
    int order = 0;  // 0: values, 1: +jacobian, 2: +hessian
    int ndir = 0;
    std::vector<double> x;    // input copy
    std::vector<double> jx;   // input seeds, row-major (input_dim x ndir)
    std::vector<std::vector<double>> z, a;
    std::vector<std::vector<double>> jz, ja;
    std::vector<std::vector<double>> hz, ha;

    const std::vector<double>& value() const { return a.back(); }
    double jac(int k, int dir) const { return ja.back()[static_cast<size_t>(k) * ndir + dir]; }
    double hess(int k, int d1, int d2) const {
        return ha.back()[(static_cast<size_t>(k) * ndir + d1) * ndir + d2];
    }
    /// Trace of the Hessian slice of output k over all seed directions.
    double laplacian(int k) const {
        double s = 0.0;
        for (int d = 0; d < ndir; ++d) s += hess(k, d, d);
        return s;
    }
};

/// Forward pass with derivative propagation along `ndir` seed directions
/// (dirs row-major, input_dim x ndir). order >= 2 requires a twice
/// differentiable activation and throws for relu.
MlpEval mlp_eval(const Mlp& net, std::span<const double> x,
                 std::span<const double> dirs, int ndir, int order);

/// Value-only convenience (order 0).
MlpEval mlp_eval(const Mlp& net, std::span<const double> x);

/// Reverse pass. Seeds are adjoints of the eval outputs: vbar (output_dim,
/// may be empty), jbar (output_dim x ndir, may be empty), hbar
/// (output_dim x ndir x ndir, may be empty). Parameter gradients are
/// accumulated into `grad`; if `input_bar` is non-null the adjoint with
/// respect to the input vector is accumulated there (size input_dim).
void mlp_backward(const Mlp& net, const MlpEval& ev,
                  std::span<const double> vbar, std::span<const double> jbar,
                  std::span<const double> hbar, MlpGrad& grad,
                  std::vector<double>* input_bar = nullptr);

/// Exact Jacobian of outputs with respect to inputs (output_dim x input_dim).
Mat spatial_jacobian(const Mlp& net, std::span<const double> x);

/// Exact Hessians of each output with respect to inputs; entry k is the
/// (input_dim x input_dim) Hessian of output k. Throws for relu.
std::vector<Mat> spatial_second_derivatives(const Mlp& net, std::span<const double> x);

/// Trace of the Hessian of output `out_index` over all inputs.
double laplacian(const Mlp& net, std::span<const double> x, int out_index);

}  // namespace phidon
