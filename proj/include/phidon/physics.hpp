#pragma once

#include <functional>
#include <span>

#include "phidon/deeponet.hpp"
#include "phidon/geometry.hpp"

namespace phidon {

/// Piecewise-constant-coefficient Poisson interface problem:
///   div(kappa_q grad s) = sigma_pde * u_q     in each subdomain,
///   value jump [[w]] = j_D on interfaces (w = s, or s/H_q when scaled),
///   flux jump [[kappa grad s]] . n = j_N,
///   s = Lambda_d on the Dirichlet segments (data held by the geometry).
struct PdeProblem {
    const DomainDecomposition* dec = nullptr;
    std::vector<double> kappa;   // per subdomain, positive
    double sigma_pde = 1.0;      // sign convention of the forcing
    bool scaled_jump = false;    // value jump on s/H instead of s
    std::vector<double> henry;   // H_q > 0, used when scaled_jump
    std::function<double(const Point&)> jump_value;  // j_D; null means 0
    std::function<double(const Point&)> jump_flux;   // j_N; null means 0

    void validate() const;
    double jd(const Point& y) const { return jump_value ? jump_value(y) : 0.0; }
    double jn(const Point& y) const { return jump_flux ? jump_flux(y) : 0.0; }
};

/// Supplies u_q(y) for one input sample at arbitrary points (analytic
/// forcing, interpolation, or exact table lookup).
using ForcingFn = std::function<double(int q, const Point& y)>;

struct LossBreakdown {
    double pde = 0.0;
    double bc = 0.0;
    double interface_value = 0.0;
    double interface_flux = 0.0;
    double total = 0.0;
};

/// kappa_q * lap(s) - sigma_pde * u_q(y) at an interior point. Throws if y
/// lies on an interface.
double pde_residual(const PdeProblem& problem, const OperatorModel& model,
                    const InputFunctionSample& u, const ForcingFn& forcing, const Point& y);

/// s(y) - Lambda_d(y) on a Dirichlet segment (identically 0 under hard
/// constraints). Throws if y is not on a Dirichlet segment.
double bc_residual(const PdeProblem& problem, const OperatorModel& model,
                   const InputFunctionSample& u, const Point& y);

struct InterfaceResiduals {
    double value = 0.0;
    double flux = 0.0;
};

/// Two-sided residuals at an interface point with normal n outward from
/// subdomain p: value (v_q - v_p) - j_D with v = s or s/H, and flux
/// (kappa_q grad s_q - kappa_p grad s_p) . n - j_N.
InterfaceResiduals interface_residuals(const PdeProblem& problem, const OperatorModel& model,
                                       const InputFunctionSample& u, const Point& y, int p,
                                       int q, std::span<const double> normal);

/// Mean-squared residual loss: (1/Nm) sum |N|^2 + (1/Nb) sum |B|^2 +
/// (1/Nt) sum (|I_value|^2 + |I_flux|^2), with the value and flux interface
/// terms equally weighted. u_at_pde[i][j] is the exact forcing of sample i
/// at PDE collocation point j (side taken from the collocation set).
/// Throws on any non-finite residual, naming the sample, point and term.
LossBreakdown total_loss(const PdeProblem& problem, const OperatorModel& model,
                         std::span<const InputFunctionSample> samples,
                         const std::vector<std::vector<double>>& u_at_pde,
                         const CollocationSet& colloc);

/// Same loss, plus exact gradients with respect to every trainable
/// parameter (branches, trunk, embedding matrix) accumulated into `grads`.
LossBreakdown total_loss_and_gradient(const PdeProblem& problem, OperatorModel& model,
                                      std::span<const InputFunctionSample> samples,
                                      const std::vector<std::vector<double>>& u_at_pde,
                                      const CollocationSet& colloc, ModelGrads& grads);

/// |pred - truth|_2 / |truth|_2. Throws on length mismatch or zero-norm
/// truth.
double rel_l2(std::span<const double> pred, std::span<const double> truth);

}  // namespace phidon
