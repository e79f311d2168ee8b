#include "phidon/physics.hpp"

#include <cmath>
#include <stdexcept>

#include "phidon/tape.hpp"

namespace phidon {

void PdeProblem::validate() const {
    if (dec == nullptr) throw std::invalid_argument("PdeProblem: missing decomposition");
    if (static_cast<int>(kappa.size()) != dec->num_subdomains)
        throw std::invalid_argument("PdeProblem: one kappa per subdomain required");
    for (double k : kappa)
        if (!(k > 0.0)) throw std::invalid_argument("PdeProblem: kappa must be positive");
    if (scaled_jump) {
        if (static_cast<int>(henry.size()) != dec->num_subdomains)
            throw std::invalid_argument("PdeProblem: one Henry coefficient per subdomain");
        for (double h : henry)
            if (!(h > 0.0))
                throw std::invalid_argument("PdeProblem: Henry coefficients must be positive");
    }
}

double pde_residual(const PdeProblem& problem, const OperatorModel& model,
                    const InputFunctionSample& u, const ForcingFn& forcing, const Point& y) {
    problem.validate();
    const auto& dec = *problem.dec;
    if (dec.interface_proximity && dec.interface_proximity(y) < 1e-12)
        throw std::invalid_argument("pde_residual: undefined on an interface");
    const int q = subdomain_of(dec, y);
    const SpatialEval ev = forward_with_spatial_derivatives(model, u, y);
    return problem.kappa[q - 1] * ev.lap - problem.sigma_pde * forcing(q, y);
}

double bc_residual(const PdeProblem& problem, const OperatorModel& model,
                   const InputFunctionSample& u, const Point& y) {
    const auto& dec = *problem.dec;
    for (const auto& seg : dec.dirichlet_segments) {
        if (seg.contains && seg.contains(y)) return forward(model, u, y) - seg.value(y);
    }
    throw std::invalid_argument("bc_residual: point is not on a Dirichlet segment");
}

InterfaceResiduals interface_residuals(const PdeProblem& problem, const OperatorModel& model,
                                       const InputFunctionSample& u, const Point& y, int p,
                                       int q, std::span<const double> normal) {
    problem.validate();
    const auto& dec = *problem.dec;
    bool adjacent = false;
    for (const auto& iface : dec.interfaces)
        if (iface.p == p && iface.q == q) adjacent = true;
    if (!adjacent)
        throw std::invalid_argument("interface_residuals: subdomains are not adjacent");
    if (dec.interface_proximity && dec.interface_proximity(y) > 1e-9)
        throw std::invalid_argument("interface_residuals: point is not on the interface");

    const SpatialEval ep = forward_with_spatial_derivatives(model, u, y, p);
    const SpatialEval eq = forward_with_spatial_derivatives(model, u, y, q);

    InterfaceResiduals r;
    const double wp = problem.scaled_jump ? ep.value / problem.henry[p - 1] : ep.value;
    const double wq = problem.scaled_jump ? eq.value / problem.henry[q - 1] : eq.value;
    r.value = (wq - wp) - problem.jd(y);

    double gp = 0.0, gq = 0.0;
    for (size_t a = 0; a < normal.size(); ++a) {
        gp += ep.grad[a] * normal[a];
        gq += eq.grad[a] * normal[a];
    }
    r.flux = (problem.kappa[q - 1] * gq - problem.kappa[p - 1] * gp) - problem.jn(y);
    return r;
}

double rel_l2(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) throw std::invalid_argument("rel_l2: length mismatch");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - truth[i];
        num += d * d;
        den += truth[i] * truth[i];
    }
    if (den == 0.0) throw std::invalid_argument("rel_l2: zero-norm reference");
    return std::sqrt(num / den);
}

namespace {

/// Hard-constraint factors frozen at a point.
struct HcPoint {
    double lam = 1.0, lam_lap = 0.0, lift = 0.0, lift_lap = 0.0;
    std::vector<double> lam_grad, lift_grad;
};

HcPoint hc_at(const DomainDecomposition& dec, const Point& y) {
    HcPoint h;
    h.lam = dec.hard.lambda.value(y);
    h.lam_grad = dec.hard.lambda.grad(y);
    h.lam_lap = dec.hard.lambda.lap(y);
    h.lift = dec.hard.lift.value(y);
    h.lift_grad = dec.hard.lift.grad(y);
    h.lift_lap = dec.hard.lift.lap(y);
    return h;
}

/// A trunk evaluation's projections used by the residual expressions.
struct TrunkSlot {
    Tape::Vr val, lap;
    std::vector<Tape::Vr> grad;
};

struct BatchContext {
    Tape tape;
    const OperatorModel* model = nullptr;
    ModelGrads* grads = nullptr;
    std::vector<double> trunk_dirs;

    Tape::EvalRef add_trunk_eval(const Point& y, int side, int order) {
        const auto in = trunk_input(*model, y, side);
        const int d = model->spatial_dim();
        MlpGrad* sink = grads ? &grads->trunk : nullptr;
        std::function<void(std::span<const double>)> hook;
        if (grads && !model->baseline && model->embedding.trainable()) {
            const Embedding* emb = &model->embedding;
            Mat* esink = &grads->embedding;
            hook = [emb, esink, side, d](std::span<const double> input_bar) {
                embedding_gradient(*emb, side, input_bar.subspan(d), *esink);
            };
        }
        if (trunk_dirs.size() != in.size() * d) {
            trunk_dirs.assign(in.size() * d, 0.0);
            for (int a = 0; a < d; ++a) trunk_dirs[static_cast<size_t>(a) * d + a] = 1.0;
        }
        return tape.add_eval(model->trunk, sink, in, trunk_dirs, d, order, std::move(hook));
    }

    TrunkSlot project(Tape::EvalRef ev, bool want_val, bool want_grad, bool want_lap) {
        TrunkSlot slot;
        if (want_val) slot.val = tape.vr_eval_values(ev);
        if (want_grad)
            for (int a = 0; a < model->spatial_dim(); ++a)
                slot.grad.push_back(tape.vr_eval_jac(ev, a));
        if (want_lap) slot.lap = tape.vr_eval_laplacian(ev);
        return slot;
    }

    /// s(y), hard constraint applied when active.
    Tape::Scalar value_expr(Tape::Vr b, const TrunkSlot& t, const HcPoint& hc) {
        Tape::Scalar v = tape.dot(b, t.val);
        if (!model->hard_bc) return v;
        return tape.add_const(tape.mul_const(v, hc.lam), hc.lift);
    }

    /// grad(s)(y) . n
    Tape::Scalar normal_grad_expr(Tape::Vr b, const TrunkSlot& t, const HcPoint& hc,
                                  std::span<const double> n) {
        const int d = model->spatial_dim();
        Tape::Scalar gn = tape.mul_const(tape.dot(b, t.grad[0]), n[0]);
        for (int a = 1; a < d; ++a)
            gn = tape.add(gn, tape.mul_const(tape.dot(b, t.grad[a]), n[a]));
        if (!model->hard_bc) return gn;
        double lgn = 0.0, liftgn = 0.0;
        for (int a = 0; a < d; ++a) {
            lgn += hc.lam_grad[a] * n[a];
            liftgn += hc.lift_grad[a] * n[a];
        }
        Tape::Scalar v = tape.dot(b, t.val);
        return tape.add_const(tape.add(tape.mul_const(gn, hc.lam), tape.mul_const(v, lgn)),
                              liftgn);
    }

    /// lap(s)(y)
    Tape::Scalar laplacian_expr(Tape::Vr b, const TrunkSlot& t, const HcPoint& hc) {
        const int d = model->spatial_dim();
        Tape::Scalar lap = tape.dot(b, t.lap);
        if (!model->hard_bc) return lap;
        Tape::Scalar acc = tape.add(tape.mul_const(lap, hc.lam),
                                    tape.mul_const(tape.dot(b, t.val), hc.lam_lap));
        for (int a = 0; a < d; ++a)
            acc = tape.add(acc, tape.mul_const(tape.dot(b, t.grad[a]), 2.0 * hc.lam_grad[a]));
        return tape.add_const(acc, hc.lift_lap);
    }
};

void check_finite(double v, const char* term, int sample, int point) {
    if (!std::isfinite(v))
        throw std::runtime_error(std::string("total_loss: non-finite ") + term +
                                 " residual at sample " + std::to_string(sample) + ", point " +
                                 std::to_string(point));
}

LossBreakdown run_batch(const PdeProblem& problem, const OperatorModel& model,
                        std::span<const InputFunctionSample> samples,
                        const std::vector<std::vector<double>>& u_at_pde,
                        const CollocationSet& colloc, ModelGrads* grads) {
    problem.validate();
    model.validate();
    const auto& dec = *problem.dec;
    const int num_samples = static_cast<int>(samples.size());
    const int m = static_cast<int>(colloc.pde_points.size());
    const int b = static_cast<int>(colloc.bc_points.size());
    const int t = static_cast<int>(colloc.interface_points.size());
    if (num_samples == 0 || m == 0)
        throw std::invalid_argument("total_loss: empty dataset or collocation set");
    if (static_cast<int>(u_at_pde.size()) != num_samples)
        throw std::invalid_argument("total_loss: u_at_pde sample count mismatch");

    BatchContext ctx;
    ctx.model = &model;
    ctx.grads = grads;
    Tape& tape = ctx.tape;
    const bool hard = model.hard_bc;

    // branch products, one per sample
    std::vector<Tape::Vr> bprod(num_samples);
    std::vector<double> cat;
    for (int i = 0; i < num_samples; ++i) {
        std::vector<Tape::Vr> factors;
        if (model.baseline) {
            MlpGrad* sink = grads ? &grads->branches[0] : nullptr;
            const auto tmp = samples[i].concatenated();
            factors.push_back(
                tape.vr_eval_values(tape.add_eval(model.branches[0], sink, tmp, {}, 0, 0)));
        } else {
            for (size_t q2 = 0; q2 < model.branches.size(); ++q2) {
                MlpGrad* sink = grads ? &grads->branches[q2] : nullptr;
                factors.push_back(tape.vr_eval_values(tape.add_eval(
                    model.branches[q2], sink, samples[i].per_subdomain[q2], {}, 0, 0)));
            }
        }
        bprod[i] = tape.vr_product(factors);
    }

    // trunk slots per PDE point (natural side)
    std::vector<TrunkSlot> pde_slot(m);
    std::vector<HcPoint> pde_hc(m);
    for (int j = 0; j < m; ++j) {
        const auto ev = ctx.add_trunk_eval(colloc.pde_points[j], colloc.pde_side[j], 2);
        pde_slot[j] = ctx.project(ev, hard, hard, true);
        if (hard) pde_hc[j] = hc_at(dec, colloc.pde_points[j]);
    }

    std::vector<Tape::Scalar> pde_r;
    pde_r.reserve(static_cast<size_t>(num_samples) * m);
    for (int i = 0; i < num_samples; ++i) {
        if (static_cast<int>(u_at_pde[i].size()) != m)
            throw std::invalid_argument("total_loss: u_at_pde point count mismatch");
        for (int j = 0; j < m; ++j) {
            const int q = colloc.pde_side[j];
            Tape::Scalar lap = ctx.laplacian_expr(bprod[i], pde_slot[j], pde_hc[j]);
            Tape::Scalar r = tape.add_const(tape.mul_const(lap, problem.kappa[q - 1]),
                                            -problem.sigma_pde * u_at_pde[i][j]);
            check_finite(tape.value(r), "pde", i, j);
            pde_r.push_back(r);
        }
    }

    // boundary term: identically zero under hard constraints
    std::vector<Tape::Scalar> bc_r;
    if (!hard && b > 0) {
        std::vector<TrunkSlot> bc_slot(b);
        std::vector<double> bc_data(b);
        static const HcPoint no_hc;
        for (int j = 0; j < b; ++j) {
            const Point& y = colloc.bc_points[j];
            const auto ev = ctx.add_trunk_eval(y, subdomain_of(dec, y), 0);
            bc_slot[j] = ctx.project(ev, true, false, false);
            bc_data[j] = dec.dirichlet_segments[colloc.bc_segment[j]].value(y);
        }
        bc_r.reserve(static_cast<size_t>(num_samples) * b);
        for (int i = 0; i < num_samples; ++i)
            for (int j = 0; j < b; ++j) {
                Tape::Scalar r =
                    tape.add_const(ctx.value_expr(bprod[i], bc_slot[j], no_hc), -bc_data[j]);
                check_finite(tape.value(r), "bc", i, j);
                bc_r.push_back(r);
            }
    }

    // interface terms: two-sided evaluations via forced embeddings
    std::vector<Tape::Scalar> intv_r, intf_r;
    if (t > 0) {
        struct SideSlots {
            TrunkSlot sp, sq;
            HcPoint hc;
        };
        std::vector<SideSlots> slots(t);
        for (int j = 0; j < t; ++j) {
            const auto& ip = colloc.interface_points[j];
            slots[j].sp = ctx.project(ctx.add_trunk_eval(ip.y, ip.p, 1), true, true, false);
            slots[j].sq = ctx.project(ctx.add_trunk_eval(ip.y, ip.q, 1), true, true, false);
            if (hard) slots[j].hc = hc_at(dec, ip.y);
        }
        intv_r.reserve(static_cast<size_t>(num_samples) * t);
        intf_r.reserve(static_cast<size_t>(num_samples) * t);
        for (int i = 0; i < num_samples; ++i) {
            for (int j = 0; j < t; ++j) {
                const auto& ip = colloc.interface_points[j];
                const auto& sl = slots[j];
                Tape::Scalar sp = ctx.value_expr(bprod[i], sl.sp, sl.hc);
                Tape::Scalar sq = ctx.value_expr(bprod[i], sl.sq, sl.hc);
                if (problem.scaled_jump) {
                    sp = tape.mul_const(sp, 1.0 / problem.henry[ip.p - 1]);
                    sq = tape.mul_const(sq, 1.0 / problem.henry[ip.q - 1]);
                }
                Tape::Scalar rv = tape.add_const(tape.sub(sq, sp), -problem.jd(ip.y));
                check_finite(tape.value(rv), "interface-value", i, j);
                intv_r.push_back(rv);

                Tape::Scalar gp = ctx.normal_grad_expr(bprod[i], sl.sp, sl.hc, ip.normal);
                Tape::Scalar gq = ctx.normal_grad_expr(bprod[i], sl.sq, sl.hc, ip.normal);
                Tape::Scalar rf =
                    tape.add_const(tape.sub(tape.mul_const(gq, problem.kappa[ip.q - 1]),
                                            tape.mul_const(gp, problem.kappa[ip.p - 1])),
                                   -problem.jn(ip.y));
                check_finite(tape.value(rf), "interface-flux", i, j);
                intf_r.push_back(rf);
            }
        }
    }

    Tape::Scalar l_pde = tape.sum_squares(pde_r, 1.0 / (static_cast<double>(num_samples) * m));
    Tape::Scalar l_bc =
        bc_r.empty() ? tape.constant(0.0)
                     : tape.sum_squares(bc_r, 1.0 / (static_cast<double>(num_samples) * b));
    Tape::Scalar l_iv =
        intv_r.empty() ? tape.constant(0.0)
                       : tape.sum_squares(intv_r, 1.0 / (static_cast<double>(num_samples) * t));
    Tape::Scalar l_if =
        intf_r.empty() ? tape.constant(0.0)
                       : tape.sum_squares(intf_r, 1.0 / (static_cast<double>(num_samples) * t));
    Tape::Scalar total = tape.add(tape.add(l_pde, l_bc), tape.add(l_iv, l_if));

    LossBreakdown out;
    out.pde = tape.value(l_pde);
    out.bc = tape.value(l_bc);
    out.interface_value = tape.value(l_iv);
    out.interface_flux = tape.value(l_if);
    out.total = tape.value(total);

    if (grads != nullptr) loss_gradient(tape, total);
    return out;
}

}  // namespace

LossBreakdown total_loss(const PdeProblem& problem, const OperatorModel& model,
                         std::span<const InputFunctionSample> samples,
                         const std::vector<std::vector<double>>& u_at_pde,
                         const CollocationSet& colloc) {
    return run_batch(problem, model, samples, u_at_pde, colloc, nullptr);
}

LossBreakdown total_loss_and_gradient(const PdeProblem& problem, OperatorModel& model,
                                      std::span<const InputFunctionSample> samples,
                                      const std::vector<std::vector<double>>& u_at_pde,
                                      const CollocationSet& colloc, ModelGrads& grads) {
    return run_batch(problem, model, samples, u_at_pde, colloc, &grads);
}

}  // namespace phidon
