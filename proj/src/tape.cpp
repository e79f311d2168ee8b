#include "phidon/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace phidon {

void Tape::clear() {
    nodes_.clear();
    val_.clear();
    adj_.clear();
    args_.clear();
    vrs_.clear();
    vr_val_.clear();
    vr_adj_.clear();
    evals_.clear();
}

Tape::Scalar Tape::push(Op op, double v, std::int32_t a, std::int32_t b) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    nodes_.push_back(n);
    val_.push_back(v);
    return Scalar{static_cast<std::int32_t>(nodes_.size() - 1)};
}

std::int32_t Tape::store_args(const std::int32_t* p, std::int32_t n) {
    const auto ofs = static_cast<std::int32_t>(args_.size());
    args_.insert(args_.end(), p, p + n);
    return ofs;
}

std::int32_t Tape::push_vr(Op op, std::int32_t len, std::int32_t a, std::int32_t b) {
    VrSlot slot;
    slot.len = len;
    slot.ofs = static_cast<std::int32_t>(vr_val_.size());
    vr_val_.resize(vr_val_.size() + len, 0.0);
    vr_adj_.resize(vr_adj_.size() + len, 0.0);
    vrs_.push_back(slot);
    const auto vr_id = static_cast<std::int32_t>(vrs_.size() - 1);

    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    n.vr = vr_id;
    nodes_.push_back(n);
    val_.push_back(0.0);
    return vr_id;
}

Tape::Scalar Tape::constant(double v) { return push(Op::Const, v); }

Tape::Scalar Tape::add(Scalar a, Scalar b) { return push(Op::Add, val_[a.id] + val_[b.id], a.id, b.id); }
Tape::Scalar Tape::sub(Scalar a, Scalar b) { return push(Op::Sub, val_[a.id] - val_[b.id], a.id, b.id); }
Tape::Scalar Tape::mul(Scalar a, Scalar b) { return push(Op::Mul, val_[a.id] * val_[b.id], a.id, b.id); }
Tape::Scalar Tape::div(Scalar a, Scalar b) { return push(Op::Div, val_[a.id] / val_[b.id], a.id, b.id); }
Tape::Scalar Tape::neg(Scalar a) { return push(Op::Neg, -val_[a.id], a.id); }
Tape::Scalar Tape::square(Scalar a) { return push(Op::Square, val_[a.id] * val_[a.id], a.id); }

Tape::Scalar Tape::add_const(Scalar a, double c) {
    Scalar s = push(Op::AddC, val_[a.id] + c, a.id);
    nodes_.back().c = c;
    return s;
}

Tape::Scalar Tape::mul_const(Scalar a, double c) {
    Scalar s = push(Op::MulC, val_[a.id] * c, a.id);
    nodes_.back().c = c;
    return s;
}

Tape::Scalar Tape::sum(std::span<const Scalar> terms) {
    double v = 0.0;
    std::vector<std::int32_t> ids(terms.size());
    for (size_t i = 0; i < terms.size(); ++i) {
        ids[i] = terms[i].id;
        v += val_[terms[i].id];
    }
    Scalar s = push(Op::Sum, v);
    nodes_.back().arg_ofs = store_args(ids.data(), static_cast<std::int32_t>(ids.size()));
    nodes_.back().arg_len = static_cast<std::int32_t>(ids.size());
    return s;
}

Tape::Scalar Tape::sum_squares(std::span<const Scalar> terms, double weight) {
    double v = 0.0;
    std::vector<std::int32_t> ids(terms.size());
    for (size_t i = 0; i < terms.size(); ++i) {
        ids[i] = terms[i].id;
        const double r = val_[terms[i].id];
        v += r * r;
    }
    Scalar s = push(Op::SumSq, weight * v);
    nodes_.back().arg_ofs = store_args(ids.data(), static_cast<std::int32_t>(ids.size()));
    nodes_.back().arg_len = static_cast<std::int32_t>(ids.size());
    nodes_.back().c = weight;
    return s;
}

Tape::EvalRef Tape::add_eval(const Mlp& net, MlpGrad* sink, std::span<const double> x,
                             std::span<const double> dirs, int ndir, int order,
                             std::function<void(std::span<const double>)> input_bar_hook) {
    EvalRecord rec;
    rec.net = &net;
    rec.sink = sink;
    rec.ev = mlp_eval(net, x, dirs, ndir, order);
    rec.input_bar_hook = std::move(input_bar_hook);
    const int nout = net.spec.output_dim;
    rec.vbar.assign(nout, 0.0);
    if (order >= 1) rec.jbar.assign(static_cast<size_t>(nout) * ndir, 0.0);
    if (order >= 2) rec.hbar.assign(static_cast<size_t>(nout) * ndir * ndir, 0.0);
    evals_.push_back(std::move(rec));
    return EvalRef{static_cast<std::int32_t>(evals_.size() - 1)};
}

Tape::Scalar Tape::eval_value(EvalRef e, int k) {
    const std::int32_t args[4] = {e.idx, kReadValue, k, 0};
    Scalar s = push(Op::EvalRead, evals_[e.idx].ev.value()[k]);
    nodes_.back().arg_ofs = store_args(args, 4);
    nodes_.back().arg_len = 4;
    return s;
}

Tape::Scalar Tape::eval_jac(EvalRef e, int k, int dir) {
    const std::int32_t args[4] = {e.idx, kReadJac, k, dir};
    Scalar s = push(Op::EvalRead, evals_[e.idx].ev.jac(k, dir));
    nodes_.back().arg_ofs = store_args(args, 4);
    nodes_.back().arg_len = 4;
    return s;
}

Tape::Scalar Tape::eval_hess(EvalRef e, int k, int d1, int d2) {
    const int ndir = evals_[e.idx].ev.ndir;
    const std::int32_t args[4] = {e.idx, kReadHess, k, d1 * ndir + d2};
    Scalar s = push(Op::EvalRead, evals_[e.idx].ev.hess(k, d1, d2));
    nodes_.back().arg_ofs = store_args(args, 4);
    nodes_.back().arg_len = 4;
    return s;
}

Tape::Vr Tape::vr_eval_values(EvalRef e) {
    const auto& ev = evals_[e.idx].ev;
    const int n = static_cast<int>(ev.value().size());
    const std::int32_t id = push_vr(Op::VrEvalValues, n, e.idx, 0);
    double* dst = &vr_val_[vrs_[id].ofs];
    for (int k = 0; k < n; ++k) dst[k] = ev.value()[k];
    return Vr{id};
}

Tape::Vr Tape::vr_eval_jac(EvalRef e, int dir) {
    const auto& ev = evals_[e.idx].ev;
    const int n = static_cast<int>(ev.value().size());
    const std::int32_t id = push_vr(Op::VrEvalJac, n, e.idx, dir);
    double* dst = &vr_val_[vrs_[id].ofs];
    for (int k = 0; k < n; ++k) dst[k] = ev.jac(k, dir);
    return Vr{id};
}

Tape::Vr Tape::vr_eval_laplacian(EvalRef e) {
    const auto& ev = evals_[e.idx].ev;
    const int n = static_cast<int>(ev.value().size());
    const std::int32_t id = push_vr(Op::VrEvalLap, n, e.idx, 0);
    double* dst = &vr_val_[vrs_[id].ofs];
    for (int k = 0; k < n; ++k) dst[k] = ev.laplacian(k);
    return Vr{id};
}

Tape::Vr Tape::vr_product(std::span<const Vr> factors) {
    if (factors.empty()) throw std::invalid_argument("vr_product: no factors");
    const std::int32_t len = vrs_[factors[0].id].len;
    for (const Vr& f : factors)
        if (vrs_[f.id].len != len) throw std::invalid_argument("vr_product: length mismatch");
    std::vector<std::int32_t> ids(factors.size());
    for (size_t i = 0; i < factors.size(); ++i) ids[i] = factors[i].id;

    const std::int32_t id = push_vr(Op::VrProduct, len, 0, 0);
    nodes_.back().arg_ofs = store_args(ids.data(), static_cast<std::int32_t>(ids.size()));
    nodes_.back().arg_len = static_cast<std::int32_t>(ids.size());
    double* dst = &vr_val_[vrs_[id].ofs];
    for (int k = 0; k < len; ++k) dst[k] = 1.0;
    for (const std::int32_t f : ids) {
        const double* src = &vr_val_[vrs_[f].ofs];
        for (int k = 0; k < len; ++k) dst[k] *= src[k];
    }
    return Vr{id};
}

Tape::Scalar Tape::dot(Vr a, Vr b) {
    const VrSlot& sa = vrs_[a.id];
    const VrSlot& sb = vrs_[b.id];
    if (sa.len != sb.len) throw std::invalid_argument("dot: length mismatch");
    const double* pa = &vr_val_[sa.ofs];
    const double* pb = &vr_val_[sb.ofs];
    double v = 0.0;
    for (int k = 0; k < sa.len; ++k) v += pa[k] * pb[k];
    return push(Op::Dot, v, a.id, b.id);
}

std::span<const double> Tape::vr_values(Vr v) const {
    const VrSlot& s = vrs_[v.id];
    return {&vr_val_[s.ofs], static_cast<size_t>(s.len)};
}

void Tape::seed_value(EvalRecord& r, int k, double adj) {
    r.vbar[k] += adj;
    r.seeded = true;
}

void Tape::seed_jac(EvalRecord& r, int k, int dir, double adj) {
    r.jbar[static_cast<size_t>(k) * r.ev.ndir + dir] += adj;
    r.seeded = true;
}

void Tape::seed_hess(EvalRecord& r, int k, int d1, int d2, double adj) {
    const int nd = r.ev.ndir;
    r.hbar[(static_cast<size_t>(k) * nd + d1) * nd + d2] += adj;
    r.seeded = true;
}

double Tape::backward(Scalar root) {
    const double loss = val_[root.id];
    if (!std::isfinite(loss))
        throw std::runtime_error("loss_gradient: loss value is not finite");

    adj_.assign(val_.size(), 0.0);
    std::fill(vr_adj_.begin(), vr_adj_.end(), 0.0);
    adj_[root.id] = 1.0;

    for (std::int32_t i = static_cast<std::int32_t>(nodes_.size()) - 1; i >= 0; --i) {
        const Node& n = nodes_[i];
        const double g = adj_[i];
        switch (n.op) {
            case Op::Const:
                break;
            case Op::Add:
                if (g != 0.0) {
                    adj_[n.a] += g;
                    adj_[n.b] += g;
                }
                break;
            case Op::Sub:
                if (g != 0.0) {
                    adj_[n.a] += g;
                    adj_[n.b] -= g;
                }
                break;
            case Op::Mul:
                if (g != 0.0) {
                    adj_[n.a] += g * val_[n.b];
                    adj_[n.b] += g * val_[n.a];
                }
                break;
            case Op::Div:
                if (g != 0.0) {
                    const double vb = val_[n.b];
                    adj_[n.a] += g / vb;
                    adj_[n.b] -= g * val_[n.a] / (vb * vb);
                }
                break;
            case Op::Neg:
                adj_[n.a] -= g;
                break;
            case Op::Square:
                adj_[n.a] += 2.0 * g * val_[n.a];
                break;
            case Op::AddC:
                adj_[n.a] += g;
                break;
            case Op::MulC:
                adj_[n.a] += g * n.c;
                break;
            case Op::Sum:
                if (g != 0.0)
                    for (std::int32_t t = 0; t < n.arg_len; ++t) adj_[args_[n.arg_ofs + t]] += g;
                break;
            case Op::SumSq:
                if (g != 0.0) {
                    const double w2 = 2.0 * g * n.c;
                    for (std::int32_t t = 0; t < n.arg_len; ++t) {
                        const std::int32_t id = args_[n.arg_ofs + t];
                        adj_[id] += w2 * val_[id];
                    }
                }
                break;
            case Op::EvalRead: {
                if (g == 0.0) break;
                const std::int32_t* a = &args_[n.arg_ofs];
                EvalRecord& r = evals_[a[0]];
                if (a[1] == kReadValue)
                    seed_value(r, a[2], g);
                else if (a[1] == kReadJac)
                    seed_jac(r, a[2], a[3], g);
                else
                    seed_hess(r, a[2], a[3] / r.ev.ndir, a[3] % r.ev.ndir, g);
                break;
            }
            case Op::Dot: {
                if (g == 0.0) break;
                const VrSlot& sa = vrs_[n.a];
                const VrSlot& sb = vrs_[n.b];
                const double* va = &vr_val_[sa.ofs];
                const double* vb = &vr_val_[sb.ofs];
                double* aa = &vr_adj_[sa.ofs];
                double* ab = &vr_adj_[sb.ofs];
                for (int k = 0; k < sa.len; ++k) {
                    aa[k] += g * vb[k];
                    ab[k] += g * va[k];
                }
                break;
            }
            case Op::VrEvalValues: {
                const VrSlot& s = vrs_[n.vr];
                const double* a = &vr_adj_[s.ofs];
                EvalRecord& r = evals_[n.a];
                for (int k = 0; k < s.len; ++k)
                    if (a[k] != 0.0) seed_value(r, k, a[k]);
                break;
            }
            case Op::VrEvalJac: {
                const VrSlot& s = vrs_[n.vr];
                const double* a = &vr_adj_[s.ofs];
                EvalRecord& r = evals_[n.a];
                for (int k = 0; k < s.len; ++k)
                    if (a[k] != 0.0) seed_jac(r, k, n.b, a[k]);
                break;
            }
            case Op::VrEvalLap: {
                const VrSlot& s = vrs_[n.vr];
                const double* a = &vr_adj_[s.ofs];
                EvalRecord& r = evals_[n.a];
                for (int k = 0; k < s.len; ++k) {
                    if (a[k] == 0.0) continue;
                    for (int d = 0; d < r.ev.ndir; ++d) seed_hess(r, k, d, d, a[k]);
                }
                break;
            }
            case Op::VrProduct: {
                const VrSlot& s = vrs_[n.vr];
                const double* a = &vr_adj_[s.ofs];
                for (int k = 0; k < s.len; ++k) {
                    const double gk = a[k];
                    if (gk == 0.0) continue;
                    for (std::int32_t q = 0; q < n.arg_len; ++q) {
                        double loo = 1.0;  // product over the other factors
                        for (std::int32_t r2 = 0; r2 < n.arg_len; ++r2) {
                            if (r2 == q) continue;
                            loo *= vr_val_[vrs_[args_[n.arg_ofs + r2]].ofs + k];
                        }
                        vr_adj_[vrs_[args_[n.arg_ofs + q]].ofs + k] += gk * loo;
                    }
                }
                break;
            }
        }
    }

    for (EvalRecord& r : evals_) {
        if (!r.seeded) continue;
        std::vector<double>* ib = nullptr;
        if (r.input_bar_hook) {
            input_bar_scratch_.assign(r.net->spec.input_dim, 0.0);
            ib = &input_bar_scratch_;
        }
        mlp_backward(*r.net, r.ev, r.vbar, r.jbar, r.hbar, *r.sink, ib);
        if (r.input_bar_hook) r.input_bar_hook(input_bar_scratch_);
    }
    return loss;
}

double loss_gradient(Tape& tape, Tape::Scalar loss) { return tape.backward(loss); }

}  // namespace phidon
