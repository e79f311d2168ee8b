#include "phidon/mlp_autodiff.hpp"

#include <stdexcept>

namespace phidon {

MlpEval mlp_eval(const Mlp& net, std::span<const double> x,
                 std::span<const double> dirs, int ndir, int order) {
    if (static_cast<int>(x.size()) != net.spec.input_dim)
        throw std::invalid_argument("mlp_eval: input dimension mismatch");
    if (order > 0 && static_cast<int>(dirs.size()) != net.spec.input_dim * ndir)
        throw std::invalid_argument("mlp_eval: seed direction shape mismatch");
    if (order >= 2 && net.spec.activation == Activation::Relu)
        throw std::invalid_argument("mlp_eval: relu is unsupported for second-order derivatives");

    const int nl = net.num_layers();
    const int nd2 = ndir * ndir;
    MlpEval ev;
    ev.order = order;
    ev.ndir = order > 0 ? ndir : 0;
    ev.x.assign(x.begin(), x.end());
    ev.jx.assign(dirs.begin(), dirs.end());
    ev.z.resize(nl);
    ev.a.resize(nl);
    if (order >= 1) {
        ev.jz.resize(nl);
        ev.ja.resize(nl);
    }
    if (order >= 2) {
        ev.hz.resize(nl);
        ev.ha.resize(nl);
    }

    const double* ain = ev.x.data();
    const double* jain = ev.jx.data();
    const double* hain = nullptr;  // input has zero second derivatives
    int nin = net.spec.input_dim;

    for (int l = 0; l < nl; ++l) {
        const Mat& w = net.weights[l];
        const auto& b = net.biases[l];
        const int nout = w.rows;
        const Activation act = net.layer_activation(l);

        auto& z = ev.z[l];
        auto& a = ev.a[l];
        z.assign(nout, 0.0);
        a.assign(nout, 0.0);
        std::vector<double>* jz = nullptr;
        std::vector<double>* ja = nullptr;
        std::vector<double>* hz = nullptr;
        std::vector<double>* ha = nullptr;
        if (order >= 1) {
            jz = &ev.jz[l];
            ja = &ev.ja[l];
            jz->assign(static_cast<size_t>(nout) * ndir, 0.0);
            ja->assign(static_cast<size_t>(nout) * ndir, 0.0);
        }
        if (order >= 2) {
            hz = &ev.hz[l];
            ha = &ev.ha[l];
            hz->assign(static_cast<size_t>(nout) * nd2, 0.0);
            ha->assign(static_cast<size_t>(nout) * nd2, 0.0);
        }

        for (int i = 0; i < nout; ++i) {
            const double* wrow = &w.data[static_cast<size_t>(i) * nin];
            double zi = b[i];
            for (int j = 0; j < nin; ++j) zi += wrow[j] * ain[j];
            z[i] = zi;

            if (order >= 1) {
                double* jzi = &(*jz)[static_cast<size_t>(i) * ndir];
                for (int j = 0; j < nin; ++j) {
                    const double wij = wrow[j];
                    const double* jrow = &jain[static_cast<size_t>(j) * ndir];
                    for (int d = 0; d < ndir; ++d) jzi[d] += wij * jrow[d];
                }
            }
            if (order >= 2 && hain != nullptr) {
                double* hzi = &(*hz)[static_cast<size_t>(i) * nd2];
                for (int j = 0; j < nin; ++j) {
                    const double wij = wrow[j];
                    const double* hrow = &hain[static_cast<size_t>(j) * nd2];
                    for (int d = 0; d < nd2; ++d) hzi[d] += wij * hrow[d];
                }
            }

            const ActDerivs ad = act_eval(act, zi);
            a[i] = ad.v;
            if (order >= 1) {
                const double* jzi = &(*jz)[static_cast<size_t>(i) * ndir];
                double* jai = &(*ja)[static_cast<size_t>(i) * ndir];
                for (int d = 0; d < ndir; ++d) jai[d] = ad.d1 * jzi[d];
                if (order >= 2) {
                    const double* hzi = &(*hz)[static_cast<size_t>(i) * nd2];
                    double* hai = &(*ha)[static_cast<size_t>(i) * nd2];
                    for (int d1 = 0; d1 < ndir; ++d1)
                        for (int d2 = 0; d2 < ndir; ++d2)
                            hai[d1 * ndir + d2] =
                                ad.d2 * jzi[d1] * jzi[d2] + ad.d1 * hzi[d1 * ndir + d2];
                }
            }
        }

        ain = a.data();
        if (order >= 1) jain = ev.ja[l].data();
        if (order >= 2) hain = ev.ha[l].data();
        nin = nout;
    }
    return ev;
}

MlpEval mlp_eval(const Mlp& net, std::span<const double> x) {
    return mlp_eval(net, x, {}, 0, 0);
}

void mlp_backward(const Mlp& net, const MlpEval& ev,
                  std::span<const double> vbar, std::span<const double> jbar,
                  std::span<const double> hbar, MlpGrad& grad,
                  std::vector<double>* input_bar) {
    const int nl = net.num_layers();
    const int ndir = ev.ndir;
    const int nd2 = ndir * ndir;
    const int nout = net.spec.output_dim;

    const bool use_j = !jbar.empty();
    const bool use_h = !hbar.empty();
    if (use_j && ev.order < 1)
        throw std::invalid_argument("mlp_backward: jacobian seed on a value-only eval");
    if (use_h && ev.order < 2)
        throw std::invalid_argument("mlp_backward: hessian seed on an eval without second order");

    // adjoints of the current layer's post-activations
    std::vector<double> abar(vbar.empty() ? std::vector<double>(nout, 0.0)
                                          : std::vector<double>(vbar.begin(), vbar.end()));
    std::vector<double> jabar(use_j ? std::vector<double>(jbar.begin(), jbar.end())
                                    : std::vector<double>(static_cast<size_t>(nout) * ndir, 0.0));
    std::vector<double> habar(use_h ? std::vector<double>(hbar.begin(), hbar.end())
                                    : std::vector<double>(static_cast<size_t>(nout) * nd2, 0.0));
    const bool track_j = ev.order >= 1;
    const bool track_h = ev.order >= 2;

    std::vector<double> zbar, jzbar, hzbar, abar_prev, jabar_prev, habar_prev;

    for (int l = nl - 1; l >= 0; --l) {
        const Mat& w = net.weights[l];
        const int rows = w.rows;
        const int cols = w.cols;
        const Activation act = net.layer_activation(l);

        // activation backward: (abar, jabar, habar) -> (zbar, jzbar, hzbar)
        zbar.assign(rows, 0.0);
        if (track_j) jzbar.assign(static_cast<size_t>(rows) * ndir, 0.0);
        if (track_h) hzbar.assign(static_cast<size_t>(rows) * nd2, 0.0);
        const auto& z = ev.z[l];
        for (int i = 0; i < rows; ++i) {
            const ActDerivs ad = act_eval(act, z[i]);
            double zb = abar[i] * ad.d1;
            if (track_j) {
                const double* jzi = &ev.jz[l][static_cast<size_t>(i) * ndir];
                const double* jab = &jabar[static_cast<size_t>(i) * ndir];
                double* jzb = &jzbar[static_cast<size_t>(i) * ndir];
                for (int d = 0; d < ndir; ++d) {
                    zb += jab[d] * ad.d2 * jzi[d];
                    jzb[d] += jab[d] * ad.d1;
                }
                if (track_h) {
                    const double* hzi = &ev.hz[l][static_cast<size_t>(i) * nd2];
                    const double* hab = &habar[static_cast<size_t>(i) * nd2];
                    double* hzb = &hzbar[static_cast<size_t>(i) * nd2];
                    for (int d1 = 0; d1 < ndir; ++d1) {
                        for (int d2 = 0; d2 < ndir; ++d2) {
                            const double hb = hab[d1 * ndir + d2];
                            zb += hb * (ad.d3 * jzi[d1] * jzi[d2] + ad.d2 * hzi[d1 * ndir + d2]);
                            jzb[d1] += hb * ad.d2 * jzi[d2];
                            jzb[d2] += hb * ad.d2 * jzi[d1];
                            hzb[d1 * ndir + d2] += hb * ad.d1;
                        }
                    }
                }
            }
            zbar[i] = zb;
        }

        // affine backward: accumulate parameter gradients, push adjoints to
        // the previous layer's post-activations (or the input).
        const double* ain = l == 0 ? ev.x.data() : ev.a[l - 1].data();
        const double* jain = track_j ? (l == 0 ? ev.jx.data() : ev.ja[l - 1].data()) : nullptr;
        const double* hain = (track_h && l > 0) ? ev.ha[l - 1].data() : nullptr;

        Mat& dw = grad.dw[l];
        auto& db = grad.db[l];
        for (int i = 0; i < rows; ++i) {
            const double zb = zbar[i];
            db[i] += zb;
            double* dwrow = &dw.data[static_cast<size_t>(i) * cols];
            for (int j = 0; j < cols; ++j) dwrow[j] += zb * ain[j];
            if (track_j) {
                const double* jzb = &jzbar[static_cast<size_t>(i) * ndir];
                for (int j = 0; j < cols; ++j) {
                    const double* jrow = &jain[static_cast<size_t>(j) * ndir];
                    double acc = 0.0;
                    for (int d = 0; d < ndir; ++d) acc += jzb[d] * jrow[d];
                    dwrow[j] += acc;
                }
            }
            if (track_h && hain != nullptr) {
                const double* hzb = &hzbar[static_cast<size_t>(i) * nd2];
                for (int j = 0; j < cols; ++j) {
                    const double* hrow = &hain[static_cast<size_t>(j) * nd2];
                    double acc = 0.0;
                    for (int d = 0; d < nd2; ++d) acc += hzb[d] * hrow[d];
                    dwrow[j] += acc;
                }
            }
        }

        if (l == 0) {
            if (input_bar != nullptr) {
                input_bar->resize(cols, 0.0);
                for (int i = 0; i < rows; ++i) {
                    const double zb = zbar[i];
                    const double* wrow = &w.data[static_cast<size_t>(i) * cols];
                    for (int j = 0; j < cols; ++j) (*input_bar)[j] += wrow[j] * zb;
                }
            }
            break;
        }

        abar_prev.assign(cols, 0.0);
        if (track_j) jabar_prev.assign(static_cast<size_t>(cols) * ndir, 0.0);
        if (track_h) habar_prev.assign(static_cast<size_t>(cols) * nd2, 0.0);
        for (int i = 0; i < rows; ++i) {
            const double* wrow = &w.data[static_cast<size_t>(i) * cols];
            const double zb = zbar[i];
            for (int j = 0; j < cols; ++j) abar_prev[j] += wrow[j] * zb;
            if (track_j) {
                const double* jzb = &jzbar[static_cast<size_t>(i) * ndir];
                for (int j = 0; j < cols; ++j) {
                    const double wij = wrow[j];
                    double* dst = &jabar_prev[static_cast<size_t>(j) * ndir];
                    for (int d = 0; d < ndir; ++d) dst[d] += wij * jzb[d];
                }
            }
            if (track_h) {
                const double* hzb = &hzbar[static_cast<size_t>(i) * nd2];
                for (int j = 0; j < cols; ++j) {
                    const double wij = wrow[j];
                    double* dst = &habar_prev[static_cast<size_t>(j) * nd2];
                    for (int d = 0; d < nd2; ++d) dst[d] += wij * hzb[d];
                }
            }
        }
        abar.swap(abar_prev);
        if (track_j) jabar.swap(jabar_prev);
        if (track_h) habar.swap(habar_prev);
    }
}

namespace {
std::vector<double> identity_dirs(int n) {
    std::vector<double> dirs(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) dirs[static_cast<size_t>(i) * n + i] = 1.0;
    return dirs;
}
}  // namespace

Mat spatial_jacobian(const Mlp& net, std::span<const double> x) {
    const int n = net.spec.input_dim;
    const auto dirs = identity_dirs(n);
    const MlpEval ev = mlp_eval(net, x, dirs, n, 1);
    Mat jac(net.spec.output_dim, n);
    for (int k = 0; k < net.spec.output_dim; ++k)
        for (int d = 0; d < n; ++d) jac(k, d) = ev.jac(k, d);
    return jac;
}

std::vector<Mat> spatial_second_derivatives(const Mlp& net, std::span<const double> x) {
    const int n = net.spec.input_dim;
    const auto dirs = identity_dirs(n);
    const MlpEval ev = mlp_eval(net, x, dirs, n, 2);
    std::vector<Mat> hess;
    hess.reserve(net.spec.output_dim);
    for (int k = 0; k < net.spec.output_dim; ++k) {
        Mat h(n, n);
        for (int d1 = 0; d1 < n; ++d1)
            for (int d2 = 0; d2 < n; ++d2) h(d1, d2) = ev.hess(k, d1, d2);
        hess.push_back(std::move(h));
    }
    return hess;
}

double laplacian(const Mlp& net, std::span<const double> x, int out_index) {
    const int n = net.spec.input_dim;
    const auto dirs = identity_dirs(n);
    const MlpEval ev = mlp_eval(net, x, dirs, n, 2);
    return ev.laplacian(out_index);
}

}  // namespace phidon
