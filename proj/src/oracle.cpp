#include "phidon/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace phidon {

double face_kappa(const PdeProblem& problem, const Point& a, const Point& b) {
    const auto& dec = *problem.dec;
    Point pa(a.size()), pb(a.size());
    for (size_t c = 0; c < a.size(); ++c) {
        pa[c] = a[c] + 0.25 * (b[c] - a[c]);
        pb[c] = a[c] + 0.75 * (b[c] - a[c]);
    }
    const double ka = problem.kappa[subdomain_of(dec, pa) - 1];
    const double kb = problem.kappa[subdomain_of(dec, pb) - 1];
    return 2.0 * ka * kb / (ka + kb);
}

namespace {

/// One-sided forcing at a node; averages the two sides on interfaces
/// (the cell around an on-interface node straddles both subdomains).
double node_forcing(const PdeProblem& problem, const ForcingFn& forcing, const Point& y) {
    const auto& dec = *problem.dec;
    if (dec.interface_proximity && dec.interface_proximity(y) < 1e-12) {
        const int p = dec.membership(y);  // lower side by the tie-break rule
        int q = p + 1;
        for (const auto& iface : dec.interfaces)
            if (iface.p == p) q = iface.q;
        return 0.5 * (forcing(p, y) + forcing(q, y));
    }
    return forcing(subdomain_of(dec, y), y);
}

bool has_jump_closure(const PdeProblem& problem) {
    return problem.scaled_jump || problem.jump_value != nullptr || problem.jump_flux != nullptr;
}

}  // namespace

std::vector<double> solve_1d(const PdeProblem& problem, const ForcingFn& forcing,
                             const Grid1D& grid) {
    return solve_1d_with_sides(problem, forcing, grid, nullptr);
}

std::vector<double> solve_1d_with_sides(const PdeProblem& problem, const ForcingFn& forcing,
                                        const Grid1D& grid,
                                        std::vector<std::pair<int, double>>* upper_sides) {
    problem.validate();
    const auto& dec = *problem.dec;
    if (dec.dim != 1) throw std::invalid_argument("solve_1d: 1D problem required");
    const int n = grid.n;
    if (n < 3) throw std::invalid_argument("solve_1d: need at least 3 nodes");
    const double h = grid.h();
    const double h2 = h * h;

    const double g_lo = dec.dirichlet_segments.at(0).value({grid.lo});
    const double g_hi = dec.dirichlet_segments.at(1).value({grid.hi});

    // interface node bookkeeping
    struct Closure {
        int node = -1;
        int p = 0, q = 0;
        double beta = 0.0;
    };
    std::vector<Closure> closures;
    if (has_jump_closure(problem)) {
        for (const auto& iface : dec.interfaces) {
            const double beta = iface.at(0.0)[0];
            const double pos = (beta - grid.lo) / h;
            const int node = static_cast<int>(std::lround(pos));
            if (std::abs(pos - node) > 1e-9)
                throw std::invalid_argument(
                    "solve_1d: jump interfaces must coincide with grid nodes");
            if (node < 2 || node > n - 3)
                throw std::invalid_argument("solve_1d: interface too close to the boundary");
            closures.push_back({node, iface.p, iface.q, beta});
        }
    }

    auto face = [&](int i) {  // coefficient of the face between nodes i and i+1
        return face_kappa(problem, {grid.node(i)}, {grid.node(i + 1)});
    };

    if (closures.empty()) {
        // tridiagonal Thomas solve
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), rhs(n, 0.0);
        b[0] = 1.0;
        rhs[0] = g_lo;
        b[n - 1] = 1.0;
        rhs[n - 1] = g_hi;
        for (int i = 1; i < n - 1; ++i) {
            const double kw = face(i - 1);
            const double ke = face(i);
            a[i] = kw / h2;
            b[i] = -(kw + ke) / h2;
            c[i] = ke / h2;
            rhs[i] = problem.sigma_pde * node_forcing(problem, forcing, {grid.node(i)});
        }
        for (int i = 1; i < n; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        std::vector<double> s(n);
        s[n - 1] = rhs[n - 1] / b[n - 1];
        for (int i = n - 2; i >= 0; --i) s[i] = (rhs[i] - c[i] * s[i + 1]) / b[i];
        return s;
    }

    // dense solve with two-sided unknowns at jump interfaces: unknowns are
    // the n node values (lower side at closures) plus one upper-side value
    // per closure, appended in order.
    const int extra = static_cast<int>(closures.size());
    const int dim = n + extra;
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    std::vector<int> closure_at(n, -1);
    for (int ci = 0; ci < extra; ++ci) closure_at[closures[ci].node] = ci;

    // column of the value seen by the PDE row at node i approaching from
    // node `from`: the upper-side unknown when crossing a closure node
    auto col = [&](int i, int from) {
        const int ci = closure_at[i];
        if (ci >= 0 && from > i) return n + ci;
        return i;
    };

    mat(0, 0) = 1.0;
    rhs(0) = g_lo;
    mat(n - 1, n - 1) = 1.0;
    rhs(n - 1) = g_hi;
    for (int i = 1; i < n - 1; ++i) {
        const int ci = closure_at[i];
        if (ci >= 0) continue;  // replaced by the closure rows
        const double kw = face(i - 1);
        const double ke = face(i);
        mat(i, col(i - 1, i)) += kw / h2;
        mat(i, i) += -(kw + ke) / h2;
        mat(i, col(i + 1, i)) += ke / h2;
        rhs(i) = problem.sigma_pde * node_forcing(problem, forcing, {grid.node(i)});
    }

    for (int ci = 0; ci < extra; ++ci) {
        const Closure& cl = closures[ci];
        const int i = cl.node;
        const Point y{cl.beta};
        const double hp = problem.scaled_jump ? problem.henry[cl.p - 1] : 1.0;
        const double hq = problem.scaled_jump ? problem.henry[cl.q - 1] : 1.0;

        // value jump: s_plus/Hq - s_minus/Hp = jD
        mat(i, n + ci) = 1.0 / hq;
        mat(i, i) = -1.0 / hp;
        rhs(i) = problem.jd(y);

        // flux jump with second-order one-sided stencils:
        // kq * (-3 s_plus + 4 s_{i+1} - s_{i+2})/(2h)
        //   - kp * (3 s_minus - 4 s_{i-1} + s_{i-2})/(2h) = jN
        const double kp = problem.kappa[cl.p - 1];
        const double kq = problem.kappa[cl.q - 1];
        const int r = n + ci;
        mat(r, n + ci) += -3.0 * kq / (2.0 * h);
        mat(r, col(i + 1, i)) += 4.0 * kq / (2.0 * h);
        mat(r, col(i + 2, i)) += -1.0 * kq / (2.0 * h);
        mat(r, i) += -3.0 * kp / (2.0 * h);
        mat(r, col(i - 1, i)) += 4.0 * kp / (2.0 * h);
        mat(r, col(i - 2, i)) += -1.0 * kp / (2.0 * h);
        rhs(r) = problem.jn(y);
    }

    Eigen::VectorXd sol = mat.partialPivLu().solve(rhs);
    if (!sol.allFinite()) throw std::runtime_error("solve_1d: singular system");
    std::vector<double> s(sol.data(), sol.data() + n);
    if (upper_sides != nullptr) {
        upper_sides->clear();
        for (int ci = 0; ci < extra; ++ci)
            upper_sides->push_back({closures[ci].node, sol(n + ci)});
    }
    return s;
}

std::array<double, 5> stencil_2d(const PdeProblem& problem, const Grid2D& grid, int i, int j) {
    const double h2 = grid.h() * grid.h();
    const Point c{grid.x(i), grid.x(j)};
    const double kw = face_kappa(problem, c, {grid.x(i - 1), grid.x(j)});
    const double ke = face_kappa(problem, c, {grid.x(i + 1), grid.x(j)});
    const double ks = face_kappa(problem, c, {grid.x(i), grid.x(j - 1)});
    const double kn = face_kappa(problem, c, {grid.x(i), grid.x(j + 1)});
    return {-(kw + ke + ks + kn) / h2, kw / h2, ke / h2, ks / h2, kn / h2};
}

std::vector<double> solve_2d(const PdeProblem& problem, const ForcingFn& forcing,
                             const Grid2D& grid) {
    problem.validate();
    const auto& dec = *problem.dec;
    if (dec.dim != 2) throw std::invalid_argument("solve_2d: 2D problem required");
    if (has_jump_closure(problem))
        throw std::invalid_argument("solve_2d: value-jump interfaces are not supported");
    const int n = grid.n;
    const int ni = n - 2;  // interior nodes per axis
    const double h2 = grid.h() * grid.h();

    auto boundary_value = [&](const Point& y) {
        for (const auto& seg : dec.dirichlet_segments)
            if (seg.contains && seg.contains(y)) return seg.value(y);
        throw std::invalid_argument("solve_2d: boundary node without Dirichlet data");
    };

    // assemble interior stencils and right-hand side
    const std::size_t nn = static_cast<std::size_t>(ni) * ni;
    std::vector<std::array<double, 5>> st(nn);
    std::vector<double> rhs(nn), diag(nn);
    auto iidx = [&](int i, int j) { return static_cast<std::size_t>(i - 1) * ni + (j - 1); };
    for (int i = 1; i < n - 1; ++i) {
        for (int j = 1; j < n - 1; ++j) {
            const auto s = stencil_2d(problem, grid, i, j);
            const std::size_t k = iidx(i, j);
            st[k] = s;
            diag[k] = s[0];
            const Point y{grid.x(i), grid.x(j)};
            double r = problem.sigma_pde * node_forcing(problem, forcing, y);
            if (i == 1) r -= s[1] * boundary_value({grid.x(0), grid.x(j)});
            if (i == n - 2) r -= s[2] * boundary_value({grid.x(n - 1), grid.x(j)});
            if (j == 1) r -= s[3] * boundary_value({grid.x(i), grid.x(0)});
            if (j == n - 2) r -= s[4] * boundary_value({grid.x(i), grid.x(n - 1)});
            rhs[k] = r;
        }
    }

    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
        for (int i = 1; i < n - 1; ++i)
            for (int j = 1; j < n - 1; ++j) {
                const std::size_t k = iidx(i, j);
                double v = st[k][0] * x[k];
                if (i > 1) v += st[k][1] * x[iidx(i - 1, j)];
                if (i < n - 2) v += st[k][2] * x[iidx(i + 1, j)];
                if (j > 1) v += st[k][3] * x[iidx(i, j - 1)];
                if (j < n - 2) v += st[k][4] * x[iidx(i, j + 1)];
                out[k] = v;
            }
    };

    // Jacobi-preconditioned conjugate gradient (the operator is SPD up to
    // overall sign; stencils here are negative definite, so flip signs)
    std::vector<double> b(nn);
    for (std::size_t k = 0; k < nn; ++k) b[k] = -rhs[k];
    std::vector<double> x(nn, 0.0), r(nn), z(nn), p(nn), ap(nn);
    apply(x, ap);
    double bnorm = 0.0;
    for (std::size_t k = 0; k < nn; ++k) {
        r[k] = b[k] + ap[k];  // b - (-A)x
        bnorm += b[k] * b[k];
    }
    bnorm = std::sqrt(std::max(bnorm, 1e-300));
    for (std::size_t k = 0; k < nn; ++k) z[k] = r[k] / (-diag[k]);
    p = z;
    double rz = 0.0;
    for (std::size_t k = 0; k < nn; ++k) rz += r[k] * z[k];

    const int max_iter = 40 * n;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        double rnorm = 0.0;
        for (std::size_t k = 0; k < nn; ++k) rnorm += r[k] * r[k];
        if (std::sqrt(rnorm) <= 1e-12 * bnorm) {
            converged = true;
            break;
        }
        apply(p, ap);
        for (std::size_t k = 0; k < nn; ++k) ap[k] = -ap[k];
        double pap = 0.0;
        for (std::size_t k = 0; k < nn; ++k) pap += p[k] * ap[k];
        const double alpha = rz / pap;
        for (std::size_t k = 0; k < nn; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        for (std::size_t k = 0; k < nn; ++k) z[k] = r[k] / (-diag[k]);
        double rz_new = 0.0;
        for (std::size_t k = 0; k < nn; ++k) rz_new += r[k] * z[k];
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < nn; ++k) p[k] = z[k] + beta * p[k];
    }
    if (!converged) throw std::runtime_error("solve_2d: conjugate gradient did not converge");

    std::vector<double> full(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1)
                full[grid.idx(i, j)] = boundary_value({grid.x(i), grid.x(j)});
            else
                full[grid.idx(i, j)] = x[iidx(i, j)];
        }
    return full;
}

double petal_analytic(const Point& y, int side) {
    const double r2 = y[0] * y[0] + y[1] * y[1];
    if (side == 1) return r2;
    if (side == 2) {
        if (r2 <= 0.0)
            throw std::invalid_argument("petal_analytic: log singularity at the origin");
        return 0.1 * r2 * r2 - 0.01 * std::log(2.0 * std::sqrt(r2));
    }
    throw std::invalid_argument("petal_analytic: side must be 1 or 2");
}

PetalData derived_petal_data() {
    PetalData d;
    d.forcing = [](int q, const Point& y) {
        if (q == 1) return 16.0;
        const double r2 = y[0] * y[0] + y[1] * y[1];
        return 16.0 * r2;
    };
    d.jump_value = [](const Point& y) {
        return petal_analytic(y, 2) - petal_analytic(y, 1);
    };
    PetalCurve curve;
    d.jump_flux = [curve](const Point& y) {
        const double r2 = y[0] * y[0] + y[1] * y[1];
        const double theta = std::atan2(y[1] - curve.center, y[0] - curve.center);
        const auto n = petal_normal(curve, theta);
        const double yn = y[0] * n[0] + y[1] * n[1];
        // kappa2 grad(s2).n - kappa1 grad(s1).n on the curve
        return (4.0 * r2 - 0.1 / r2 - 2.0 * 4.0) * yn;
    };
    d.boundary_trace.v = [](double t) {
        const double r2 = 1.0 + t * t;
        return 0.1 * r2 * r2 - 0.01 * std::log(2.0 * std::sqrt(r2));
    };
    d.boundary_trace.d1 = [](double t) {
        const double r2 = 1.0 + t * t;
        return 0.4 * t * r2 - 0.01 * t / r2;
    };
    d.boundary_trace.d2 = [](double t) {
        const double r2 = 1.0 + t * t;
        return 0.4 * (1.0 + 3.0 * t * t) - 0.01 * (1.0 - t * t) / (r2 * r2);
    };
    return d;
}

}  // namespace phidon
