#include "phidon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phidon/rng.hpp"

namespace phidon {

namespace {
constexpr double kBoundsEps = 1e-12;
}

double PetalCurve::radius(double theta) const {
    return base_radius + wobble * std::sin(lobes * theta);
}

double PetalCurve::radius_deriv(double theta) const {
    return wobble * lobes * std::cos(lobes * theta);
}

Point PetalCurve::at(double theta) const {
    const double r = radius(theta);
    return {center + r * std::cos(theta), center + r * std::sin(theta)};
}

std::vector<double> PetalCurve::tangent(double theta) const {
    const double r = radius(theta);
    const double dr = radius_deriv(theta);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {dr * c - r * s, dr * s + r * c};
}

std::vector<double> petal_normal(const PetalCurve& curve, double theta) {
    const auto t = curve.tangent(theta);
    const double norm = std::hypot(t[0], t[1]);
    if (norm < 1e-14) throw std::runtime_error("petal_normal: zero tangent");
    // rotate the tangent by -90 degrees: outward for counterclockwise curves
    return {t[1] / norm, -t[0] / norm};
}

int subdomain_of(const DomainDecomposition& dec, const Point& y) {
    if (static_cast<int>(y.size()) != dec.dim)
        throw std::invalid_argument("subdomain_of: point dimension mismatch");
    for (int d = 0; d < dec.dim; ++d)
        if (y[d] < dec.lo[d] - kBoundsEps || y[d] > dec.hi[d] + kBoundsEps)
            throw OutOfDomainError("subdomain_of: point outside the domain");
    return dec.membership(y);
}

std::vector<double> one_hot(const DomainDecomposition& dec, const Point& y) {
    std::vector<double> e(dec.num_subdomains, 0.0);
    e[subdomain_of(dec, y) - 1] = 1.0;
    return e;
}

const HardConstraint& distance_and_lift(const DomainDecomposition& dec) { return dec.hard; }

CollocationSet sample_collocation(const DomainDecomposition& dec, int m, int b,
                                  int t_per_interface, std::uint64_t seed) {
    if (m <= 0 || b <= 0 || t_per_interface <= 0)
        throw std::invalid_argument("sample_collocation: counts must be positive");
    CollocationSet cs;

    Rng pde_rng(mix_seed(seed, 1));
    cs.pde_points.reserve(m);
    cs.pde_side.reserve(m);
    while (static_cast<int>(cs.pde_points.size()) < m) {
        Point y(dec.dim);
        for (int d = 0; d < dec.dim; ++d) y[d] = pde_rng.uniform(dec.lo[d], dec.hi[d]);
        const double band = dec.dim == 2 ? 1e-3 : 1e-9;
        if (dec.interface_proximity && dec.interface_proximity(y) < band) continue;
        cs.pde_points.push_back(y);
        cs.pde_side.push_back(subdomain_of(dec, y));
    }

    Rng bc_rng(mix_seed(seed, 2));
    const auto& segs = dec.dirichlet_segments;
    double total_len = 0.0;
    for (const auto& s : segs) total_len += s.length;
    for (int i = 0; i < b; ++i) {
        size_t si;
        if (total_len <= 0.0) {
            si = static_cast<size_t>(i) % segs.size();
        } else {
            double pick = bc_rng.uniform01() * total_len;
            si = 0;
            while (si + 1 < segs.size() && pick > segs[si].length) {
                pick -= segs[si].length;
                ++si;
            }
        }
        const auto& s = segs[si];
        const double t = s.param_lo + (s.param_hi - s.param_lo) * bc_rng.uniform01();
        cs.bc_points.push_back(s.at(t));
        cs.bc_segment.push_back(static_cast<int>(si));
    }

    Rng int_rng(mix_seed(seed, 3));
    for (const auto& iface : dec.interfaces) {
        for (int i = 0; i < t_per_interface; ++i) {
            const double t =
                iface.param_lo + (iface.param_hi - iface.param_lo) * int_rng.uniform01();
            SidedPoint sp;
            sp.y = iface.at(t);
            sp.p = iface.p;
            sp.q = iface.q;
            sp.normal = iface.normal(sp.y);
            cs.interface_points.push_back(std::move(sp));
        }
    }
    return cs;
}

DomainDecomposition make_interval_decomposition(std::vector<double> breakpoints, double lo,
                                                double hi, double value_lo, double value_hi) {
    std::sort(breakpoints.begin(), breakpoints.end());
    DomainDecomposition dec;
    dec.dim = 1;
    dec.num_subdomains = static_cast<int>(breakpoints.size()) + 1;
    dec.lo = {lo};
    dec.hi = {hi};

    auto breaks = breakpoints;  // captured copy
    dec.membership = [breaks](const Point& y) {
        int q = 1;
        for (const double beta : breaks)
            if (y[0] > beta) ++q;
        return q;
    };
    dec.interface_proximity = [breaks](const Point& y) {
        double d = std::numeric_limits<double>::infinity();
        for (const double beta : breaks) d = std::min(d, std::abs(y[0] - beta));
        return d;
    };

    for (size_t i = 0; i < breaks.size(); ++i) {
        InterfaceSpec s;
        s.p = static_cast<int>(i) + 1;
        s.q = static_cast<int>(i) + 2;
        const double beta = breaks[i];
        s.at = [beta](double) { return Point{beta}; };
        s.normal = [](const Point&) { return std::vector<double>{1.0}; };
        dec.interfaces.push_back(std::move(s));
    }

    for (int side = 0; side < 2; ++side) {
        BoundarySegment s;
        const double x = side == 0 ? lo : hi;
        const double g = side == 0 ? value_lo : value_hi;
        s.length = 0.0;
        s.at = [x](double) { return Point{x}; };
        s.value = [g](const Point&) { return g; };
        s.contains = [x](const Point& p) { return std::abs(p[0] - x) <= 1e-12; };
        dec.dirichlet_segments.push_back(std::move(s));
    }

    dec.hard.lambda.value = [lo, hi](const Point& y) { return (y[0] - lo) * (hi - y[0]); };
    dec.hard.lambda.grad = [lo, hi](const Point& y) {
        return std::vector<double>{lo + hi - 2.0 * y[0]};
    };
    dec.hard.lambda.lap = [](const Point&) { return -2.0; };
    const double slope = (value_hi - value_lo) / (hi - lo);
    dec.hard.lift.value = [lo, value_lo, slope](const Point& y) {
        return value_lo + slope * (y[0] - lo);
    };
    dec.hard.lift.grad = [slope](const Point&) { return std::vector<double>{slope}; };
    dec.hard.lift.lap = [](const Point&) { return 0.0; };
    return dec;
}

DomainDecomposition make_diagonal_square() {
    DomainDecomposition dec;
    dec.dim = 2;
    dec.num_subdomains = 2;
    dec.lo = {0.0, 0.0};
    dec.hi = {1.0, 1.0};

    dec.membership = [](const Point& y) { return y[1] <= y[0] ? 1 : 2; };
    dec.interface_proximity = [](const Point& y) {
        return std::abs(y[1] - y[0]) / std::sqrt(2.0);
    };

    InterfaceSpec s;
    s.p = 1;
    s.q = 2;
    s.at = [](double t) { return Point{t, t}; };
    s.normal = [](const Point&) {
        const double r = 1.0 / std::sqrt(2.0);
        return std::vector<double>{-r, r};
    };
    dec.interfaces.push_back(std::move(s));

    // sides: bottom, right, top, left — all homogeneous Dirichlet
    const auto zero = [](const Point&) { return 0.0; };
    auto add_side = [&](std::function<Point(double)> at, int axis, double coord) {
        BoundarySegment seg;
        seg.length = 1.0;
        seg.at = std::move(at);
        seg.value = zero;
        seg.contains = [axis, coord](const Point& p) {
            const int other = 1 - axis;
            return std::abs(p[axis] - coord) <= 1e-12 && p[other] >= -1e-12 &&
                   p[other] <= 1.0 + 1e-12;
        };
        dec.dirichlet_segments.push_back(std::move(seg));
    };
    add_side([](double t) { return Point{t, 0.0}; }, 1, 0.0);
    add_side([](double t) { return Point{1.0, t}; }, 0, 1.0);
    add_side([](double t) { return Point{t, 1.0}; }, 1, 1.0);
    add_side([](double t) { return Point{0.0, t}; }, 0, 0.0);

    dec.hard.lambda.value = [](const Point& y) {
        return y[0] * (1.0 - y[0]) * y[1] * (1.0 - y[1]);
    };
    dec.hard.lambda.grad = [](const Point& y) {
        return std::vector<double>{(1.0 - 2.0 * y[0]) * y[1] * (1.0 - y[1]),
                                   y[0] * (1.0 - y[0]) * (1.0 - 2.0 * y[1])};
    };
    dec.hard.lambda.lap = [](const Point& y) {
        return -2.0 * y[1] * (1.0 - y[1]) - 2.0 * y[0] * (1.0 - y[0]);
    };
    dec.hard.lift.value = [](const Point&) { return 0.0; };
    dec.hard.lift.grad = [](const Point&) { return std::vector<double>{0.0, 0.0}; };
    dec.hard.lift.lap = [](const Point&) { return 0.0; };
    return dec;
}

DomainDecomposition make_petal_square(const Trace1D& side_trace) {
    DomainDecomposition dec;
    dec.dim = 2;
    dec.num_subdomains = 2;
    dec.lo = {-1.0, -1.0};
    dec.hi = {1.0, 1.0};

    PetalCurve curve;
    dec.membership = [curve](const Point& y) {
        const double dx = y[0] - curve.center;
        const double dy = y[1] - curve.center;
        const double theta = std::atan2(dy, dx);
        return std::hypot(dx, dy) <= curve.radius(theta) ? 1 : 2;
    };
    dec.interface_proximity = [curve](const Point& y) {
        const double dx = y[0] - curve.center;
        const double dy = y[1] - curve.center;
        const double theta = std::atan2(dy, dx);
        return std::abs(std::hypot(dx, dy) - curve.radius(theta));
    };

    InterfaceSpec s;
    s.p = 1;
    s.q = 2;
    s.param_lo = -3.14159265358979323846;
    s.param_hi = 3.14159265358979323846;
    s.at = [curve](double theta) { return curve.at(theta); };
    s.normal = [curve](const Point& y) {
        const double theta = std::atan2(y[1] - curve.center, y[0] - curve.center);
        return petal_normal(curve, theta);
    };
    dec.interfaces.push_back(std::move(s));

    const auto psi = side_trace;
    auto add_side = [&](std::function<Point(double)> at, int axis, double coord) {
        BoundarySegment seg;
        seg.param_lo = -1.0;
        seg.param_hi = 1.0;
        seg.length = 2.0;
        seg.at = std::move(at);
        const int other = 1 - axis;
        seg.value = [psi, other](const Point& p) { return psi.v(p[other]); };
        seg.contains = [axis, coord](const Point& p) {
            const int o = 1 - axis;
            return std::abs(p[axis] - coord) <= 1e-12 && p[o] >= -1.0 - 1e-12 &&
                   p[o] <= 1.0 + 1e-12;
        };
        dec.dirichlet_segments.push_back(std::move(seg));
    };
    add_side([](double t) { return Point{t, -1.0}; }, 1, -1.0);
    add_side([](double t) { return Point{1.0, t}; }, 0, 1.0);
    add_side([](double t) { return Point{t, 1.0}; }, 1, 1.0);
    add_side([](double t) { return Point{-1.0, t}; }, 0, -1.0);

    dec.hard.lambda.value = [](const Point& y) {
        return (1.0 - y[0] * y[0]) * (1.0 - y[1] * y[1]);
    };
    dec.hard.lambda.grad = [](const Point& y) {
        return std::vector<double>{-2.0 * y[0] * (1.0 - y[1] * y[1]),
                                   -2.0 * y[1] * (1.0 - y[0] * y[0])};
    };
    dec.hard.lambda.lap = [](const Point& y) {
        return -2.0 * (1.0 - y[1] * y[1]) - 2.0 * (1.0 - y[0] * y[0]);
    };
    // all four side traces coincide, so the transfinite interpolant of the
    // boundary data collapses to psi(y1) + psi(y2) - psi(1)
    const double corner = psi.v(1.0);
    dec.hard.lift.value = [psi, corner](const Point& y) {
        return psi.v(y[0]) + psi.v(y[1]) - corner;
    };
    dec.hard.lift.grad = [psi](const Point& y) {
        return std::vector<double>{psi.d1(y[0]), psi.d1(y[1])};
    };
    dec.hard.lift.lap = [psi](const Point& y) { return psi.d2(y[0]) + psi.d2(y[1]); };
    return dec;
}

}  // namespace phidon
