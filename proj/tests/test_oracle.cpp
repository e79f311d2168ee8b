#include <cmath>

#include "doctest.h"
#include "phidon/oracle.hpp"
#include "phidon/rng.hpp"

using namespace phidon;

namespace {

constexpr double kPi = 3.14159265358979323846;

double max_err(const std::vector<double>& got, const std::vector<double>& want) {
    double e = 0.0;
    for (size_t i = 0; i < got.size(); ++i) e = std::max(e, std::abs(got[i] - want[i]));
    return e;
}

/// least-squares slope of log2(err) against log2(h)
double observed_order(const std::vector<double>& hs, const std::vector<double>& errs) {
    const int n = static_cast<int>(hs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = std::log2(hs[i]);
        const double y = std::log2(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("solve_1d: uniform Poisson is exact for quadratic solutions") {
    const auto dec = make_interval_decomposition({0.5}, 0.0, 1.0);
    PdeProblem p;
    p.dec = &dec;
    p.kappa = {1.0, 1.0};
    const Grid1D grid{101, 0.0, 1.0};
    const auto s = solve_1d(p, [](int, const Point&) { return 2.0; }, grid);
    std::vector<double> want(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double y = grid.node(i);
        want[i] = y * y - y;
    }
    CHECK(max_err(s, want) < 1e-10);
    CHECK(s[50] == doctest::Approx(-0.25).epsilon(1e-10));
}

TEST_CASE("solve_1d: B1 piecewise closed form is reproduced to round-off") {
    const auto dec = make_interval_decomposition({0.5}, 0.0, 1.0);
    PdeProblem p;
    p.dec = &dec;
    p.kappa = {5.0, 0.1};

    // closed form for div(kappa s') = 1, s(0)=s(1)=0, flux continuity at 0.5:
    // s1 = x^2/(2 k1) + a x, s2 = (x-1)^2/(2 k2) + b (x-1)
    const double k1 = 5.0, k2 = 0.1, z = 0.5;
    // k1 a - k2 b = -1 and value continuity at z
    const double rhs1 = -1.0;
    const double rhs2 = (z - 1) * (z - 1) / (2 * k2) - z * z / (2 * k1);
    // [k1, -k2; z, -(z-1)] [a; b] = [rhs1; rhs2]
    const double det = k1 * (-(z - 1)) - (-k2) * z;
    const double a = (rhs1 * (-(z - 1)) - (-k2) * rhs2) / det;
    const double b = (k1 * rhs2 - rhs1 * z) / det;
    auto closed = [&](double x) {
        return x <= z ? x * x / (2 * k1) + a * x : (x - 1) * (x - 1) / (2 * k2) + b * (x - 1);
    };

    for (const int n : {51, 101, 201}) {
        const Grid1D grid{n, 0.0, 1.0};
        const auto s = solve_1d(p, [](int, const Point&) { return 1.0; }, grid);
        std::vector<double> want(n);
        for (int i = 0; i < n; ++i) want[i] = closed(grid.node(i));
        CHECK(max_err(s, want) < 1e-10);
    }
}

TEST_CASE("solve_1d: second order on a manufactured quartic with the B1 coefficients") {
    // continuous flux F(x) = x^3 - 0.6 x^2 + 0.25 x - 0.1, u = F'
    const double k1 = 5.0, k2 = 0.1, z = 0.5;
    auto prim = [](double x) {
        return x * x * x * x / 4 - 0.2 * x * x * x + 0.125 * x * x - 0.1 * x;
    };
    auto s_exact = [&](double x) {
        if (x <= z) return prim(x) / k1;
        return prim(z) / k1 + (prim(x) - prim(z)) / k2;
    };
    const auto dec = make_interval_decomposition({z}, 0.0, 1.0, 0.0, s_exact(1.0));
    PdeProblem p;
    p.dec = &dec;
    p.kappa = {k1, k2};
    const auto forcing = [](int, const Point& y) {
        const double x = y[0];
        return 3 * x * x - 1.2 * x + 0.25;
    };

    std::vector<double> hs, errs;
    for (const int n : {51, 101, 201}) {
        const Grid1D grid{n, 0.0, 1.0};
        const auto s = solve_1d(p, forcing, grid);
        std::vector<double> want(n);
        for (int i = 0; i < n; ++i) want[i] = s_exact(grid.node(i));
        hs.push_back(grid.h());
        errs.push_back(max_err(s, want));
    }
    CHECK(errs[2] < errs[0]);
    CHECK(observed_order(hs, errs) >= 1.8);
}

TEST_CASE("solve_1d: Henry jump closure recovers manufactured solutions") {
    const auto make_problem = [](const DomainDecomposition& dec) {
        PdeProblem p;
        p.dec = &dec;
        p.kappa = {2.0, 1.0};
        p.scaled_jump = true;
        p.henry = {1.0, 2.0};
        return p;
    };

    // homogeneous: s1 = y, s2 = 2y (flux 2 both sides, s/H continuous)
    {
        const auto dec = make_interval_decomposition({0.5}, 0.0, 1.0, 0.0, 2.0);
        PdeProblem p = make_problem(dec);
        const Grid1D grid{101, 0.0, 1.0};
        std::vector<std::pair<int, double>> upper;
        const auto s =
            solve_1d_with_sides(p, [](int, const Point&) { return 0.0; }, grid, &upper);
        for (int i = 0; i <= 50; ++i) CHECK(std::abs(s[i] - grid.node(i)) < 1e-11);
        for (int i = 51; i < grid.n; ++i) CHECK(std::abs(s[i] - 2 * grid.node(i)) < 1e-11);
        REQUIRE(upper.size() == 1);
        CHECK(upper[0].first == 50);
        CHECK(upper[0].second == doctest::Approx(1.0).epsilon(1e-11));
    }

    // inhomogeneous value jump: s1 = y, s2 = 2y + 0.3, jD = 0.15
    {
        const auto dec = make_interval_decomposition({0.5}, 0.0, 1.0, 0.0, 2.3);
        PdeProblem p = make_problem(dec);
        p.jump_value = [](const Point&) { return 0.15; };
        const Grid1D grid{101, 0.0, 1.0};
        const auto s = solve_1d(p, [](int, const Point&) { return 0.0; }, grid);
        for (int i = 0; i <= 50; ++i) CHECK(std::abs(s[i] - grid.node(i)) < 1e-11);
        for (int i = 51; i < grid.n; ++i)
            CHECK(std::abs(s[i] - (2 * grid.node(i) + 0.3)) < 1e-11);
    }

    // quadratic manufactured solution with forcing: s1 = y^2 + y, s2 = 2y^2 + 2y
    {
        const auto dec = make_interval_decomposition({0.5}, 0.0, 1.0, 0.0, 4.0);
        PdeProblem p = make_problem(dec);
        const Grid1D grid{201, 0.0, 1.0};
        const auto s = solve_1d(p, [](int, const Point&) { return 4.0; }, grid);
        for (int i = 0; i < grid.n; ++i) {
            const double y = grid.node(i);
            const double want = y <= 0.5 ? y * y + y : 2 * y * y + 2 * y;
            CHECK(std::abs(s[i] - want) < 1e-10);
        }
    }

    // misaligned interface is rejected
    {
        const auto dec = make_interval_decomposition({0.313}, 0.0, 1.0);
        PdeProblem p = make_problem(dec);
        const Grid1D grid{101, 0.0, 1.0};
        CHECK_THROWS_AS(solve_1d(p, [](int, const Point&) { return 0.0; }, grid),
                        std::invalid_argument);
    }
}

TEST_CASE("stencil_2d: uniform coefficients give the textbook 5-point operator") {
    const auto dec = make_diagonal_square();
    PdeProblem p;
    p.dec = &dec;
    p.kappa = {0.7, 0.7};
    const Grid2D grid{33, 0.0, 1.0};
    const double h2 = grid.h() * grid.h();
    for (const auto [i, j] : {std::pair{5, 5}, {10, 10}, {20, 3}, {7, 30}}) {
        const auto st = stencil_2d(p, grid, i, j);
        CHECK(st[0] == doctest::Approx(-4 * 0.7 / h2).epsilon(1e-14));
        for (int k = 1; k < 5; ++k) CHECK(st[k] == doctest::Approx(0.7 / h2).epsilon(1e-14));
    }
}

TEST_CASE("solve_2d: smooth uniform Poisson converges at second order") {
    const auto dec = make_diagonal_square();
    PdeProblem p;
    p.dec = &dec;
    p.kappa = {1.0, 1.0};
    const auto forcing = [](int, const Point& y) {
        return -2.0 * kPi * kPi * std::sin(kPi * y[0]) * std::sin(kPi * y[1]);
    };
    std::vector<double> hs, errs;
    for (const int n : {17, 33, 65}) {
        const Grid2D grid{n, 0.0, 1.0};
        const auto s = solve_2d(p, forcing, grid);
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double want = std::sin(kPi * grid.x(i)) * std::sin(kPi * grid.x(j));
                err = std::max(err, std::abs(s[grid.idx(i, j)] - want));
            }
        hs.push_back(grid.h());
        errs.push_back(err);
    }
    CHECK(errs[2] < 1e-3);
    CHECK(observed_order(hs, errs) >= 1.8);
}

TEST_CASE("solve_2d: manufactured diagonal-interface solution converges at order >= 1.5") {
    const auto dec = make_diagonal_square();
    const double k1 = 1.0, k2 = 0.2;
    PdeProblem p;
    p.dec = &dec;
    p.kappa = {k1, k2};
    // s_q = (y2 - y1) w / kappa_q with w = sin(pi y1) sin(pi y2):
    // value jump 0 (both sides vanish on the diagonal), flux continuous since
    // kappa_q grad s_q = grad((y2-y1) w) on the interface
    auto w = [](double a, double b) { return std::sin(kPi * a) * std::sin(kPi * b); };
    auto s_exact = [&](double a, double b) {
        const double k = b <= a ? k1 : k2;
        return (b - a) * w(a, b) / k;
    };
    const auto forcing = [&](int, const Point& y) {
        const double a = y[0], b = y[1];
        const double d1 = kPi * std::cos(kPi * a) * std::sin(kPi * b);
        const double d2 = kPi * std::sin(kPi * a) * std::cos(kPi * b);
        return (b - a) * (-2 * kPi * kPi * w(a, b)) + 2 * (d2 - d1);
    };

    std::vector<double> hs, errs;
    for (const int n : {33, 65, 129}) {
        const Grid2D grid{n, 0.0, 1.0};
        const auto s = solve_2d(p, forcing, grid);
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                err = std::max(err, std::abs(s[grid.idx(i, j)] - s_exact(grid.x(i), grid.x(j))));
        hs.push_back(grid.h());
        errs.push_back(err);
    }
    CHECK(errs[2] < errs[0]);
    CHECK(observed_order(hs, errs) >= 1.5);
}

TEST_CASE("petal_analytic: printed values and the log singularity") {
    CHECK(petal_analytic({1.0, 0.0}, 1) == 1.0);
    CHECK(petal_analytic({0.5, 0.0}, 2) == doctest::Approx(0.00625).epsilon(1e-12));
    CHECK_THROWS_AS(petal_analytic({0.0, 0.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(petal_analytic({0.5, 0.0}, 3), std::invalid_argument);
}

TEST_CASE("derived petal data is self-consistent with the analytic field") {
    const PetalData data = derived_petal_data();
    CHECK(data.forcing(1, {0.3, 0.1}) == 16.0);
    const Point y{0.8, -0.4};
    CHECK(data.forcing(2, y) ==
          doctest::Approx(16.0 * (y[0] * y[0] + y[1] * y[1])).epsilon(1e-14));

    // Laplacians of the analytic field, derived by hand and cross-checked
    // against second differences (which are roundoff-limited near 1e-7)
    Rng rng(55);
    auto lap_analytic = [](const Point& p, int side) {
        if (side == 1) return 4.0;
        return 1.6 * (p[0] * p[0] + p[1] * p[1]);
    };
    auto fd_lap = [](auto&& f, const Point& p, double h) {
        double acc = 0.0;
        for (int d = 0; d < 2; ++d) {
            Point pp = p, pm = p;
            pp[d] += h;
            pm[d] -= h;
            acc += (f(pp) - 2 * f(p) + f(pm)) / (h * h);
        }
        return acc;
    };
    for (int i = 0; i < 100; ++i) {
        // interior of the curve, away from the center offset
        const double r = rng.uniform(0.05, 0.25);
        const double th = rng.uniform(-kPi, kPi);
        const Point y1{0.0447 + r * std::cos(th), 0.0447 + r * std::sin(th)};
        const double fd1 =
            fd_lap([](const Point& p) { return petal_analytic(p, 1); }, y1, 1e-4);
        CHECK(std::abs(lap_analytic(y1, 1) - fd1) < 1e-6);
        CHECK(std::abs(data.kappa1 * lap_analytic(y1, 1) - data.forcing(1, y1)) < 1e-8);

        const double r2 = rng.uniform(0.8, 0.95);
        const Point y2{r2 * std::cos(th), r2 * std::sin(th)};
        const double fd2 =
            fd_lap([](const Point& p) { return petal_analytic(p, 2); }, y2, 1e-4);
        CHECK(std::abs(lap_analytic(y2, 2) - fd2) < 1e-6);
        CHECK(std::abs(data.kappa2 * lap_analytic(y2, 2) - data.forcing(2, y2)) < 1e-8);
    }

    // boundary trace equals the exterior field on the square sides
    for (int i = 0; i < 50; ++i) {
        const double t = rng.uniform(-1.0, 1.0);
        CHECK(data.boundary_trace.v(t) == doctest::Approx(petal_analytic({1.0, t}, 2)).epsilon(1e-14));
        CHECK(data.boundary_trace.v(t) == doctest::Approx(petal_analytic({t, -1.0}, 2)).epsilon(1e-14));
    }
}
