#pragma once

#include <array>
#include <cmath>

#include "phidon/physics.hpp"

namespace phidon {

struct Grid1D {
    int n = 201;  // nodes
    double lo = 0.0;
    double hi = 1.0;

    double h() const { return (hi - lo) / (n - 1); }
    // lerp form keeps the endpoints exact
    double node(int i) const { return std::lerp(lo, hi, static_cast<double>(i) / (n - 1)); }
};

/// Uniform square grid, n nodes per axis; node (i,j) = (x(i), x(j)).
struct Grid2D {
    int n = 101;
    double lo = 0.0;
    double hi = 1.0;

    double h() const { return (hi - lo) / (n - 1); }
    double x(int i) const { return std::lerp(lo, hi, static_cast<double>(i) / (n - 1)); }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n + j; }
};

/// Conservative flux-form solve of div(kappa s') = sigma_pde * u on the
/// grid, Dirichlet ends from the decomposition's segments. Face
/// coefficients are harmonic means of the two quarter-point values, which
/// stay one-sided when an interface sits on a node. Interfaces with value
/// jumps (scaled or not) must sit on nodes; such nodes carry a two-sided
/// closure (jump equation plus one-sided second-order flux matching) and
/// the returned vector holds the lower-side value there.
std::vector<double> solve_1d(const PdeProblem& problem, const ForcingFn& forcing,
                             const Grid1D& grid);

/// As solve_1d but also returns the upper-side values at jump-closure
/// nodes: pairs of (node index, s_plus).
std::vector<double> solve_1d_with_sides(const PdeProblem& problem, const ForcingFn& forcing,
                                        const Grid1D& grid,
                                        std::vector<std::pair<int, double>>* upper_sides);

/// 5-point flux-form solve of div(kappa grad s) = sigma_pde * u with
/// Dirichlet data on the full boundary; diagonally preconditioned CG to
/// relative residual 1e-12.
std::vector<double> solve_2d(const PdeProblem& problem, const ForcingFn& forcing,
                             const Grid2D& grid);

/// Interior stencil coefficients {center, west, east, south, north} of the
/// assembled 2D operator at node (i,j), h^2-scaled.
std::array<double, 5> stencil_2d(const PdeProblem& problem, const Grid2D& grid, int i, int j);

/// Harmonic mean of kappa at the quarter points of the segment a->b.
double face_kappa(const PdeProblem& problem, const Point& a, const Point& b);

/// Reference field for the petal benchmark: r^2 inside the curve,
/// 0.1 r^4 - 0.01 log(2r) outside. Throws for side 2 at the origin.
double petal_analytic(const Point& y, int side);

/// Forcing, jump and boundary data derived from petal_analytic so that the
/// PDE, interface and boundary residuals all vanish on the analytic field
/// with kappa = (4, 10).
struct PetalData {
    double kappa1 = 4.0;
    double kappa2 = 10.0;
    /// Parameters of the forcing family (p1, p2 r^2) matching the analytic
    /// field: both 16.
    double p1_star = 16.0;
    double p2_star = 16.0;
    ForcingFn forcing;
    std::function<double(const Point&)> jump_value;
    std::function<double(const Point&)> jump_flux;
    Trace1D boundary_trace;  // Dirichlet data along each square side
};

PetalData derived_petal_data();

}  // namespace phidon
