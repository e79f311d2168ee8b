#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "phidon/point.hpp"

namespace phidon {

struct OutOfDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Interface between two subdomains: a parametric point sampler plus the
/// unit normal pointing outward from the lower-index side p.
struct InterfaceSpec {
    int p = 0;
    int q = 0;
    double param_lo = 0.0;
    double param_hi = 1.0;
    std::function<Point(double)> at;
    std::function<std::vector<double>(const Point&)> normal;
};

/// Parametric boundary piece carrying Dirichlet data.
struct BoundarySegment {
    double param_lo = 0.0;
    double param_hi = 1.0;
    double length = 0.0;  // sampling weight; 0 for 1D endpoint "segments"
    std::function<Point(double)> at;
    std::function<double(const Point&)> value;    // Dirichlet data
    std::function<bool(const Point&)> contains;   // membership test (tolerance 1e-12)
};

/// Scalar field with closed-form gradient and Laplacian.
struct ScalarField {
    std::function<double(const Point&)> value;
    std::function<std::vector<double>(const Point&)> grad;
    std::function<double(const Point&)> lap;
};

/// Distance-type multiplier vanishing on the Dirichlet boundary plus a
/// smooth lift interpolating the Dirichlet data there.
struct HardConstraint {
    ScalarField lambda;
    ScalarField lift;
};

/// Star-shaped five-lobe curve: center c + (0.5 + 0.2 sin 5t)(cos t, sin t).
struct PetalCurve {
    double center = 0.0447213595499957939282;  // 0.02 * sqrt(5), both coords
    double base_radius = 0.5;
    double wobble = 0.2;
    int lobes = 5;

    double radius(double theta) const;
    double radius_deriv(double theta) const;
    Point at(double theta) const;
    std::vector<double> tangent(double theta) const;
};

/// Outward (from the interior subdomain) unit normal at curve parameter
/// theta, obtained by rotating the tangent by -90 degrees.
std::vector<double> petal_normal(const PetalCurve& curve, double theta);

struct DomainDecomposition {
    int dim = 1;
    int num_subdomains = 1;
    Point lo, hi;  // bounding box (the domain for interval/square shapes)

    /// 1-based subdomain index; points on an interface belong to the
    /// lower-index side. Must be total over the closed domain.
    std::function<int(const Point&)> membership;

    std::vector<InterfaceSpec> interfaces;
    std::vector<BoundarySegment> dirichlet_segments;
    HardConstraint hard;

    /// Distance proxy to the nearest interface, used to keep 2D PDE
    /// collocation points away from curvature in the true solution.
    std::function<double(const Point&)> interface_proximity;
};

int subdomain_of(const DomainDecomposition& dec, const Point& y);
std::vector<double> one_hot(const DomainDecomposition& dec, const Point& y);

struct SidedPoint {
    Point y;
    int p = 0;
    int q = 0;
    std::vector<double> normal;  // outward from p
};

struct CollocationSet {
    std::vector<Point> pde_points;
    std::vector<int> pde_side;  // subdomain of each PDE point
    std::vector<Point> bc_points;
    std::vector<int> bc_segment;
    std::vector<SidedPoint> interface_points;
};

/// Uniform interior PDE points (2D points closer than 1e-3 to an interface
/// are resampled), boundary points uniform over the Dirichlet segments and
/// interface points uniform in each interface's parameter. Deterministic
/// per seed.
CollocationSet sample_collocation(const DomainDecomposition& dec, int m, int b,
                                  int t_per_interface, std::uint64_t seed);

/// The decomposition's hard-constraint pair (lambda_s, H).
const HardConstraint& distance_and_lift(const DomainDecomposition& dec);

/// 1D trace with derivatives, used for boundary data on square domains.
struct Trace1D {
    std::function<double(double)> v, d1, d2;
};

// --- factories ---

/// [lo, hi] split by interior breakpoints; Dirichlet values at both ends.
DomainDecomposition make_interval_decomposition(std::vector<double> breakpoints, double lo,
                                                double hi, double value_lo = 0.0,
                                                double value_hi = 0.0);

/// Unit square split by the diagonal x2 = x1; homogeneous Dirichlet data on
/// all four sides. Subdomain 1 is {x2 <= x1}.
DomainDecomposition make_diagonal_square();

/// [-1,1]^2 with the petal curve as interface; the same trace function
/// supplies the Dirichlet data on all four sides (the benchmark's boundary
/// expression is symmetric in the coordinates).
DomainDecomposition make_petal_square(const Trace1D& side_trace);

}  // namespace phidon
