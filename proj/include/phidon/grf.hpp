#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace phidon {

/// Spatial point, 1 or 2 coordinates.
using Point = std::vector<double>;

/// Gaussian process with squared-exponential covariance
/// k(x1,x2) = exp(-|x1-x2|^2 / (2 ls^2)) and constant mean.
struct GrfConfig {
    double mean = 0.0;
    double length_scale = 1.0;
    std::vector<Point> sensor_points;

    /// Throws std::invalid_argument on non-positive length scale, empty or
    /// duplicated sensor sets.
    void validate() const;
};

/// K[i][j] = exp(-|x_i-x_j|^2/(2 ls^2)); symmetric with unit diagonal.
Eigen::MatrixXd kernel_matrix(std::span<const Point> points, double length_scale);

struct GrfSampler {
    GrfConfig config;
    double jitter = 0.0;
    Eigen::MatrixXd chol;  // lower Cholesky factor of K + jitter*I
};

/// Default jitter 1e-8; throws std::runtime_error with a larger-jitter hint
/// if the factorization fails.
GrfSampler build_sampler(const GrfConfig& config, double jitter = 1e-8);

/// Draws `count` sample vectors u = mean + L z. Sample i depends only on
/// (seed, i): each uses its own Box-Muller stream, so subsets of a dataset
/// are stable under count changes.
std::vector<std::vector<double>> grf_sample(const GrfSampler& sampler, std::uint64_t seed,
                                            int count);

/// Tensor-product-grid sampler for 2D fields. The squared-exponential
/// kernel factorizes over coordinates, so the full-grid covariance is
/// Kx (x) Ky and a sample is u = mean + Lx Z Ly^T with Z iid standard
/// normal. Cost per draw is two small matrix products instead of a
/// Cholesky of the full grid.
struct GridSampler2D {
    std::vector<double> xs, ys;
    double mean = 0.0;
    Eigen::MatrixXd lx, ly;
};

GridSampler2D build_grid_sampler(std::vector<double> xs, std::vector<double> ys,
                                 double length_scale, double mean, double jitter = 1e-8);

/// One field draw on the grid; result(i,j) = u(xs[i], ys[j]).
Eigen::MatrixXd grid_sample(const GridSampler2D& sampler, std::uint64_t seed, int index);

}  // namespace phidon
