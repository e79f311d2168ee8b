#include "phidon/grf.hpp"

#include <cmath>
#include <stdexcept>

#include "phidon/rng.hpp"

namespace phidon {

void GrfConfig::validate() const {
    if (!(length_scale > 0.0))
        throw std::invalid_argument("GrfConfig: length_scale must be positive");
    if (sensor_points.empty())
        throw std::invalid_argument("GrfConfig: at least one sensor required");
    const size_t dim = sensor_points.front().size();
    for (const Point& p : sensor_points)
        if (p.size() != dim)
            throw std::invalid_argument("GrfConfig: inconsistent point dimensions");
    for (size_t i = 0; i < sensor_points.size(); ++i)
        for (size_t j = i + 1; j < sensor_points.size(); ++j) {
            double d2 = 0.0;
            for (size_t k = 0; k < dim; ++k) {
                const double d = sensor_points[i][k] - sensor_points[j][k];
                d2 += d * d;
            }
            if (d2 == 0.0)
                throw std::invalid_argument("GrfConfig: duplicate sensor points");
        }
}

Eigen::MatrixXd kernel_matrix(std::span<const Point> points, double length_scale) {
    const auto n = static_cast<Eigen::Index>(points.size());
    const double inv = 1.0 / (2.0 * length_scale * length_scale);
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (size_t c = 0; c < points[i].size(); ++c) {
                const double d = points[i][c] - points[j][c];
                d2 += d * d;
            }
            const double v = std::exp(-d2 * inv);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

namespace {
Eigen::MatrixXd cholesky_or_throw(const Eigen::MatrixXd& k, double jitter) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(kj);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "grf: Cholesky factorization failed; try a larger jitter");
    return llt.matrixL();
}
}  // namespace

GrfSampler build_sampler(const GrfConfig& config, double jitter) {
    config.validate();
    GrfSampler s;
    s.config = config;
    s.jitter = jitter;
    s.chol = cholesky_or_throw(kernel_matrix(config.sensor_points, config.length_scale), jitter);
    return s;
}

std::vector<std::vector<double>> grf_sample(const GrfSampler& sampler, std::uint64_t seed,
                                            int count) {
    const auto n = sampler.chol.rows();
    std::vector<std::vector<double>> out;
    out.reserve(count);
    Eigen::VectorXd z(n);
    for (int i = 0; i < count; ++i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        for (Eigen::Index j = 0; j < n; ++j) z(j) = rng.normal();
        Eigen::VectorXd u = sampler.chol.triangularView<Eigen::Lower>() * z;
        u.array() += sampler.config.mean;
        out.emplace_back(u.data(), u.data() + n);
    }
    return out;
}

GridSampler2D build_grid_sampler(std::vector<double> xs, std::vector<double> ys,
                                 double length_scale, double mean, double jitter) {
    if (!(length_scale > 0.0))
        throw std::invalid_argument("build_grid_sampler: length_scale must be positive");
    auto axis_kernel = [&](const std::vector<double>& t) {
        const auto n = static_cast<Eigen::Index>(t.size());
        const double inv = 1.0 / (2.0 * length_scale * length_scale);
        Eigen::MatrixXd k(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const double d = t[i] - t[j];
                k(i, j) = std::exp(-d * d * inv);
            }
        return k;
    };
    GridSampler2D s;
    s.lx = cholesky_or_throw(axis_kernel(xs), jitter);
    s.ly = cholesky_or_throw(axis_kernel(ys), jitter);
    s.xs = std::move(xs);
    s.ys = std::move(ys);
    s.mean = mean;
    return s;
}

Eigen::MatrixXd grid_sample(const GridSampler2D& sampler, std::uint64_t seed, int index) {
    const auto nx = sampler.lx.rows();
    const auto ny = sampler.ly.rows();
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(index)));
    Eigen::MatrixXd z(nx, ny);
    for (Eigen::Index i = 0; i < nx; ++i)
        for (Eigen::Index j = 0; j < ny; ++j) z(i, j) = rng.normal();
    Eigen::MatrixXd u = sampler.lx.triangularView<Eigen::Lower>() * z;
    u = u * sampler.ly.triangularView<Eigen::Lower>().transpose();
    u.array() += sampler.mean;
    return u;
}

}  // namespace phidon
