#include <cmath>

#include "doctest.h"
#include "phidon/grf.hpp"

using namespace phidon;

TEST_CASE("kernel_matrix: unit diagonal, hand-evaluated entries") {
    std::vector<Point> pts{{0.0}, {0.3}, {0.6}};
    const double ls = 0.3;
    const auto k = kernel_matrix(pts, ls);
    for (int i = 0; i < 3; ++i) CHECK(k(i, i) == 1.0);
    // |x_i - x_j| = ls -> exp(-1/2)
    CHECK(k(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(k(0, 1) == doctest::Approx(0.606531).epsilon(1e-6));
    // spacing 2*ls -> exp(-2)
    CHECK(k(0, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(k(1, 0) == k(0, 1));
}

TEST_CASE("kernel_matrix is invariant under point relabeling") {
    std::vector<Point> pts{{0.1, 0.2}, {0.8, 0.4}, {0.3, 0.9}, {0.5, 0.5}};
    std::vector<Point> perm{pts[2], pts[0], pts[3], pts[1]};
    const int map[4] = {2, 0, 3, 1};  // perm[i] = pts[map[i]]
    const auto ka = kernel_matrix(pts, 0.2);
    const auto kb = kernel_matrix(perm, 0.2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(kb(i, j) == ka(map[i], map[j]));
}

TEST_CASE("build_sampler factors the jittered kernel") {
    GrfConfig cfg;
    cfg.mean = 0.0;
    cfg.length_scale = 0.15;
    for (int i = 0; i < 30; ++i) cfg.sensor_points.push_back({i / 29.0});
    const auto sampler = build_sampler(cfg, 1e-8);
    const auto k = kernel_matrix(cfg.sensor_points, cfg.length_scale);
    const Eigen::MatrixXd recon = sampler.chol * sampler.chol.transpose();
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) {
            const double want = k(i, j) + (i == j ? 1e-8 : 0.0);
            CHECK(std::abs(recon(i, j) - want) < 1e-10);
        }
}

TEST_CASE("build_sampler reports conditioning failures with a jitter hint") {
    GrfConfig cfg;
    cfg.length_scale = 10.0;  // nearly rank-one kernel
    for (int i = 0; i < 40; ++i) cfg.sensor_points.push_back({i * 1e-6});
    try {
        (void)build_sampler(cfg, 0.0);
        FAIL("expected failure");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("jitter") != std::string::npos);
    }
    CHECK_NOTHROW(build_sampler(cfg, 1e-6));
}

TEST_CASE("config validation") {
    GrfConfig cfg;
    cfg.length_scale = -1.0;
    cfg.sensor_points = {{0.0}};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.length_scale = 0.2;
    cfg.sensor_points = {{0.1}, {0.1}};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.sensor_points.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("samples: determinism, mean and variance") {
    GrfConfig cfg;
    cfg.mean = 1.0;
    cfg.length_scale = 0.2;
    cfg.sensor_points = {{0.25}};
    const auto sampler = build_sampler(cfg);

    const auto a = grf_sample(sampler, 7, 5);
    const auto b = grf_sample(sampler, 7, 5);
    CHECK(a == b);
    // sample i depends only on (seed, i)
    const auto c = grf_sample(sampler, 7, 2);
    CHECK(c[1] == a[1]);

    const int n = 10000;
    const auto draws = grf_sample(sampler, 123, n);
    double mean = 0.0, var = 0.0;
    for (const auto& d : draws) mean += d[0];
    mean /= n;
    for (const auto& d : draws) var += (d[0] - mean) * (d[0] - mean);
    var /= n - 1;
    CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
    CHECK(var > 0.94);
    CHECK(var < 1.06);
}

TEST_CASE("empirical covariance matches the kernel") {
    GrfConfig cfg;
    cfg.mean = 1.0;
    cfg.length_scale = 0.2;
    for (int i = 0; i < 20; ++i) cfg.sensor_points.push_back({i / 19.0});
    const auto sampler = build_sampler(cfg);
    const int n = 5000;
    const auto draws = grf_sample(sampler, 99, n);

    std::vector<double> mean(20, 0.0);
    for (const auto& d : draws)
        for (int i = 0; i < 20; ++i) mean[i] += d[i];
    for (double& m : mean) m /= n;
    const auto k = kernel_matrix(cfg.sensor_points, cfg.length_scale);
    for (int i = 0; i < 20; ++i) {
        CHECK(std::abs(mean[i] - 1.0) < 0.05);
        for (int j = i; j < 20; ++j) {
            double cov = 0.0;
            for (const auto& d : draws) cov += (d[i] - mean[i]) * (d[j] - mean[j]);
            cov /= n - 1;
            CHECK(std::abs(cov - k(i, j)) < 0.05);
        }
    }
}

TEST_CASE("tensor-grid sampler reproduces the 2D kernel statistics") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 5; ++i) {
        xs.push_back(i / 4.0);
        ys.push_back(i / 4.0);
    }
    const auto sampler = build_grid_sampler(xs, ys, 0.3, 1.0);
    const auto a = grid_sample(sampler, 5, 0);
    const auto b = grid_sample(sampler, 5, 0);
    CHECK(a == b);

    const int n = 5000;
    std::vector<Eigen::MatrixXd> draws;
    draws.reserve(n);
    for (int i = 0; i < n; ++i) draws.push_back(grid_sample(sampler, 11, i));

    auto cov = [&](int i1, int j1, int i2, int j2) {
        double m1 = 0.0, m2 = 0.0;
        for (const auto& d : draws) {
            m1 += d(i1, j1);
            m2 += d(i2, j2);
        }
        m1 /= n;
        m2 /= n;
        double c = 0.0;
        for (const auto& d : draws) c += (d(i1, j1) - m1) * (d(i2, j2) - m2);
        return c / (n - 1);
    };
    auto kern = [&](int i1, int j1, int i2, int j2) {
        const double dx = xs[i1] - xs[i2];
        const double dy = ys[j1] - ys[j2];
        return std::exp(-(dx * dx + dy * dy) / (2 * 0.3 * 0.3));
    };
    CHECK(std::abs(cov(0, 0, 0, 0) - 1.0) < 0.06);
    CHECK(std::abs(cov(1, 1, 3, 2) - kern(1, 1, 3, 2)) < 0.06);
    CHECK(std::abs(cov(0, 2, 4, 4) - kern(0, 2, 4, 4)) < 0.06);
    CHECK(std::abs(cov(2, 2, 2, 3) - kern(2, 2, 2, 3)) < 0.06);
}
