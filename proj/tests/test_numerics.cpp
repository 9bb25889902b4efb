#include "hetcap/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hetcap;

namespace {

Density2D std_gaussian(int points = 256, double var_x = 1.0, double var_y = 1.0,
                       double mean_x = 0.0, double mean_y = 0.0) {
    const Grid2D grid = outcome_grid(mean_x, mean_y, var_x, var_y, points);
    return gaussian_density(grid, mean_x, mean_y, var_x, var_y);
}

} // namespace

TEST_CASE("grid construction rejects bad parameters") {
    CHECK_THROWS_AS(Grid1D(0.0, -1.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 8), std::invalid_argument);
    const Grid1D g(0.0, 2.0, 17);
    CHECK(g.step() == doctest::Approx(0.25));
    CHECK(g.point(0) == doctest::Approx(-2.0));
    CHECK(g.point(16) == doctest::Approx(2.0));
}

TEST_CASE("integrate_2d: normalized constant") {
    const Grid2D grid{Grid1D(0.0, 1.0, 33), Grid1D(0.5, 1.5, 65)};
    const double area = 2.0 * 3.0;
    const Density2D d(grid, Eigen::ArrayXXd::Constant(33, 65, 1.0 / area));
    CHECK(integrate_2d(d) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("integrate_2d: standard Gaussian mass and moments") {
    const Density2D d = std_gaussian(256);
    CHECK(std::abs(integrate_2d(d) - 1.0) < 1e-6);

    // second x-moment of a diag(1, 0.5) Gaussian equals the closed form
    const Density2D g = std_gaussian(256, 1.0, 0.5);
    const Eigen::ArrayXd wx = g.grid().gx.quad_weights();
    const Eigen::ArrayXd wy = g.grid().gy.quad_weights();
    const Eigen::ArrayXd xs = g.grid().gx.coords();
    const double mx2 =
        ((wx * xs.square()).matrix().transpose() * g.values().matrix() * wy.matrix())(0);
    CHECK(mx2 == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("differential_entropy: Gaussian and uniform closed forms") {
    CHECK(differential_entropy(std_gaussian(256)) ==
          doctest::Approx(std::log(2.0 * M_PI * M_E)).epsilon(1e-4));
    CHECK(differential_entropy(std_gaussian(256, 1.0, 0.25)) ==
          doctest::Approx(std::log(2.0 * M_PI * M_E * 0.5)).epsilon(1e-4));

    const Grid2D grid{Grid1D(0.0, 1.0, 33), Grid1D(0.0, 2.0, 33)};
    const double area = 2.0 * 4.0;
    const Density2D u(grid, Eigen::ArrayXXd::Constant(33, 33, 1.0 / area));
    CHECK(differential_entropy(u) == doctest::Approx(std::log(area)).epsilon(1e-12));
}

TEST_CASE("kl_divergence: closed forms and support handling") {
    const Density2D p = std_gaussian(256);
    CHECK(kl_divergence(p, p) == doctest::Approx(0.0).epsilon(1e-12));

    // mean offset (1, 0): KL = |mu|^2 / 2
    const Grid2D grid = outcome_grid(0.5, 0.0, 1.3, 1.0, 256); // covers both
    const Density2D a = gaussian_density(grid, 0.0, 0.0, 1.0, 1.0);
    const Density2D b = gaussian_density(grid, 1.0, 0.0, 1.0, 1.0);
    CHECK(kl_divergence(a, b) == doctest::Approx(0.5).epsilon(1e-4));

    // diag(2,2) vs diag(1,1): 1 - ln 2
    const Grid2D wide = outcome_grid(0.0, 0.0, 2.0, 2.0, 256);
    const Density2D p2 = gaussian_density(wide, 0.0, 0.0, 2.0, 2.0);
    const Density2D q2 = gaussian_density(wide, 0.0, 0.0, 1.0, 1.0);
    CHECK(kl_divergence(p2, q2) == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-4));

    // support of p escaping the support floor of q must throw
    const Grid2D g3 = outcome_grid(0.0, 0.0, 1.0, 1.0, 256);
    const Density2D broad = gaussian_density(g3, 0.0, 0.0, 1.0, 1.0);
    const Density2D narrow = gaussian_density(g3, 0.0, 0.0, 1e-4, 1.0);
    CHECK_THROWS_AS(kl_divergence(broad, narrow), std::domain_error);

    KlStats stats;
    kl_divergence(a, b, &stats);
    CHECK(stats.clamped_pmass <= 1e-9);
}

TEST_CASE("kl_divergence nonnegativity over random Gaussian pairs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mean(-1.0, 1.0);
    std::uniform_real_distribution<double> var(0.5, 2.0);
    const Grid2D grid{Grid1D(0.0, 14.0, 128), Grid1D(0.0, 14.0, 128)};
    for (int i = 0; i < 25; ++i) {
        const double mx = mean(rng), my = mean(rng), vx = var(rng), vy = var(rng);
        const Density2D p = gaussian_density(grid, mx, my, vx, vy);
        const Density2D q = gaussian_density(grid, mean(rng), mean(rng), var(rng), var(rng));
        CHECK(kl_divergence(p, q) >= -1e-8);
        // zero only for pointwise-equal densities: a visibly different pair
        // stays strictly positive
        if ((q.values() - p.values()).abs().maxCoeff() > 1e-6)
            CHECK(kl_divergence(p, q) > 1e-8);
    }
}

TEST_CASE("smooth_y: variance additivity for a near-delta slice") {
    // x: unit Gaussian; y: sigma^2 = 1e-4 needs a fine axis
    const Grid2D grid{Grid1D(0.0, 8.0, 64), Grid1D(0.0, 9.0, 4097)};
    const Density2D p = gaussian_density(grid, 0.0, 0.0, 1.0, 1e-4);
    double ratio = 0.0;
    const Density2D s = smooth_y(p, 1.0, &ratio);
    CHECK(std::abs(ratio - 1.0) < 1e-6);
    const Eigen::ArrayXd wx = grid.gx.quad_weights();
    const Eigen::ArrayXd wy = grid.gy.quad_weights();
    const Eigen::ArrayXd ys = grid.gy.coords();
    const double my2 =
        (wx.matrix().transpose() * s.values().matrix() * (wy * ys.square()).matrix())(0);
    CHECK(my2 == doctest::Approx(1.0001).epsilon(1e-3));
}

TEST_CASE("smooth_y: identity limit as t -> 0") {
    const Density2D p = std_gaussian(128);
    const Density2D s = smooth_y(p, 1e-8);
    CHECK((s.values() - p.values()).abs().maxCoeff() < 1e-6);
}

TEST_CASE("smooth_y: divergence monotonicity, semigroup, entropy growth") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mean(-1.0, 1.0);
    std::uniform_real_distribution<double> var(0.5, 1.5);
    const Grid2D grid{Grid1D(0.0, 12.0, 128), Grid1D(0.0, 16.0, 256)};
    for (int i = 0; i < 10; ++i) {
        const Density2D p = gaussian_density(grid, mean(rng), mean(rng), var(rng), var(rng));
        const Density2D q = gaussian_density(grid, mean(rng), mean(rng), var(rng), var(rng));
        CHECK(kl_divergence(smooth_y(p, 0.5), smooth_y(q, 0.5)) <=
              kl_divergence(p, q) + 1e-8);
        CHECK(differential_entropy(smooth_y(p, 0.5)) >= differential_entropy(p) - 1e-8);
    }
    const Density2D p = gaussian_density(grid, 0.3, -0.2, 1.0, 1.0);
    const Density2D two_step = smooth_y(smooth_y(p, 0.3), 0.5);
    const Density2D one_step = smooth_y(p, 0.8);
    CHECK((two_step.values() - one_step.values()).abs().maxCoeff() < 1e-6);
}

TEST_CASE("smooth_y conserves mass on covering grids") {
    const Density2D p = std_gaussian(192);
    double ratio = 0.0;
    smooth_y(p, 0.25, &ratio);
    CHECK(std::abs(ratio - 1.0) < 1e-6);
}

TEST_CASE("Density2D rejects negative values") {
    const Grid2D grid{Grid1D(0.0, 1.0, 16), Grid1D(0.0, 1.0, 16)};
    Eigen::ArrayXXd v = Eigen::ArrayXXd::Constant(16, 16, 1.0);
    v(3, 3) = -1.0;
    CHECK_THROWS_AS(Density2D(grid, v), std::invalid_argument);
}
