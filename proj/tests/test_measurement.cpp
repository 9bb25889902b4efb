#include "hetcap/measurement.hpp"

#include <doctest.h>

#include <cmath>

using namespace hetcap;

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

double simpson_cross_sum(const HusimiDensity& p, const HusimiDensity& q) {
    // independent quadrature route: composite Simpson instead of trapezoid
    const Grid2D& grid = p.density.grid();
    REQUIRE(grid.gx.points % 2 == 1);
    REQUIRE(grid.gy.points % 2 == 1);
    auto simpson_w = [](const Grid1D& g) {
        Eigen::ArrayXd w(g.points);
        for (int i = 0; i < g.points; ++i)
            w[i] = (i == 0 || i == g.points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        return (w * g.step() / 3.0).eval();
    };
    const Eigen::ArrayXd wx = simpson_w(grid.gx);
    const Eigen::ArrayXd wy = simpson_w(grid.gy);
    double acc = 0.0;
    for (int j = 0; j < grid.gy.points; ++j)
        for (int i = 0; i < grid.gx.points; ++i) {
            const double pi = p.density.values()(i, j);
            if (pi <= 0.0) continue;
            acc -= wx[i] * wy[j] * pi * std::log(std::max(q.density.values()(i, j), 1e-300));
        }
    return acc;
}

} // namespace

TEST_CASE("build_model: closed-form parameters and truncation") {
    CHECK_THROWS_AS(NoiseCovariance(0.5, 0.4), std::invalid_argument);

    const MeasurementModel vac = build_model(NoiseCovariance(0.5, 0.5));
    CHECK(vac.nbar == doctest::Approx(0.0));
    CHECK(vac.n_th() == 0);
    CHECK(vac.delta_beta == doctest::Approx(0.5));

    const MeasurementModel m = build_model(NoiseCovariance(0.5, 8.0));
    CHECK(m.nbar == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(m.delta_beta == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(1.0 - m.weights.sum() < 1e-10);

    const MeasurementModel t = build_model(NoiseCovariance(2.0, 2.0));
    CHECK(t.weights[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(t.weights[1] == doctest::Approx(0.24).epsilon(1e-12));

    // implied covariance reconstructs the noise powers
    double sum_q = 0.0, sum_p = 0.0, w = 1.0 / (m.nbar + 1.0);
    for (int n = 0; n < 4000; ++n) {
        sum_q += w * (2.0 * n + 1.0) * m.delta_beta;
        sum_p += w * (2.0 * n + 1.0) / (4.0 * m.delta_beta);
        w *= m.nbar / (m.nbar + 1.0);
    }
    CHECK(sum_q == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(sum_p == doctest::Approx(8.0).epsilon(1e-10));
}

TEST_CASE("husimi of the vacuum at symmetric noise") {
    const NoiseCovariance noise(0.5, 0.5);
    const MeasurementModel model = build_model(noise);
    const Grid1D g = state_grid(0.5);
    const PureEnsemble rho = PureEnsemble::pure(squeezed_coherent(0.5, 0.0, 0.0, g));
    const Grid2D grid = default_outcome_grid(noise, rho, 128);
    const HusimiDensity p = husimi(model, rho, grid);
    // density is exp(-(x^2+y^2)/2)/(2 pi)
    double worst = 0.0;
    for (int i = 0; i < grid.gx.points; ++i)
        for (int j = 0; j < grid.gy.points; ++j) {
            const double x = grid.gx.point(i);
            const double y = grid.gy.point(j);
            const double ref = std::exp(-0.5 * (x * x + y * y)) / (2.0 * M_PI);
            worst = std::max(worst, std::abs(p.density.values()(i, j) - ref));
        }
    CHECK(worst < 1e-6);
    CHECK(p.density.mass() == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("husimi matches the closed form for squeezed coherent states") {
    struct Setup {
        double bq, bp, delta, x0, y0;
    };
    for (const Setup& s : {Setup{0.5, 0.5, 0.5, 0.0, 0.0}, Setup{0.5, 8.0, 0.125, 0.0, 0.0},
                           Setup{0.5, 2.0, 0.3, 1.0, -0.8}, Setup{2.0, 0.5, 1.7, -0.6, 0.4}}) {
        const NoiseCovariance noise(s.bq, s.bp);
        const MeasurementModel model = build_model(noise);
        const Grid1D g = state_grid(s.delta, 0, std::abs(s.x0));
        const PureEnsemble rho =
            PureEnsemble::pure(squeezed_coherent(s.delta, s.x0, s.y0, g));
        const Grid2D grid = default_outcome_grid(noise, rho, 128);
        const HusimiDensity direct = husimi(model, rho, grid);
        const HusimiDensity closed =
            husimi_gaussian_closed_form(noise, s.delta, s.x0, s.y0, grid);
        CHECK((direct.density.values() - closed.density.values()).abs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("overlap route agrees with the kernel route") {
    {
        const NoiseCovariance noise(0.5, 2.0);
        const MeasurementModel model = build_model(noise, 1e-10);
        const Grid1D g = state_grid(0.5, 5, 0.0, 512);
        const PureEnsemble rho = PureEnsemble::pure(random_state(17, 6, 0.5, g));
        const Grid2D grid = default_outcome_grid(noise, rho, 64);
        const HusimiDensity a = husimi(model, rho, grid);
        const HusimiDensity b = husimi_overlap(model, rho, grid);
        CHECK((a.density.values() - b.density.values()).abs().maxCoeff() < 1e-7);
    }
    {
        // strongly thermal kernel: deep eigenmode truncation on one side only
        const NoiseCovariance noise(0.5, 8.0);
        const MeasurementModel model = build_model(noise, 1e-10);
        CHECK(model.n_th() > 30);
        const Grid1D g = state_grid(0.5, 3, 0.0, 512);
        const PureEnsemble rho = PureEnsemble::pure(random_state(18, 4, 0.5, g));
        const Grid2D grid = default_outcome_grid(noise, rho, 64);
        const HusimiDensity a = husimi(model, rho, grid);
        const HusimiDensity b = husimi_overlap(model, rho, grid);
        CHECK((a.density.values() - b.density.values()).abs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("outcome density is linear in the ensemble") {
    const NoiseCovariance noise(1.0, 1.0);
    const MeasurementModel model = build_model(noise);
    const Grid1D g = state_grid(0.5, 4);
    const WaveFunction a = random_state(21, 5, 0.5, g);
    const WaveFunction b = random_state(22, 3, 0.5, g);
    const PureEnsemble mix = PureEnsemble::mixture({{0.3, a}, {0.7, b}});
    const Grid2D grid = default_outcome_grid(noise, mix, 96);
    const HusimiDensity pm = husimi(model, mix, grid);
    const HusimiDensity pa = husimi(model, PureEnsemble::pure(a), grid);
    const HusimiDensity pb = husimi(model, PureEnsemble::pure(b), grid);
    const Eigen::ArrayXXd combo = 0.3 * pa.density.values() + 0.7 * pb.density.values();
    CHECK((pm.density.values() - combo).abs().maxCoeff() < 1e-12);
}

TEST_CASE("husimi translates with displaced states") {
    const NoiseCovariance noise(0.5, 2.0);
    const MeasurementModel model = build_model(noise);
    const Grid1D g = state_grid(0.5, 5, 2.0);
    const WaveFunction psi = random_state(23, 4, 0.5, g);
    const double dx = 1.25, dy = -0.75;
    const WaveFunction moved = displace(psi, dx, dy);

    const int pts = 96;
    const Grid2D base{Grid1D(0.0, 10.0, pts), Grid1D(0.0, 10.0, pts)};
    const Grid2D shifted{Grid1D(dx, 10.0, pts), Grid1D(dy, 10.0, pts)};
    const HusimiDensity p0 = husimi(model, PureEnsemble::pure(psi), base);
    const HusimiDensity p1 = husimi(model, PureEnsemble::pure(moved), shifted);
    CHECK((p0.density.values() - p1.density.values()).abs().maxCoeff() < 1e-8);
}

TEST_CASE("closed-form density peaks and marginals") {
    {
        const Grid2D grid = outcome_grid(0.0, 0.0, 1.0, 1.0, 129);
        const HusimiDensity p = husimi_gaussian_closed_form(NoiseCovariance(0.5, 0.5), 0.5,
                                                            0.0, 0.0, grid);
        CHECK(p.density.values().maxCoeff() ==
              doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-4));
    }
    {
        const NoiseCovariance noise(0.5, 8.0);
        const Grid2D grid = outcome_grid(0.0, 0.0, 0.625, 10.0, 129);
        const HusimiDensity p = husimi_gaussian_closed_form(noise, 0.125, 0.0, 0.0, grid);
        // peak value 1/(5 pi); the grid hits (0,0) exactly
        CHECK(p.density.values().maxCoeff() ==
              doctest::Approx(1.0 / (5.0 * M_PI)).epsilon(1e-12));
        // x-marginal variance beta_q + delta by quadrature
        const Eigen::ArrayXd wx = grid.gx.quad_weights();
        const Eigen::ArrayXd wy = grid.gy.quad_weights();
        const Eigen::ArrayXd xs = grid.gx.coords();
        const double mx2 = ((wx * xs.square()).matrix().transpose() *
                            p.density.values().matrix() * wy.matrix())(0);
        CHECK(mx2 == doctest::Approx(0.625).epsilon(1e-4));
    }
}

TEST_CASE("wehrl entropy: bound attainment and Fock excess") {
    {
        const NoiseCovariance noise(0.5, 0.5);
        const MeasurementModel model = build_model(noise);
        const Grid1D g = state_grid(0.5);
        const PureEnsemble rho = PureEnsemble::pure(squeezed_coherent(0.5, 0.0, 0.0, g));
        const double h = wehrl_entropy(model, rho, default_outcome_grid(noise, rho, 128));
        CHECK(h == doctest::Approx(std::log(2.0 * M_PI * M_E)).epsilon(1e-3));

        // the first Fock state sits exactly Euler's constant above the bound
        const PureEnsemble fock = PureEnsemble::pure(squeezed_fock(1, 0.5, g));
        const double h1 = wehrl_entropy(model, fock, default_outcome_grid(noise, fock, 256));
        CHECK(h1 - min_wehrl_bound(noise) == doctest::Approx(kEulerGamma).epsilon(1e-3));
    }
    {
        const NoiseCovariance noise(0.5, 8.0);
        const MeasurementModel model = build_model(noise);
        const Grid1D g = state_grid(0.125);
        const PureEnsemble rho = PureEnsemble::pure(squeezed_coherent(0.125, 0.0, 0.0, g));
        const double h = wehrl_entropy(model, rho, default_outcome_grid(noise, rho, 128));
        CHECK(h == doctest::Approx(std::log(5.0 * M_PI * M_E)).epsilon(1e-3));
        CHECK(min_wehrl_bound(noise) == doctest::Approx(std::log(5.0 * M_PI * M_E)));
    }
    CHECK(min_wehrl_bound(NoiseCovariance(1.0, 1.0)) ==
          doctest::Approx(std::log(3.0 * M_PI * M_E)));
}

TEST_CASE("cross entropy: Gibbs identity and independent quadrature") {
    const NoiseCovariance noise(0.5, 0.5);
    const MeasurementModel model = build_model(noise);
    const Grid1D g = state_grid(0.5, 5);
    const WaveFunction psi = random_state(5, 6, 0.5, g);
    const PureEnsemble rho = PureEnsemble::pure(squeezed_coherent(0.5, 0.0, 0.0, g));
    const PureEnsemble self = PureEnsemble::pure(psi);
    const Grid2D grid = default_outcome_grid(noise, self, 129);

    const double ce_self = cross_entropy(model, psi, self, grid);
    const double wehrl = wehrl_entropy(model, self, grid);
    CHECK(ce_self == doctest::Approx(wehrl).epsilon(1e-8));

    const double ce = cross_entropy(model, psi, rho, grid);
    const HusimiDensity pp = husimi(model, self, grid);
    const HusimiDensity pr = husimi(model, rho, grid);
    CHECK(ce - wehrl ==
          doctest::Approx(kl_divergence(pp.density, pr.density)).epsilon(1e-8));

    // independent Simpson evaluation of the defining integral
    CHECK(ce == doctest::Approx(simpson_cross_sum(pp, pr)).epsilon(1e-6));
}

TEST_CASE("entropy kernel action on matched letters is scalar") {
    const NoiseCovariance noise(0.5, 8.0);
    const double db = model_delta_beta(noise);
    const Grid1D g = state_grid(db, 0, 1.0);
    const WaveFunction letter = squeezed_coherent(db, 0.7, -0.4, g);
    const WaveFunction k_letter = apply_K_gaussian(noise, db, 0.7, -0.4, letter);
    const double bound = min_wehrl_bound(noise);
    CHECK((k_letter.amps - bound * letter.amps).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("entropy kernel expectations") {
    const NoiseCovariance noise(0.5, 2.0);
    const Grid1D g = state_grid(0.5, 7);
    const WaveFunction psi = random_state(11, 8, 0.5, g);
    const double delta = 0.4, x0 = 0.6, y0 = -0.3;

    // expectation through the operator action
    const WaveFunction k_psi = apply_K_gaussian(noise, delta, x0, y0, psi);
    const double via_operator = (inner(psi, k_psi)).real();

    // expectation through the outcome densities
    const MeasurementModel model = build_model(noise);
    const PureEnsemble self = PureEnsemble::pure(psi);
    const Grid1D letter_grid = state_grid(delta, 0, std::abs(x0), g.points);
    const PureEnsemble letter =
        PureEnsemble::pure(squeezed_coherent(delta, x0, y0, letter_grid));
    const Grid2D ga = default_outcome_grid(noise, self, 160);
    const Grid2D gb = default_outcome_grid(noise, letter, 160);
    const Grid2D grid{hull_axis(ga.gx, gb.gx, 160), hull_axis(ga.gy, gb.gy, 160)};
    const double via_density = cross_entropy(model, psi, letter, grid);
    CHECK(via_operator == doctest::Approx(via_density).epsilon(1e-5));

    // matched squeezed vacuum expectation is c + 1 for any delta
    const Grid1D g0 = state_grid(delta);
    const WaveFunction vac = squeezed_coherent(delta, 0.0, 0.0, g0);
    const WaveFunction k_vac = apply_K_gaussian(noise, delta, 0.0, 0.0, vac);
    const double c = std::log(2.0 * M_PI * std::sqrt((noise.beta_q + delta) *
                                                     (noise.beta_p + 0.25 / delta)));
    CHECK((inner(vac, k_vac)).real() == doctest::Approx(c + 1.0).epsilon(1e-5));
}

TEST_CASE("multiplier operator across the regimes") {
    const NoiseCovariance noise(0.5, 8.0);
    const double db = model_delta_beta(noise);

    // boundary coincidence with the scalar case
    const LagrangeOperator at_boundary = lagrange_operator(Case::L, noise, db);
    CHECK(at_boundary.p2_coeff == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(at_boundary.constant == doctest::Approx(min_wehrl_bound(noise)).epsilon(1e-12));

    // hand-evaluated p^2 coefficient at delta = 1/4
    const LagrangeOperator op = lagrange_operator(Case::L, noise, 0.25);
    CHECK(op.p2_coeff == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

    CHECK_THROWS_AS(lagrange_operator(Case::L, noise, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(lagrange_operator(Case::R, noise, 0.25), std::invalid_argument);

    // expectation against direct quadrature of a - b p^2
    const Grid1D g = state_grid(0.5, 5);
    const WaveFunction psi = random_state(9, 6, 0.5, g);
    const double direct =
        op.constant -
        op.p2_coeff *
            (-(psi.amps.dot(fd4_second_derivative(psi.amps, g.step()))).real() * g.step());
    CHECK(lagrange_expectation(op, psi) == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("outcome densities obey the pointwise bound and moment identities") {
    const NoiseCovariance noise(0.5, 2.0);
    const MeasurementModel model = build_model(noise);
    for (std::uint64_t seed : {31, 32, 33}) {
        const Grid1D g = state_grid(0.5, 6);
        const PureEnsemble rho = PureEnsemble::pure(random_state(seed, 7, 0.5, g));
        const Grid2D grid = default_outcome_grid(noise, rho, 128);
        const HusimiDensity p = husimi(model, rho, grid);
        CHECK(p.density.values().maxCoeff() <= husimi_sup_bound(noise) + 1e-9);
        CHECK(p.density.mass() == doctest::Approx(1.0).epsilon(1e-5));

        const Eigen::ArrayXd wx = grid.gx.quad_weights();
        const Eigen::ArrayXd wy = grid.gy.quad_weights();
        const Eigen::ArrayXd xs = grid.gx.coords();
        const Eigen::ArrayXd ys = grid.gy.coords();
        const double mx2 = ((wx * xs.square()).matrix().transpose() *
                            p.density.values().matrix() * wy.matrix())(0);
        const double my2 = (wx.matrix().transpose() * p.density.values().matrix() *
                            (wy * ys.square()).matrix())(0);
        CHECK(mx2 == doctest::Approx(p.q2 + noise.beta_q).epsilon(1e-4));
        CHECK(my2 == doctest::Approx(p.p2 + noise.beta_p).epsilon(1e-4));
    }
}

TEST_CASE("error paths: truncation bounds, mass deficit, resolution") {
    CHECK_THROWS_AS(build_model(NoiseCovariance(0.5, 0.5), 1e-2), std::invalid_argument);
    CHECK_THROWS_AS(build_model(NoiseCovariance(0.5, 0.5), 0.0), std::invalid_argument);

    // outcome grid far too small: the density mass leaks off-grid
    const NoiseCovariance noise(0.5, 0.5);
    const MeasurementModel model = build_model(noise);
    const Grid1D g = state_grid(0.5);
    const PureEnsemble rho = PureEnsemble::pure(squeezed_coherent(0.5, 0.0, 0.0, g));
    const Grid2D tiny{Grid1D(0.0, 1.0, 32), Grid1D(0.0, 1.0, 32)};
    CHECK_THROWS_AS(husimi(model, rho, tiny), std::runtime_error);

    // coarse position grid: finite-difference and Fourier second derivatives
    // disagree and the kernel application refuses to proceed
    const Grid1D coarse(0.0, 9.0, 16);
    const WaveFunction rough = squeezed_coherent(0.5, 0.0, 0.0, coarse);
    CHECK_THROWS_AS(apply_K_gaussian(noise, 0.5, 0.0, 0.0, rough), std::domain_error);
}

TEST_CASE("wehrl entropy stays above the bound over a small family") {
    const NoiseCovariance noise(1.0, 1.0);
    const MeasurementModel model = build_model(noise);
    const double bound = min_wehrl_bound(noise);
    for (std::uint64_t seed = 50; seed < 60; ++seed) {
        const int dim = 2 + static_cast<int>(seed % 6);
        const Grid1D g = state_grid(0.5, dim - 1);
        const PureEnsemble rho = PureEnsemble::pure(random_state(seed, dim, 0.5, g));
        CHECK(wehrl_entropy(model, rho, default_outcome_grid(noise, rho, 128)) >=
              bound - 1e-4);
    }
}
