#include "hetcap/measurement.hpp"

#include "hetcap/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace hetcap {

namespace {

constexpr double kValueFloor = 1e-300;

// exp(-beta_p s^2 / 2) below this is dropped from the kernel sum.
constexpr double kKernelTail = 1e-20;

// Index range outside which member amplitudes are treated as zero.
std::pair<int, int> support_range(const Eigen::VectorXcd& amps) {
    const int n = static_cast<int>(amps.size());
    const double cut = 1e-16;
    int lo = 0, hi = n - 1;
    while (lo < hi && std::abs(amps[lo]) < cut) ++lo;
    while (hi > lo && std::abs(amps[hi]) < cut) --hi;
    return {lo, hi};
}

HusimiDensity finish_density(const MeasurementModel& model, const PureEnsemble& rho,
                             Grid2D grid, Eigen::ArrayXXd values) {
    const double bound = husimi_sup_bound(model.noise);
    if (values.maxCoeff() > bound * (1.0 + 1e-9) + 1e-15)
        throw std::runtime_error("husimi: pointwise bound violated (grid too coarse?)");
    Density2D density(std::move(grid), std::move(values));
    if (std::abs(density.mass() - 1.0) > 1e-4)
        throw std::runtime_error("husimi: mass deficit (grid or truncation insufficient)");
    const Moments m = rho.moments_spectral();
    return HusimiDensity{std::move(density), model.noise, m.q2, m.p2};
}

} // namespace

NoiseCovariance::NoiseCovariance(double bq, double bp) : beta_q(bq), beta_p(bp) {
    if (!(beta_q > 0.0) || !(beta_p > 0.0) || !std::isfinite(beta_q) || !std::isfinite(beta_p))
        throw std::invalid_argument("NoiseCovariance: noise powers must be positive");
    if (beta_q * beta_p < 0.25 * (1.0 - 1e-12))
        throw std::invalid_argument("NoiseCovariance: beta_q * beta_p must be >= 1/4");
}

double model_delta_beta(const NoiseCovariance& noise) {
    return 0.5 * std::sqrt(noise.beta_q / noise.beta_p);
}

MeasurementModel build_model(const NoiseCovariance& noise, double eps) {
    if (!(eps > 0.0) || eps >= 1e-3)
        throw std::invalid_argument("build_model: eps must lie in (0, 1e-3)");
    const double nbar = std::sqrt(noise.beta_q * noise.beta_p) - 0.5;
    const double ratio = nbar / (nbar + 1.0);
    std::vector<double> w;
    double wn = 1.0 / (nbar + 1.0);
    double cum = 0.0;
    while (true) {
        w.push_back(wn);
        cum += wn;
        if (1.0 - cum < eps) break;
        wn *= ratio;
        if (w.size() > 100000)
            throw std::runtime_error("build_model: truncation did not converge");
    }
    Eigen::VectorXd weights = Eigen::Map<Eigen::VectorXd>(w.data(), w.size());
    return MeasurementModel{noise, model_delta_beta(noise), nbar, std::move(weights), eps};
}

double husimi_sup_bound(const NoiseCovariance& noise) {
    return 1.0 / (2.0 * M_PI * (std::sqrt(noise.beta_q * noise.beta_p) + 0.5));
}

HusimiDensity husimi(const MeasurementModel& model, const PureEnsemble& rho,
                     const Grid2D& grid) {
    // Position-space kernel of the centered noise state:
    //   K(q,q') = (2 pi bq)^{-1/2} exp(-(q+q')^2/(8 bq)) exp(-bp (q-q')^2/2),
    // so with s = q - q' the outcome y enters only through e^{iys} and the
    // s-sum truncates where the bp Gaussian underflows.
    const Grid1D& gq = rho.grid();
    const int nq = gq.points;
    const double h = gq.step();
    const double q0 = gq.lo();
    const double bq = model.noise.beta_q;
    const double bp = model.noise.beta_p;
    const int nx = grid.gx.points;
    const int ny = grid.gy.points;
    const Eigen::ArrayXd xs = grid.gx.coords();
    const Eigen::ArrayXd ys = grid.gy.coords();

    const double s_max = std::sqrt(-2.0 * std::log(kKernelTail) / bp);
    const int ks = std::min(nq - 1, static_cast<int>(std::ceil(s_max / h)));

    // Etab(x, t) = exp(-(2 q0 + t h - 2 x)^2 / (8 bq)), t = (j + j') - 2*lo index.
    Eigen::ArrayXXd etab(nx, 2 * nq - 1);
    for (int t = 0; t < 2 * nq - 1; ++t) {
        const double u = 2.0 * q0 + t * h;
        etab.col(t) = (-(u - 2.0 * xs).square() / (8.0 * bq)).exp();
    }

    // cosines/sines of y * s_k, rows k
    Eigen::MatrixXd cos_ys(ks + 1, ny), sin_ys(ks + 1, ny);
    for (int k = 0; k <= ks; ++k) {
        const double s = k * h;
        for (int l = 0; l < ny; ++l) {
            cos_ys(k, l) = std::cos(ys[l] * s);
            sin_ys(k, l) = std::sin(ys[l] * s);
        }
    }

    Eigen::MatrixXd br = Eigen::MatrixXd::Zero(nx, ks + 1);
    Eigen::MatrixXd bi = Eigen::MatrixXd::Zero(nx, ks + 1);
    Eigen::ArrayXd ar(nx), ai(nx);
    for (const auto& member : rho.members) {
        const Eigen::VectorXcd& phi = member.state.amps;
        const auto [jlo, jhi] = support_range(phi);
        for (int k = 0; k <= ks; ++k) {
            if (jlo + k > jhi) break;
            const double dk = std::exp(-0.5 * bp * (k * h) * (k * h));
            const double scale = member.weight * (k == 0 ? 1.0 : 2.0) * dk;
            ar.setZero();
            ai.setZero();
            for (int j = jlo + k; j <= jhi; ++j) {
                const std::complex<double> c = std::conj(phi[j]) * phi[j - k];
                const auto col = etab.col(2 * j - k);
                ar += c.real() * col;
                if (k != 0) ai += c.imag() * col;
            }
            br.col(k) += scale * ar.matrix();
            if (k != 0) bi.col(k) -= scale * ai.matrix();
        }
    }

    const double scale = h * h / (2.0 * M_PI * std::sqrt(2.0 * M_PI * bq));
    Eigen::ArrayXXd values = scale * (br * cos_ys + bi * sin_ys).array();
    return finish_density(model, rho, grid, std::move(values));
}

HusimiDensity husimi_overlap(const MeasurementModel& model, const PureEnsemble& rho,
                             const Grid2D& grid) {
    const Grid1D& gq = rho.grid();
    const int nq = gq.points;
    const double h = gq.step();
    const int nx = grid.gx.points;
    const int ny = grid.gy.points;
    const Eigen::ArrayXd qs = gq.coords();
    const Eigen::ArrayXd xs = grid.gx.coords();
    const Eigen::ArrayXd ys = grid.gy.coords();
    const int nth = model.n_th();

    // Phase matrix of the displaced-kernel inner products: E(l, j) = h e^{-i y_l q_j}.
    Eigen::MatrixXcd ephase(ny, nq);
    for (int l = 0; l < ny; ++l)
        for (int j = 0; j < nq; ++j)
            ephase(l, j) = h * std::exp(std::complex<double>(0.0, -ys[l] * qs[j]));

    Eigen::ArrayXXd values = Eigen::ArrayXXd::Zero(nx, ny);
    Eigen::MatrixXcd kerstate(nq, nth + 1);
    for (int ix = 0; ix < nx; ++ix) {
        const Eigen::MatrixXd modes = hermite_modes(qs - xs[ix], nth, model.delta_beta);
        for (const auto& member : rho.members) {
            for (int n = 0; n <= nth; ++n)
                kerstate.col(n) = modes.col(n).array() * member.state.amps.array();
            const Eigen::MatrixXcd overlaps = ephase * kerstate; // (ny x nth+1)
            for (int n = 0; n <= nth; ++n)
                values.row(ix) += (member.weight * model.weights[n] / (2.0 * M_PI)) *
                                  overlaps.col(n).array().abs2().transpose();
        }
    }
    return finish_density(model, rho, grid, std::move(values));
}

HusimiDensity husimi_gaussian_closed_form(const NoiseCovariance& noise, double delta,
                                          double x0, double y0, const Grid2D& grid) {
    if (!(delta > 0.0))
        throw std::invalid_argument("husimi_gaussian_closed_form: delta must be positive");
    Density2D density = gaussian_density(grid, x0, y0, noise.beta_q + delta,
                                         noise.beta_p + 0.25 / delta);
    return HusimiDensity{std::move(density), noise, delta + x0 * x0,
                         0.25 / delta + y0 * y0};
}

double wehrl_entropy(const MeasurementModel& model, const PureEnsemble& rho,
                     const Grid2D& grid) {
    return differential_entropy(husimi(model, rho, grid).density);
}

double min_wehrl_bound(const NoiseCovariance& noise) {
    return std::log(2.0 * M_PI * M_E * (std::sqrt(noise.beta_q * noise.beta_p) + 0.5));
}

double cross_entropy(const MeasurementModel& model, const WaveFunction& psi,
                     const PureEnsemble& rho, const Grid2D& grid) {
    const HusimiDensity p = husimi(model, PureEnsemble::pure(psi), grid);
    const HusimiDensity q = husimi(model, rho, grid);
    const Eigen::ArrayXd wx = grid.gx.quad_weights();
    const Eigen::ArrayXd wy = grid.gy.quad_weights();
    const auto& pv = p.density.values();
    const auto& qv = q.density.values();
    double acc = 0.0;
    double clamped_pmass = 0.0;
    for (int j = 0; j < pv.cols(); ++j) {
        double col = 0.0;
        for (int i = 0; i < pv.rows(); ++i) {
            const double pi = pv(i, j);
            if (pi <= kValueFloor) continue;
            double qi = qv(i, j);
            if (qi < kValueFloor) {
                clamped_pmass += wx[i] * wy[j] * pi;
                qi = kValueFloor;
            }
            col += wx[i] * pi * std::log(qi);
        }
        acc += wy[j] * col;
    }
    if (clamped_pmass > 1e-9)
        throw std::domain_error("cross_entropy: support of p_psi escapes support of p_rho");
    return -acc;
}

WaveFunction apply_K_gaussian(const NoiseCovariance& noise, double delta, double x0,
                              double y0, const WaveFunction& psi) {
    if (!(delta > 0.0))
        throw std::invalid_argument("apply_K_gaussian: delta must be positive");
    const double bq = noise.beta_q;
    const double bp = noise.beta_p;
    const double vq = bq + delta;
    const double vp = bp + 0.25 / delta;
    const double c = std::log(2.0 * M_PI * std::sqrt(vq * vp));
    const double h = psi.grid.step();
    const int n = psi.grid.points;

    const Eigen::VectorXcd d1 = fd4_first_derivative(psi.amps, h);
    const Eigen::VectorXcd d2 = fd4_second_derivative(psi.amps, h);
    const Eigen::VectorXcd d2_spectral = spectral_second_derivative(psi.amps, h);
    const double ref = std::max(d2_spectral.norm(), 1e-30);
    if ((d2 - d2_spectral).norm() / ref > 1e-4)
        throw std::domain_error(
            "apply_K_gaussian: finite-difference and Fourier second derivatives disagree");

    const Eigen::ArrayXd q = psi.grid.coords();
    Eigen::VectorXcd out(n);
    for (int i = 0; i < n; ++i) {
        const double dq = q[i] - x0;
        const double mult = c + (dq * dq + bq) / (2.0 * vq) + (y0 * y0 + bp) / (2.0 * vp);
        out[i] = mult * psi.amps[i] +
                 (-d2[i] + std::complex<double>(0.0, 2.0 * y0) * d1[i]) / (2.0 * vp);
    }
    return WaveFunction::raw(psi.grid, std::move(out));
}

LagrangeOperator lagrange_operator(Case tag, const NoiseCovariance& noise, double delta) {
    const double bq = noise.beta_q;
    const double bp = noise.beta_p;
    switch (tag) {
        case Case::C:
            return LagrangeOperator{min_wehrl_bound(noise), 0.0};
        case Case::L: {
            const double db = model_delta_beta(noise);
            if (delta < db * (1.0 - 1e-12))
                throw std::invalid_argument(
                    "lagrange_operator: case L requires delta >= sqrt(beta_q/beta_p)/2");
            const double vq = bq + delta;
            const double vp = bp + 0.25 / delta;
            const double a = std::log(2.0 * M_PI * std::sqrt(vq * vp)) +
                             (bq + 2.0 * delta) / (2.0 * vq) + bp / (2.0 * vp);
            const double b = 0.5 * (4.0 * delta * delta * bp - bq) / (vq * vp);
            return LagrangeOperator{a, b};
        }
        case Case::R:
            throw std::invalid_argument(
                "lagrange_operator: case R is handled by exchanging the quadratures");
    }
    throw std::logic_error("lagrange_operator: unreachable");
}

double lagrange_expectation(const LagrangeOperator& op, const WaveFunction& psi) {
    return op.constant - op.p2_coeff * second_moments(psi).second;
}

Grid2D default_outcome_grid(const NoiseCovariance& noise, const PureEnsemble& rho,
                            int points_per_axis) {
    const Moments m = rho.moments();
    const double var_x = m.q2 - m.mean_q * m.mean_q + noise.beta_q;
    const double var_y = m.p2 - m.mean_p * m.mean_p + noise.beta_p;
    return outcome_grid(m.mean_q, m.mean_p, var_x, var_y, points_per_axis);
}

} // namespace hetcap
