#include "hetcap/oracle.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace hetcap {

namespace {

constexpr double kTiny = 1e-300;

inline double probit(double p) {
    return std::sqrt(2.0) * boost::math::erf_inv(2.0 * p - 1.0);
}

// Gauss-Hermite nodes and probability weights for N(0,1), by Golub-Welsch.
void gauss_hermite(int m, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) {
        const double off = std::sqrt(0.5 * k);
        jacobi(k - 1, k) = off;
        jacobi(k, k - 1) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    nodes = std::sqrt(2.0) * eig.eigenvalues(); // standard-normal abscissas
    weights = eig.eigenvectors().row(0).transpose().array().square();
    weights /= weights.sum();
}

// Mass of [lo, hi] under N(mean, var).
inline double interval_mass(double lo, double hi, double mean, double var) {
    const double inv = 1.0 / std::sqrt(2.0 * var);
    return 0.5 * (std::erf((hi - mean) * inv) - std::erf((lo - mean) * inv));
}

struct InnerResult {
    double info = 0.0;
    double tilted = 0.0;
    double mean_energy = 0.0;
    int iterations = 0;
    bool converged = false;
    bool monotone = true;
};

// Tilted Blahut-Arimoto ascent at fixed multiplier; p is updated in place.
InnerResult ba_inner(const Eigen::MatrixXd& w, const Eigen::VectorXd& wlogw_rows,
                     const Eigen::VectorXd& energies, double lambda, Eigen::VectorXd& p,
                     double tol, int max_iter) {
    InnerResult res;
    double prev_tilted = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd q, logq, d, u;
    for (int it = 1; it <= max_iter; ++it) {
        q.noalias() = w.transpose() * p;
        logq = q.array().max(kTiny).log().matrix();
        d = wlogw_rows - w * logq; // per-letter divergence from the mixture
        u = d - lambda * energies;
        const double info = p.dot(d);
        const double tilted = p.dot(u);
        res.info = info;
        res.tilted = tilted;
        res.mean_energy = p.dot(energies);
        res.iterations = it;
        if (tilted < prev_tilted - 1e-12) res.monotone = false;
        const double gap = u.maxCoeff() - tilted; // optimality gap of the tilted problem
        if (gap <= 1e-6 || (it > 1 && std::abs(tilted - prev_tilted) < tol)) {
            res.converged = true;
            break;
        }
        prev_tilted = tilted;
        const double umax = u.maxCoeff();
        p = (p.array() * (u.array() - umax).exp()).matrix();
        p /= p.sum();
    }
    return res;
}

} // namespace

Constellation Constellation::make(std::vector<Letter> letters, Eigen::VectorXd prior) {
    if (letters.empty())
        throw std::invalid_argument("Constellation: need at least one letter");
    if (prior.size() != static_cast<Eigen::Index>(letters.size()))
        throw std::invalid_argument("Constellation: prior size mismatch");
    if ((prior.array() < 0.0).any() || std::abs(prior.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("Constellation: prior must be a distribution");
    Eigen::VectorXd energies(letters.size());
    for (std::size_t i = 0; i < letters.size(); ++i) {
        const auto& l = letters[i];
        if (!(l.delta > 0.0))
            throw std::invalid_argument("Constellation: letter squeeze must be positive");
        energies[i] = 0.5 * (l.delta + 0.25 / l.delta + l.x * l.x + l.y * l.y);
    }
    return Constellation{std::move(letters), std::move(prior), std::move(energies)};
}

Constellation lattice_constellation(const GaussianEncoding& encoding, int per_axis,
                                    LatticeScheme scheme) {
    if (per_axis < 1)
        throw std::invalid_argument("lattice_constellation: per_axis must be >= 1");
    auto axis = [&](double variance) {
        std::pair<Eigen::VectorXd, Eigen::VectorXd> out;
        if (variance <= 0.0) {
            out.first = Eigen::VectorXd::Zero(1);
            out.second = Eigen::VectorXd::Ones(1);
            return out;
        }
        if (scheme == LatticeScheme::GaussHermite) {
            gauss_hermite(per_axis, out.first, out.second);
            out.first *= std::sqrt(variance);
        } else {
            out.first.resize(per_axis);
            for (int i = 0; i < per_axis; ++i)
                out.first[i] = std::sqrt(variance) * probit((i + 0.5) / per_axis);
            out.second = Eigen::VectorXd::Constant(per_axis, 1.0 / per_axis);
        }
        return out;
    };
    const auto [xs, wxs] = axis(encoding.gamma_q);
    const auto [ys, wys] = axis(encoding.gamma_p);
    std::vector<Constellation::Letter> letters;
    Eigen::VectorXd prior(xs.size() * ys.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i)
        for (Eigen::Index j = 0; j < ys.size(); ++j) {
            prior[letters.size()] = wxs[i] * wys[j];
            letters.push_back({xs[i], ys[j], encoding.delta});
        }
    prior /= prior.sum();
    return Constellation::make(std::move(letters), prior);
}

ChannelMatrix build_channel(const Constellation& constellation,
                            const NoiseCovariance& noise, const Grid2D& grid) {
    const int nx = grid.gx.points;
    const int ny = grid.gy.points;
    const double hx = grid.gx.step();
    const double hy = grid.gy.step();
    Eigen::MatrixXd probs(constellation.letters.size(),
                          static_cast<Eigen::Index>(nx) * ny);
    Eigen::VectorXd mx(nx), my(ny);
    for (std::size_t i = 0; i < constellation.letters.size(); ++i) {
        const auto& l = constellation.letters[i];
        const double vx = noise.beta_q + l.delta;
        const double vy = noise.beta_p + 0.25 / l.delta;
        for (int ix = 0; ix < nx; ++ix) {
            const double c = grid.gx.point(ix);
            mx[ix] = interval_mass(c - 0.5 * hx, c + 0.5 * hx, l.x, vx);
        }
        for (int iy = 0; iy < ny; ++iy) {
            const double c = grid.gy.point(iy);
            my[iy] = interval_mass(c - 0.5 * hy, c + 0.5 * hy, l.y, vy);
        }
        if (mx.sum() * my.sum() < 1.0 - 1e-5)
            throw std::invalid_argument("build_channel: grid does not cover a letter");
        for (int ix = 0; ix < nx; ++ix)
            for (int iy = 0; iy < ny; ++iy)
                probs(i, static_cast<Eigen::Index>(ix) * ny + iy) = mx[ix] * my[iy];
    }
    return ChannelMatrix{grid, std::move(probs)};
}

BAResult blahut_arimoto(const ChannelMatrix& channel, const Eigen::VectorXd& energies,
                        double target_E, double tol, int max_iter) {
    const Eigen::MatrixXd& w = channel.probs;
    const Eigen::Index n = w.rows();
    if (energies.size() != n)
        throw std::invalid_argument("blahut_arimoto: energy vector size mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("blahut_arimoto: tol must be positive");
    if (target_E < energies.minCoeff())
        throw std::invalid_argument("blahut_arimoto: target energy below every letter");

    Eigen::VectorXd wlogw_rows(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            const double v = w(i, j);
            if (v > kTiny) acc += v * std::log(v);
        }
        wlogw_rows[i] = acc;
    }

    BAResult out;
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / n);
    InnerResult inner = ba_inner(w, wlogw_rows, energies, 0.0, p, tol, max_iter);
    out.iterations = inner.iterations;
    out.monotone = inner.monotone;
    if (inner.mean_energy <= target_E) {
        out.prior = p;
        out.mutual_information = inner.info;
        out.mean_energy = inner.mean_energy;
        out.lagrange_multiplier = 0.0;
        out.converged = inner.converged;
        return out;
    }

    // Bisection on the multiplier: higher lambda lowers the mean energy.
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);
    double lo = 0.0, hi = 50.0;
    Eigen::VectorXd best_p;
    InnerResult best;
    double best_lambda = hi;
    for (int step = 0; step < 40; ++step) {
        const double mid = 0.5 * (lo + hi);
        // revive underflowed letters before the warm start: a strongly tilted
        // solve can push entries to exact zero, which multiplicative updates
        // never recover from
        p = (1.0 - 1e-6) * p + 1e-6 * uniform;
        inner = ba_inner(w, wlogw_rows, energies, mid, p, tol, max_iter);
        out.iterations += inner.iterations;
        out.monotone = out.monotone && inner.monotone;
        if (inner.mean_energy <= target_E) {
            hi = mid;
            best_p = p;
            best = inner;
            best_lambda = mid;
            if (target_E - inner.mean_energy <= 1e-4) break;
        } else {
            lo = mid;
        }
    }
    if (best_p.size() == 0) {
        // Feasible side never reached; fall back to the most tilted solve.
        inner = ba_inner(w, wlogw_rows, energies, hi, p, tol, max_iter);
        out.iterations += inner.iterations;
        out.monotone = out.monotone && inner.monotone;
        best_p = p;
        best = inner;
        best_lambda = hi;
    }
    out.prior = best_p;
    out.mutual_information = best.info;
    out.mean_energy = best.mean_energy;
    out.lagrange_multiplier = best_lambda;
    out.converged = best.converged && best.mean_energy <= target_E &&
                    target_E - best.mean_energy <= 1e-3;
    return out;
}

double quadrature_rate(const Constellation& constellation, const NoiseCovariance& noise,
                       const Grid2D& grid) {
    const Eigen::ArrayXd xs = grid.gx.coords();
    const Eigen::ArrayXd ys = grid.gy.coords();
    Eigen::ArrayXXd mix = Eigen::ArrayXXd::Zero(grid.gx.points, grid.gy.points);
    double letter_entropy = 0.0;
    for (std::size_t i = 0; i < constellation.letters.size(); ++i) {
        const auto& l = constellation.letters[i];
        const double vx = noise.beta_q + l.delta;
        const double vy = noise.beta_p + 0.25 / l.delta;
        const double pri = constellation.prior[i];
        const Eigen::ArrayXd fx = (-0.5 * (xs - l.x).square() / vx).exp();
        const Eigen::ArrayXd fy = (-0.5 * (ys - l.y).square() / vy).exp();
        const double norm = pri / (2.0 * M_PI * std::sqrt(vx * vy));
        mix += norm * (fx.matrix() * fy.matrix().transpose()).array();
        letter_entropy += pri * std::log(2.0 * M_PI * M_E * std::sqrt(vx * vy));
    }
    const Density2D mixture(grid, std::move(mix));
    return differential_entropy(mixture) - letter_entropy;
}

McRate mc_rate(const Constellation& constellation, const NoiseCovariance& noise,
               long n_samples, std::uint64_t seed) {
    if (n_samples < 1000)
        throw std::invalid_argument("mc_rate: need at least 1e3 samples");
    const std::size_t n = constellation.letters.size();
    std::vector<double> vx(n), vy(n), lognorm(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& l = constellation.letters[i];
        vx[i] = noise.beta_q + l.delta;
        vy[i] = noise.beta_p + 0.25 / l.delta;
        lognorm[i] = -std::log(2.0 * M_PI * std::sqrt(vx[i] * vy[i]));
    }
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> pick(constellation.prior.data(),
                                                 constellation.prior.data() + n);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double sum = 0.0, sum_sq = 0.0;
    for (long s = 0; s < n_samples; ++s) {
        const std::size_t i = pick(rng);
        const auto& li = constellation.letters[i];
        const double zx = li.x + std::sqrt(vx[i]) * gauss(rng);
        const double zy = li.y + std::sqrt(vy[i]) * gauss(rng);
        double mixture = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto& lk = constellation.letters[k];
            const double dx = zx - lk.x;
            const double dy = zy - lk.y;
            mixture += constellation.prior[k] *
                       std::exp(lognorm[k] - 0.5 * dx * dx / vx[k] - 0.5 * dy * dy / vy[k]);
        }
        const double dx = zx - li.x;
        const double dy = zy - li.y;
        const double log_letter = lognorm[i] - 0.5 * dx * dx / vx[i] - 0.5 * dy * dy / vy[i];
        const double ratio = log_letter - std::log(std::max(mixture, kTiny));
        sum += ratio;
        sum_sq += ratio * ratio;
    }
    const double mean = sum / n_samples;
    const double var = std::max(0.0, sum_sq / n_samples - mean * mean);
    return McRate{mean, std::sqrt(var / n_samples)};
}

Grid2D oracle_grid(const Constellation& constellation, const NoiseCovariance& noise,
                   int points_per_axis, double nsigma) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const auto& l : constellation.letters) {
        const double sx = nsigma * std::sqrt(noise.beta_q + l.delta);
        const double sy = nsigma * std::sqrt(noise.beta_p + 0.25 / l.delta);
        xlo = std::min(xlo, l.x - sx);
        xhi = std::max(xhi, l.x + sx);
        ylo = std::min(ylo, l.y - sy);
        yhi = std::max(yhi, l.y + sy);
    }
    return Grid2D{Grid1D(0.5 * (xlo + xhi), 0.5 * (xhi - xlo), points_per_axis),
                  Grid1D(0.5 * (ylo + yhi), 0.5 * (yhi - ylo), points_per_axis)};
}

} // namespace hetcap
