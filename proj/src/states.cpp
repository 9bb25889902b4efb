#include "hetcap/states.hpp"

#include "hetcap/fft.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hetcap {

namespace {

constexpr double kBoundaryDecay = 1e-10;

void check_decay(const Eigen::VectorXcd& amps) {
    const int n = static_cast<int>(amps.size());
    if (std::abs(amps[0]) >= kBoundaryDecay || std::abs(amps[n - 1]) >= kBoundaryDecay)
        throw std::domain_error(
            "wavefunction does not decay at the grid boundary; enlarge the grid");
}

} // namespace

Eigen::VectorXcd fd4_first_derivative(const Eigen::VectorXcd& v, double h) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd d(n);
    auto at = [&](int i) -> std::complex<double> {
        return (i < 0 || i >= n) ? std::complex<double>(0.0) : v[i];
    };
    const double c = 1.0 / (12.0 * h);
    for (int i = 0; i < n; ++i)
        d[i] = c * (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2));
    return d;
}

Eigen::VectorXcd fd4_second_derivative(const Eigen::VectorXcd& v, double h) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd d(n);
    auto at = [&](int i) -> std::complex<double> {
        return (i < 0 || i >= n) ? std::complex<double>(0.0) : v[i];
    };
    const double c = 1.0 / (12.0 * h * h);
    for (int i = 0; i < n; ++i)
        d[i] = c * (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) -
                    at(i + 2));
    return d;
}

double WaveFunction::norm_sq() const {
    return amps.squaredNorm() * grid.step();
}

WaveFunction WaveFunction::normalized(Grid1D grid, Eigen::VectorXcd amps) {
    if (amps.size() != grid.points)
        throw std::invalid_argument("WaveFunction: amplitude count does not match grid");
    const double n2 = amps.squaredNorm() * grid.step();
    if (!(n2 > 0.0) || !std::isfinite(n2))
        throw std::invalid_argument("WaveFunction: cannot normalize zero or non-finite state");
    amps /= std::sqrt(n2);
    check_decay(amps);
    return WaveFunction{std::move(grid), std::move(amps)};
}

WaveFunction WaveFunction::raw(Grid1D grid, Eigen::VectorXcd amps) {
    return WaveFunction{std::move(grid), std::move(amps)};
}

std::complex<double> inner(const WaveFunction& a, const WaveFunction& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("inner: states live on different grids");
    return a.amps.dot(b.amps) * a.grid.step(); // Eigen's dot conjugates the left factor
}

double fidelity(const WaveFunction& a, const WaveFunction& b) {
    return std::norm(inner(a, b));
}

Moments moments(const WaveFunction& psi) {
    const double h = psi.grid.step();
    const Eigen::ArrayXd q = psi.grid.coords();
    const Eigen::ArrayXd prob = psi.amps.array().abs2();
    Moments m;
    m.mean_q = h * (q * prob).sum();
    m.q2 = h * (q.square() * prob).sum();
    const Eigen::VectorXcd d = fd4_first_derivative(psi.amps, h);
    m.p2 = h * d.squaredNorm();
    m.mean_p = h * (psi.amps.conjugate().array() * d.array()).imag().sum();
    return m;
}

std::pair<double, double> second_moments(const WaveFunction& psi) {
    const Moments m = moments(psi);
    return {m.q2, m.p2};
}

Moments moments_spectral(const WaveFunction& psi) {
    Moments m = moments(psi);
    m.p2 = spectral_gradient_norm_sq(psi.amps, psi.grid.step());
    return m;
}

double momentum_second_moment_spectral(const WaveFunction& psi) {
    return spectral_gradient_norm_sq(psi.amps, psi.grid.step());
}

Eigen::MatrixXd hermite_modes(const Eigen::ArrayXd& args, int n_max, double delta) {
    if (n_max < 0 || n_max > kMaxFock)
        throw std::invalid_argument("hermite_modes: mode index out of range");
    if (!(delta > 0.0))
        throw std::invalid_argument("hermite_modes: delta must be positive");
    const auto rows = args.size();
    const double scale = std::sqrt(2.0 * delta);
    Eigen::MatrixXd modes(rows, n_max + 1);
    const double pref = std::pow(M_PI, -0.25) / std::sqrt(scale);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double u = args[i] / scale;
        modes(i, 0) = pref * std::exp(-0.5 * u * u);
        if (n_max >= 1) modes(i, 1) = u * std::sqrt(2.0) * modes(i, 0);
        for (int n = 2; n <= n_max; ++n)
            modes(i, n) = u * std::sqrt(2.0 / n) * modes(i, n - 1) -
                          std::sqrt((n - 1.0) / n) * modes(i, n - 2);
    }
    return modes;
}

WaveFunction squeezed_coherent(double delta, double x, double y, const Grid1D& grid) {
    if (!(delta > 0.0))
        throw std::invalid_argument("squeezed_coherent: delta must be positive");
    const Eigen::ArrayXd q = grid.coords();
    Eigen::VectorXcd amps(grid.points);
    const double pref = std::pow(2.0 * M_PI * delta, -0.25);
    for (int i = 0; i < grid.points; ++i) {
        const double dq = q[i] - x;
        amps[i] = pref * std::exp(-dq * dq / (4.0 * delta)) *
                  std::exp(std::complex<double>(0.0, y * (q[i] - 0.5 * x)));
    }
    return WaveFunction::normalized(grid, std::move(amps));
}

WaveFunction squeezed_fock(int n, double delta, const Grid1D& grid) {
    const Eigen::MatrixXd modes = hermite_modes(grid.coords(), n, delta);
    Eigen::VectorXcd amps = modes.col(n).cast<std::complex<double>>();
    return WaveFunction::normalized(grid, std::move(amps));
}

WaveFunction displace(const WaveFunction& psi, double x, double y) {
    const double h = psi.grid.step();
    const Eigen::ArrayXd q = psi.grid.coords();
    Eigen::VectorXcd shifted = fourier_shift(psi.amps, h, x);
    // The band-limited shift is periodic; a displacement past the grid edge
    // wraps around instead of decaying, so verify the mean actually moved.
    const double mean_before = h * (q * psi.amps.array().abs2()).sum();
    const double mean_after = h * (q * shifted.array().abs2()).sum();
    if (std::abs(mean_after - (mean_before + x)) > std::max(h, 1e-6))
        throw std::domain_error("displace: grid does not cover the displaced support");
    for (int i = 0; i < psi.grid.points; ++i)
        shifted[i] *= std::exp(std::complex<double>(0.0, y * (q[i] - 0.5 * x)));
    check_decay(shifted);
    return WaveFunction::raw(psi.grid, std::move(shifted));
}

WaveFunction random_state(std::uint64_t seed, int dim, double delta, const Grid1D& grid) {
    if (dim < 1 || dim > kMaxFock + 1)
        throw std::invalid_argument("random_state: dim out of range");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd coeff(dim);
    for (int n = 0; n < dim; ++n) coeff[n] = std::complex<double>(gauss(rng), gauss(rng));
    coeff /= coeff.norm();
    const Eigen::MatrixXd modes = hermite_modes(grid.coords(), dim - 1, delta);
    Eigen::VectorXcd amps = modes * coeff;
    return WaveFunction::normalized(grid, std::move(amps));
}

Grid1D state_grid(double delta, int max_fock, double x_span, int points) {
    if (!(delta > 0.0))
        throw std::invalid_argument("state_grid: delta must be positive");
    const double turning = std::sqrt((2.0 * max_fock + 1.0) * 2.0 * delta);
    const double half_width = std::abs(x_span) + turning + 10.5 * std::sqrt(delta);
    return Grid1D(0.0, half_width, points);
}

PureEnsemble PureEnsemble::pure(WaveFunction psi) {
    return PureEnsemble{{Member{1.0, std::move(psi)}}};
}

PureEnsemble PureEnsemble::mixture(std::vector<Member> members) {
    if (members.empty())
        throw std::invalid_argument("PureEnsemble: need at least one member");
    double total = 0.0;
    for (const auto& m : members) {
        if (!(m.weight > 0.0))
            throw std::invalid_argument("PureEnsemble: weights must be positive");
        if (!(m.state.grid == members.front().state.grid))
            throw std::invalid_argument("PureEnsemble: members must share a grid");
        if (std::abs(m.state.norm_sq() - 1.0) > 1e-8)
            throw std::invalid_argument("PureEnsemble: members must be normalized");
        total += m.weight;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument("PureEnsemble: weights must sum to one");
    return PureEnsemble{std::move(members)};
}

Moments PureEnsemble::moments() const {
    Moments acc;
    for (const auto& m : members) {
        const Moments mm = hetcap::moments(m.state);
        acc.mean_q += m.weight * mm.mean_q;
        acc.mean_p += m.weight * mm.mean_p;
        acc.q2 += m.weight * mm.q2;
        acc.p2 += m.weight * mm.p2;
    }
    return acc;
}

Moments PureEnsemble::moments_spectral() const {
    Moments acc;
    for (const auto& m : members) {
        const Moments mm = hetcap::moments_spectral(m.state);
        acc.mean_q += m.weight * mm.mean_q;
        acc.mean_p += m.weight * mm.mean_p;
        acc.q2 += m.weight * mm.q2;
        acc.p2 += m.weight * mm.p2;
    }
    return acc;
}

} // namespace hetcap
