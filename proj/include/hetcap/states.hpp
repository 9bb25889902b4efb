#pragma once

#include "hetcap/grid.hpp"

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace hetcap {

/// Single-mode pure state sampled on a position grid (hbar = 1).
struct WaveFunction {
    Grid1D grid;
    Eigen::VectorXcd amps;

    double norm_sq() const;
    /// Rescale to unit norm and enforce the boundary-decay invariant.
    static WaveFunction normalized(Grid1D grid, Eigen::VectorXcd amps);
    /// No validation; for unnormalized operator outputs.
    static WaveFunction raw(Grid1D grid, Eigen::VectorXcd amps);
};

std::complex<double> inner(const WaveFunction& a, const WaveFunction& b);
double fidelity(const WaveFunction& a, const WaveFunction& b);

struct Moments {
    double mean_q = 0.0;
    double mean_p = 0.0;
    double q2 = 0.0; // raw second moments, not central
    double p2 = 0.0;
};

/// First and second quadrature moments. p-moments use the fourth-order
/// finite-difference gradient (the gradient-integral form of <p^2>).
Moments moments(const WaveFunction& psi);

/// Same moments with <p^2> taken through the Fourier symbol instead; exact
/// for band-limited states, used where absolute moment accuracy drives
/// identity residuals.
Moments moments_spectral(const WaveFunction& psi);

/// (q2, p2) raw second moments.
std::pair<double, double> second_moments(const WaveFunction& psi);

/// Independent route to <p^2> through the Fourier symbol; used as the
/// resolution cross-check for the finite-difference gradient.
double momentum_second_moment_spectral(const WaveFunction& psi);

/// Fourth-order centered finite differences on amplitude vectors, treating
/// samples beyond the ends as zero (valid for states passing the decay check).
Eigen::VectorXcd fd4_first_derivative(const Eigen::VectorXcd& v, double h);
Eigen::VectorXcd fd4_second_derivative(const Eigen::VectorXcd& v, double h);

/// Normalized Hermite modes with ground-state position variance delta,
/// evaluated at `args`; column n holds mode n. Built by the stable
/// three-term recurrence on normalized functions.
Eigen::MatrixXd hermite_modes(const Eigen::ArrayXd& args, int n_max, double delta);

/// Squeezed coherent state |x,y>_delta: position variance delta, momentum
/// variance 1/(4 delta), displaced to (x, y).
WaveFunction squeezed_coherent(double delta, double x, double y, const Grid1D& grid);

/// n-th Hermite mode with ground-state position variance delta.
WaveFunction squeezed_fock(int n, double delta, const Grid1D& grid);

/// Unitary displacement D(x,y) = exp(i(y q - x p)) in the symmetric phase
/// convention: (D psi)(q) = exp(i y (q - x/2)) psi(q - x).
WaveFunction displace(const WaveFunction& psi, double x, double y);

/// Reproducible random superposition of modes 0..dim-1 at squeeze delta.
WaveFunction random_state(std::uint64_t seed, int dim, double delta, const Grid1D& grid);

/// Grid wide enough for modes up to max_fock at squeeze delta, displaced by
/// up to x_span, with comfortable decay margin at the edges.
Grid1D state_grid(double delta, int max_fock = 0, double x_span = 0.0, int points = 1024);

/// Convex mixture of pure states sharing one grid; density operators enter
/// every computation only through such mixtures.
struct PureEnsemble {
    struct Member {
        double weight;
        WaveFunction state;
    };
    std::vector<Member> members;

    static PureEnsemble pure(WaveFunction psi);
    static PureEnsemble mixture(std::vector<Member> members);

    const Grid1D& grid() const { return members.front().state.grid; }
    Moments moments() const;
    Moments moments_spectral() const;
};

constexpr int kMaxFock = 64;

} // namespace hetcap
