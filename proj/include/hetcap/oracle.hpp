#pragma once

#include "hetcap/capacity.hpp"

#include <cstdint>

namespace hetcap {

/// Finite letter set with a prior: a discretization of a Gaussian encoding.
/// Letter i is the squeezed coherent state at (x_i, y_i) with squeeze
/// delta_i; its oscillator energy is (delta + x^2 + 1/(4 delta) + y^2)/2.
struct Constellation {
    struct Letter {
        double x;
        double y;
        double delta;
    };
    std::vector<Letter> letters;
    Eigen::VectorXd prior;
    Eigen::VectorXd energies;

    static Constellation make(std::vector<Letter> letters, Eigen::VectorXd prior);
    double mean_energy() const { return prior.dot(energies); }
};

enum class LatticeScheme {
    GaussHermite, // weighted nodes; rate converges exponentially in the size
    Quantile,     // equiprobable quantiles; O(1/m) tail loss, visibly improves
                  // under refinement
};

/// Lattice discretization of the encoding's displacement distribution with
/// `per_axis` letters per displaced axis.
Constellation lattice_constellation(const GaussianEncoding& encoding, int per_axis,
                                    LatticeScheme scheme = LatticeScheme::GaussHermite);

/// Letter-conditional outcome law discretized over grid cells. Cell (i, j)
/// is the rectangle of width one grid step centered on the grid point; the
/// masses are exact Gaussian rectangle integrals (error-function
/// differences), so the only loss is tail truncation.
struct ChannelMatrix {
    Grid2D grid;
    Eigen::MatrixXd probs; // rows: letters, cols: gx.points * gy.points cells
};

ChannelMatrix build_channel(const Constellation& constellation,
                            const NoiseCovariance& noise, const Grid2D& grid);

struct BAResult {
    Eigen::VectorXd prior;
    double mutual_information = 0.0; // nats
    double mean_energy = 0.0;
    double lagrange_multiplier = 0.0;
    int iterations = 0;
    bool converged = false;
    bool monotone = true; // per-iteration objective never decreased
};

/// Constrained capacity of the discretized channel: outer bisection on the
/// energy multiplier (lambda in [0, 50]), inner Blahut-Arimoto iteration on
/// the tilted objective until the increment falls below tol. The returned
/// prior is always feasible (mean energy <= target_E), so the rate is a
/// valid achievable rate. Non-convergence is reported, not thrown.
BAResult blahut_arimoto(const ChannelMatrix& channel, const Eigen::VectorXd& energies,
                        double target_E, double tol = 1e-10, int max_iter = 4000);

/// Mutual information of the constellation under the continuous outcome law,
/// by quadrature: entropy of the prior mixture minus the closed-form letter
/// entropies.
double quadrature_rate(const Constellation& constellation, const NoiseCovariance& noise,
                       const Grid2D& grid);

struct McRate {
    double estimate = 0.0;  // nats
    double std_error = 0.0;
};

/// Monte Carlo estimate of the same mutual information: sample a letter from
/// the prior and an outcome from its exact Gaussian law, average the
/// log-likelihood ratio against the prior mixture density.
McRate mc_rate(const Constellation& constellation, const NoiseCovariance& noise,
               long n_samples, std::uint64_t seed);

/// Outcome grid covering every letter's mean +- nsigma outcome deviations.
Grid2D oracle_grid(const Constellation& constellation, const NoiseCovariance& noise,
                   int points_per_axis, double nsigma = 8.0);

} // namespace hetcap
