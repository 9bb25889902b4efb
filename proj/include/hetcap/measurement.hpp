#pragma once

#include "hetcap/grid.hpp"
#include "hetcap/states.hpp"

namespace hetcap {

/// Diagonal measurement-noise covariance (beta_q, beta_p), constrained by
/// beta_q * beta_p >= 1/4.
struct NoiseCovariance {
    double beta_q;
    double beta_p;

    NoiseCovariance(double beta_q, double beta_p);
};

/// The measurement kernel reduced to a squeezed-thermal eigendecomposition:
/// ground position variance delta_beta = sqrt(beta_q/beta_p)/2, mean thermal
/// occupancy nbar = sqrt(beta_q beta_p) - 1/2, eigenweights
/// w_n = nbar^n / (nbar+1)^(n+1) truncated once the tail mass drops below eps.
struct MeasurementModel {
    NoiseCovariance noise;
    double delta_beta;
    double nbar;
    Eigen::VectorXd weights;
    double eps;

    int n_th() const { return static_cast<int>(weights.size()) - 1; }
};

MeasurementModel build_model(const NoiseCovariance& noise, double eps = 1e-10);

/// Measurement-outcome probability density of a state, tagged with the noise
/// that produced it and the source state's raw second moments.
struct HusimiDensity {
    Density2D density;
    NoiseCovariance noise;
    double q2;
    double p2;
};

/// Largest admissible pointwise value of an outcome density for this noise.
double husimi_sup_bound(const NoiseCovariance& noise);

/// Outcome density evaluated through the position-space kernel of the noise
/// state (default route: cost independent of the thermal truncation depth).
HusimiDensity husimi(const MeasurementModel& model, const PureEnsemble& rho,
                     const Grid2D& grid);

/// Same density through displaced-eigenmode overlaps, one displaced kernel
/// per outcome point: values = (1/2pi) sum_k lambda_k sum_n w_n
/// |<D(x,y) chi_n | phi_k>|^2. Kept as the independent route for consistency
/// checks; cost grows with the truncation depth.
HusimiDensity husimi_overlap(const MeasurementModel& model, const PureEnsemble& rho,
                             const Grid2D& grid);

/// Exact outcome density of a squeezed coherent state |x0,y0>_delta: the
/// Gaussian with mean (x0, y0) and covariance diag(beta_q + delta,
/// beta_p + 1/(4 delta)).
HusimiDensity husimi_gaussian_closed_form(const NoiseCovariance& noise, double delta,
                                          double x0, double y0, const Grid2D& grid);

/// Output differential entropy of the measurement (nats).
double wehrl_entropy(const MeasurementModel& model, const PureEnsemble& rho,
                     const Grid2D& grid);

/// ln(2 pi e (sqrt(beta_q beta_p) + 1/2)): the minimum of the output entropy
/// over pure states.
double min_wehrl_bound(const NoiseCovariance& noise);

/// -integral of p_psi ln p_rho (nats); >= wehrl_entropy(psi) by Gibbs.
double cross_entropy(const MeasurementModel& model, const WaveFunction& psi,
                     const PureEnsemble& rho, const Grid2D& grid);

/// Action of the operator
///   c + ((q-x0)^2 + beta_q)/(2(beta_q+delta))
///     + ((p-y0)^2 + beta_p)/(2(beta_p+1/(4 delta))),
/// c = ln 2 pi sqrt((beta_q+delta)(beta_p+1/(4 delta))), on psi. This is the
/// closed-form entropy kernel of the Gaussian letter |x0,y0>_delta. The
/// second derivative is cross-checked against the Fourier route; failure
/// signals insufficient grid resolution. Result is unnormalized.
WaveFunction apply_K_gaussian(const NoiseCovariance& noise, double delta, double x0,
                              double y0, const WaveFunction& psi);

/// Parameter regime of the optimal encoding.
enum class Case { C, L, R };

/// Operator of the form constant * I - p2_coeff * p^2.
struct LagrangeOperator {
    double constant;
    double p2_coeff;
};

/// Multiplier operator certifying encoding optimality. Case C: the scalar
/// min_wehrl_bound. Case L (requires delta >= sqrt(beta_q/beta_p)/2):
/// an affine function of p^2 with nonnegative p^2 coefficient.
LagrangeOperator lagrange_operator(Case tag, const NoiseCovariance& noise, double delta);

/// Expectation <psi| (a I - b p^2) |psi> evaluated from moments.
double lagrange_expectation(const LagrangeOperator& op, const WaveFunction& psi);

/// Outcome grid covering the state's mean +- 8 sigma per axis, noise included.
Grid2D default_outcome_grid(const NoiseCovariance& noise, const PureEnsemble& rho,
                            int points_per_axis);

/// Ground position variance of the noise-state eigenbasis.
double model_delta_beta(const NoiseCovariance& noise);

} // namespace hetcap
