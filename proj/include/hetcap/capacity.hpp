#pragma once

#include "hetcap/measurement.hpp"

namespace hetcap {

/// Covariance of the average signal state, constrained to be a valid quantum
/// covariance: alpha_q * alpha_p >= 1/4.
struct SignalCovariance {
    double alpha_q;
    double alpha_p;

    SignalCovariance(double alpha_q, double alpha_p);
};

/// Optimal Gaussian encoding: squeezed coherent letter states with position
/// variance `delta`, displaced with a centered normal distribution of
/// variances (gamma_q, gamma_p). gamma_p = 0 in case L, gamma_q = 0 in case R.
struct GaussianEncoding {
    Case tag;
    double delta;
    double gamma_q;
    double gamma_p;
    SignalCovariance alpha; // implied average-state covariance
};

struct CapacityResult {
    Case tag;
    double value;  // nats
    double energy; // constraint level E
    NoiseCovariance noise;
    GaussianEncoding encoding;
};

/// Parameter regime of (alpha, beta): case C iff
/// 1/(2 alpha_p) < sqrt(beta_q/beta_p) < 2 alpha_q, with the boundary
/// equalities resolving to L / R.
Case classify(const SignalCovariance& alpha, const NoiseCovariance& noise);

/// E(b1, b2) = (b1 - b2 + sqrt(b1/b2)) / 2. Case C applies once the energy
/// reaches max{E(beta_p, beta_q), E(beta_q, beta_p)}.
double energy_threshold(double b1, double b2);

/// Capacity within the threshold regime:
/// ln((E + (beta_q + beta_p)/2) / (sqrt(beta_q beta_p) + 1/2)).
CapacityResult capacity_case_C(const NoiseCovariance& noise, double E);

/// Rate of the two-parameter Gaussian encoding with average covariance alpha:
/// ln((alpha_q + beta_q)(alpha_p + beta_p) / (sqrt(beta_q beta_p) + 1/2)^2)/2.
double rate_of_encoding_C(const SignalCovariance& alpha, const NoiseCovariance& noise);

/// One-letter Gaussian rate of the case-L encoding with squeeze delta at
/// energy E: ln((2E - 1/(4 delta) + beta_q) / (delta + beta_q)) / 2.
double rate_of_encoding_L(const NoiseCovariance& noise, double E, double delta);

struct DeltaOpt {
    double delta;
    SignalCovariance alpha;
    double gamma;
    double rate; // nats
};

/// Maximizer of the case-L rate over the letter squeeze (golden section);
/// the achieved rate matches the closed form below to 1e-8.
DeltaOpt optimal_delta_L(const NoiseCovariance& noise, double E);

/// Capacity below the threshold for beta_q <= beta_p:
/// ln((sqrt(1 + 8 E beta_q + 4 beta_q^2) - 1) / (2 beta_q)).
CapacityResult capacity_case_L(const NoiseCovariance& noise, double E);

/// Dispatcher over all regimes; case R is computed by exchanging the
/// quadratures and relabeling the axes.
CapacityResult capacity(const NoiseCovariance& noise, double E);

} // namespace hetcap
