#include "hetcap/capacity.hpp"

#include <cmath>
#include <stdexcept>

namespace hetcap {

namespace {

GaussianEncoding encoding_case_C(const NoiseCovariance& noise, const SignalCovariance& alpha) {
    const double delta = model_delta_beta(noise);
    const double gq = alpha.alpha_q - delta;
    const double gp = alpha.alpha_p - 0.25 / delta;
    if (gq < -1e-12 || gp < -1e-12)
        throw std::invalid_argument("encoding_case_C: alpha below the letter covariance");
    return GaussianEncoding{Case::C, delta, std::max(gq, 0.0), std::max(gp, 0.0), alpha};
}

} // namespace

SignalCovariance::SignalCovariance(double aq, double ap) : alpha_q(aq), alpha_p(ap) {
    if (!(alpha_q > 0.0) || !(alpha_p > 0.0))
        throw std::invalid_argument("SignalCovariance: variances must be positive");
    if (alpha_q * alpha_p < 0.25 * (1.0 - 1e-12))
        throw std::invalid_argument("SignalCovariance: alpha_q * alpha_p must be >= 1/4");
}

Case classify(const SignalCovariance& alpha, const NoiseCovariance& noise) {
    const double ratio = std::sqrt(noise.beta_q / noise.beta_p);
    if (0.5 / alpha.alpha_p >= ratio) return Case::L;
    if (ratio >= 2.0 * alpha.alpha_q) return Case::R;
    return Case::C;
}

double energy_threshold(double b1, double b2) {
    if (!(b1 > 0.0) || !(b2 > 0.0))
        throw std::invalid_argument("energy_threshold: arguments must be positive");
    return 0.5 * (b1 - b2 + std::sqrt(b1 / b2));
}

CapacityResult capacity_case_C(const NoiseCovariance& noise, double E) {
    const double bq = noise.beta_q;
    const double bp = noise.beta_p;
    const double e_min = std::max({0.5, energy_threshold(bp, bq), energy_threshold(bq, bp)});
    if (E < e_min * (1.0 - 1e-12))
        throw std::invalid_argument("capacity_case_C: energy below the case-C threshold");
    const double value = std::log((E + 0.5 * (bq + bp)) / (std::sqrt(bq * bp) + 0.5));
    // Water-filling split: equalize alpha_q + beta_q = alpha_p + beta_p at
    // total signal energy 2E.
    const SignalCovariance alpha(E + 0.5 * (bp - bq), E + 0.5 * (bq - bp));
    return CapacityResult{Case::C, value, E, noise, encoding_case_C(noise, alpha)};
}

double rate_of_encoding_C(const SignalCovariance& alpha, const NoiseCovariance& noise) {
    // the two-parameter encoding exists on the closure of the central regime
    // (both displacement variances nonnegative)
    const double ratio = std::sqrt(noise.beta_q / noise.beta_p);
    if (0.5 / alpha.alpha_p > ratio * (1.0 + 1e-12) ||
        ratio > 2.0 * alpha.alpha_q * (1.0 + 1e-12))
        throw std::invalid_argument("rate_of_encoding_C: (alpha, beta) is not in case C");
    const double bq = noise.beta_q;
    const double bp = noise.beta_p;
    const double s = std::sqrt(bq * bp) + 0.5;
    return 0.5 * std::log((alpha.alpha_q + bq) * (alpha.alpha_p + bp) / (s * s));
}

double rate_of_encoding_L(const NoiseCovariance& noise, double E, double delta) {
    const double aq = 2.0 * E - 0.25 / delta;
    if (!(delta > 0.0) || !(aq > 0.0))
        throw std::invalid_argument("rate_of_encoding_L: invalid letter squeeze");
    return 0.5 * std::log((aq + noise.beta_q) / (delta + noise.beta_q));
}

DeltaOpt optimal_delta_L(const NoiseCovariance& noise, double E) {
    if (E < 0.5)
        throw std::invalid_argument("optimal_delta_L: energy below the vacuum level");
    // gamma >= 0 restricts delta to [E - sqrt(E^2 - 1/4), E + sqrt(E^2 - 1/4)];
    // the rate vanishes at the upper end and dives negative near 1/(8E).
    const double disc = std::sqrt(std::max(E * E - 0.25, 0.0));
    const double lo = 0.125 / E + 1e-14;
    const double hi = E + disc;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = rate_of_encoding_L(noise, E, x1);
    double f2 = rate_of_encoding_L(noise, E, x2);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = rate_of_encoding_L(noise, E, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = rate_of_encoding_L(noise, E, x1);
        }
    }
    double delta = 0.5 * (a + b);
    // Function comparisons stall on a sqrt(eps) plateau around the maximum;
    // polish the stationary point of the rate with a few Newton steps.
    const double bq = noise.beta_q;
    for (int it = 0; it < 6; ++it) {
        const double aq = 2.0 * E - 0.25 / delta;
        const double g1 = 0.25 / (delta * delta) / (aq + bq) - 1.0 / (delta + bq);
        const double g2 = -0.5 / (delta * delta * delta) / (aq + bq) -
                          0.0625 / std::pow(delta, 4) / ((aq + bq) * (aq + bq)) +
                          1.0 / ((delta + bq) * (delta + bq));
        if (g2 == 0.0) break;
        const double next = delta - 0.5 * g1 / (0.5 * g2);
        if (!(next > lo) || !(next < hi)) break;
        if (std::abs(next - delta) < 1e-16 * delta) {
            delta = next;
            break;
        }
        delta = next;
    }
    const double aq = 2.0 * E - 0.25 / delta;
    const SignalCovariance alpha(aq, 0.25 / delta);
    // at the optimum the squeeze sits at or above the matched scale and the
    // displacement variance is nonnegative (up to optimizer rounding)
    if (delta < model_delta_beta(noise) * (1.0 - 1e-9) || aq - delta < -1e-9)
        throw std::runtime_error("optimal_delta_L: optimizer left the case-L regime");
    return DeltaOpt{delta, alpha, std::max(aq - delta, 0.0),
                    rate_of_encoding_L(noise, E, delta)};
}

CapacityResult capacity_case_L(const NoiseCovariance& noise, double E) {
    const double bq = noise.beta_q;
    const double bp = noise.beta_p;
    if (bq > bp * (1.0 + 1e-12))
        throw std::invalid_argument("capacity_case_L: requires beta_q <= beta_p");
    if (E < 0.5 || E >= energy_threshold(bp, bq) * (1.0 + 1e-12))
        throw std::invalid_argument("capacity_case_L: energy outside [1/2, E(beta_p, beta_q))");
    const double value = std::log((std::sqrt(1.0 + 8.0 * E * bq + 4.0 * bq * bq) - 1.0) /
                                  (2.0 * bq));
    const DeltaOpt opt = optimal_delta_L(noise, E);
    GaussianEncoding enc{Case::L, opt.delta, opt.gamma, 0.0, opt.alpha};
    return CapacityResult{Case::L, value, E, noise, enc};
}

CapacityResult capacity(const NoiseCovariance& noise, double E) {
    if (E < 0.5)
        throw std::invalid_argument("capacity: energy must be at least 1/2");
    const double bq = noise.beta_q;
    const double bp = noise.beta_p;
    const double e_case_c = std::max(energy_threshold(bp, bq), energy_threshold(bq, bp));
    if (E >= e_case_c) return capacity_case_C(noise, E);
    if (bq <= bp) return capacity_case_L(noise, E);
    // Case R: exchange the quadratures, solve case L, relabel the axes.
    const NoiseCovariance swapped(bp, bq);
    const CapacityResult l = capacity_case_L(swapped, E);
    const SignalCovariance alpha(l.encoding.alpha.alpha_p, l.encoding.alpha.alpha_q);
    GaussianEncoding enc{Case::R, 0.25 / l.encoding.delta, 0.0, l.encoding.gamma_q, alpha};
    return CapacityResult{Case::R, l.value, E, noise, enc};
}

} // namespace hetcap
