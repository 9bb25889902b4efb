#pragma once

#include <Eigen/Dense>
#include <complex>

namespace hetcap {

/// Unitary-free DFT helpers built on FFTW. All functions are pure and
/// thread-safe; frequencies follow the usual signed layout k_j = 2 pi j/(N h)
/// with j wrapped to (-N/2, N/2].
Eigen::VectorXcd fft(const Eigen::VectorXcd& v, int sign);

/// Samples of d/dq applied to a grid function with spacing h (band-limited).
Eigen::VectorXcd spectral_derivative(const Eigen::VectorXcd& v, double h);

/// Samples of d^2/dq^2 (band-limited).
Eigen::VectorXcd spectral_second_derivative(const Eigen::VectorXcd& v, double h);

/// Integral of |v'|^2 evaluated in Fourier space (= second momentum moment
/// for a normalized wavefunction).
double spectral_gradient_norm_sq(const Eigen::VectorXcd& v, double h);

/// Band-limited translation: returns samples of v(q - shift).
Eigen::VectorXcd fourier_shift(const Eigen::VectorXcd& v, double h, double shift);

} // namespace hetcap
