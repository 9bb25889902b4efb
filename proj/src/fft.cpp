#include "hetcap/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace hetcap {

namespace {

// The FFTW planner is not thread-safe; executions are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Signed frequency for bin j of an N-point transform with spacing h.
inline double freq(int j, int n, double h) {
    const int js = (j <= n / 2) ? j : j - n;
    return 2.0 * M_PI * js / (n * h);
}

} // namespace

Eigen::VectorXcd fft(const Eigen::VectorXcd& v, int sign) {
    const int n = static_cast<int>(v.size());
    if (n == 0) throw std::invalid_argument("fft: empty input");
    Eigen::VectorXcd out(n);
    Eigen::VectorXcd in = v; // FFTW may clobber the input buffer while planning
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(
            n, reinterpret_cast<fftw_complex*>(in.data()),
            reinterpret_cast<fftw_complex*>(out.data()),
            sign < 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

Eigen::VectorXcd spectral_derivative(const Eigen::VectorXcd& v, double h) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd f = fft(v, +1);
    for (int j = 0; j < n; ++j) f[j] *= std::complex<double>(0.0, freq(j, n, h));
    if (n % 2 == 0) f[n / 2] = 0.0; // odd symbol: drop the Nyquist bin
    Eigen::VectorXcd out = fft(f, -1);
    out /= static_cast<double>(n);
    return out;
}

Eigen::VectorXcd spectral_second_derivative(const Eigen::VectorXcd& v, double h) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd f = fft(v, +1);
    for (int j = 0; j < n; ++j) {
        const double k = freq(j, n, h);
        f[j] *= -k * k;
    }
    Eigen::VectorXcd out = fft(f, -1);
    out /= static_cast<double>(n);
    return out;
}

double spectral_gradient_norm_sq(const Eigen::VectorXcd& v, double h) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd f = fft(v, +1);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double k = freq(j, n, h);
        acc += k * k * std::norm(f[j]);
    }
    return acc * h / n;
}

Eigen::VectorXcd fourier_shift(const Eigen::VectorXcd& v, double h, double shift) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd f = fft(v, +1);
    for (int j = 0; j < n; ++j) {
        const double k = freq(j, n, h);
        f[j] *= std::exp(std::complex<double>(0.0, -k * shift));
    }
    Eigen::VectorXcd out = fft(f, -1);
    out /= static_cast<double>(n);
    return out;
}

} // namespace hetcap
