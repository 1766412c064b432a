#pragma once

// Brute-force references kept independent of the library's FFT path.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "bwx/spectrogram.hpp"

namespace bwx::test {

/// Periodic Hann computed directly, not via make_window().
inline double hann(std::size_t i, std::size_t n) {
    return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
}

/// One-sided DFT of a windowed frame by direct summation with an exact
/// twiddle table (angles reduced modulo n in integers).
inline std::vector<std::complex<double>> direct_dft_frame(const std::vector<double>& x, std::size_t start,
                                                          std::size_t n) {
    std::vector<double> c(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        c[i] = std::cos(a);
        s[i] = std::sin(a);
    }
    std::vector<double> frame(n);
    for (std::size_t i = 0; i < n; ++i) frame[i] = (start + i < x.size() ? x[start + i] : 0.0) * hann(i, n);
    std::vector<std::complex<double>> out(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = (k * i) % n;
            re += frame[i] * c[idx];
            im -= frame[i] * s[idx];
        }
        out[k] = {static_cast<double>(re), static_cast<double>(im)};
    }
    return out;
}

/// Real inverse DFT of a one-sided spectrum (conjugate symmetry implied).
inline std::vector<double> direct_idft(const std::vector<std::complex<double>>& half, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double acc = 0.0L;
        for (std::size_t k = 0; k <= n / 2; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>((k * i) % n) / static_cast<double>(n);
            const double w = (k == 0 || k == n / 2) ? 1.0 : 2.0;
            acc += w * (half[k].real() * std::cos(a) - half[k].imag() * std::sin(a));
        }
        out[i] = static_cast<double>(acc / static_cast<long double>(n));
    }
    return out;
}

inline Waveform random_signal(std::size_t n, std::uint64_t seed, std::uint32_t rate = 44100) {
    std::mt19937_64 gen(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    return {std::move(x), rate};
}

inline Waveform sine(double freq, std::size_t n, std::uint32_t rate = 44100, double amp = 1.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate);
    return {std::move(x), rate};
}

inline double rms(const std::vector<double>& x, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += x[i] * x[i];
    return std::sqrt(s / static_cast<double>(end - begin));
}

/// RMS of (a - b) over [begin, end) relative to RMS of a there.
inline double relative_rms_error(const std::vector<double>& a, const std::vector<double>& b, std::size_t begin,
                                 std::size_t end) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += a[i] * a[i];
    }
    return std::sqrt(num / den);
}

/// Scalar loop implementation of the log-spectral distance formula.
inline double brute_force_lsd(const std::vector<std::vector<double>>& truth,
                              const std::vector<std::vector<double>>& est, std::size_t begin, std::size_t end) {
    double total = 0.0;
    for (std::size_t l = 0; l < truth.size(); ++l) {
        double acc = 0.0;
        for (std::size_t f = begin; f < end; ++f) {
            const double a = 10.0 * std::log10(truth[l][f] * truth[l][f] + 1e-10);
            const double b = 10.0 * std::log10(est[l][f] * est[l][f] + 1e-10);
            acc += (a - b) * (a - b);
        }
        total += std::sqrt(acc / static_cast<double>(end - begin));
    }
    return total / static_cast<double>(truth.size());
}

}  // namespace bwx::test
