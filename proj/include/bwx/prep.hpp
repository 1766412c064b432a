#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bwx/error.hpp"
#include "bwx/spectrogram.hpp"
#include "bwx/stft.hpp"
#include "bwx/wav.hpp"

namespace bwx {

enum class LowpassMode { Brickwall, FirSinc };

struct LowpassSpec {
    LowpassMode mode = LowpassMode::Brickwall;
    double cutoff_hz = 4000.0;
    std::size_t taps = 511;  ///< FirSinc only; Hamming-windowed

    void validate(std::uint32_t sample_rate) const {
        detail::require(cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2.0, ErrorCode::Domain,
                        "cutoff " + std::to_string(cutoff_hz) + " Hz must lie strictly inside (0, Nyquist)");
        if (mode == LowpassMode::FirSinc)
            detail::require(taps % 2 == 1 && taps >= 11, ErrorCode::Domain,
                            "FIR tap count must be odd and >= 11, got " + std::to_string(taps));
    }
};

/// Unit-DC-gain Hamming-windowed sinc low-pass.
inline std::vector<double> design_fir_lowpass(std::size_t taps, double cutoff_hz, double sample_rate) {
    const double fc = cutoff_hz / sample_rate;
    const std::size_t mid = (taps - 1) / 2;
    std::vector<double> h(taps);
    // Only the left half is evaluated; mirroring keeps the phase exactly linear.
    for (std::size_t i = 0; i <= mid; ++i) {
        const double t = static_cast<double>(mid - i);
        const double sinc = t == 0.0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * t) / (std::numbers::pi * t);
        const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                 static_cast<double>(taps - 1));
        h[i] = h[taps - 1 - i] = sinc * w;
    }
    double sum = 0.0;
    for (double v : h) sum += v;
    for (double& v : h) v /= sum;
    return h;
}

/// |H(f)| of an FIR filter.
inline double fir_gain(std::span<const double> h, double freq_hz, double sample_rate) {
    std::complex<double> acc{};
    const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    for (std::size_t i = 0; i < h.size(); ++i)
        acc += h[i] * std::polar(1.0, -omega * static_cast<double>(i));
    return std::abs(acc);
}

namespace detail {

inline std::vector<double> fir_apply(std::span<const double> h, std::span<const double> x) {
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t n = std::min(h.size(), i + 1);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += h[j] * x[i - j];
        y[i] = acc;
    }
    return y;
}

// Forward-reverse filtering over an odd reflection of the edges.
inline std::vector<double> zero_phase_filter(std::span<const double> h, std::span<const double> x) {
    if (x.empty()) return {};
    const std::size_t pad = std::min(3 * h.size(), x.size() - 1);
    std::vector<double> ext;
    ext.reserve(x.size() + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[x.size() - 1 - i]);

    auto y = fir_apply(h, ext);
    std::ranges::reverse(y);
    y = fir_apply(h, y);
    std::ranges::reverse(y);
    return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.begin() + static_cast<std::ptrdiff_t>(pad + x.size())};
}

}  // namespace detail

/// Band-limit `x` at spec.cutoff_hz without changing its length or rate.
///
/// Brickwall zeroes every STFT bin >= bin_index(cutoff) and resynthesizes;
/// the tail is zero-padded so the last samples are covered by a frame.
inline Waveform lowpass(const Waveform& x, const LowpassSpec& spec, const StftConfig& cfg = {}) {
    x.validate();
    spec.validate(x.sample_rate);
    if (spec.mode == LowpassMode::FirSinc) {
        const auto h = design_fir_lowpass(spec.taps, spec.cutoff_hz, x.sample_rate);
        return {detail::zero_phase_filter(h, x.samples), x.sample_rate};
    }

    cfg.validate();
    const std::size_t n = x.size();
    const std::size_t frames = n <= cfg.frame_len ? 1 : 1 + (n - cfg.frame_len + cfg.hop - 1) / cfg.hop;
    StftEngine engine(cfg);
    auto spec_x = engine.analyze(x.samples, frames, x.sample_rate);
    const std::size_t cut = bin_index(spec.cutoff_hz, x.sample_rate, cfg.frame_len);
    for (std::size_t l = 0; l < spec_x.frames(); ++l)
        for (std::size_t k = cut; k < spec_x.bins(); ++k) spec_x(l, k) = {};
    auto y = engine.synthesize(spec_x);
    y.resize(n);
    return {std::move(y), x.sample_rate};
}

/// Write the low-passed companion of an HR file (every channel, float32).
inline void make_pair(const std::string& hr_path, const std::string& out_lr_path, const LowpassSpec& spec,
                      const StftConfig& cfg = {}) {
    const Audio hr = wav_read(hr_path);
    std::vector<Waveform> lr;
    lr.reserve(hr.channels.size());
    for (const auto& ch : hr.channels) lr.push_back(lowpass(ch, spec, cfg));
    wav_write(out_lr_path, lr, SampleFormat::Float32);
}

}  // namespace bwx
