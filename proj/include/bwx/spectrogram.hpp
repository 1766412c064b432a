#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bwx/error.hpp"

namespace bwx {

/// Mono signal. Multichannel audio is a vector of these.
struct Waveform {
    std::vector<double> samples;
    std::uint32_t sample_rate = 0;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }

    void validate() const {
        detail::require(sample_rate > 0, ErrorCode::Domain, "sample rate must be positive");
        for (double s : samples)
            detail::require(std::isfinite(s), ErrorCode::Numerical, "waveform contains a non-finite sample");
    }
};

enum class Window { Hann };

struct StftConfig {
    std::size_t frame_len = 2048;
    std::size_t hop = 256;
    Window window = Window::Hann;

    [[nodiscard]] std::size_t bins() const noexcept { return frame_len / 2 + 1; }

    /// Frames produced for a signal of n samples (no centering).
    [[nodiscard]] std::size_t frames_for(std::size_t n) const noexcept {
        return n < frame_len ? 0 : 1 + (n - frame_len) / hop;
    }

    /// Samples produced by overlap-add synthesis of `frames` frames.
    [[nodiscard]] std::size_t synthesis_length(std::size_t frames) const noexcept {
        return frames == 0 ? 0 : (frames - 1) * hop + frame_len;
    }

    void validate() const {
        detail::require(frame_len >= 2 && frame_len % 2 == 0, ErrorCode::Domain,
                        "frame length must be even and >= 2, got " + std::to_string(frame_len));
        detail::require(hop > 0 && hop <= frame_len, ErrorCode::Domain,
                        "hop must satisfy 0 < hop <= frame length, got " + std::to_string(hop));
    }

    friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

/// Periodic analysis/synthesis window of length cfg.frame_len.
inline std::vector<double> make_window(const StftConfig& cfg) {
    std::vector<double> w(cfg.frame_len);
    const double n = static_cast<double>(cfg.frame_len);
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / n);
    return w;
}

/// Wrap an angle into (-pi, pi].
inline double wrap_phase(double angle) noexcept {
    double r = std::remainder(angle, 2.0 * std::numbers::pi);
    if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
    return r;
}

/// Argument in (-pi, pi] with arg(0) = 0.
inline double principal_arg(std::complex<double> z) noexcept {
    if (z.real() == 0.0 && z.imag() == 0.0) return 0.0;
    double a = std::arg(z);
    return a <= -std::numbers::pi ? std::numbers::pi : a;
}

struct ComplexTag {};
struct MagnitudeTag {};
struct PhaseTag {};

/// Frames x bins array, row-major, holding a contiguous range of frequency
/// bins [first_bin, first_bin + bins) of a one-sided spectrum.
template <typename T, typename Tag>
class Spectrogram {
public:
    using value_type = T;

    Spectrogram() = default;

    Spectrogram(std::size_t frames, std::size_t bins, const StftConfig& config,
                std::uint32_t sample_rate = 0, std::size_t first_bin = 0)
        : frames_(frames), bins_(bins), first_bin_(first_bin), config_(config),
          sample_rate_(sample_rate), data_(frames * bins) {}

    [[nodiscard]] std::size_t frames() const noexcept { return frames_; }
    [[nodiscard]] std::size_t bins() const noexcept { return bins_; }
    [[nodiscard]] std::size_t first_bin() const noexcept { return first_bin_; }
    [[nodiscard]] std::size_t end_bin() const noexcept { return first_bin_ + bins_; }
    [[nodiscard]] const StftConfig& config() const noexcept { return config_; }
    [[nodiscard]] std::uint32_t sample_rate() const noexcept { return sample_rate_; }

    /// True when the array spans the whole one-sided spectrum.
    [[nodiscard]] bool is_full_band() const noexcept {
        return first_bin_ == 0 && bins_ == config_.bins();
    }

    T& operator()(std::size_t frame, std::size_t bin) noexcept { return data_[frame * bins_ + bin]; }
    const T& operator()(std::size_t frame, std::size_t bin) const noexcept {
        return data_[frame * bins_ + bin];
    }

    std::span<T> row(std::size_t frame) noexcept { return {data_.data() + frame * bins_, bins_}; }
    std::span<const T> row(std::size_t frame) const noexcept {
        return {data_.data() + frame * bins_, bins_};
    }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    bool operator==(const Spectrogram&) const = default;

private:
    std::size_t frames_ = 0;
    std::size_t bins_ = 0;
    std::size_t first_bin_ = 0;
    StftConfig config_{};
    std::uint32_t sample_rate_ = 0;
    std::vector<T> data_;
};

using ComplexSpectrogram = Spectrogram<std::complex<double>, ComplexTag>;
using MagnitudeSpectrogram = Spectrogram<double, MagnitudeTag>;
using PhaseSpectrogram = Spectrogram<double, PhaseTag>;

/// Empty array with the same geometry as `like`.
template <typename Out, typename In>
Out same_shape(const In& like) {
    return Out(like.frames(), like.bins(), like.config(), like.sample_rate(), like.first_bin());
}

inline MagnitudeSpectrogram magnitude(const ComplexSpectrogram& x) {
    auto m = same_shape<MagnitudeSpectrogram>(x);
    auto src = x.values();
    auto dst = m.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::abs(src[i]);
    return m;
}

inline PhaseSpectrogram phase(const ComplexSpectrogram& x) {
    auto p = same_shape<PhaseSpectrogram>(x);
    auto src = x.values();
    auto dst = p.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = principal_arg(src[i]);
    return p;
}

/// Elementwise magnitude * e^{i phase}; both inputs must cover the same bins.
inline ComplexSpectrogram polar(const MagnitudeSpectrogram& mag, const PhaseSpectrogram& ph) {
    detail::require(mag.frames() == ph.frames() && mag.bins() == ph.bins() &&
                        mag.first_bin() == ph.first_bin(),
                    ErrorCode::Shape, "magnitude and phase arrays cover different cells");
    auto out = same_shape<ComplexSpectrogram>(mag);
    auto m = mag.values();
    auto p = ph.values();
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::polar(m[i], p[i]);
    return out;
}

inline void validate(const ComplexSpectrogram& x) {
    for (auto z : x.values())
        detail::require(std::isfinite(z.real()) && std::isfinite(z.imag()), ErrorCode::Numerical,
                        "spectrogram contains a non-finite entry");
}

inline void validate(const MagnitudeSpectrogram& m) {
    for (double v : m.values()) {
        detail::require(std::isfinite(v), ErrorCode::Numerical, "magnitude contains a non-finite entry");
        detail::require(v >= 0.0, ErrorCode::NegativeMagnitude, "magnitude contains a negative entry");
    }
}

inline void validate(const PhaseSpectrogram& p) {
    for (double v : p.values())
        detail::require(v > -std::numbers::pi && v <= std::numbers::pi, ErrorCode::Domain,
                        "phase entry outside (-pi, pi]");
}

template <typename T, typename Tag>
double frobenius_norm(const Spectrogram<T, Tag>& x) {
    double sum = 0.0;
    for (const auto& v : x.values()) sum += std::norm(v);
    return std::sqrt(sum);
}

inline std::string shape_string(std::size_t frames, std::size_t bins) {
    return std::to_string(frames) + "x" + std::to_string(bins);
}

}  // namespace bwx
