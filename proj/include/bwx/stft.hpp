#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "bwx/error.hpp"
#include "bwx/fft.hpp"
#include "bwx/spectrogram.hpp"

namespace bwx {

/// Nearest bin to `freq_hz`, clamped to [0, frame_len/2 + 1].
inline std::size_t bin_index(double freq_hz, double sample_rate, std::size_t frame_len) {
    detail::require(sample_rate > 0.0, ErrorCode::Domain, "sample rate must be positive");
    detail::require(freq_hz >= 0.0 && freq_hz <= sample_rate / 2.0, ErrorCode::Domain,
                    "frequency " + std::to_string(freq_hz) + " Hz outside [0, Nyquist]");
    const double exact = freq_hz * static_cast<double>(frame_len) / sample_rate;
    const auto k = static_cast<std::size_t>(std::llround(exact));
    return std::min(k, frame_len / 2 + 1);
}

/// LFC = [0, k_lo), HFC = [k_lo, k_hi), residual = [k_hi, n_bins).
struct BandLayout {
    std::size_t k_lo = 186;
    std::size_t k_hi = 372;
    std::size_t n_bins = 1025;

    [[nodiscard]] std::size_t lfc_width() const noexcept { return k_lo; }
    [[nodiscard]] std::size_t hfc_width() const noexcept { return k_hi - k_lo; }
    [[nodiscard]] std::size_t residual_width() const noexcept { return n_bins - k_hi; }

    void validate() const {
        detail::require(0 < k_lo && k_lo < k_hi && k_hi <= n_bins, ErrorCode::Domain,
                        "band layout requires 0 < k_lo < k_hi <= n_bins, got (" + std::to_string(k_lo) +
                            ", " + std::to_string(k_hi) + ", " + std::to_string(n_bins) + ")");
    }

    static BandLayout from_hz(double lo_hz, double hi_hz, double sample_rate, const StftConfig& cfg) {
        BandLayout layout{bin_index(lo_hz, sample_rate, cfg.frame_len),
                          bin_index(hi_hz, sample_rate, cfg.frame_len), cfg.bins()};
        layout.k_hi = std::min(layout.k_hi, layout.n_bins);
        layout.validate();
        return layout;
    }

    friend bool operator==(const BandLayout&, const BandLayout&) = default;
};

/// Reusable analysis/synthesis state for one StftConfig. Not thread-safe;
/// use one engine per thread.
class StftEngine {
public:
    explicit StftEngine(const StftConfig& cfg) : cfg_((cfg.validate(), cfg)), window_(make_window(cfg)), fft_(cfg.frame_len) {}

    [[nodiscard]] const StftConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const std::vector<double>& window() const noexcept { return window_; }

    /// Analyze the first `frames` frames of `samples`; samples past the end
    /// of the buffer read as zero.
    ComplexSpectrogram analyze(std::span<const double> samples, std::size_t frames,
                               std::uint32_t sample_rate) {
        const std::size_t n = cfg_.frame_len;
        ComplexSpectrogram out(frames, cfg_.bins(), cfg_, sample_rate);
        auto buf = fft_.time();
        for (std::size_t l = 0; l < frames; ++l) {
            const std::size_t start = l * cfg_.hop;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t at = start + i;
                buf[i] = at < samples.size() ? samples[at] * window_[i] : 0.0;
            }
            fft_.forward();
            std::ranges::copy(fft_.freq(), out.row(l).begin());
        }
        return out;
    }

    /// Weighted overlap-add with window-squared normalization.
    std::vector<double> synthesize(const ComplexSpectrogram& x) {
        detail::require(x.config() == cfg_, ErrorCode::Shape, "spectrogram config differs from engine config");
        detail::require(x.is_full_band(), ErrorCode::Shape,
                        "synthesis needs all " + std::to_string(cfg_.bins()) + " bins, got " +
                            std::to_string(x.bins()) + " starting at bin " + std::to_string(x.first_bin()));
        const std::size_t n = cfg_.frame_len;
        const std::size_t len = cfg_.synthesis_length(x.frames());
        std::vector<double> out(len, 0.0);
        std::vector<double> norm(len, 0.0);
        for (std::size_t l = 0; l < x.frames(); ++l) {
            std::ranges::copy(x.row(l), fft_.freq().begin());
            fft_.inverse();
            auto buf = fft_.time();
            const std::size_t start = l * cfg_.hop;
            for (std::size_t i = 0; i < n; ++i) {
                out[start + i] += buf[i] * window_[i];
                norm[start + i] += window_[i] * window_[i];
            }
        }
        for (std::size_t i = 0; i < len; ++i) out[i] /= std::max(norm[i], kNormFloor);
        return out;
    }

    /// stft(istft(x)) on the same frame grid.
    ComplexSpectrogram project(const ComplexSpectrogram& x) {
        const auto y = synthesize(x);
        return analyze(y, x.frames(), x.sample_rate());
    }

    static constexpr double kNormFloor = 1e-12;

private:
    StftConfig cfg_;
    std::vector<double> window_;
    RealFft fft_;
};

inline ComplexSpectrogram stft(const Waveform& x, const StftConfig& cfg = {}) {
    cfg.validate();
    detail::require(x.size() >= cfg.frame_len, ErrorCode::Length,
                    "signal of " + std::to_string(x.size()) + " samples is shorter than one frame (" +
                        std::to_string(cfg.frame_len) + ")");
    StftEngine engine(cfg);
    return engine.analyze(x.samples, cfg.frames_for(x.size()), x.sample_rate);
}

/// Output length is (frames - 1) * hop + frame_len.
inline Waveform istft(const ComplexSpectrogram& x) {
    x.config().validate();
    StftEngine engine(x.config());
    return Waveform{engine.synthesize(x), x.sample_rate()};
}

/// Map onto the set of consistent spectrograms: stft(istft(x)).
inline ComplexSpectrogram consistency_project(const ComplexSpectrogram& x) {
    StftEngine engine(x.config());
    return engine.project(x);
}

/// Copy bins [begin, end) (absolute bin indices) of `x`.
template <typename S>
S slice_bins(const S& x, std::size_t begin, std::size_t end) {
    detail::require(x.first_bin() <= begin && begin <= end && end <= x.end_bin(), ErrorCode::Shape,
                    "bin range [" + std::to_string(begin) + ", " + std::to_string(end) +
                        ") not inside [" + std::to_string(x.first_bin()) + ", " +
                        std::to_string(x.end_bin()) + ")");
    S out(x.frames(), end - begin, x.config(), x.sample_rate(), begin);
    const std::size_t off = begin - x.first_bin();
    for (std::size_t l = 0; l < x.frames(); ++l) {
        auto src = x.row(l).subspan(off, end - begin);
        std::ranges::copy(src, out.row(l).begin());
    }
    return out;
}

/// Keep the first `frames` frames, zero-extending when there are fewer.
template <typename S>
S fit_frames(const S& x, std::size_t frames) {
    S out(frames, x.bins(), x.config(), x.sample_rate(), x.first_bin());
    for (std::size_t l = 0; l < std::min(frames, x.frames()); ++l)
        std::ranges::copy(x.row(l), out.row(l).begin());
    return out;
}

template <typename S>
struct BandParts {
    S lfc;
    S hfc;
    S residual;  ///< bins >= k_hi; zero width when k_hi == n_bins
};

template <typename S>
BandParts<S> band_split(const S& x, const BandLayout& layout) {
    layout.validate();
    detail::require(x.first_bin() == 0 && x.bins() == layout.n_bins, ErrorCode::Shape,
                    "layout expects " + std::to_string(layout.n_bins) + " bins, spectrogram has " +
                        std::to_string(x.bins()));
    return {slice_bins(x, 0, layout.k_lo), slice_bins(x, layout.k_lo, layout.k_hi),
            slice_bins(x, layout.k_hi, layout.n_bins)};
}

template <typename S>
S band_concat(const S& lfc, const S& hfc, const S& residual, const BandLayout& layout) {
    layout.validate();
    auto check = [&](const S& part, std::size_t begin, std::size_t end, const char* name) {
        detail::require(part.bins() == end - begin && part.first_bin() == begin, ErrorCode::Shape,
                        std::string(name) + " part covers " + std::to_string(part.bins()) +
                            " bins from " + std::to_string(part.first_bin()) + ", layout needs [" +
                            std::to_string(begin) + ", " + std::to_string(end) + ")");
        detail::require(part.frames() == lfc.frames(), ErrorCode::Shape,
                        std::string(name) + " part frame count differs from LFC part");
        detail::require(part.config() == lfc.config(), ErrorCode::Shape,
                        std::string(name) + " part STFT config differs from LFC part");
    };
    check(lfc, 0, layout.k_lo, "LFC");
    check(hfc, layout.k_lo, layout.k_hi, "HFC");
    check(residual, layout.k_hi, layout.n_bins, "residual");
    detail::require(layout.n_bins == lfc.config().bins(), ErrorCode::Shape,
                    "layout bin count does not match the STFT config");

    S out(lfc.frames(), layout.n_bins, lfc.config(), lfc.sample_rate(), 0);
    for (std::size_t l = 0; l < out.frames(); ++l) {
        auto dst = out.row(l).begin();
        dst = std::ranges::copy(lfc.row(l), dst).out;
        dst = std::ranges::copy(hfc.row(l), dst).out;
        std::ranges::copy(residual.row(l), dst);
    }
    return out;
}

}  // namespace bwx
