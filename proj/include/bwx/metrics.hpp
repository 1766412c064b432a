#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bwx/error.hpp"
#include "bwx/spectrogram.hpp"
#include "bwx/stft.hpp"

namespace bwx {

/// Power floor inside the log of the log-spectral distance.
inline constexpr double kLogPowerFloor = 1e-10;
/// Residual-to-signal energy floor of the SNR (caps it at 120 dB).
inline constexpr double kSnrFloor = 1e-12;

/// Half-open bin range [begin, end).
struct BinRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
};

inline double log_power_db(double magnitude) noexcept {
    return 10.0 * std::log10(magnitude * magnitude + kLogPowerFloor);
}

/// Per-frame RMS of the log-power difference over `bins`.
inline std::vector<double> lsd_per_frame(const MagnitudeSpectrogram& truth, const MagnitudeSpectrogram& estimate,
                                         BinRange bins) {
    detail::require(truth.frames() == estimate.frames() && truth.bins() == estimate.bins() &&
                        truth.first_bin() == estimate.first_bin(),
                    ErrorCode::Shape,
                    "LSD inputs differ in shape: " + shape_string(truth.frames(), truth.bins()) + " vs " +
                        shape_string(estimate.frames(), estimate.bins()));
    detail::require(bins.begin < bins.end, ErrorCode::Domain, "LSD bin range is empty");
    detail::require(truth.first_bin() <= bins.begin && bins.end <= truth.end_bin(), ErrorCode::Domain,
                    "LSD bin range [" + std::to_string(bins.begin) + ", " + std::to_string(bins.end) +
                        ") outside the spectrogram");
    std::vector<double> out(truth.frames());
    const std::size_t off = truth.first_bin();
    for (std::size_t l = 0; l < truth.frames(); ++l) {
        auto a = truth.row(l);
        auto b = estimate.row(l);
        double sum = 0.0;
        for (std::size_t k = bins.begin; k < bins.end; ++k) {
            const double d = log_power_db(a[k - off]) - log_power_db(b[k - off]);
            sum += d * d;
        }
        out[l] = std::sqrt(sum / static_cast<double>(bins.size()));
    }
    return out;
}

/// Log-spectral distance in dB, averaged over frames.
inline double lsd(const MagnitudeSpectrogram& truth, const MagnitudeSpectrogram& estimate, BinRange bins) {
    detail::require(truth.frames() >= 1, ErrorCode::Domain, "LSD needs at least one frame");
    const auto per_frame = lsd_per_frame(truth, estimate, bins);
    double sum = 0.0;
    for (double v : per_frame) sum += v;
    return sum / static_cast<double>(per_frame.size());
}

/// 10 log10(sum t^2 / max(sum (t - e)^2, floor * sum t^2)).
inline double snr(std::span<const double> truth, std::span<const double> estimate) {
    detail::require(truth.size() == estimate.size(), ErrorCode::Shape,
                    "SNR inputs differ in length: " + std::to_string(truth.size()) + " vs " +
                        std::to_string(estimate.size()));
    double signal = 0.0;
    double noise = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        signal += truth[i] * truth[i];
        const double d = truth[i] - estimate[i];
        noise += d * d;
    }
    detail::require(signal > 0.0, ErrorCode::Domain, "SNR undefined for an all-zero reference");
    return 10.0 * std::log10(signal / std::max(noise, kSnrFloor * signal));
}

inline double snr(const Waveform& truth, const Waveform& estimate) {
    detail::require(truth.sample_rate == estimate.sample_rate, ErrorCode::Shape, "SNR inputs differ in sample rate");
    return snr(std::span<const double>(truth.samples), std::span<const double>(estimate.samples));
}

/// ||X - P_C(X)||_F / max(||X||_F, 1e-12).
inline double consistency_residual(const ComplexSpectrogram& x) {
    const auto projected = consistency_project(x);
    double diff = 0.0;
    for (std::size_t i = 0; i < x.values().size(); ++i) diff += std::norm(x.values()[i] - projected.values()[i]);
    return std::sqrt(diff) / std::max(frobenius_norm(x), 1e-12);
}

struct EvalReport {
    double lsd_hf = 0.0;
    double lsd_full = 0.0;
    double snr = 0.0;
    std::size_t frames_compared = 0;
    BandLayout band{};
};

/// Compare two signals over their common length. LSD-HF covers
/// [k_lo, k_hi), LSD-Full covers `full_range` (default [0, k_hi)); SNR
/// skips frame_len samples at each end when the signal is long enough.
inline EvalReport evaluate(const Waveform& truth, const Waveform& estimate, const StftConfig& cfg,
                           const BandLayout& layout, std::optional<BinRange> full_range = std::nullopt) {
    layout.validate();
    detail::require(truth.sample_rate == estimate.sample_rate, ErrorCode::Shape, "signals differ in sample rate");
    detail::require(layout.n_bins == cfg.bins(), ErrorCode::Shape, "layout does not match the STFT config");
    const std::size_t n = std::min(truth.size(), estimate.size());
    const std::size_t frames = cfg.frames_for(n);
    detail::require(frames >= 1, ErrorCode::Length, "signals shorter than one frame");

    StftEngine engine(cfg);
    const std::span<const double> t(truth.samples.data(), n);
    const std::span<const double> e(estimate.samples.data(), n);
    const auto mt = magnitude(engine.analyze(t, frames, truth.sample_rate));
    const auto me = magnitude(engine.analyze(e, frames, truth.sample_rate));

    EvalReport report;
    report.band = layout;
    report.frames_compared = frames;
    report.lsd_hf = lsd(mt, me, {layout.k_lo, layout.k_hi});
    report.lsd_full = lsd(mt, me, full_range.value_or(BinRange{0, layout.k_hi}));
    const std::size_t trim = n > 2 * cfg.frame_len ? cfg.frame_len : 0;
    report.snr = snr(t.subspan(trim, n - 2 * trim), e.subspan(trim, n - 2 * trim));
    return report;
}

/// Channel-wise evaluation averaged across channels.
inline EvalReport evaluate(const std::vector<Waveform>& truth, const std::vector<Waveform>& estimate,
                           const StftConfig& cfg, const BandLayout& layout) {
    detail::require(!truth.empty() && truth.size() == estimate.size(), ErrorCode::Shape,
                    "channel counts differ: " + std::to_string(truth.size()) + " vs " +
                        std::to_string(estimate.size()));
    EvalReport mean;
    for (std::size_t c = 0; c < truth.size(); ++c) {
        const auto r = evaluate(truth[c], estimate[c], cfg, layout);
        mean.lsd_hf += r.lsd_hf;
        mean.lsd_full += r.lsd_full;
        mean.snr += r.snr;
        mean.frames_compared = r.frames_compared;
    }
    const double n = static_cast<double>(truth.size());
    mean.lsd_hf /= n;
    mean.lsd_full /= n;
    mean.snr /= n;
    mean.band = layout;
    return mean;
}

inline constexpr const char* kReportHeader = "file,method,lsd_hf_db,lsd_full_db,snr_db,frames";

inline std::string report_row(const std::string& file, const std::string& method, const EvalReport& r) {
    char buf[128];
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.4f,%zu", r.lsd_hf, r.lsd_full, r.snr, r.frames_compared);
    return file + "," + method + buf;
}

/// Metadata line recording the floors used, so reports stay comparable.
inline std::string report_metadata() {
    return "# log_power_floor=1e-10 snr_ratio_floor=1e-12 snr_trim=frame_len";
}

}  // namespace bwx
