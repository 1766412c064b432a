#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "bwx/error.hpp"
#include "bwx/specfile.hpp"
#include "bwx/spectrogram.hpp"
#include "bwx/stft.hpp"

namespace bwx {

struct OraclePredictor {
    std::string reference_path;  ///< ground-truth HR recording
};

/// Translated copy of the LFC magnitudes with a continuity gain at the cutoff.
struct BandReplicationPredictor {
    std::size_t gain_anchor_bins = 4;
    double tilt_per_bin = 1.0;

    void validate() const {
        detail::require(gain_anchor_bins >= 1, ErrorCode::Domain, "gain_anchor_bins must be >= 1");
        detail::require(tilt_per_bin > 0.0 && std::isfinite(tilt_per_bin), ErrorCode::Domain,
                        "tilt_per_bin must be positive");
    }
};

struct ImportPredictor {
    std::string spectrogram_path;  ///< BWXSPEC magnitude file covering [k_lo, k_hi)
};

using MagnitudePredictorSpec = std::variant<OraclePredictor, BandReplicationPredictor, ImportPredictor>;

/// |stft(hr_reference)| on [k_lo, k_hi), first `target_frames` frames.
inline MagnitudeSpectrogram predict_oracle(const Waveform& hr_reference, const StftConfig& cfg,
                                           const BandLayout& layout, std::size_t target_frames) {
    layout.validate();
    detail::require(layout.n_bins == cfg.bins(), ErrorCode::Shape, "layout does not match the STFT config");
    detail::require(cfg.frames_for(hr_reference.size()) >= target_frames, ErrorCode::Length,
                    "reference yields " + std::to_string(cfg.frames_for(hr_reference.size())) +
                        " frames, need " + std::to_string(target_frames));
    const auto full = stft(hr_reference, cfg);
    return fit_frames(magnitude(slice_bins(full, layout.k_lo, layout.k_hi)), target_frames);
}

/// For each frame, bin k gets M[k - k_lo] * g * tilt^(k - k_lo), where g
/// matches the mean of the last anchor LFC bins to the mean of the first
/// anchor copied bins.
inline MagnitudeSpectrogram predict_band_replication(const MagnitudeSpectrogram& lfc_mag,
                                                     const BandReplicationPredictor& spec,
                                                     const BandLayout& layout) {
    spec.validate();
    layout.validate();
    detail::require(lfc_mag.first_bin() == 0 && lfc_mag.bins() == layout.lfc_width(), ErrorCode::Shape,
                    "LFC magnitude has " + std::to_string(lfc_mag.bins()) + " bins, layout needs " +
                        std::to_string(layout.lfc_width()));
    detail::require(layout.hfc_width() <= layout.lfc_width(), ErrorCode::UnsupportedLayout,
                    "band replication needs HFC width (" + std::to_string(layout.hfc_width()) +
                        ") <= LFC width (" + std::to_string(layout.lfc_width()) + ")");
    const std::size_t anchors = std::min(spec.gain_anchor_bins, layout.hfc_width());
    const std::size_t lfc_w = layout.lfc_width();

    MagnitudeSpectrogram out(lfc_mag.frames(), layout.hfc_width(), lfc_mag.config(), lfc_mag.sample_rate(),
                             layout.k_lo);
    for (std::size_t l = 0; l < out.frames(); ++l) {
        auto src = lfc_mag.row(l);
        double edge = 0.0;
        double copied = 0.0;
        for (std::size_t i = 0; i < anchors; ++i) {
            edge += src[lfc_w - 1 - i];
            copied += src[i];
        }
        edge /= static_cast<double>(anchors);
        copied /= static_cast<double>(anchors);
        const double gain = edge / std::max(copied, 1e-12);
        auto dst = out.row(l);
        double tilt = 1.0;
        for (std::size_t j = 0; j < dst.size(); ++j) {
            dst[j] = src[j] * gain * tilt;
            tilt *= spec.tilt_per_bin;
        }
    }
    validate(out);
    return out;
}

/// Read a BWXSPEC magnitude file and check it against the expected shape
/// (and STFT config, when given). The result is placed at `first_bin`.
inline MagnitudeSpectrogram load_magnitude(const std::string& path, std::size_t frames, std::size_t bins,
                                           std::size_t first_bin = 0,
                                           const std::optional<StftConfig>& cfg = std::nullopt) {
    SpecFile file = spec_read(path);
    auto* mag = std::get_if<MagnitudeSpectrogram>(&file.data);
    detail::require(mag != nullptr, ErrorCode::Shape, path + ": holds a complex spectrogram, expected magnitudes");
    detail::require(mag->frames() == frames && mag->bins() == bins, ErrorCode::Shape,
                    path + ": shape " + shape_string(mag->frames(), mag->bins()) + " differs from expected " +
                        shape_string(frames, bins));
    if (cfg) {
        detail::require(file.header.frame_len == cfg->frame_len && file.header.hop == cfg->hop, ErrorCode::Shape,
                        path + ": stored STFT (frame " + std::to_string(file.header.frame_len) + ", hop " +
                            std::to_string(file.header.hop) + ") differs from frame " +
                            std::to_string(cfg->frame_len) + ", hop " + std::to_string(cfg->hop));
    }
    for (double v : mag->values())
        detail::require(v >= 0.0, ErrorCode::NegativeMagnitude, path + ": negative magnitude " + std::to_string(v));

    MagnitudeSpectrogram out(frames, bins, cfg.value_or(mag->config()), mag->sample_rate(), first_bin);
    std::ranges::copy(mag->values(), out.values().begin());
    return out;
}

}  // namespace bwx
