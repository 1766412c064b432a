#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "bwx/error.hpp"
#include "bwx/spectrogram.hpp"
#include "bwx/stft.hpp"

namespace bwx {

/// LFC bin whose phase is mirrored into HFC bin `k`.
/// Walks down from k_lo - 1 and repeats every k_lo bins.
inline std::size_t flip_source_bin(std::size_t k, const BandLayout& layout) noexcept {
    return layout.k_lo - 1 - ((k - layout.k_lo) % layout.k_lo);
}

/// HFC phase by mirroring the LFC phase about the cutoff and negating it.
inline PhaseSpectrogram flip_phase(const PhaseSpectrogram& lfc_phase, const BandLayout& layout) {
    layout.validate();
    detail::require(lfc_phase.first_bin() == 0 && lfc_phase.bins() == layout.lfc_width(), ErrorCode::Shape,
                    "LFC phase has " + std::to_string(lfc_phase.bins()) + " bins from " +
                        std::to_string(lfc_phase.first_bin()) + ", layout needs [0, " +
                        std::to_string(layout.k_lo) + ")");
    PhaseSpectrogram out(lfc_phase.frames(), layout.hfc_width(), lfc_phase.config(),
                         lfc_phase.sample_rate(), layout.k_lo);
    for (std::size_t l = 0; l < out.frames(); ++l) {
        auto src = lfc_phase.row(l);
        auto dst = out.row(l);
        for (std::size_t k = layout.k_lo; k < layout.k_hi; ++k)
            dst[k - layout.k_lo] = wrap_phase(-src[flip_source_bin(k, layout)]);
    }
    return out;
}

enum class GlaInit { ZeroPhase, FlipPhase };

struct GlaConfig {
    std::size_t iterations = 100;
    GlaInit init = GlaInit::ZeroPhase;
    BandLayout layout{};
    bool record_trace = true;
};

/// Relative consistency residual of each iterate X^[1] .. X^[iterations].
struct GlaTrace {
    std::vector<double> residuals;
};

struct GlaResult {
    ComplexSpectrogram spectrogram;
    GlaTrace trace;
};

namespace detail {

inline double relative_difference(const ComplexSpectrogram& x, const ComplexSpectrogram& y) {
    auto a = x.values();
    auto b = y.values();
    double diff = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += std::norm(a[i] - b[i]);
        ref += std::norm(a[i]);
    }
    return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-12);
}

inline void check_gla_inputs(const MagnitudeSpectrogram& full_magnitude, const ComplexSpectrogram& lfc,
                             const BandLayout& layout) {
    layout.validate();
    require(full_magnitude.first_bin() == 0 && full_magnitude.bins() == layout.n_bins &&
                full_magnitude.bins() == full_magnitude.config().bins(),
            ErrorCode::Shape,
            "full magnitude must cover all " + std::to_string(layout.n_bins) + " bins, got " +
                std::to_string(full_magnitude.bins()));
    require(lfc.first_bin() == 0 && lfc.bins() == layout.lfc_width(), ErrorCode::Shape,
            "LFC constraint has " + std::to_string(lfc.bins()) + " bins, layout needs " +
                std::to_string(layout.lfc_width()));
    require(lfc.frames() == full_magnitude.frames(), ErrorCode::Shape,
            "LFC constraint is " + shape_string(lfc.frames(), lfc.bins()) + " but magnitude is " +
                shape_string(full_magnitude.frames(), full_magnitude.bins()));
    require(lfc.config() == full_magnitude.config(), ErrorCode::Shape,
            "LFC constraint and magnitude use different STFT configs");
    validate(full_magnitude);
    validate(lfc);
}

}  // namespace detail

/// Starting point X^[0]: LFC bins from the constraint, the remaining bins
/// carry the target magnitude with zero phase or flipped LFC phase.
/// FlipPhase leaves bins >= k_hi at zero phase.
inline ComplexSpectrogram gla_initial_estimate(const MagnitudeSpectrogram& full_magnitude,
                                               const ComplexSpectrogram& lfc, const GlaConfig& cfg) {
    const BandLayout& layout = cfg.layout;
    detail::check_gla_inputs(full_magnitude, lfc, layout);

    ComplexSpectrogram x(full_magnitude.frames(), layout.n_bins, full_magnitude.config(),
                         lfc.sample_rate(), 0);
    for (std::size_t l = 0; l < x.frames(); ++l) {
        auto row = x.row(l);
        auto mag = full_magnitude.row(l);
        std::ranges::copy(lfc.row(l), row.begin());
        for (std::size_t k = layout.k_lo; k < layout.n_bins; ++k) row[k] = mag[k];
    }
    if (cfg.init == GlaInit::FlipPhase) {
        const auto flipped = flip_phase(phase(lfc), layout);
        for (std::size_t l = 0; l < x.frames(); ++l)
            for (std::size_t k = layout.k_lo; k < layout.k_hi; ++k)
                x(l, k) = std::polar(full_magnitude(l, k), flipped(l, k - layout.k_lo));
    }
    return x;
}

/// Band-constrained Griffin-Lim from an arbitrary start:
///   X <- reimpose_lfc(P_A(P_C(X)))
/// where P_A rescales each bin to the target magnitude (zero where the
/// projected bin is exactly zero) and the LFC bins are overwritten with
/// `lfc` after every step.
inline GlaResult gla_iterate(ComplexSpectrogram start, const MagnitudeSpectrogram& full_magnitude,
                             const ComplexSpectrogram& lfc, const GlaConfig& cfg) {
    const BandLayout& layout = cfg.layout;
    detail::check_gla_inputs(full_magnitude, lfc, layout);
    detail::require(start.frames() == full_magnitude.frames() && start.is_full_band() &&
                        start.config() == full_magnitude.config(),
                    ErrorCode::Shape, "starting spectrogram does not match the target magnitude");

    GlaResult result{std::move(start), {}};
    if (cfg.iterations == 0) return result;

    ComplexSpectrogram& x = result.spectrogram;
    StftEngine engine(x.config());
    ComplexSpectrogram projected = engine.project(x);
    if (cfg.record_trace) result.trace.residuals.reserve(cfg.iterations);

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        for (std::size_t l = 0; l < x.frames(); ++l) {
            auto dst = x.row(l);
            auto src = projected.row(l);
            auto mag = full_magnitude.row(l);
            std::ranges::copy(lfc.row(l), dst.begin());
            for (std::size_t k = layout.k_lo; k < layout.n_bins; ++k) {
                const double r = std::abs(src[k]);
                if (!std::isfinite(r))
                    throw Error(ErrorCode::Numerical,
                                "non-finite value in Griffin-Lim iteration " + std::to_string(it + 1) +
                                    " (frame " + std::to_string(l) + ", bin " + std::to_string(k) + ")");
                dst[k] = r > 0.0 ? src[k] * (mag[k] / r) : std::complex<double>{};
            }
        }
        const bool last = it + 1 == cfg.iterations;
        if (!last || cfg.record_trace) {
            projected = engine.project(x);
            if (cfg.record_trace) result.trace.residuals.push_back(detail::relative_difference(x, projected));
        }
    }
    return result;
}

inline GlaResult gla_reconstruct(const MagnitudeSpectrogram& full_magnitude, const ComplexSpectrogram& lfc,
                                 const GlaConfig& cfg) {
    return gla_iterate(gla_initial_estimate(full_magnitude, lfc, cfg), full_magnitude, lfc, cfg);
}

/// Decimal text with at least `digits` significant digits and no exponent.
inline std::string format_decimal(double value, int digits = 9) {
    int decimals = digits - 1;
    if (value != 0.0 && std::isfinite(value)) {
        const int magnitude = static_cast<int>(std::floor(std::log10(std::abs(value))));
        decimals = std::max(0, digits - 1 - magnitude);
    }
    std::vector<char> buf(static_cast<std::size_t>(decimals) + 400);
    std::snprintf(buf.data(), buf.size(), "%.*f", decimals, value);
    return buf.data();
}

inline void write_trace_csv(std::ostream& out, const GlaTrace& trace) {
    out << "iteration,residual\n";
    for (std::size_t i = 0; i < trace.residuals.size(); ++i)
        out << (i + 1) << ',' << format_decimal(trace.residuals[i]) << '\n';
}

inline void write_trace_csv(const std::string& path, const GlaTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    detail::require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path + " for writing");
    write_trace_csv(out, trace);
    detail::require(static_cast<bool>(out), ErrorCode::Io, "failed writing " + path);
}

struct ReferencePhase {
    PhaseSpectrogram phase;  ///< bins [k_lo, k_hi)
    bool frames_adjusted = false;  ///< reference was padded with zero phase or truncated
};

/// HFC phase read off the STFT of a reference waveform, fitted to
/// `target_frames` frames.
inline ReferencePhase extract_reference_phase(const Waveform& reference, const StftConfig& cfg,
                                              const BandLayout& layout, std::size_t target_frames) {
    detail::require(!reference.samples.empty(), ErrorCode::Length, "reference waveform is empty");
    layout.validate();
    detail::require(layout.n_bins == cfg.bins(), ErrorCode::Shape, "layout does not match the STFT config");
    const auto full = stft(reference, cfg);
    const auto band = slice_bins(full, layout.k_lo, layout.k_hi);
    return {fit_frames(phase(band), target_frames), full.frames() != target_frames};
}

}  // namespace bwx
