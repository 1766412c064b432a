#pragma once

// Deterministic synthetic music excerpts used as the bundled evaluation set.
// Each style mixes harmonic notes (with per-partial decay, vibrato and
// inharmonicity) and optional percussion, then band-limits the result to
// 8 kHz so it matches the HR target of the 4 -> 8 kHz task.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bwx/prep.hpp"
#include "bwx/spectrogram.hpp"

namespace bwx::clips {

inline constexpr std::size_t kStyleCount = 5;

inline const char* style_name(std::size_t style) {
    static const char* names[] = {"piano", "strings", "plucked", "organ", "band"};
    return names[style % kStyleCount];
}

namespace detail {

// Portable uniform draws; std distributions differ between libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

private:
    std::mt19937_64 gen_;
};

struct Timbre {
    double attack_s;
    double decay_per_s;        ///< fundamental amplitude decay rate
    double partial_decay;      ///< extra decay per harmonic number
    double rolloff;            ///< amplitude ~ 1 / h^rolloff
    double vibrato_depth;      ///< relative frequency deviation
    double inharmonicity;
    double note_min_s, note_max_s;
};

inline Timbre timbre_for(std::size_t style) {
    switch (style % kStyleCount) {
        case 0: return {0.004, 2.5, 0.35, 1.1, 0.0, 0.0004, 0.25, 0.7};
        case 1: return {0.12, 0.3, 0.02, 1.3, 0.004, 0.0, 0.5, 1.2};
        case 2: return {0.002, 4.0, 0.6, 0.9, 0.0, 0.0008, 0.15, 0.45};
        case 3: return {0.02, 0.0, 0.0, 1.6, 0.0, 0.0, 0.4, 0.9};
        default: return {0.006, 1.5, 0.25, 1.2, 0.002, 0.0002, 0.2, 0.5};
    }
}

inline void add_note(std::vector<double>& out, double sample_rate, double start_s, double dur_s, double f0,
                     double gain, const Timbre& t, Rng& rng) {
    const double nyq_guard = 8600.0;
    const auto n0 = static_cast<std::size_t>(start_s * sample_rate);
    const double tail = t.decay_per_s > 0.0 ? 0.4 : 0.05;
    const auto n1 = std::min(out.size(), static_cast<std::size_t>((start_s + dur_s + tail) * sample_rate));
    const double vib_rate = rng.uniform(4.5, 6.5);
    for (int h = 1; h <= 40; ++h) {
        const double hf = h * f0 * std::sqrt(1.0 + t.inharmonicity * h * h);
        if (hf > nyq_guard) break;
        const double amp = gain / std::pow(h, t.rolloff);
        const double decay = t.decay_per_s * (1.0 + t.partial_decay * (h - 1));
        const double phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
        double phase = phase0;
        double decay_env = 1.0;
        const double decay_step = std::exp(-decay / sample_rate);
        const double release_step = std::exp(-30.0 / sample_rate);
        for (std::size_t n = n0; n < n1; ++n) {
            const double tt = static_cast<double>(n - n0) / sample_rate;
            const double env = std::min(1.0, tt / t.attack_s) * decay_env;
            decay_env *= tt > dur_s ? decay_step * release_step : decay_step;
            const double inst = t.vibrato_depth == 0.0
                                    ? hf
                                    : hf * (1.0 + t.vibrato_depth * std::sin(2.0 * std::numbers::pi * vib_rate * tt));
            phase += 2.0 * std::numbers::pi * inst / sample_rate;
            out[n] += amp * env * std::sin(phase);
        }
    }
}

inline void add_drums(std::vector<double>& out, double sample_rate, double bpm, Rng& rng) {
    const double beat = 60.0 / bpm;
    double state = 0.0;
    const double length_s = static_cast<double>(out.size()) / sample_rate;
    for (std::size_t step = 0; step * beat / 2.0 < length_s; ++step) {
        const auto n0 = static_cast<std::size_t>(step * beat / 2.0 * sample_rate);
        const bool kick = step % 4 == 0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(0.25 * sample_rate) && n0 + i < out.size(); ++i) {
            const double tt = static_cast<double>(i) / sample_rate;
            // hi-hat: first-difference (high-passed) noise burst
            const double white = rng.uniform(-1.0, 1.0);
            const double hp = white - state;
            state = white;
            out[n0 + i] += 0.08 * hp * std::exp(-tt * 60.0);
            if (kick)
                out[n0 + i] += 0.5 * std::sin(2.0 * std::numbers::pi * (50.0 * tt + 2.0 * (1.0 - std::exp(-tt * 30.0)))) *
                               std::exp(-tt * 12.0);
        }
    }
}

}  // namespace detail

/// Mono clip of `seconds` at `sample_rate`, band-limited to 8 kHz and
/// normalized to a 0.9 peak.
inline Waveform synthesize_clip(std::size_t style, double seconds = 10.0, std::uint32_t sample_rate = 44100,
                                std::uint64_t seed = 0) {
    detail::Rng rng(0x9e3779b97f4a7c15ull * (style + 1) + seed);
    const detail::Timbre timbre = detail::timbre_for(style);
    std::vector<double> x(static_cast<std::size_t>(seconds * sample_rate), 0.0);
    const double sr = sample_rate;

    // Natural minor scale degrees over two octaves from A3.
    static const int degrees[] = {0, 2, 3, 5, 7, 8, 10, 12, 14, 15, 17, 19, 20, 22};
    double pos = 0.0;
    while (pos < seconds) {
        const double dur = rng.uniform(timbre.note_min_s, timbre.note_max_s);
        const double f0 = 220.0 * std::pow(2.0, degrees[rng.index(std::size(degrees))] / 12.0);
        detail::add_note(x, sr, pos, dur, f0, 0.5, timbre, rng);
        if (rng.uniform() < 0.5) detail::add_note(x, sr, pos, dur, f0 * std::pow(2.0, 7.0 / 12.0), 0.3, timbre, rng);
        pos += dur;
    }
    // bass line
    for (double t = 0.0; t < seconds; t += 1.0) {
        const double f0 = 55.0 * std::pow(2.0, degrees[rng.index(5)] / 12.0);
        detail::add_note(x, sr, t, 0.9, f0, 0.4, timbre, rng);
    }
    if (style % kStyleCount == 4 || style % kStyleCount == 0) detail::add_drums(x, sr, 96.0 + 8.0 * style, rng);

    Waveform w{std::move(x), sample_rate};
    w = lowpass(w, LowpassSpec{LowpassMode::Brickwall, 8000.0});
    double peak = 0.0;
    for (double v : w.samples) peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
        for (double& v : w.samples) v *= 0.9 / peak;
    return w;
}

}  // namespace bwx::clips
