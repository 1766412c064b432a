#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "bwx/error.hpp"
#include "bwx/magnitude.hpp"
#include "bwx/metrics.hpp"
#include "bwx/phase.hpp"
#include "bwx/prep.hpp"
#include "bwx/spectrogram.hpp"
#include "bwx/stft.hpp"
#include "bwx/wav.hpp"

namespace bwx {

enum class ResidualBand { Passthrough, Zero };

struct FlipPhase {};

struct GlaPhase {
    std::size_t iterations = 100;
    GlaInit init = GlaInit::ZeroPhase;
};

struct ReferencePhaseFile {
    std::string path;
};

using PhaseMethod = std::variant<FlipPhase, GlaPhase, ReferencePhaseFile>;

/// Band edges in Hz; converted to bins once the sample rate is known.
struct BandEdges {
    double lo_hz = 4000.0;
    double hi_hz = 8000.0;

    [[nodiscard]] BandLayout layout(std::uint32_t sample_rate, const StftConfig& cfg) const {
        return BandLayout::from_hz(lo_hz, hi_hz, sample_rate, cfg);
    }
};

/// One super-resolution run from files to file.
struct SrJobSpec {
    std::string input;
    std::string output;
    MagnitudePredictorSpec predictor = BandReplicationPredictor{};
    PhaseMethod phase = FlipPhase{};
    StftConfig stft{};
    BandEdges band{};
    ResidualBand residual_band = ResidualBand::Passthrough;
    std::string trace_path;  ///< GLA residual trace CSV; empty = none
    SampleFormat output_format = SampleFormat::Float32;

    void validate() const {
        detail::require(!input.empty() && !output.empty(), ErrorCode::Domain, "input and output paths are required");
        detail::require(input != output, ErrorCode::Domain, "input and output paths must differ");
        stft.validate();
    }
};

// In-memory sources, one channel at a time.
struct OracleMagnitude {
    Waveform reference;
};
struct ImportedMagnitude {
    MagnitudeSpectrogram hfc;
};
using MagnitudeSource = std::variant<OracleMagnitude, BandReplicationPredictor, ImportedMagnitude>;

struct ReferencePhaseSource {
    Waveform reference;
};
using PhaseSource = std::variant<FlipPhase, GlaPhase, ReferencePhaseSource>;

struct SrOptions {
    StftConfig stft{};
    BandLayout layout{};
    ResidualBand residual_band = ResidualBand::Passthrough;
};

struct SrResult {
    Waveform output;
    GlaTrace trace;                 ///< filled by the GLA strategy
    bool reference_frames_adjusted = false;
};

namespace detail {

template <typename F>
auto run_stage(const char* label, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.code(), std::string(label) + ": " + e.detail());
    }
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

/// Joint magnitude/phase bandwidth extension of one channel:
///   1. X_LFC from stft(lr)
///   2. HFC magnitude from `magnitude_source`
///   3. HFC phase from `phase_source`
///   4-5. X_HR = [X_LFC | M_HFC e^{i P_HFC} | residual]
///   6. istft
inline SrResult super_resolve(const Waveform& lr, const MagnitudeSource& magnitude_source,
                              const PhaseSource& phase_source, const SrOptions& opt) {
    const BandLayout& layout = opt.layout;
    const auto parts = detail::run_stage("stage 1 (LFC analysis)", [&] {
        lr.validate();
        layout.validate();
        detail::require(layout.n_bins == opt.stft.bins(), ErrorCode::Shape, "layout does not match the STFT config");
        return band_split(stft(lr, opt.stft), layout);
    });
    const std::size_t frames = parts.lfc.frames();

    auto residual = parts.residual;
    if (opt.residual_band == ResidualBand::Zero)
        residual = same_shape<ComplexSpectrogram>(parts.residual);

    const MagnitudeSpectrogram hfc_mag = detail::run_stage("stage 2 (HFC magnitude)", [&] {
        return std::visit(
            detail::overloaded{
                [&](const OracleMagnitude& o) { return predict_oracle(o.reference, opt.stft, layout, frames); },
                [&](const BandReplicationPredictor& p) {
                    return predict_band_replication(magnitude(parts.lfc), p, layout);
                },
                [&](const ImportedMagnitude& m) {
                    detail::require(m.hfc.frames() == frames && m.hfc.bins() == layout.hfc_width(),
                                    ErrorCode::Shape,
                                    "imported magnitude is " + shape_string(m.hfc.frames(), m.hfc.bins()) +
                                        ", expected " + shape_string(frames, layout.hfc_width()));
                    validate(m.hfc);
                    MagnitudeSpectrogram placed(frames, layout.hfc_width(), opt.stft, lr.sample_rate, layout.k_lo);
                    std::ranges::copy(m.hfc.values(), placed.values().begin());
                    return placed;
                },
            },
            magnitude_source);
    });

    SrResult result;
    const PhaseSpectrogram hfc_phase = detail::run_stage("stage 3 (HFC phase)", [&] {
        return std::visit(
            detail::overloaded{
                [&](const FlipPhase&) { return flip_phase(phase(parts.lfc), layout); },
                [&](const GlaPhase& g) {
                    auto full = band_concat(magnitude(parts.lfc), hfc_mag, magnitude(residual), layout);
                    GlaConfig cfg{g.iterations, g.init, layout, true};
                    auto gla = gla_reconstruct(full, parts.lfc, cfg);
                    result.trace = std::move(gla.trace);
                    return phase(slice_bins(gla.spectrogram, layout.k_lo, layout.k_hi));
                },
                [&](const ReferencePhaseSource& r) {
                    auto ref = extract_reference_phase(r.reference, opt.stft, layout, frames);
                    result.reference_frames_adjusted = ref.frames_adjusted;
                    return std::move(ref.phase);
                },
            },
            phase_source);
    });

    result.output = detail::run_stage("stage 4-6 (synthesis)", [&] {
        const auto hfc = polar(hfc_mag, hfc_phase);
        return istft(band_concat(parts.lfc, hfc, residual, layout));
    });
    return result;
}

namespace detail {

inline const Waveform& channel_of(const Audio& audio, std::size_t c, const std::string& path) {
    require(!audio.channels.empty(), ErrorCode::Shape, path + ": no channels");
    if (audio.channels.size() == 1) return audio.channels.front();
    require(c < audio.channels.size(), ErrorCode::Shape, path + ": fewer channels than the input");
    return audio.channels[c];
}

}  // namespace detail

/// File-level job: every channel is processed independently. Oracle and
/// reference files may be mono (shared by all channels) or match the
/// input's channel count.
inline std::vector<SrResult> super_resolve(const SrJobSpec& job) {
    job.validate();
    const Audio input = wav_read(job.input);
    detail::require(!input.channels.empty(), ErrorCode::Shape, job.input + ": no channels");
    const SrOptions opt{job.stft, job.band.layout(input.sample_rate(), job.stft), job.residual_band};

    std::optional<Audio> oracle;
    std::optional<MagnitudeSpectrogram> imported;
    std::optional<Audio> reference;
    if (auto* o = std::get_if<OraclePredictor>(&job.predictor)) oracle = wav_read(o->reference_path);
    if (auto* i = std::get_if<ImportPredictor>(&job.predictor)) {
        detail::require(input.channels.size() == 1, ErrorCode::Shape, "imported magnitudes need a mono input");
        imported = load_magnitude(i->spectrogram_path, opt.stft.frames_for(input.frames()), opt.layout.hfc_width(),
                                  opt.layout.k_lo, opt.stft);
    }
    if (auto* r = std::get_if<ReferencePhaseFile>(&job.phase)) reference = wav_read(r->path);

    std::vector<SrResult> results;
    for (std::size_t c = 0; c < input.channels.size(); ++c) {
        MagnitudeSource mag = BandReplicationPredictor{};
        if (oracle) mag = OracleMagnitude{detail::channel_of(*oracle, c, job.input)};
        else if (imported) mag = ImportedMagnitude{*imported};
        else mag = std::get<BandReplicationPredictor>(job.predictor);

        PhaseSource ph = FlipPhase{};
        if (reference) ph = ReferencePhaseSource{detail::channel_of(*reference, c, job.input)};
        else if (auto* g = std::get_if<GlaPhase>(&job.phase)) ph = *g;

        results.push_back(super_resolve(input.channels[c], mag, ph, opt));
    }

    std::vector<Waveform> out;
    for (const auto& r : results) out.push_back(r.output);
    wav_write(job.output, out, job.output_format);
    if (!job.trace_path.empty() && std::holds_alternative<GlaPhase>(job.phase))
        write_trace_csv(job.trace_path, results.front().trace);
    return results;
}

using Logger = std::function<void(const std::string&)>;

inline void log_to_stderr(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

struct ReportRow {
    std::string file;
    std::string method;
    EvalReport report;
    bool failed = false;
};

inline void write_report(std::ostream& out, const std::vector<ReportRow>& rows,
                         const std::vector<std::string>& notes = {}) {
    out << kReportHeader << '\n';
    for (const auto& r : rows) {
        if (r.failed) out << r.file << ',' << r.method << ",nan,nan,nan,0\n";
        else out << report_row(r.file, r.method, r.report) << '\n';
    }
    out << report_metadata() << '\n';
    for (const auto& n : notes) out << "# " << n << '\n';
}

inline void write_report(const std::string& path, const std::vector<ReportRow>& rows,
                         const std::vector<std::string>& notes = {}) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    detail::require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path + " for writing");
    write_report(out, rows, notes);
    detail::require(static_cast<bool>(out), ErrorCode::Io, "failed writing " + path);
}

namespace detail {

inline EvalReport mean_of(const std::vector<const EvalReport*>& reports) {
    EvalReport m;
    for (const auto* r : reports) {
        m.lsd_hf += r->lsd_hf;
        m.lsd_full += r->lsd_full;
        m.snr += r->snr;
        m.frames_compared += r->frames_compared;
        m.band = r->band;
    }
    const double n = static_cast<double>(reports.size());
    m.lsd_hf /= n;
    m.lsd_full /= n;
    m.snr /= n;
    m.frames_compared = reports.empty() ? 0 : m.frames_compared / reports.size();
    return m;
}

// Runs body(i) for i in [0, count) on up to `jobs` threads.
template <typename F>
void parallel_for(std::size_t count, std::size_t jobs, F&& body) {
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

struct PhaseStudyOptions {
    StftConfig stft{};
    BandEdges band{};
    std::size_t gla_iterations = 100;
    std::size_t jobs = 1;
    Logger warn = log_to_stderr;
};

inline constexpr const char* kStudyMethods[] = {"LR", "FLIP", "GLA", "REF"};

struct PhaseStudyResult {
    std::vector<ReportRow> rows;   ///< 4 rows per clip, then 4 mean rows
    EvalReport mean[4];            ///< indexed like kStudyMethods
    std::size_t clips_used = 0;
    bool snr_anomaly = false;      ///< LR baseline mean SNR >= GLA mean SNR
    std::vector<GlaTrace> gla_traces;  ///< first channel of each used clip
};

/// Oracle-magnitude comparison of phase strategies. Each clip is band-limited
/// with the brickwall filter at lo_hz, then rebuilt with oracle HFC
/// magnitudes and FLIP, GLA and reference (ground-truth) phase; the LR
/// signal itself is the zero-filled baseline.
inline PhaseStudyResult run_phase_study(const std::vector<std::string>& clips, const PhaseStudyOptions& opt) {
    detail::require(!clips.empty(), ErrorCode::Domain, "phase study needs at least one clip");

    struct ClipOutcome {
        bool ok = false;
        EvalReport reports[4];
        GlaTrace trace;
    };
    std::vector<ClipOutcome> outcomes(clips.size());

    detail::parallel_for(clips.size(), opt.jobs, [&](std::size_t i) {
        try {
            const Audio hr = wav_read(clips[i]);
            detail::require(!hr.channels.empty(), ErrorCode::Shape, "no channels");
            const BandLayout layout = opt.band.layout(hr.sample_rate(), opt.stft);
            const SrOptions sr{opt.stft, layout, ResidualBand::Passthrough};
            const LowpassSpec lp{LowpassMode::Brickwall, opt.band.lo_hz};

            std::vector<Waveform> truth = hr.channels;
            std::vector<std::vector<Waveform>> est(4);
            for (std::size_t c = 0; c < hr.channels.size(); ++c) {
                const Waveform& x = hr.channels[c];
                const Waveform lr = lowpass(x, lp, opt.stft);
                const OracleMagnitude oracle{x};
                est[0].push_back(lr);
                est[1].push_back(super_resolve(lr, oracle, FlipPhase{}, sr).output);
                auto gla = super_resolve(lr, oracle, GlaPhase{opt.gla_iterations, GlaInit::ZeroPhase}, sr);
                est[2].push_back(std::move(gla.output));
                if (c == 0) outcomes[i].trace = std::move(gla.trace);
                est[3].push_back(super_resolve(lr, oracle, ReferencePhaseSource{x}, sr).output);
            }
            for (std::size_t m = 0; m < 4; ++m) outcomes[i].reports[m] = evaluate(truth, est[m], opt.stft, layout);
            outcomes[i].ok = true;
        } catch (const std::exception& e) {
            outcomes[i].ok = false;
            if (opt.warn) opt.warn("skipping " + clips[i] + ": " + e.what());
        }
    });

    PhaseStudyResult result;
    std::vector<const EvalReport*> per_method[4];
    for (std::size_t i = 0; i < clips.size(); ++i) {
        if (!outcomes[i].ok) continue;
        ++result.clips_used;
        result.gla_traces.push_back(outcomes[i].trace);
        for (std::size_t m = 0; m < 4; ++m) {
            result.rows.push_back({clips[i], kStudyMethods[m], outcomes[i].reports[m]});
            per_method[m].push_back(&outcomes[i].reports[m]);
        }
    }
    detail::require(result.clips_used > 0, ErrorCode::Io, "every clip in the phase study was skipped");
    for (std::size_t m = 0; m < 4; ++m) {
        result.mean[m] = detail::mean_of(per_method[m]);
        result.rows.push_back({"mean", kStudyMethods[m], result.mean[m]});
    }
    result.snr_anomaly = result.mean[0].snr >= result.mean[2].snr;
    return result;
}

inline std::vector<std::string> phase_study_notes(const PhaseStudyResult& r) {
    std::vector<std::string> notes;
    if (r.snr_anomaly)
        notes.push_back("snr_anomaly: LR baseline mean SNR is at least the GLA mean SNR "
                        "although GLA has lower LSD; SNR rewards missing HFC over HFC with imperfect phase");
    return notes;
}

/// One row per (truth, estimate) pair in input order, then a mean row over
/// the pairs that succeeded. Failed pairs are logged and reported as nan rows.
inline std::vector<ReportRow> evaluate_batch(const std::vector<std::pair<std::string, std::string>>& pairs,
                                             const BandEdges& band, const StftConfig& cfg = {},
                                             const Logger& warn = log_to_stderr) {
    std::vector<ReportRow> rows;
    std::vector<const EvalReport*> ok;
    rows.reserve(pairs.size() + 1);
    for (const auto& [truth_path, est_path] : pairs) {
        ReportRow row{truth_path, est_path, {}, false};
        try {
            const Audio truth = wav_read(truth_path);
            const Audio est = wav_read(est_path);
            detail::require(truth.sample_rate() == est.sample_rate(), ErrorCode::Shape, "sample rates differ");
            row.report = evaluate(truth.channels, est.channels, cfg, band.layout(truth.sample_rate(), cfg));
        } catch (const std::exception& e) {
            row.failed = true;
            if (warn) warn("evaluation of " + truth_path + " vs " + est_path + " failed: " + e.what());
        }
        rows.push_back(std::move(row));
    }
    for (const auto& r : rows)
        if (!r.failed) ok.push_back(&r.report);
    if (ok.empty()) rows.push_back({"mean", "all", {}, true});
    else rows.push_back({"mean", "all", detail::mean_of(ok), false});
    return rows;
}

}  // namespace bwx
