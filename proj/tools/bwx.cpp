// bwx: command-line front end for band-limited music super-resolution.
//
// Exit codes: 0 success, 1 usage error, 2 I/O or input-data error,
// 3 numerical error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bwx/bwx.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumerical = 3;

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(bwx::ErrorCode code) {
    switch (code) {
        case bwx::ErrorCode::Domain:
        case bwx::ErrorCode::UnsupportedLayout:
            return kExitUsage;
        case bwx::ErrorCode::Numerical:
            return kExitNumerical;
        default:
            return kExitIo;
    }
}

struct StftFlags {
    std::size_t frame = 2048;
    std::size_t hop = 256;
    double lo_hz = 4000.0;
    double hi_hz = 8000.0;

    void add_to(CLI::App* cmd, bool with_stft = true) {
        if (with_stft) {
            cmd->add_option("--frame", frame, "STFT frame length")->capture_default_str();
            cmd->add_option("--hop", hop, "STFT hop")->capture_default_str();
        }
        cmd->add_option("--lo-hz", lo_hz, "LFC/HFC boundary in Hz")->capture_default_str();
        cmd->add_option("--hi-hz", hi_hz, "upper HFC edge in Hz")->capture_default_str();
    }
    [[nodiscard]] bwx::StftConfig stft() const { return {frame, hop, bwx::Window::Hann}; }
    [[nodiscard]] bwx::BandEdges band() const { return {lo_hz, hi_hz}; }
};

// "name" or "name:argument"
std::pair<std::string, std::string> split_spec(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) return {s, ""};
    return {s.substr(0, colon), s.substr(colon + 1)};
}

bwx::MagnitudePredictorSpec parse_mag(const std::string& s, std::size_t anchors, double tilt) {
    const auto [kind, arg] = split_spec(s);
    if (kind == "oracle" && !arg.empty()) return bwx::OraclePredictor{arg};
    if (kind == "import" && !arg.empty()) return bwx::ImportPredictor{arg};
    if (kind == "sbr" && arg.empty()) return bwx::BandReplicationPredictor{anchors, tilt};
    throw UsageError("--mag must be oracle:<path>, sbr or import:<path>, got '" + s + "'");
}

bwx::PhaseMethod parse_phase(const std::string& s, std::size_t iters, const std::string& init) {
    const auto [kind, arg] = split_spec(s);
    if (kind == "flip" && arg.empty()) return bwx::FlipPhase{};
    if (kind == "gla" && arg.empty()) {
        if (init != "zero" && init != "flip") throw UsageError("--gla-init must be zero or flip");
        return bwx::GlaPhase{iters, init == "flip" ? bwx::GlaInit::FlipPhase : bwx::GlaInit::ZeroPhase};
    }
    if (kind == "ref" && !arg.empty()) return bwx::ReferencePhaseFile{arg};
    throw UsageError("--phase must be flip, gla or ref:<path>, got '" + s + "'");
}

std::vector<std::string> list_clips(const std::string& where) {
    std::vector<std::string> clips;
    if (fs::is_directory(where)) {
        for (const auto& entry : fs::directory_iterator(where)) {
            auto ext = entry.path().extension().string();
            std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (entry.is_regular_file() && ext == ".wav") clips.push_back(entry.path().string());
        }
        std::ranges::sort(clips);
    } else if (fs::path(where).extension() == ".wav") {
        clips.push_back(where);
    } else {
        std::ifstream in(where);
        if (!in) throw bwx::Error(bwx::ErrorCode::Io, "cannot open clip list " + where);
        for (std::string line; std::getline(in, line);) {
            while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
            if (!line.empty() && line.front() != '#') clips.push_back(line);
        }
    }
    if (clips.empty()) throw UsageError("no clips found in " + where);
    return clips;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bandwidth extension for band-limited music"};
    app.require_subcommand(1);

    // prepare
    std::string prep_in, prep_out, prep_filter = "brickwall";
    double prep_cutoff = 4000.0;
    std::size_t prep_taps = 511;
    auto* prepare = app.add_subcommand("prepare", "Low-pass an HR file into its LR companion");
    prepare->add_option("--in", prep_in, "HR input WAV")->required();
    prepare->add_option("--out", prep_out, "LR output WAV")->required();
    prepare->add_option("--cutoff-hz", prep_cutoff)->capture_default_str();
    prepare->add_option("--filter", prep_filter)->check(CLI::IsMember({"brickwall", "fir"}))->capture_default_str();
    prepare->add_option("--taps", prep_taps, "FIR taps (odd)")->capture_default_str();

    // sr
    bwx::SrJobSpec job;
    std::string sr_mag, sr_phase, sr_init = "zero", sr_residual = "pass", sr_format = "float32";
    std::size_t sr_iters = 100, sr_anchors = 4;
    double sr_tilt = 1.0;
    StftFlags sr_flags;
    auto* sr = app.add_subcommand("sr", "Super-resolve an LR file");
    sr->add_option("--in", job.input, "LR input WAV")->required();
    sr->add_option("--out", job.output, "HR output WAV")->required();
    sr->add_option("--mag", sr_mag, "oracle:<path> | sbr | import:<path>")->required();
    sr->add_option("--phase", sr_phase, "flip | gla | ref:<path>")->required();
    sr->add_option("--gla-iters", sr_iters)->capture_default_str();
    sr->add_option("--gla-init", sr_init)->check(CLI::IsMember({"zero", "flip"}))->capture_default_str();
    sr->add_option("--residual", sr_residual)->check(CLI::IsMember({"pass", "zero"}))->capture_default_str();
    sr->add_option("--trace", job.trace_path, "GLA residual trace CSV");
    sr->add_option("--sbr-anchors", sr_anchors, "band replication gain anchor bins")->capture_default_str();
    sr->add_option("--sbr-tilt", sr_tilt, "band replication per-bin tilt")->capture_default_str();
    sr->add_option("--format", sr_format, "output sample format")
        ->check(CLI::IsMember({"float32", "pcm16"}))
        ->capture_default_str();
    sr_flags.add_to(sr);

    // eval
    std::string ev_truth, ev_est, ev_out;
    StftFlags ev_flags;
    auto* eval = app.add_subcommand("eval", "LSD/SNR of an estimate against ground truth");
    eval->add_option("--truth", ev_truth)->required();
    eval->add_option("--est", ev_est)->required();
    eval->add_option("--out", ev_out, "report CSV")->required();
    ev_flags.add_to(eval, false);

    // phase-study
    std::string ps_clips, ps_out;
    std::size_t ps_jobs = 1, ps_iters = 100;
    StftFlags ps_flags;
    auto* study = app.add_subcommand("phase-study", "Compare FLIP, GLA and reference phase with oracle magnitudes");
    study->add_option("--clips", ps_clips, "directory of WAVs, one WAV, or a text list")->required();
    study->add_option("--out", ps_out, "report CSV")->required();
    study->add_option("--jobs", ps_jobs, "clips processed in parallel")->check(CLI::PositiveNumber)->capture_default_str();
    study->add_option("--gla-iters", ps_iters)->capture_default_str();
    ps_flags.add_to(study, false);

    // spec export | import
    std::string sp_in, sp_out, sp_kind = "complex", sp_band = "full";
    std::size_t sp_channel = 0;
    StftFlags sp_flags;
    auto* spec = app.add_subcommand("spec", "BWXSPEC spectrogram files");
    spec->require_subcommand(1);
    auto* spec_export = spec->add_subcommand("export", "STFT of a WAV channel to BWXSPEC");
    spec_export->add_option("--in", sp_in)->required();
    spec_export->add_option("--out", sp_out)->required();
    spec_export->add_option("--kind", sp_kind)->check(CLI::IsMember({"magnitude", "complex"}))->capture_default_str();
    spec_export->add_option("--band", sp_band, "full spectrum or the HFC band only")
        ->check(CLI::IsMember({"full", "hfc"}))
        ->capture_default_str();
    spec_export->add_option("--channel", sp_channel)->capture_default_str();
    sp_flags.add_to(spec_export);
    auto* spec_import = spec->add_subcommand("import", "Resynthesize a full-band complex BWXSPEC to WAV");
    spec_import->add_option("--in", sp_in)->required();
    spec_import->add_option("--out", sp_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*prepare) {
            bwx::LowpassSpec lp{prep_filter == "fir" ? bwx::LowpassMode::FirSinc : bwx::LowpassMode::Brickwall,
                                prep_cutoff, prep_taps};
            bwx::make_pair(prep_in, prep_out, lp);
        } else if (*sr) {
            job.predictor = parse_mag(sr_mag, sr_anchors, sr_tilt);
            job.phase = parse_phase(sr_phase, sr_iters, sr_init);
            job.stft = sr_flags.stft();
            job.band = sr_flags.band();
            job.residual_band = sr_residual == "zero" ? bwx::ResidualBand::Zero : bwx::ResidualBand::Passthrough;
            job.output_format = sr_format == "pcm16" ? bwx::SampleFormat::Pcm16 : bwx::SampleFormat::Float32;
            const auto results = bwx::super_resolve(job);
            for (const auto& r : results)
                if (r.reference_frames_adjusted)
                    std::cerr << "warning: reference frame count differs from the input; padded or truncated\n";
        } else if (*eval) {
            const auto rows = bwx::evaluate_batch({{ev_truth, ev_est}}, ev_flags.band());
            bwx::write_report(ev_out, rows);
            if (rows.front().failed) return kExitIo;
        } else if (*study) {
            bwx::PhaseStudyOptions opt;
            opt.band = ps_flags.band();
            opt.gla_iterations = ps_iters;
            opt.jobs = ps_jobs;
            const auto result = bwx::run_phase_study(list_clips(ps_clips), opt);
            const auto notes = bwx::phase_study_notes(result);
            bwx::write_report(ps_out, result.rows, notes);
            for (const auto& n : notes) std::cerr << "note: " << n << '\n';
        } else if (*spec_export) {
            const auto audio = bwx::wav_read(sp_in);
            if (sp_channel >= audio.channels.size()) throw UsageError("--channel out of range");
            const auto& ch = audio.channels[sp_channel];
            auto x = bwx::stft(ch, sp_flags.stft());
            if (sp_band == "hfc") {
                const auto layout = sp_flags.band().layout(ch.sample_rate, sp_flags.stft());
                x = bwx::slice_bins(x, layout.k_lo, layout.k_hi);
            }
            if (sp_kind == "magnitude") bwx::spec_write(sp_out, bwx::magnitude(x));
            else bwx::spec_write(sp_out, x);
        } else if (*spec_import) {
            const auto file = bwx::spec_read(sp_in);
            const auto* x = std::get_if<bwx::ComplexSpectrogram>(&file.data);
            if (x == nullptr) throw UsageError("import needs a complex spectrogram");
            if (!x->is_full_band()) throw UsageError("import needs all frame_len/2 + 1 bins");
            if (file.header.sample_rate == 0) throw UsageError("file does not record a sample rate");
            bwx::wav_write(sp_out, bwx::istft(*x), bwx::SampleFormat::Float32);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const bwx::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
