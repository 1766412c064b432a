#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "bwx/metrics.hpp"
#include "bwx/phase.hpp"
#include "bwx/prep.hpp"
#include "clipsynth.hpp"
#include "support/oracles.hpp"

using namespace bwx;
using Catch::Approx;

namespace {

MagnitudeSpectrogram random_magnitude(std::size_t frames, std::size_t bins, std::mt19937_64& gen) {
    MagnitudeSpectrogram m(frames, bins, StftConfig{}, 44100);
    for (double& v : m.values()) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        v = u < 0.05 ? 0.0 : std::pow(10.0, 4.0 * u - 3.0);
    }
    return m;
}

std::vector<std::vector<double>> rows_of(const MagnitudeSpectrogram& m) {
    std::vector<std::vector<double>> out;
    for (std::size_t l = 0; l < m.frames(); ++l) out.emplace_back(m.row(l).begin(), m.row(l).end());
    return out;
}

}  // namespace

TEST_CASE("lsd of identical inputs is exactly zero", "[metrics]") {
    std::mt19937_64 gen(1);
    const auto m = random_magnitude(12, 1025, gen);
    CHECK(lsd(m, m, {0, 1025}) == 0.0);
    CHECK(lsd(m, m, {186, 372}) == 0.0);
}

TEST_CASE("lsd is symmetric", "[metrics]") {
    std::mt19937_64 gen(2);
    for (int i = 0; i < 100; ++i) {
        const auto a = random_magnitude(6, 64, gen);
        const auto b = random_magnitude(6, 64, gen);
        CHECK(lsd(a, b, {0, 64}) == lsd(b, a, {0, 64}));
    }
}

TEST_CASE("lsd matches a scalar brute-force evaluation", "[metrics]") {
    std::mt19937_64 gen(3);
    const auto a = random_magnitude(9, 300, gen);
    const auto b = random_magnitude(9, 300, gen);
    CHECK(lsd(a, b, {20, 250}) == Approx(test::brute_force_lsd(rows_of(a), rows_of(b), 20, 250)).epsilon(1e-12));
}

TEST_CASE("lsd of a single tenfold power perturbation", "[metrics]") {
    const std::size_t frames = 7, bins = 186;
    MagnitudeSpectrogram est(frames, 1025, StftConfig{}, 44100);
    for (double& v : est.values()) v = 1.0;
    auto truth = est;
    truth(3, 200) = std::sqrt(10.0);
    const double expected = (10.0 / std::sqrt(static_cast<double>(bins))) / frames;
    CHECK(std::abs(lsd(truth, est, {186, 372}) - expected) < 1e-9);
    CHECK(std::abs(test::brute_force_lsd(rows_of(truth), rows_of(est), 186, 372) - expected) < 1e-9);
}

TEST_CASE("lsd over a range combines sub-band inner sums by bin-weighted RMS", "[metrics]") {
    std::mt19937_64 gen(4);
    const auto a = random_magnitude(10, 400, gen);
    const auto b = random_magnitude(10, 400, gen);
    const auto full = lsd_per_frame(a, b, {0, 372});
    const auto lo = lsd_per_frame(a, b, {0, 186});
    const auto hi = lsd_per_frame(a, b, {186, 372});
    for (std::size_t l = 0; l < full.size(); ++l) {
        const double combined = std::sqrt((186.0 * lo[l] * lo[l] + 186.0 * hi[l] * hi[l]) / 372.0);
        CHECK(full[l] == Approx(combined).epsilon(1e-12));
    }
}

TEST_CASE("lsd validates its inputs", "[metrics]") {
    std::mt19937_64 gen(5);
    const auto a = random_magnitude(3, 100, gen);
    const auto b = random_magnitude(4, 100, gen);
    CHECK_THROWS_AS(lsd(a, b, {0, 100}), Error);
    try {
        (void)lsd(a, a, {10, 10});
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Domain);
    }
}

TEST_CASE("snr closed forms", "[metrics]") {
    const auto x = test::random_signal(5000, 6);
    Waveform zero{std::vector<double>(5000, 0.0), 44100};
    Waveform half = x;
    for (double& v : half.samples) v *= 0.5;
    CHECK(snr(x, x) == Approx(120.0));
    CHECK(snr(x, zero) == Approx(0.0).margin(1e-12));
    CHECK(std::abs(snr(x, half) - 6.02) < 0.01);
    CHECK(snr(x, half) == Approx(20.0 * std::log10(2.0)).epsilon(1e-12));
}

TEST_CASE("snr is invariant under joint scaling", "[metrics]") {
    const auto x = test::random_signal(3000, 7);
    const auto y = test::random_signal(3000, 8);
    for (double c : {-3.0, 1e-3, 17.0}) {
        Waveform xs = x, ys = y;
        for (double& v : xs.samples) v *= c;
        for (double& v : ys.samples) v *= c;
        CHECK(snr(xs, ys) == Approx(snr(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("snr errors", "[metrics]") {
    const auto x = test::random_signal(100, 9);
    const auto y = test::random_signal(99, 9);
    CHECK_THROWS_AS(snr(x, y), Error);
    const Waveform zero{std::vector<double>(100, 0.0), 44100};
    try {
        (void)snr(zero, x);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Domain);
    }
}

TEST_CASE("consistency residual", "[metrics]") {
    const auto x = clips::synthesize_clip(4, 1.5);
    const auto s = stft(x);
    CHECK(consistency_residual(s) < 1e-6);
    CHECK(consistency_residual(ComplexSpectrogram(5, 1025, StftConfig{}, 44100)) == 0.0);

    // oracle magnitude + flip phase vs. the GLA reconstruction from the same data
    const BandLayout layout{186, 372, 1025};
    const auto mag = magnitude(s);
    const auto lfc = slice_bins(s, 0, 186);
    const auto gla = gla_reconstruct(mag, lfc, GlaConfig{100, GlaInit::ZeroPhase, layout, false});
    const auto flip_start = gla_initial_estimate(mag, lfc, GlaConfig{0, GlaInit::FlipPhase, layout, false});
    CHECK(consistency_residual(flip_start) > consistency_residual(gla.spectrogram));
}

TEST_CASE("evaluate of a signal against itself", "[metrics]") {
    const auto x = clips::synthesize_clip(3, 1.0);
    const auto r = evaluate(x, x, StftConfig{}, BandLayout{186, 372, 1025});
    CHECK(r.lsd_hf == 0.0);
    CHECK(r.lsd_full == 0.0);
    CHECK(r.snr == Approx(120.0));
    CHECK(r.frames_compared == StftConfig{}.frames_for(x.size()));
}

TEST_CASE("LR input has a large HFC distance to the HR original", "[metrics]") {
    const auto hr = clips::synthesize_clip(1, 2.0);
    const auto lr = lowpass(hr, LowpassSpec{});
    const auto r = evaluate(hr, lr, StftConfig{}, BandLayout{186, 372, 1025});
    CHECK(r.lsd_hf > 20.0);
    CHECK(r.lsd_full < r.lsd_hf);
}

TEST_CASE("report rows use four decimals", "[metrics]") {
    EvalReport r{1.23456, 0.5, 120.0, 42, {}};
    CHECK(report_row("a.wav", "GLA", r) == "a.wav,GLA,1.2346,0.5000,120.0000,42");
}
