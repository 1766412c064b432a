#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "bwx/stft.hpp"
#include "support/oracles.hpp"

using namespace bwx;
using Catch::Approx;

namespace {

double relative_frobenius(const ComplexSpectrogram& a, const ComplexSpectrogram& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        num += std::norm(a.values()[i] - b.values()[i]);
        den += std::norm(b.values()[i]);
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

TEST_CASE("bin_index rounds to the nearest bin", "[stft]") {
    CHECK(bin_index(4000, 44100, 2048) == 186);
    CHECK(bin_index(8000, 44100, 2048) == 372);
    CHECK(bin_index(0, 44100, 2048) == 0);
    CHECK(bin_index(22050, 44100, 2048) == 1024);
}

TEST_CASE("bin_index rejects frequencies outside [0, Nyquist]", "[stft]") {
    CHECK_THROWS_MATCHES(bin_index(-1.0, 44100, 2048), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::Domain; }));
    CHECK_THROWS_AS(bin_index(22051.0, 44100, 2048), Error);
}

TEST_CASE("stft of silence is an all-zero 25x1025 spectrogram", "[stft]") {
    const Waveform x{std::vector<double>(8192, 0.0), 44100};
    const auto s = stft(x);
    CHECK(s.frames() == 25);
    CHECK(s.bins() == 1025);
    for (auto z : s.values()) CHECK(z == std::complex<double>{});
}

TEST_CASE("stft rejects signals shorter than one frame", "[stft]") {
    const Waveform x{std::vector<double>(2047, 0.1), 44100};
    try {
        (void)stft(x);
        FAIL("expected a length error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Length);
    }
}

TEST_CASE("stft of a bin-centred sine peaks at that bin and matches a direct DFT", "[stft]") {
    const double f = 100.0 * 44100.0 / 2048.0;
    const auto x = test::sine(f, 2048 + 6 * 256);
    const auto s = stft(x);
    REQUIRE(s.frames() == 7);
    for (std::size_t l = 0; l < s.frames(); ++l) {
        auto row = s.row(l);
        const auto peak = std::ranges::max_element(row, {}, [](auto z) { return std::abs(z); });
        CHECK(peak - row.begin() == 100);

        const auto oracle = test::direct_dft_frame(x.samples, l * 256, 2048);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            num += std::norm(row[k] - oracle[k]);
            den += std::norm(oracle[k]);
        }
        CHECK(std::sqrt(num / den) < 1e-9);
    }
}

TEST_CASE("impulse analysis follows the window value at the impulse", "[stft]") {
    std::vector<double> samples(4096, 0.0);
    SECTION("impulse at sample 0 only touches frame 0, with magnitude window[0]") {
        samples[0] = 1.0;
        const auto s = stft(Waveform{samples, 44100});
        for (std::size_t l = 0; l < s.frames(); ++l)
            for (auto z : s.row(l)) CHECK(std::abs(z) == Approx(l == 0 ? test::hann(0, 2048) : 0.0).margin(1e-15));
    }
    SECTION("impulse at sample 300 gives flat frames of height window[300 - start]") {
        samples[300] = 1.0;
        const auto s = stft(Waveform{samples, 44100});
        for (std::size_t l = 0; l < s.frames(); ++l) {
            const double expect = 300 >= l * 256 ? test::hann(300 - l * 256, 2048) : 0.0;
            for (auto z : s.row(l)) CHECK(std::abs(z) == Approx(expect).margin(1e-12));
        }
    }
}

TEST_CASE("stft matches the direct-DFT oracle on a random one-second signal", "[stft]") {
    const auto x = test::random_signal(44100, 7);
    const auto s = stft(x);
    // Every 8th frame keeps the O(n^2) oracle affordable while touching the whole signal.
    for (std::size_t l = 0; l < s.frames(); l += 8) {
        const auto oracle = test::direct_dft_frame(x.samples, l * 256, 2048);
        double worst = 0.0;
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < oracle.size(); ++k) {
            num += std::norm(s(l, k) - oracle[k]);
            den += std::norm(oracle[k]);
        }
        worst = std::max(worst, std::sqrt(num / den));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("Parseval holds per frame with one-sided weights", "[stft]") {
    const auto x = test::random_signal(2048 * 3, 11);
    const auto s = stft(x);
    for (std::size_t l = 0; l < s.frames(); ++l) {
        double time_energy = 0.0;
        for (std::size_t i = 0; i < 2048; ++i) {
            const double v = x.samples[l * 256 + i] * test::hann(i, 2048);
            time_energy += v * v;
        }
        double freq_energy = 0.0;
        for (std::size_t k = 0; k < s.bins(); ++k)
            freq_energy += (k == 0 || k == 1024 ? 1.0 : 2.0) * std::norm(s(l, k));
        CHECK(freq_energy / 2048.0 == Approx(time_energy).epsilon(1e-9));
    }
}

TEST_CASE("overlapped squared window is constant over the interior", "[stft]") {
    for (std::size_t hop : {256u, 512u}) {
        const StftConfig cfg{2048, hop};
        const auto w = make_window(cfg);
        const std::size_t frames = 40;
        std::vector<double> sum(cfg.synthesis_length(frames), 0.0);
        for (std::size_t l = 0; l < frames; ++l)
            for (std::size_t i = 0; i < 2048; ++i) sum[l * hop + i] += w[i] * w[i];
        const double ref = sum[2048];
        for (std::size_t i = 2048; i + 2048 < sum.size(); ++i) CHECK(std::abs(sum[i] - ref) < 1e-9 * ref);
    }
}

TEST_CASE("istft inverts stft on interior samples", "[stft]") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const std::size_t n = 4 * 2048 + seed * 977;
        const auto x = test::random_signal(n, seed);
        const auto y = istft(stft(x));
        REQUIRE(y.size() == (stft(x).frames() - 1) * 256 + 2048);
        const std::size_t edge = 2048 - 256;
        CHECK(test::relative_rms_error(x.samples, y.samples, edge, y.size() - edge) < 1e-6);
    }
}

TEST_CASE("istft of a zero spectrogram is silent", "[stft]") {
    const ComplexSpectrogram z(9, 1025, StftConfig{}, 44100);
    const auto y = istft(z);
    CHECK(y.size() == 8 * 256 + 2048);
    for (double v : y.samples) CHECK(v == 0.0);
}

TEST_CASE("single-frame synthesis returns the normalization-corrected frame", "[stft]") {
    const auto x = test::sine(1234.5, 2048);
    ComplexSpectrogram s(1, 1025, StftConfig{}, 44100);
    const auto half = test::direct_dft_frame(x.samples, 0, 2048);
    std::ranges::copy(half, s.row(0).begin());
    const auto y = istft(s);
    const auto frame = test::direct_idft(half, 2048);
    REQUIRE(y.size() == 2048);
    for (std::size_t i = 0; i < 2048; ++i) {
        const double w = test::hann(i, 2048);
        const double expect = w * frame[i] / std::max(w * w, 1e-12);
        CHECK(y.samples[i] == Approx(expect).margin(1e-9));
    }
}

TEST_CASE("istft rejects spectrograms that do not span the configured bins", "[stft]") {
    const ComplexSpectrogram bad(3, 1000, StftConfig{}, 44100);
    try {
        (void)istft(bad);
        FAIL("expected a shape error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Shape);
    }
}

TEST_CASE("consistent spectrograms are fixed points of the projection", "[stft]") {
    const auto x = test::random_signal(44100 / 2, 3);
    const auto s = stft(x);
    CHECK(relative_frobenius(consistency_project(s), s) < 1e-6);
}

TEST_CASE("projection of a random-phase spectrogram moves less the second time", "[stft]") {
    const auto x = test::random_signal(44100 / 4, 5);
    auto s = stft(x);
    std::mt19937_64 gen(9);
    for (auto& z : s.values())
        z = std::polar(std::abs(z), static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi);
    const auto p1 = consistency_project(s);
    const auto p2 = consistency_project(p1);
    const double first = relative_frobenius(p1, s);
    const double second = relative_frobenius(p2, p1);
    CHECK(first > 1e-2);
    CHECK(second < first);
}

TEST_CASE("projection of zero is zero", "[stft]") {
    const ComplexSpectrogram z(4, 1025, StftConfig{}, 44100);
    CHECK(consistency_project(z) == z);
}

TEST_CASE("band_split partitions the default layout", "[stft]") {
    const auto layout = BandLayout::from_hz(4000, 8000, 44100, StftConfig{});
    CHECK(layout == BandLayout{186, 372, 1025});
    const auto s = stft(test::random_signal(4096, 2));
    const auto parts = band_split(s, layout);
    CHECK(parts.lfc.bins() == 186);
    CHECK(parts.hfc.bins() == 186);
    CHECK(parts.residual.bins() == 653);
    CHECK(parts.hfc.first_bin() == 186);
    CHECK(parts.residual.first_bin() == 372);
    const auto joined = band_concat(parts.lfc, parts.hfc, parts.residual, layout);
    CHECK(joined.bins() == 1025);
    CHECK(joined == s);
}

TEST_CASE("band_concat with a zero HFC part zeroes exactly that band", "[stft]") {
    const BandLayout layout{186, 372, 1025};
    const auto s = stft(test::random_signal(4096, 4));
    const auto parts = band_split(s, layout);
    const auto joined = band_concat(parts.lfc, same_shape<ComplexSpectrogram>(parts.hfc), parts.residual, layout);
    for (std::size_t l = 0; l < s.frames(); ++l)
        for (std::size_t k = 0; k < 1025; ++k)
            CHECK(joined(l, k) == (k >= 186 && k < 372 ? std::complex<double>{} : s(l, k)));
}

TEST_CASE("band layout and part widths are validated", "[stft]") {
    const auto s = stft(test::random_signal(4096, 4));
    CHECK_THROWS_AS(band_split(s, BandLayout{186, 186, 1025}), Error);
    CHECK_THROWS_AS(band_split(s, BandLayout{186, 372, 1000}), Error);
    const auto parts = band_split(s, BandLayout{186, 372, 1025});
    try {
        (void)band_concat(parts.lfc, parts.hfc, parts.residual, BandLayout{180, 372, 1025});
        FAIL("expected a shape error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Shape);
    }
}

TEST_CASE("stft is deterministic", "[stft]") {
    const auto x = test::random_signal(10000, 8);
    CHECK(stft(x) == stft(x));
}
