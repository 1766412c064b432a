#pragma once

// BWXSPEC1 spectrogram interchange format (all fields little-endian):
//
//   offset size  field
//        0    8  magic "BWXSPEC1"
//        8    4  frames        (u32, >= 1)
//       12    4  bins          (u32, >= 1)
//       16    1  kind          (u8, 0 = magnitude, 1 = complex interleaved)
//       17    4  sample_rate   (u32)
//       21    4  frame_len     (u32)
//       25    4  hop           (u32)
//       29       payload: frames x bins float32, row-major; complex stores
//                re, im pairs.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <variant>
#include <vector>

#include "bwx/error.hpp"
#include "bwx/spectrogram.hpp"
#include "bwx/wav.hpp"

namespace bwx {

enum class SpecKind : std::uint8_t { Magnitude = 0, Complex = 1 };

struct SpecFileHeader {
    std::uint32_t frames = 0;
    std::uint32_t bins = 0;
    SpecKind kind = SpecKind::Magnitude;
    std::uint32_t sample_rate = 0;
    std::uint32_t frame_len = 0;
    std::uint32_t hop = 0;

    static constexpr char kMagic[8] = {'B', 'W', 'X', 'S', 'P', 'E', 'C', '1'};
    static constexpr std::size_t kSize = 29;

    [[nodiscard]] std::size_t values_per_cell() const noexcept { return kind == SpecKind::Complex ? 2 : 1; }
    [[nodiscard]] std::size_t payload_bytes() const noexcept {
        return 4ull * frames * bins * values_per_cell();
    }
    [[nodiscard]] StftConfig stft_config() const noexcept { return {frame_len, hop, Window::Hann}; }

    friend bool operator==(const SpecFileHeader&, const SpecFileHeader&) = default;
};

struct SpecFile {
    SpecFileHeader header;
    std::variant<MagnitudeSpectrogram, ComplexSpectrogram> data;
};

namespace detail {

template <typename S>
SpecFileHeader header_for(const S& x, SpecKind kind) {
    require(x.frames() >= 1 && x.bins() >= 1, ErrorCode::Shape, "cannot store an empty spectrogram");
    return {static_cast<std::uint32_t>(x.frames()), static_cast<std::uint32_t>(x.bins()), kind,
            x.sample_rate(), static_cast<std::uint32_t>(x.config().frame_len),
            static_cast<std::uint32_t>(x.config().hop)};
}

inline std::vector<unsigned char> encode_header(const SpecFileHeader& h) {
    std::vector<unsigned char> out(std::begin(SpecFileHeader::kMagic), std::end(SpecFileHeader::kMagic));
    store_u32(out, h.frames);
    store_u32(out, h.bins);
    out.push_back(static_cast<unsigned char>(h.kind));
    store_u32(out, h.sample_rate);
    store_u32(out, h.frame_len);
    store_u32(out, h.hop);
    return out;
}

inline void store_f32(std::vector<unsigned char>& out, double v) {
    store_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

}  // namespace detail

inline std::vector<unsigned char> spec_encode(const MagnitudeSpectrogram& m) {
    auto out = detail::encode_header(detail::header_for(m, SpecKind::Magnitude));
    for (double v : m.values()) detail::store_f32(out, v);
    return out;
}

inline std::vector<unsigned char> spec_encode(const ComplexSpectrogram& x) {
    auto out = detail::encode_header(detail::header_for(x, SpecKind::Complex));
    for (auto z : x.values()) {
        detail::store_f32(out, z.real());
        detail::store_f32(out, z.imag());
    }
    return out;
}

template <typename S>
void spec_write(const std::string& path, const S& x) {
    detail::write_file(path, spec_encode(x));
}

inline SpecFileHeader spec_decode_header(const std::vector<unsigned char>& bytes, const std::string& name) {
    using detail::load_u32;
    detail::require(bytes.size() >= SpecFileHeader::kSize, ErrorCode::Truncated,
                    name + ": " + std::to_string(bytes.size()) + " bytes is shorter than the 29-byte header");
    detail::require(std::memcmp(bytes.data(), SpecFileHeader::kMagic, 8) == 0, ErrorCode::BadMagic,
                    name + ": magic is not BWXSPEC1");
    SpecFileHeader h;
    h.frames = load_u32(bytes.data() + 8);
    h.bins = load_u32(bytes.data() + 12);
    const unsigned char kind = bytes[16];
    h.sample_rate = load_u32(bytes.data() + 17);
    h.frame_len = load_u32(bytes.data() + 21);
    h.hop = load_u32(bytes.data() + 25);
    detail::require(kind <= 1, ErrorCode::MalformedHeader, name + ": unknown kind " + std::to_string(kind));
    h.kind = static_cast<SpecKind>(kind);
    detail::require(h.frames >= 1 && h.bins >= 1, ErrorCode::MalformedHeader, name + ": zero frames or bins");
    return h;
}

inline SpecFile spec_decode(const std::vector<unsigned char>& bytes, const std::string& name = "<memory>") {
    const SpecFileHeader h = spec_decode_header(bytes, name);
    detail::require(bytes.size() - SpecFileHeader::kSize == h.payload_bytes(), ErrorCode::PayloadLength,
                    name + ": header implies " + std::to_string(h.payload_bytes()) + " payload bytes, found " +
                        std::to_string(bytes.size() - SpecFileHeader::kSize));

    const unsigned char* p = bytes.data() + SpecFileHeader::kSize;
    auto next = [&p, &name] {
        const float v = std::bit_cast<float>(detail::load_u32(p));
        p += 4;
        detail::require(std::isfinite(v), ErrorCode::NanPayload, name + ": payload contains NaN or Inf");
        return static_cast<double>(v);
    };
    const StftConfig cfg = h.stft_config();
    if (h.kind == SpecKind::Magnitude) {
        MagnitudeSpectrogram m(h.frames, h.bins, cfg, h.sample_rate);
        for (double& v : m.values()) v = next();
        return {h, std::move(m)};
    }
    ComplexSpectrogram x(h.frames, h.bins, cfg, h.sample_rate);
    for (auto& z : x.values()) {
        const double re = next();
        z = {re, next()};
    }
    return {h, std::move(x)};
}

inline SpecFile spec_read(const std::string& path) { return spec_decode(detail::read_file(path), path); }

}  // namespace bwx
