#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "bwx/error.hpp"
#include "bwx/spectrogram.hpp"

namespace bwx {

enum class SampleFormat { Pcm16, Pcm24, Float32 };

struct Audio {
    std::vector<Waveform> channels;
    SampleFormat format = SampleFormat::Float32;

    [[nodiscard]] std::uint32_t sample_rate() const noexcept {
        return channels.empty() ? 0 : channels.front().sample_rate;
    }
    [[nodiscard]] std::size_t frames() const noexcept {
        return channels.empty() ? 0 : channels.front().size();
    }
};

namespace detail {

static_assert(std::endian::native == std::endian::little, "byte-level I/O assumes a little-endian host");

inline std::uint16_t load_u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }
inline std::uint32_t load_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void store_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>(v >> 8));
}
inline void store_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}
inline void store_tag(std::vector<unsigned char>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

inline std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    require(!in.bad(), ErrorCode::Io, "failed reading " + path);
    return bytes;
}

inline void write_file(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    require(static_cast<bool>(out), ErrorCode::Io, "failed writing " + path);
}

constexpr std::uint16_t kWavePcm = 1;
constexpr std::uint16_t kWaveFloat = 3;
constexpr std::uint16_t kWaveExtensible = 0xfffe;

}  // namespace detail

/// Parse RIFF/WAVE bytes (PCM16, PCM24, float32; plain or extensible fmt).
/// Integer samples are divided by 2^(depth-1).
inline Audio wav_decode(const std::vector<unsigned char>& bytes, const std::string& name = "<memory>") {
    using detail::load_u16;
    using detail::load_u32;
    detail::require(bytes.size() >= 12, ErrorCode::MalformedHeader, name + ": too short for a RIFF header");
    detail::require(std::memcmp(bytes.data(), "RIFF", 4) == 0 && std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
                    ErrorCode::MalformedHeader, name + ": not a RIFF/WAVE file");

    bool have_fmt = false;
    std::uint16_t tag = 0, channels = 0, bits = 0, block_align = 0;
    std::uint32_t rate = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        const std::uint32_t size = load_u32(chunk + 4);
        const std::size_t body = pos + 8;
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            detail::require(size >= 16 && body + size <= bytes.size(), ErrorCode::MalformedHeader,
                            name + ": fmt chunk too short");
            const unsigned char* f = bytes.data() + body;
            tag = load_u16(f);
            channels = load_u16(f + 2);
            rate = load_u32(f + 4);
            block_align = load_u16(f + 12);
            bits = load_u16(f + 14);
            if (tag == detail::kWaveExtensible) {
                detail::require(size >= 40, ErrorCode::MalformedHeader, name + ": extensible fmt chunk too short");
                tag = load_u16(f + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            detail::require(have_fmt, ErrorCode::MalformedHeader, name + ": data chunk before fmt chunk");
            detail::require(channels > 0 && rate > 0, ErrorCode::MalformedHeader,
                            name + ": zero channels or sample rate");
            SampleFormat format{};
            if (tag == detail::kWavePcm && bits == 16) format = SampleFormat::Pcm16;
            else if (tag == detail::kWavePcm && bits == 24) format = SampleFormat::Pcm24;
            else if (tag == detail::kWaveFloat && bits == 32) format = SampleFormat::Float32;
            else
                throw Error(ErrorCode::UnsupportedCodec, name + ": format tag " + std::to_string(tag) + " with " +
                                                             std::to_string(bits) + " bits per sample");
            const std::size_t width = bits / 8;
            detail::require(block_align == width * channels, ErrorCode::MalformedHeader,
                            name + ": block align disagrees with channels and bit depth");
            detail::require(body + size <= bytes.size(), ErrorCode::Truncated,
                            name + ": data chunk declares " + std::to_string(size) + " bytes, only " +
                                std::to_string(bytes.size() - body) + " present");
            detail::require(size % block_align == 0, ErrorCode::Truncated, name + ": partial sample frame in data");

            const std::size_t frames = size / block_align;
            Audio audio;
            audio.format = format;
            audio.channels.assign(channels, Waveform{std::vector<double>(frames), rate});
            const unsigned char* p = bytes.data() + body;
            for (std::size_t i = 0; i < frames; ++i) {
                for (std::size_t c = 0; c < channels; ++c, p += width) {
                    double v = 0.0;
                    switch (format) {
                        case SampleFormat::Pcm16:
                            v = static_cast<std::int16_t>(load_u16(p)) / 32768.0;
                            break;
                        case SampleFormat::Pcm24: {
                            std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
                            if (s & 0x800000) s -= 0x1000000;
                            v = s / 8388608.0;
                            break;
                        }
                        case SampleFormat::Float32:
                            v = std::bit_cast<float>(load_u32(p));
                            break;
                    }
                    audio.channels[c].samples[i] = v;
                }
            }
            return audio;
        }
        pos = body + size + (size & 1u);
    }
    throw Error(have_fmt ? ErrorCode::Truncated : ErrorCode::MalformedHeader,
                name + (have_fmt ? ": no data chunk" : ": no fmt chunk"));
}

inline Audio wav_read(const std::string& path) { return wav_decode(detail::read_file(path), path); }

/// Canonical 44-byte-header WAV. PCM16 clamps to [-1, 1] and rounds half
/// away from zero; Float32 stores each sample narrowed to float.
inline std::vector<unsigned char> wav_encode(const std::vector<Waveform>& channels, SampleFormat format) {
    detail::require(!channels.empty(), ErrorCode::Shape, "no channels to write");
    detail::require(format != SampleFormat::Pcm24, ErrorCode::UnsupportedCodec, "writing PCM24 is not supported");
    const std::size_t frames = channels.front().size();
    const std::uint32_t rate = channels.front().sample_rate;
    for (const auto& ch : channels) {
        ch.validate();
        detail::require(ch.size() == frames && ch.sample_rate == rate, ErrorCode::Shape,
                        "channels differ in length or sample rate");
    }
    const std::uint16_t n_ch = static_cast<std::uint16_t>(channels.size());
    const std::uint16_t width = format == SampleFormat::Pcm16 ? 2 : 4;
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * n_ch * width);

    std::vector<unsigned char> out;
    out.reserve(44 + data_bytes);
    detail::store_tag(out, "RIFF");
    detail::store_u32(out, 36 + data_bytes);
    detail::store_tag(out, "WAVE");
    detail::store_tag(out, "fmt ");
    detail::store_u32(out, 16);
    detail::store_u16(out, format == SampleFormat::Pcm16 ? detail::kWavePcm : detail::kWaveFloat);
    detail::store_u16(out, n_ch);
    detail::store_u32(out, rate);
    detail::store_u32(out, rate * n_ch * width);
    detail::store_u16(out, static_cast<std::uint16_t>(n_ch * width));
    detail::store_u16(out, static_cast<std::uint16_t>(width * 8));
    detail::store_tag(out, "data");
    detail::store_u32(out, data_bytes);
    for (std::size_t i = 0; i < frames; ++i) {
        for (const auto& ch : channels) {
            const double s = ch.samples[i];
            if (format == SampleFormat::Pcm16) {
                const double q = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
                const auto v = static_cast<std::int16_t>(std::clamp(q, -32768.0, 32767.0));
                detail::store_u16(out, static_cast<std::uint16_t>(v));
            } else {
                detail::store_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
            }
        }
    }
    return out;
}

inline void wav_write(const std::string& path, const std::vector<Waveform>& channels, SampleFormat format) {
    detail::write_file(path, wav_encode(channels, format));
}

inline void wav_write(const std::string& path, const Waveform& x, SampleFormat format) {
    wav_write(path, std::vector<Waveform>{x}, format);
}

}  // namespace bwx
