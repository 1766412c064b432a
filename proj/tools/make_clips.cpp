// Writes the synthetic evaluation clips (float32 WAV, 44.1 kHz, 10 s).
#include <cstdio>
#include <filesystem>
#include <string>

#include "bwx/wav.hpp"
#include "clipsynth.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <out-dir> [seconds]\n", argv[0]);
        return 1;
    }
    const std::filesystem::path dir = argv[1];
    const double seconds = argc > 2 ? std::stod(argv[2]) : 10.0;
    std::filesystem::create_directories(dir);
    for (std::size_t s = 0; s < bwx::clips::kStyleCount; ++s) {
        const auto path = dir / (std::to_string(s) + "_" + bwx::clips::style_name(s) + ".wav");
        bwx::wav_write(path.string(), bwx::clips::synthesize_clip(s, seconds), bwx::SampleFormat::Float32);
        std::printf("%s\n", path.string().c_str());
    }
    return 0;
}
