#pragma once

#include "bwx/error.hpp"
#include "bwx/magnitude.hpp"
#include "bwx/metrics.hpp"
#include "bwx/phase.hpp"
#include "bwx/pipeline.hpp"
#include "bwx/prep.hpp"
#include "bwx/specfile.hpp"
#include "bwx/spectrogram.hpp"
#include "bwx/stft.hpp"
#include "bwx/wav.hpp"
