#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>

#include <fftw3.h>

#include "bwx/error.hpp"

namespace bwx {

namespace detail {

// FFTW's planner is not re-entrant; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

/// Real-input FFT of a fixed even length with its own aligned buffers.
/// Forward is unnormalized; inverse includes the 1/n factor.
///
/// Plans use FFTW_ESTIMATE so the chosen codelets (and therefore the
/// rounding) do not depend on timing measurements.
class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        detail::require(n >= 2 && n % 2 == 0, ErrorCode::Domain, "FFT length must be even and >= 2");
        std::lock_guard lock(detail::fftw_planner_mutex());
        time_ = fftw_alloc_real(n_);
        freq_ = fftw_alloc_complex(bins());
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), time_, freq_, FFTW_ESTIMATE);
        inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), freq_, time_,
                                        FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
    }

    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    ~RealFft() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(inverse_);
        fftw_free(time_);
        fftw_free(freq_);
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t bins() const noexcept { return n_ / 2 + 1; }

    /// Time buffer of length size(); fill it, then call forward().
    [[nodiscard]] std::span<double> time() noexcept { return {time_, n_}; }

    [[nodiscard]] std::span<std::complex<double>> freq() noexcept {
        return {reinterpret_cast<std::complex<double>*>(freq_), bins()};
    }

    void forward() noexcept { fftw_execute(forward_); }

    void inverse() noexcept {
        fftw_execute(inverse_);
        const double scale = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) time_[i] *= scale;
    }

private:
    std::size_t n_;
    double* time_ = nullptr;
    fftw_complex* freq_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

}  // namespace bwx
