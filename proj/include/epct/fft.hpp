#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "epct/types.hpp"

namespace epct {

namespace detail {
// fftw plan creation is not thread safe
inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Real-to-complex 2D transforms for an nx-by-ny grid (FFTW r2c layout:
/// nx x (ny/2+1) complex bins). Forward is unnormalized; inverse divides by
/// nx*ny so a round trip is the identity up to rounding.
class Fft2D {
public:
    Fft2D(std::size_t nx, std::size_t ny)
        : nx_(nx), ny_(ny), nk_(ny / 2 + 1),
          real_(static_cast<double*>(fftw_malloc(sizeof(double) * nx * ny))),
          cplx_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nx * nk_))) {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fwd_ = fftw_plan_dft_r2c_2d(int(nx), int(ny), real_, cplx_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_2d(int(nx), int(ny), cplx_, real_, FFTW_ESTIMATE);
    }

    ~Fft2D() {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(cplx_);
    }

    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t nk() const { return nk_; }

    /// spectrum[i*nk+j] for integer frequencies (fx(i), j), fx in [-nx/2, nx/2)
    std::vector<std::complex<double>> forward(const double* field) {
        for (std::size_t k = 0; k < nx_ * ny_; ++k) real_[k] = field[k];
        fftw_execute(fwd_);
        std::vector<std::complex<double>> out(nx_ * nk_);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = {cplx_[k][0], cplx_[k][1]};
        return out;
    }

    /// inverse including the 1/(nx*ny) normalization
    void inverse(const std::vector<std::complex<double>>& spec, double* field) {
        for (std::size_t k = 0; k < spec.size(); ++k) {
            cplx_[k][0] = spec[k].real();
            cplx_[k][1] = spec[k].imag();
        }
        fftw_execute(bwd_);
        const double inv = 1.0 / double(nx_ * ny_);
        for (std::size_t k = 0; k < nx_ * ny_; ++k) field[k] = real_[k] * inv;
    }

    /// signed integer frequency of x-row i
    long freq_x(std::size_t i) const {
        return i <= nx_ / 2 ? long(i) : long(i) - long(nx_);
    }

private:
    std::size_t nx_, ny_, nk_;
    double* real_;
    fftw_complex* cplx_;
    fftw_plan fwd_, bwd_;
};

}  // namespace epct
