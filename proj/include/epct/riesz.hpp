#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "epct/fft.hpp"
#include "epct/types.hpp"

namespace epct {

class NonzeroMean : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GridMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_zero_mean(const ScalarField2D& h) {
    if (std::abs(h.mean()) > 1e-12 * std::max(h.max_abs(), 1e-300)) {
        throw NonzeroMean("riesz: field must have zero mean on the torus");
    }
}

}  // namespace detail

/// Component R_ij of the Riesz matrix operator on the periodic grid: the
/// Fourier multiplier xi_i xi_j / |xi|^2 with the zero mode mapped to 0.
/// Requires a mean-zero input.
inline ScalarField2D riesz_apply(const ScalarField2D& h, int i, int j) {
    if (i < 1 || i > 2 || j < 1 || j > 2) throw std::invalid_argument("riesz_apply: i,j in {1,2}");
    detail::require_zero_mean(h);

    Fft2D fft(h.nx(), h.ny());
    auto spec = fft.forward(h.data());
    const double kx0 = 2.0 * M_PI / h.lx(), ky0 = 2.0 * M_PI / h.ly();
    const std::size_t nk = fft.nk();
    for (std::size_t ii = 0; ii < h.nx(); ++ii) {
        const double kx = kx0 * double(fft.freq_x(ii));
        for (std::size_t jj = 0; jj < nk; ++jj) {
            const double ky = ky0 * double(jj);
            const double k2 = kx * kx + ky * ky;
            double mult = 0.0;
            if (k2 > 0.0) {
                const double xi_i = (i == 1) ? kx : ky;
                const double xi_j = (j == 1) ? kx : ky;
                mult = xi_i * xi_j / k2;
            }
            spec[ii * nk + jj] *= mult;
        }
    }
    ScalarField2D out(h.nx(), h.ny(), h.lx(), h.ly());
    fft.inverse(spec, out.data());
    return out;
}

/// Nonlocal forcings from the density field:
///   f1 = k (R11 - R22)[rho - c_b],   f2 = 2 k R12[rho - c_b].
/// Requires mean(rho) = c_b (solvability of the potential on the torus).
inline std::pair<ScalarField2D, ScalarField2D> forcing_fields(const ScalarField2D& rho, double k,
                                                              double c_b) {
    ScalarField2D pert(rho.nx(), rho.ny(), rho.lx(), rho.ly());
    for (std::size_t i = 0; i < rho.nx(); ++i)
        for (std::size_t j = 0; j < rho.ny(); ++j) pert(i, j) = rho(i, j) - c_b;
    detail::require_zero_mean(pert);

    Fft2D fft(rho.nx(), rho.ny());
    auto spec = fft.forward(pert.data());
    auto spec2 = spec;
    const double kx0 = 2.0 * M_PI / rho.lx(), ky0 = 2.0 * M_PI / rho.ly();
    const std::size_t nk = fft.nk();
    for (std::size_t ii = 0; ii < rho.nx(); ++ii) {
        const double kx = kx0 * double(fft.freq_x(ii));
        for (std::size_t jj = 0; jj < nk; ++jj) {
            const double ky = ky0 * double(jj);
            const double k2 = kx * kx + ky * ky;
            const double m1 = k2 > 0.0 ? k * (kx * kx - ky * ky) / k2 : 0.0;
            const double m2 = k2 > 0.0 ? 2.0 * k * kx * ky / k2 : 0.0;
            spec[ii * nk + jj] *= m1;
            spec2[ii * nk + jj] *= m2;
        }
    }
    ScalarField2D f1(rho.nx(), rho.ny(), rho.lx(), rho.ly());
    ScalarField2D f2(rho.nx(), rho.ny(), rho.lx(), rho.ly());
    fft.inverse(spec, f1.data());
    fft.inverse(spec2, f2.data());
    return {std::move(f1), std::move(f2)};
}

/// Initial gradient data entering the coefficient A(t).
struct AInitial {
    double omega0 = 0, eta0 = 0, xi0 = 0, rho0 = 1;
};

/// Reconstructs A(t) from histories of f1, f2 and rho sampled along a
/// characteristic on a common time grid:
///   A = (1/2) [ (omega0/rho0)^2 - (eta0/rho0 + I1)^2 - (xi0/rho0 + I2)^2 ],
/// with I_i the running trapezoidal quadrature of f_i / rho.
inline std::vector<double> A_of_t(std::span<const double> times, std::span<const double> f1,
                                  std::span<const double> f2, std::span<const double> rho,
                                  const AInitial& init) {
    const std::size_t n = times.size();
    if (f1.size() != n || f2.size() != n || rho.size() != n) {
        throw GridMismatch("A_of_t: histories must share one time grid");
    }
    std::vector<double> A(n);
    double I1 = 0.0, I2 = 0.0;
    const double w = init.omega0 / init.rho0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            const double dt = times[k] - times[k - 1];
            I1 += 0.5 * dt * (f1[k] / rho[k] + f1[k - 1] / rho[k - 1]);
            I2 += 0.5 * dt * (f2[k] / rho[k] + f2[k - 1] / rho[k - 1]);
        }
        const double e = init.eta0 / init.rho0 + I1;
        const double x = init.xi0 / init.rho0 + I2;
        A[k] = 0.5 * (w * w - e * e - x * x);
    }
    return A;
}

}  // namespace epct
