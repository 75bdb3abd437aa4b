#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "epct/fft.hpp"
#include "epct/riesz.hpp"
#include "epct/types.hpp"

namespace epct {

class CflViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SimulationAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Density and velocity on the torus at one instant.
struct FlowState {
    ScalarField2D rho, u1, u2;
    double t = 0.0;

    FlowState(std::size_t nx, std::size_t ny, double lx, double ly)
        : rho(nx, ny, lx, ly), u1(nx, ny, lx, ly), u2(nx, ny, lx, ly) {}
};

/// One particle path with the gradient quantities, density and forcings
/// sampled along it.
struct CharacteristicTrace {
    std::vector<double> times;
    std::vector<std::array<double, 2>> positions;
    std::vector<double> d, omega, eta, xi, rho, f1, f2;
};

struct ReductionReport {
    double ratio_err = 0.0;      // max |omega/rho - omega0/rho0| (relative when omega0 != 0)
    double omega_abs_max = 0.0;  // max |omega| along the trace
    double eta_residual = 0.0;   // quadrature formula for eta vs measured, relative
    double xi_residual = 0.0;
    double ode_residual = 0.0;   // divergence equation residual, relative
    bool periodic_domain = true;  // verification runs on the torus, not the plane
};

// ============================================================================
// Pseudo-spectral solver for the attractive system with k = -1, c_b = 1
// ============================================================================

class PseudoSpectralSolver {
public:
    PseudoSpectralSolver(std::size_t nx, std::size_t ny, double lx = 2.0 * M_PI,
                         double ly = 2.0 * M_PI, double k_coupling = -1.0, double c_b = 1.0)
        : nx_(nx), ny_(ny), lx_(lx), ly_(ly), k_(k_coupling), cb_(c_b), fft_(nx, ny),
          nk_(ny / 2 + 1) {
        kx_.resize(nx_);
        for (std::size_t i = 0; i < nx_; ++i) kx_[i] = 2.0 * M_PI / lx_ * double(fft_.freq_x(i));
        ky_.resize(nk_);
        for (std::size_t j = 0; j < nk_; ++j) ky_[j] = 2.0 * M_PI / ly_ * double(j);
        dealias_.resize(nx_ * nk_);
        for (std::size_t i = 0; i < nx_; ++i) {
            const bool ok_x = std::abs(double(fft_.freq_x(i))) <= double(nx_) / 3.0;
            for (std::size_t j = 0; j < nk_; ++j) {
                dealias_[i * nk_ + j] = ok_x && double(j) <= double(ny_) / 3.0;
            }
        }
    }

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double dx() const { return lx_ / double(nx_); }

    /// One explicit RK4 step. Enforces the advective CFL bound
    /// dt <= 0.5 dx / max|u| (skipped for a fluid at rest).
    FlowState step(const FlowState& st, double dt) {
        const double umax = std::max(st.u1.max_abs(), st.u2.max_abs());
        if (umax > 0.0 && dt > 0.5 * dx() / umax) {
            throw CflViolation("step_flow: dt exceeds 0.5*dx/max|u|");
        }
        Spec y = to_spectral(st);
        rk4(y, dt);
        return to_physical(y, st.t + dt);
    }

    struct RunResult {
        std::vector<FlowState> states;  // every accepted step, states.size() = steps+1
        double dt = 0.0;
        double mass_drift = 0.0;  // max |mean(rho) - c_b| over the run
    };

    /// Integrates to t_end with a fixed step chosen as min(CFL/2, dx^1.5),
    /// rounded to an even number of steps (the tracer consumes step pairs).
    /// Aborts on negative density or when max|grad u| exceeds 10x its
    /// initial value.
    RunResult run_to(const FlowState& initial, double t_end) {
        const double umax0 = std::max(initial.u1.max_abs(), initial.u2.max_abs());
        double dt = std::pow(dx(), 1.5);
        if (umax0 > 0.0) dt = std::min(dt, 0.25 * dx() / umax0);
        std::size_t nst = std::size_t(std::ceil(t_end / dt));
        nst += nst % 2;
        dt = t_end / double(nst);

        RunResult out;
        out.dt = dt;
        out.states.reserve(nst + 1);
        out.states.push_back(initial);
        const double grad0 = std::max(grad_u_max(initial), 1e-6);

        Spec y = to_spectral(initial);
        for (std::size_t k = 0; k < nst; ++k) {
            rk4(y, dt);
            FlowState st = to_physical(y, dt * double(k + 1));
            double rmin = st.rho(0, 0);
            for (std::size_t i = 0; i < nx_; ++i)
                for (std::size_t j = 0; j < ny_; ++j) rmin = std::min(rmin, st.rho(i, j));
            if (!(rmin >= 0.0)) {
                throw SimulationAbort("density went negative at t=" + std::to_string(st.t));
            }
            const double g = grad_u_max(st);
            if (!(g <= 10.0 * grad0)) {
                throw SimulationAbort("velocity gradient grew 10x beyond its initial size");
            }
            out.mass_drift = std::max(out.mass_drift, std::abs(st.rho.mean() - cb_));
            out.states.push_back(std::move(st));
        }
        return out;
    }

    double grad_u_max(const FlowState& st) {
        auto u1h = fft_.forward(st.u1.data());
        auto u2h = fft_.forward(st.u2.data());
        std::vector<double> g(nx_ * ny_);
        double m = 0.0;
        for (int d = 0; d < 4; ++d) {
            auto spec = (d < 2) ? u1h : u2h;
            mul_ik(spec, d % 2 == 0);
            fft_.inverse(spec, g.data());
            for (double v : g) m = std::max(m, std::abs(v));
        }
        return m;
    }

    /// Gradient quantities, density and forcings of one stored state, as
    /// physical grids (used when sampling along characteristics).
    struct DerivedFields {
        ScalarField2D d, omega, eta, xi, rho, f1, f2;
        DerivedFields(std::size_t nx, std::size_t ny, double lx, double ly)
            : d(nx, ny, lx, ly), omega(nx, ny, lx, ly), eta(nx, ny, lx, ly), xi(nx, ny, lx, ly),
              rho(nx, ny, lx, ly), f1(nx, ny, lx, ly), f2(nx, ny, lx, ly) {}
    };

    DerivedFields derived_fields(const FlowState& st) {
        DerivedFields out(nx_, ny_, lx_, ly_);
        out.rho = st.rho;
        auto u1h = fft_.forward(st.u1.data());
        auto u2h = fft_.forward(st.u2.data());
        std::vector<double> d1u1(nx_ * ny_), d2u1(nx_ * ny_), d1u2(nx_ * ny_), d2u2(nx_ * ny_);
        auto tmp = u1h;
        mul_ik(tmp, true);
        fft_.inverse(tmp, d1u1.data());
        tmp = u1h;
        mul_ik(tmp, false);
        fft_.inverse(tmp, d2u1.data());
        tmp = u2h;
        mul_ik(tmp, true);
        fft_.inverse(tmp, d1u2.data());
        tmp = u2h;
        mul_ik(tmp, false);
        fft_.inverse(tmp, d2u2.data());
        for (std::size_t k = 0; k < nx_ * ny_; ++k) {
            out.d.data()[k] = d1u1[k] + d2u2[k];
            out.omega.data()[k] = d1u2[k] - d2u1[k];
            out.eta.data()[k] = d1u1[k] - d2u2[k];
            out.xi.data()[k] = d2u1[k] + d1u2[k];
        }
        // f1 = k (R11 - R22)[rho - c_b],  f2 = 2 k R12[rho - c_b]
        auto rh = fft_.forward(st.rho.data());
        auto s1 = rh, s2 = rh;
        for (std::size_t i = 0; i < nx_; ++i) {
            for (std::size_t j = 0; j < nk_; ++j) {
                const double kx = kx_[i], ky = ky_[j];
                const double k2 = kx * kx + ky * ky;
                const double m1 = k2 > 0.0 ? k_ * (kx * kx - ky * ky) / k2 : 0.0;
                const double m2 = k2 > 0.0 ? 2.0 * k_ * kx * ky / k2 : 0.0;
                s1[i * nk_ + j] *= m1;
                s2[i * nk_ + j] *= m2;
            }
        }
        fft_.inverse(s1, out.f1.data());
        fft_.inverse(s2, out.f2.data());
        return out;
    }

private:
    struct Spec {
        std::vector<std::complex<double>> rho, u1, u2;
    };

    Spec to_spectral(const FlowState& st) {
        return {fft_.forward(st.rho.data()), fft_.forward(st.u1.data()),
                fft_.forward(st.u2.data())};
    }

    FlowState to_physical(const Spec& y, double t) {
        FlowState st(nx_, ny_, lx_, ly_);
        fft_.inverse(y.rho, st.rho.data());
        fft_.inverse(y.u1, st.u1.data());
        fft_.inverse(y.u2, st.u2.data());
        st.t = t;
        return st;
    }

    void mul_ik(std::vector<std::complex<double>>& spec, bool x_dir) const {
        const std::complex<double> I(0.0, 1.0);
        for (std::size_t i = 0; i < nx_; ++i)
            for (std::size_t j = 0; j < nk_; ++j)
                spec[i * nk_ + j] *= I * (x_dir ? kx_[i] : ky_[j]);
    }

    void rhs(const Spec& y, Spec& dy) {
        const std::size_t nn = nx_ * ny_;
        std::vector<double> rho(nn), u1(nn), u2(nn);
        fft_.inverse(y.rho, rho.data());
        fft_.inverse(y.u1, u1.data());
        fft_.inverse(y.u2, u2.data());

        std::vector<double> d1u1(nn), d2u1(nn), d1u2(nn), d2u2(nn);
        auto tmp = y.u1;
        mul_ik(tmp, true);
        fft_.inverse(tmp, d1u1.data());
        tmp = y.u1;
        mul_ik(tmp, false);
        fft_.inverse(tmp, d2u1.data());
        tmp = y.u2;
        mul_ik(tmp, true);
        fft_.inverse(tmp, d1u2.data());
        tmp = y.u2;
        mul_ik(tmp, false);
        fft_.inverse(tmp, d2u2.data());

        std::vector<double> q1(nn), q2(nn), a1(nn), a2(nn);
        for (std::size_t kk = 0; kk < nn; ++kk) {
            q1[kk] = rho[kk] * u1[kk];
            q2[kk] = rho[kk] * u2[kk];
            a1[kk] = u1[kk] * d1u1[kk] + u2[kk] * d2u1[kk];
            a2[kk] = u1[kk] * d1u2[kk] + u2[kk] * d2u2[kk];
        }
        auto q1h = fft_.forward(q1.data());
        auto q2h = fft_.forward(q2.data());
        auto a1h = fft_.forward(a1.data());
        auto a2h = fft_.forward(a2.data());

        dy.rho.assign(nx_ * nk_, {0.0, 0.0});
        dy.u1.assign(nx_ * nk_, {0.0, 0.0});
        dy.u2.assign(nx_ * nk_, {0.0, 0.0});
        const std::complex<double> I(0.0, 1.0);
        for (std::size_t i = 0; i < nx_; ++i) {
            for (std::size_t j = 0; j < nk_; ++j) {
                const std::size_t idx = i * nk_ + j;
                if (!dealias_[idx]) continue;
                const double kx = kx_[i], ky = ky_[j];
                const double k2 = kx * kx + ky * ky;
                dy.rho[idx] = -I * (kx * q1h[idx] + ky * q2h[idx]);
                // forcing k grad lap^-1 (rho - c_b): multiplier -k i k_vec / k2
                std::complex<double> force1 = 0.0, force2 = 0.0;
                if (k2 > 0.0) {
                    force1 = -k_ * I * kx / k2 * y.rho[idx];
                    force2 = -k_ * I * ky / k2 * y.rho[idx];
                }
                dy.u1[idx] = -a1h[idx] + force1;
                dy.u2[idx] = -a2h[idx] + force2;
            }
        }
    }

    void rk4(Spec& y, double dt) {
        Spec k1, k2, k3, k4, tmp;
        rhs(y, k1);
        tmp = saxpy(y, k1, 0.5 * dt);
        rhs(tmp, k2);
        tmp = saxpy(y, k2, 0.5 * dt);
        rhs(tmp, k3);
        tmp = saxpy(y, k3, dt);
        rhs(tmp, k4);
        auto comb = [dt](std::vector<std::complex<double>>& y0,
                         const std::vector<std::complex<double>>& a,
                         const std::vector<std::complex<double>>& b,
                         const std::vector<std::complex<double>>& c,
                         const std::vector<std::complex<double>>& d) {
            for (std::size_t k = 0; k < y0.size(); ++k)
                y0[k] += dt / 6.0 * (a[k] + 2.0 * b[k] + 2.0 * c[k] + d[k]);
        };
        comb(y.rho, k1.rho, k2.rho, k3.rho, k4.rho);
        comb(y.u1, k1.u1, k2.u1, k3.u1, k4.u1);
        comb(y.u2, k1.u2, k2.u2, k3.u2, k4.u2);
    }

    static Spec saxpy(const Spec& y, const Spec& k, double h) {
        Spec out = y;
        for (std::size_t i = 0; i < out.rho.size(); ++i) {
            out.rho[i] += h * k.rho[i];
            out.u1[i] += h * k.u1[i];
            out.u2[i] += h * k.u2[i];
        }
        return out;
    }

    std::size_t nx_, ny_;
    double lx_, ly_, k_, cb_;
    Fft2D fft_;
    std::size_t nk_;
    std::vector<double> kx_, ky_;
    std::vector<char> dealias_;
};

/// One explicit step of the semi-discretization (convenience wrapper).
inline FlowState step_flow(const FlowState& st, double dt, double k_coupling = -1.0,
                           double c_b = 1.0) {
    PseudoSpectralSolver solver(st.rho.nx(), st.rho.ny(), st.rho.lx(), st.rho.ly(), k_coupling,
                                c_b);
    return solver.step(st, dt);
}

// ============================================================================
// Characteristic tracing
// ============================================================================

namespace detail {

// periodic cubic Lagrange interpolation on a 4x4 stencil
inline std::array<double, 4> lagrange_w(double t) {
    return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

inline double sample_bicubic(const ScalarField2D& f, double x, double y) {
    const double fx = x / f.lx() * double(f.nx());
    const double fy = y / f.ly() * double(f.ny());
    const double fxf = std::floor(fx), fyf = std::floor(fy);
    const long ix = long(fxf), iy = long(fyf);
    const auto wx = lagrange_w(fx - fxf);
    const auto wy = lagrange_w(fy - fyf);
    const long nx = long(f.nx()), ny = long(f.ny());
    auto wrap = [](long k, long n) { return std::size_t(((k % n) + n) % n); };
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const std::size_t ia = wrap(ix - 1 + a, nx);
        double row = 0.0;
        for (int b = 0; b < 4; ++b) row += wy[b] * f(ia, wrap(iy - 1 + b, ny));
        acc += wx[a] * row;
    }
    return acc;
}

}  // namespace detail

/// Traces particle paths through the stored flow history. Paths advance by
/// classic RK4 over pairs of stored steps (the midpoint state is the stored
/// odd step), with bicubic sampling of the velocity. Gradient quantities and
/// forcings are sampled at the even steps.
inline std::vector<CharacteristicTrace> trace_characteristics(
    PseudoSpectralSolver& solver, const PseudoSpectralSolver::RunResult& run,
    std::span<const std::array<double, 2>> x0s) {
    const auto& st = run.states;
    if (st.size() < 3 || st.size() % 2 == 0) {
        throw std::invalid_argument("trace_characteristics: need an even number of steps");
    }
    const double lx = st[0].rho.lx(), ly = st[0].rho.ly();
    const double h = 2.0 * run.dt;
    const std::size_t n_tr = x0s.size();

    std::vector<CharacteristicTrace> traces(n_tr);
    std::vector<std::array<double, 2>> pos(x0s.begin(), x0s.end());

    auto wrap = [lx, ly](std::array<double, 2> p) {
        p[0] = std::fmod(p[0], lx);
        if (p[0] < 0) p[0] += lx;
        p[1] = std::fmod(p[1], ly);
        if (p[1] < 0) p[1] += ly;
        return p;
    };

    auto record = [&](std::size_t step_idx) {
        const auto fields = solver.derived_fields(st[step_idx]);
        for (std::size_t p = 0; p < n_tr; ++p) {
            auto& tr = traces[p];
            const auto [x, y] = pos[p];
            tr.times.push_back(st[step_idx].t);
            tr.positions.push_back(pos[p]);
            tr.d.push_back(detail::sample_bicubic(fields.d, x, y));
            tr.omega.push_back(detail::sample_bicubic(fields.omega, x, y));
            tr.eta.push_back(detail::sample_bicubic(fields.eta, x, y));
            tr.xi.push_back(detail::sample_bicubic(fields.xi, x, y));
            tr.rho.push_back(detail::sample_bicubic(fields.rho, x, y));
            tr.f1.push_back(detail::sample_bicubic(fields.f1, x, y));
            tr.f2.push_back(detail::sample_bicubic(fields.f2, x, y));
        }
    };

    record(0);
    for (std::size_t k = 0; k + 2 < st.size(); k += 2) {
        const auto& s0 = st[k];
        const auto& s1 = st[k + 1];
        const auto& s2 = st[k + 2];
        auto vel = [&](const FlowState& s, std::array<double, 2> p) {
            p = wrap(p);
            return std::array<double, 2>{detail::sample_bicubic(s.u1, p[0], p[1]),
                                         detail::sample_bicubic(s.u2, p[0], p[1])};
        };
        for (std::size_t p = 0; p < n_tr; ++p) {
            const auto x = pos[p];
            const auto k1 = vel(s0, x);
            const auto k2 = vel(s1, {x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]});
            const auto k3 = vel(s1, {x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]});
            const auto k4 = vel(s2, {x[0] + h * k3[0], x[1] + h * k3[1]});
            pos[p] = wrap({x[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                           x[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])});
        }
        record(k + 2);
    }
    return traces;
}

inline CharacteristicTrace trace_characteristic(PseudoSpectralSolver& solver,
                                                const PseudoSpectralSolver::RunResult& run,
                                                std::array<double, 2> x0) {
    const std::array<double, 2> xs[1] = {x0};
    return trace_characteristics(solver, run, xs)[0];
}

// ============================================================================
// Reduction verification
// ============================================================================

/// Checks the closed-system identities along one trace: constancy of
/// omega/rho, the quadrature formulas for eta and xi, and the residual of
/// d' = -d^2/2 + A(t) rho^2 - (rho - 1) with A reconstructed from the
/// forcing histories. All residuals are relative.
inline ReductionReport verify_reduction(const CharacteristicTrace& tr) {
    const std::size_t n = tr.times.size();
    if (n < 5) throw std::invalid_argument("verify_reduction: trace too short");
    ReductionReport rep;

    const double rho0 = tr.rho[0], om0 = tr.omega[0];
    const double r0 = om0 / rho0;
    for (std::size_t k = 0; k < n; ++k) {
        rep.omega_abs_max = std::max(rep.omega_abs_max, std::abs(tr.omega[k]));
        const double r = tr.omega[k] / tr.rho[k];
        if (std::abs(r0) > 1e-12) {
            rep.ratio_err = std::max(rep.ratio_err, std::abs(r - r0) / std::abs(r0));
        } else {
            rep.ratio_err = std::max(rep.ratio_err, std::abs(r));
        }
    }

    const AInitial init{om0, tr.eta[0], tr.xi[0], rho0};
    const auto A = A_of_t(tr.times, tr.f1, tr.f2, tr.rho, init);

    // eta(t) = (eta0/rho0 + int f1/rho) rho(t), same shape for xi
    double I1 = 0.0, I2 = 0.0, eta_sc = 0.0, xi_sc = 0.0, eta_err = 0.0, xi_err = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            const double dt = tr.times[k] - tr.times[k - 1];
            I1 += 0.5 * dt * (tr.f1[k] / tr.rho[k] + tr.f1[k - 1] / tr.rho[k - 1]);
            I2 += 0.5 * dt * (tr.f2[k] / tr.rho[k] + tr.f2[k - 1] / tr.rho[k - 1]);
        }
        const double eta_pred = (tr.eta[0] / rho0 + I1) * tr.rho[k];
        const double xi_pred = (tr.xi[0] / rho0 + I2) * tr.rho[k];
        eta_err = std::max(eta_err, std::abs(eta_pred - tr.eta[k]));
        xi_err = std::max(xi_err, std::abs(xi_pred - tr.xi[k]));
        eta_sc = std::max(eta_sc, std::abs(tr.eta[k]));
        xi_sc = std::max(xi_sc, std::abs(tr.xi[k]));
    }
    rep.eta_residual = eta_err / std::max(eta_sc, 1e-12);
    rep.xi_residual = xi_err / std::max(xi_sc, 1e-12);

    // centered-difference d' vs the closed equation
    double res = 0.0, scale = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double dp = (tr.d[k + 1] - tr.d[k - 1]) / (tr.times[k + 1] - tr.times[k - 1]);
        const double rhs = -0.5 * tr.d[k] * tr.d[k] + A[k] * tr.rho[k] * tr.rho[k] -
                           (tr.rho[k] - 1.0);
        res = std::max(res, std::abs(dp - rhs));
        scale = std::max({scale, std::abs(rhs), std::abs(dp)});
    }
    rep.ode_residual = res / std::max(scale, 1e-12);
    return rep;
}

// ============================================================================
// Standard smooth verification data
// ============================================================================

/// Smooth low-mode data with ||rho0 - 1||_inf = amplitude and a fixed
/// mixed rotational/irrotational velocity, used by the verification runs.
inline FlowState make_smooth_data(std::size_t n, double amplitude, double u_scale = 1.0) {
    FlowState st(n, n, 2.0 * M_PI, 2.0 * M_PI);
    ScalarField2D base(n, n, 2.0 * M_PI, 2.0 * M_PI);
    base.fill([](double x, double y) {
        return std::cos(x + 1.1) * std::cos(y - 0.4) + 0.5 * std::sin(2.0 * x + 0.3) * std::cos(y);
    });
    const double bmax = base.max_abs();
    st.rho.fill([&](double x, double y) {
        return 1.0 + amplitude / bmax *
                         (std::cos(x + 1.1) * std::cos(y - 0.4) +
                          0.5 * std::sin(2.0 * x + 0.3) * std::cos(y));
    });
    // u = curl(psi) + grad(phi) evaluated analytically
    st.u1.fill([u_scale](double x, double y) {
        const double dpsi_dy = 0.3 * std::sin(x + 0.7) * std::cos(y) + 0.4 * std::sin(x - 2.0 * y);
        const double dphi_dx = -0.2 * std::sin(x) * std::sin(y + 0.5);
        return u_scale * (-dpsi_dy + dphi_dx);
    });
    st.u2.fill([u_scale](double x, double y) {
        const double dpsi_dx = 0.3 * std::cos(x + 0.7) * std::sin(y) - 0.2 * std::sin(x - 2.0 * y);
        const double dphi_dy = 0.2 * std::cos(x) * std::cos(y + 0.5);
        return u_scale * (dpsi_dx + dphi_dy);
    });
    return st;
}

}  // namespace epct
