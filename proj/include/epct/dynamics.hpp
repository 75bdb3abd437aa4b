#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "epct/ode.hpp"
#include "epct/rng.hpp"
#include "epct/thresholds.hpp"
#include "epct/types.hpp"

namespace epct {

// ============================================================================
// Coefficient trajectories A(t)
// ============================================================================

class EnvelopeViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Time-dependent coefficient of rho^2 in the reduced system, with its
/// declared envelope. Evaluation enforces lower(t) <= A(t) <= upper.
struct CoefficientTrajectory {
    std::function<double(double)> value;
    EnvelopeSpec envelope;

    double operator()(double t) const {
        const double a = value(t);
        const double lo = envelope.lower(t), up = envelope.upper;
        const double tol = 1e-9 * std::max({1.0, std::abs(lo), std::abs(up)});
        if (a < lo - tol || a > up + tol) {
            throw EnvelopeViolation("A(t) outside its declared envelope at t=" +
                                    std::to_string(t));
        }
        return a;
    }
};

inline CoefficientTrajectory constant_A(double c, EnvelopeSpec env) {
    return {[c](double) { return c; }, env};
}

inline CoefficientTrajectory lower_envelope_A(EnvelopeSpec env) {
    return {[env](double t) { return env.lower(t); }, env};
}

/// Seeded smooth member of the admissible family
/// A(t) = lower(t) + u(t) (upper - lower(t)) with u(t) in [0,1] built from a
/// random Fourier sum; envelope compliance holds by construction.
inline CoefficientTrajectory admissible_A(EnvelopeSpec env, std::uint64_t seed,
                                          std::size_t n_modes = 8) {
    Rng rng(seed);
    std::vector<double> c(n_modes), w(n_modes), ph(n_modes);
    double cs = 0.0;
    for (std::size_t j = 0; j < n_modes; ++j) {
        c[j] = rng.normal();
        w[j] = rng.uniform(0.1, 2.0);
        ph[j] = rng.uniform(0.0, 6.283185307179586);
        cs += std::abs(c[j]);
    }
    auto f = [env, c, w, ph, cs](double t) {
        double s = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * std::sin(w[j] * t + ph[j]);
        const double u = 0.5 * (1.0 + s / cs);
        const double lo = env.lower(t);
        return lo + u * (env.upper - lo);
    };
    return {f, env};
}

// ============================================================================
// Right-hand sides
// ============================================================================

/// Reduced system, y = [rho, d]:
///   rho' = -rho d,  d' = -d^2/2 + A(t) rho^2 - (rho - 1).
inline auto rhs_reduced(const CoefficientTrajectory& A) {
    return [A](double t, std::span<const double> y, std::span<double> dy) {
        const double rho = y[0], d = y[1];
        const double a = A(t);
        dy[0] = -rho * d;
        dy[1] = -0.5 * d * d + a * rho * rho - (rho - 1.0);
    };
}

/// Autonomous auxiliary system, y = [a, b, B]:
///   a' = -b a,  b' = -b^2/2 - B^s a^2 - a + 1,  B' = 1   (polynomial)
///   a' = -b a,  b' = -b^2/2 - B   a^2 - a + 1,  B' = B   (exponential)
inline auto rhs_aux(Envelope kind, double s = 1.0) {
    return [kind, s](double, std::span<const double> y, std::span<double> dy) {
        const double a = y[0], b = y[1], B = y[2];
        dy[0] = -b * a;
        if (kind == Envelope::Polynomial) {
            dy[1] = -0.5 * b * b - std::pow(B, s) * a * a - a + 1.0;
            dy[2] = 1.0;
        } else {
            dy[1] = -0.5 * b * b - B * a * a - a + 1.0;
            dy[2] = B;
        }
    };
}

/// Full Lagrangian gradient system, y = [d, omega, eta, xi, rho]:
///   d'   = -d^2/2 - eta^2/2 + omega^2/2 - xi^2/2 + k (rho - c_b)
///   eta' = -eta d + f1(t),  omega' = -omega d,  xi' = -xi d + f2(t),
///   rho' = -rho d.
inline auto rhs_lagrangian(std::function<double(double)> f1, std::function<double(double)> f2,
                           double k, double c_b) {
    return [f1 = std::move(f1), f2 = std::move(f2), k, c_b](double t, std::span<const double> y,
                                                            std::span<double> dy) {
        const double d = y[0], om = y[1], eta = y[2], xi = y[3], rho = y[4];
        dy[0] = -0.5 * d * d - 0.5 * eta * eta + 0.5 * om * om - 0.5 * xi * xi + k * (rho - c_b);
        dy[1] = -om * d;
        dy[2] = -eta * d + (f1 ? f1(t) : 0.0);
        dy[3] = -xi * d + (f2 ? f2(t) : 0.0);
        dy[4] = -rho * d;
    };
}

class PositivityViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integrates the reduced system from a phase state. Density positivity is
/// asserted at every accepted step (non-vacuum data propagates).
inline OdeResult simulate_reduced(const PhaseState& init, const CoefficientTrajectory& A,
                                  double t_end, OdeOptions opts = {}) {
    if (!(init.rho > 0.0)) throw std::invalid_argument("simulate_reduced: requires rho > 0");
    auto user = opts.observer;
    opts.observer = [user](double t, std::span<const double> y) {
        if (!(y[0] > 0.0)) {
            throw PositivityViolation("rho lost positivity at t=" + std::to_string(t));
        }
        if (user) user(t, y);
    };
    return integrate(rhs_reduced(A), std::vector<double>{init.rho, init.d}, init.t, t_end, opts);
}

/// Integrates the auxiliary system from an aux state, watching (a, b) for
/// blow-up (B itself grows like e^t in the exponential case).
inline OdeResult simulate_aux(const AuxState& init, Envelope kind, double s, double t_end,
                              OdeOptions opts = {}) {
    if (!(init.B >= 1.0)) throw std::invalid_argument("simulate_aux: requires B >= 1");
    if (opts.blowup_watch.empty()) opts.blowup_watch = {0, 1};
    auto user = opts.observer;
    opts.observer = [user](double t, std::span<const double> y) {
        if (!(y[0] > 0.0)) {
            throw PositivityViolation("a lost positivity at t=" + std::to_string(t));
        }
        if (user) user(t, y);
    };
    return integrate(rhs_aux(kind, s), std::vector<double>{init.a, init.b, init.B}, 0.0, t_end,
                     opts);
}

/// Observer asserting that the watched components stay strictly positive at
/// every accepted step (non-vacuum propagation).
inline std::function<void(double, std::span<const double>)> positivity_monitor(
    std::vector<std::size_t> watch) {
    return [watch = std::move(watch)](double t, std::span<const double> y) {
        for (std::size_t i : watch) {
            if (!(y[i] > 0.0)) {
                throw PositivityViolation("component " + std::to_string(i) +
                                          " lost positivity at t=" + std::to_string(t));
            }
        }
    };
}

// ============================================================================
// Comparison harness
// ============================================================================

struct ComparisonReport {
    bool ordering_held = false;
    double min_gap_d_minus_b = 0.0;
    double min_gap_a_minus_rho = 0.0;
    OdeStatus status = OdeStatus::ReachedEnd;
    std::size_t steps = 0;
};

/// Integrates the reduced system and the auxiliary system as one joint
/// 5-dimensional state [rho, d, a, b, B] under a shared step controller, so
/// the orderings b < d and rho < a are compared at identical times.
inline ComparisonReport run_comparison(double rho0, double d0, double a0, double b0,
                                       const CoefficientTrajectory& A, double t_end,
                                       OdeOptions opts = {}) {
    if (!(b0 < d0) || !(0.0 < rho0) || !(rho0 < a0)) {
        throw std::invalid_argument(
            "run_comparison: requires b(0) < d(0) and 0 < rho(0) < a(0)");
    }
    const Envelope kind = A.envelope.kind;
    const double s = A.envelope.s;
    auto rhs = [&A, kind, s](double t, std::span<const double> y, std::span<double> dy) {
        const double rho = y[0], d = y[1], a = y[2], b = y[3], B = y[4];
        const double At = A(t);
        dy[0] = -rho * d;
        dy[1] = -0.5 * d * d + At * rho * rho - (rho - 1.0);
        dy[2] = -b * a;
        if (kind == Envelope::Polynomial) {
            dy[3] = -0.5 * b * b - std::pow(B, s) * a * a - a + 1.0;
            dy[4] = 1.0;
        } else {
            dy[3] = -0.5 * b * b - B * a * a - a + 1.0;
            dy[4] = B;
        }
    };

    ComparisonReport rep;
    rep.min_gap_d_minus_b = std::numeric_limits<double>::infinity();
    rep.min_gap_a_minus_rho = std::numeric_limits<double>::infinity();
    auto user_observer = opts.observer;
    opts.observer = [&rep, &user_observer](double t, std::span<const double> y) {
        rep.min_gap_d_minus_b = std::min(rep.min_gap_d_minus_b, y[1] - y[3]);
        rep.min_gap_a_minus_rho = std::min(rep.min_gap_a_minus_rho, y[2] - y[0]);
        if (user_observer) user_observer(t, y);
    };
    opts.blowup_watch = {0, 1, 2, 3};  // B grows like e^t in the exponential case

    const std::vector<double> y0{rho0, d0, a0, b0, 1.0};
    auto res = integrate(rhs, y0, 0.0, t_end, opts);
    rep.status = res.status;
    rep.steps = res.steps;
    rep.ordering_held = res.status == OdeStatus::ReachedEnd &&
                        rep.min_gap_d_minus_b > -1e-9 && rep.min_gap_a_minus_rho > -1e-9;
    return rep;
}

// ============================================================================
// Upper bound on d
// ============================================================================

/// Upper bound max{d0, sqrt(2 max{1, w rho_M^2 - rho_M + 1})} with
/// w = (1/2)(omega0/rho0)^2, valid whenever rho stays below rho_M.
inline double upper_bound_d(double rho_M, double d0, double omega0_over_rho0) {
    if (!(rho_M > 0.0)) throw std::invalid_argument("upper_bound_d: rho_M must be > 0");
    const double w = 0.5 * omega0_over_rho0 * omega0_over_rho0;
    const double inner = std::max(1.0, w * rho_M * rho_M - rho_M + 1.0);
    return std::max(d0, std::sqrt(2.0 * inner));
}

// ============================================================================
// Sweep classification
// ============================================================================

enum class SweepStatus { Global, BlowUp, Undecided };

inline const char* to_string(SweepStatus s) {
    switch (s) {
        case SweepStatus::Global: return "global";
        case SweepStatus::BlowUp: return "blow_up";
        case SweepStatus::Undecided: return "undecided";
    }
    return "?";
}

struct SweepRow {
    double rho0 = 0, d0 = 0;
    bool member = false;
    SweepStatus status = SweepStatus::Undecided;
    double t_end_or_blow = 0.0;
    double d_max = 0.0;
    double rho_max = 0.0;
};

struct SweepOptions {
    double t_end = 50.0;
    double rtol = 1e-6;
    double atol = 1e-9;
    std::uint64_t seed = 1;  // per-point seed = seed + grid index
    unsigned jobs = 1;
};

/// Classifies each (rho0, d0) grid point by integrating the reduced system
/// with a per-point admissible A(t). Rows come back ordered by grid index
/// (d0 fastest) regardless of how work is distributed.
inline std::vector<SweepRow> sweep_classify(const std::optional<ThresholdRegion>& region,
                                            std::span<const double> rho0s,
                                            std::span<const double> d0s, EnvelopeSpec env,
                                            const SweepOptions& sw = {}) {
    const std::size_t nr = rho0s.size(), nd = d0s.size();
    std::vector<SweepRow> rows(nr * nd);
    if (rows.empty()) return rows;

    auto work = [&](std::size_t idx) {
        const double rho0 = rho0s[idx / nd];
        const double d0 = d0s[idx % nd];
        SweepRow row;
        row.rho0 = rho0;
        row.d0 = d0;
        row.member = region ? membership(*region, rho0, d0) : false;

        auto A = admissible_A(env, sw.seed + idx);
        OdeOptions opts;
        opts.rtol = sw.rtol;
        opts.atol = sw.atol;
        opts.store_trajectory = false;
        row.d_max = d0;
        row.rho_max = rho0;
        opts.observer = [&row](double, std::span<const double> y) {
            row.rho_max = std::max(row.rho_max, y[0]);
            row.d_max = std::max(row.d_max, y[1]);
        };
        auto res = integrate(rhs_reduced(A), std::vector<double>{rho0, d0}, 0.0, sw.t_end, opts);
        row.t_end_or_blow = res.t_final;
        switch (res.status) {
            case OdeStatus::ReachedEnd: row.status = SweepStatus::Global; break;
            case OdeStatus::BlowUp: row.status = SweepStatus::BlowUp; break;
            case OdeStatus::StepCollapse: row.status = SweepStatus::Undecided; break;
        }
        rows[idx] = row;
    };

    const unsigned jobs = std::max(1u, sw.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
                    work(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    return rows;
}

}  // namespace epct
