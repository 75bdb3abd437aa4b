#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "epct/types.hpp"

namespace epct {

// ============================================================================
// Surface functions m(x), n(x) and the invariant-region geometry
// ============================================================================

/// m(x) = m1 (x+m2)^M and n(x) = n1 (x+n2)^N with closed-form derivatives,
/// evaluated with real powers (the bases x+m2, x+n2 stay positive on x >= 0,
/// so no branch issues arise for non-integer exponents).
struct SurfaceFuncs {
    ThresholdParams params;

    double m(double x) const { return params.m1 * std::pow(x + params.m2, params.M); }
    double m_prime(double x) const {
        return params.m1 * params.M * std::pow(x + params.m2, params.M - 1.0);
    }
    double n(double x) const { return params.n1 * std::pow(x + params.n2, params.N); }
    double n_prime(double x) const {
        return params.n1 * params.N * std::pow(x + params.n2, params.N - 1.0);
    }

    static SurfaceFuncs from(const ThresholdParams& p) { return {p}; }
};

/// F(a,b,B) = b - m(B-1) a + n(B-1). Trajectories of the auxiliary system are
/// meant to stay on the F > 0 side.
inline double surface_F(const AuxState& st, const SurfaceFuncs& f) {
    if (st.B < 1.0) throw std::invalid_argument("surface_F: requires B >= 1");
    const double x = st.B - 1.0;
    return st.b - f.m(x) * st.a + f.n(x);
}

/// Coefficients of the flux quadratic q(a) = c2 a^2 - c1 a + c0, the inner
/// product of the vector field with the surface normal restricted to F = 0.
struct FluxCoeffs {
    double c2 = 0, c1 = 0, c0 = 0;
};

inline FluxCoeffs flux_coefficients(double x, const SurfaceFuncs& f) {
    const double B = x + 1.0;
    const double m = f.m(x), mp = f.m_prime(x);
    const double n = f.n(x), np = f.n_prime(x);
    if (f.params.envelope == Envelope::Polynomial) {
        const double Bs = std::pow(B, f.params.s);
        return {0.5 * m * m - Bs, 1.0 + mp, 1.0 + np - 0.5 * n * n};
    }
    return {0.5 * m * m - B, 1.0 + B * mp, 1.0 + B * np - 0.5 * n * n};
}

/// Value of the flux quadratic at a. Positive means the field crosses the
/// surface inward at that height.
inline double flux_quadratic(double a, double x, const SurfaceFuncs& f) {
    if (x < 0.0) throw std::invalid_argument("flux_quadratic: requires x >= 0");
    const auto c = flux_coefficients(x, f);
    return c.c2 * a * a - c.c1 * a + c.c0;
}

/// Discriminant of the flux quadratic, c1^2 - 4 c2 c0.
inline double flux_discriminant(double x, const SurfaceFuncs& f) {
    const auto c = flux_coefficients(x, f);
    return c.c1 * c.c1 - 4.0 * c.c2 * c.c0;
}

enum class RootStatus { Real, NoRealRoot, DegenerateLeading };

struct RootResult {
    RootStatus status = RootStatus::NoRealRoot;
    double value = 0.0;  // the larger (nonnegative) root when status == Real
};

/// Larger root R_* of the flux quadratic. DegenerateLeading when the leading
/// coefficient m^2 - 2 B^s (resp. m^2 - 2B) is not positive (up to a relative
/// rounding tolerance, so m1 = sqrt(2), m2 = 1 lands here); NoRealRoot when
/// the discriminant is negative (then the quadratic is positive for every a).
inline RootResult root_Rstar(double x, const SurfaceFuncs& f) {
    const auto c = flux_coefficients(x, f);
    const double m = f.m(x);
    if (!(2.0 * c.c2 > 1e-12 * std::max(1.0, m * m))) {
        return {RootStatus::DegenerateLeading, 0.0};
    }
    const double D = c.c1 * c.c1 - 4.0 * c.c2 * c.c0;
    if (D < 0.0) return {RootStatus::NoRealRoot, 0.0};
    return {RootStatus::Real, (c.c1 + std::sqrt(D)) / (2.0 * c.c2)};
}

/// Rest height a^* on the b = 0 plane: ((x+1)^s-scaled) positive root of
/// B^s a^2 + a - 1 = 0; the exponential variant replaces B^s by B.
inline double rest_point_astar(double x, Envelope kind, double s = 1.0) {
    if (x < 0.0) throw std::invalid_argument("rest_point_astar: requires x >= 0");
    const double Bp = kind == Envelope::Polynomial ? std::pow(x + 1.0, s) : x + 1.0;
    // (-1 + sqrt(1+4Bp)) / (2Bp), written to avoid cancellation for small Bp
    return 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * Bp));
}

/// True when the flux quadratic is positive on the whole ray a >= n(x)/m(x):
/// positivity at the intercept plus either the vertex lying left of it or a
/// negative discriminant.
inline bool flux_positive_on_ray(double x, const SurfaceFuncs& f) {
    const auto c = flux_coefficients(x, f);
    const double a0 = f.n(x) / f.m(x);
    const double q0 = c.c2 * a0 * a0 - c.c1 * a0 + c.c0;
    if (!(q0 > 0.0)) return false;
    if (!(c.c2 > 0.0)) return false;  // downward parabola eventually negative
    const double vertex = c.c1 / (2.0 * c.c2);
    if (vertex <= a0) return true;
    return c.c1 * c.c1 - 4.0 * c.c2 * c.c0 < 0.0;
}

// ============================================================================
// Grid verification of the lemma inequalities
// ============================================================================

enum class LemmaId { L41, L42, L51, L52 };

inline const char* to_string(LemmaId id) {
    switch (id) {
        case LemmaId::L41: return "4.1";
        case LemmaId::L42: return "4.2";
        case LemmaId::L51: return "5.1";
        case LemmaId::L52: return "5.2";
    }
    return "?";
}

inline LemmaId lemma_from_string(const std::string& s) {
    if (s == "4.1") return LemmaId::L41;
    if (s == "4.2") return LemmaId::L42;
    if (s == "5.1") return LemmaId::L51;
    if (s == "5.2") return LemmaId::L52;
    throw std::invalid_argument("unknown lemma id: " + s);
}

struct LemmaReport {
    LemmaId lemma = LemmaId::L41;
    bool pass = false;
    double worst_margin = 0.0;
    double worst_x = 0.0;
    std::size_t points = 0;
};

/// Default verification grid: 1e4 log-spaced points on [0, 1e3] plus the
/// endpoints {0, 1e3}.
inline std::vector<double> default_x_grid(std::size_t n = 10000, double x_max = 1e3) {
    std::vector<double> g;
    g.reserve(n + 2);
    g.push_back(0.0);
    const double lo = std::log(1e-6), hi = std::log(x_max);
    for (std::size_t i = 0; i < n; ++i) {
        g.push_back(std::exp(lo + (hi - lo) * double(i) / double(n - 1)));
    }
    g.push_back(x_max);
    return g;
}

namespace detail {

// relative margin of L > R: gap over the magnitude of the larger side
inline double rel_margin(double L, double R) {
    const double scale = std::max({std::abs(L), std::abs(R), 1e-300});
    return (L - R) / scale;
}

}  // namespace detail

/// Evaluates the concluding inequality of one of the four lemma checks at
/// every grid point. 4.1: the surface flux condition in its polynomial form;
/// 4.2/5.2: a^*(x) > n(x)/m(x); 5.1: negative discriminant. Margins are
/// relative; pass requires every margin strictly positive. Failure is a
/// report, not an exception.
inline LemmaReport verify_lemma(LemmaId id, const ThresholdParams& params,
                                std::span<const double> x_grid) {
    const SurfaceFuncs f = SurfaceFuncs::from(params);
    LemmaReport rep;
    rep.lemma = id;
    rep.points = x_grid.size();
    rep.worst_margin = std::numeric_limits<double>::infinity();

    for (double x : x_grid) {
        double margin = 0.0;
        switch (id) {
            case LemmaId::L41: {
                const double m = f.m(x), mp = f.m_prime(x);
                const double n = f.n(x), np = f.n_prime(x);
                const double L = (1.0 + np) * m * m;
                const double R = (1.0 + mp) * m * n + std::pow(x + 1.0, params.s) * n * n;
                margin = detail::rel_margin(L, R);
                break;
            }
            case LemmaId::L42:
                margin = detail::rel_margin(rest_point_astar(x, Envelope::Polynomial, params.s),
                                            f.n(x) / f.m(x));
                break;
            case LemmaId::L52:
                margin = detail::rel_margin(rest_point_astar(x, Envelope::Exponential),
                                            f.n(x) / f.m(x));
                break;
            case LemmaId::L51: {
                const auto c = flux_coefficients(x, f);
                const double D = c.c1 * c.c1 - 4.0 * c.c2 * c.c0;
                const double scale =
                    std::max({c.c1 * c.c1, std::abs(4.0 * c.c2 * c.c0), 1e-300});
                margin = -D / scale;
                break;
            }
        }
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_x = x;
        }
    }
    rep.pass = rep.worst_margin > 0.0;
    return rep;
}

inline LemmaReport verify_lemma(LemmaId id, const ThresholdParams& params) {
    const auto g = default_x_grid();
    return verify_lemma(id, params, g);
}

}  // namespace epct
