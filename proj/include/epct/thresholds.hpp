#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "epct/rng.hpp"
#include "epct/types.hpp"

namespace epct {

// ============================================================================
// Threshold region d > m* rho - n*
// ============================================================================

struct ThresholdRegion {
    double m_star = 0.0;
    double n_star = 0.0;
    std::optional<ThresholdParams> params;

    static ThresholdRegion from_params(const ThresholdParams& p) {
        return {p.m_star(), p.n_star(), p};
    }
    static ThresholdRegion from_line(double m_star, double n_star) {
        return {m_star, n_star, std::nullopt};
    }
};

/// Membership in the region {rho > 0, d > 0, d > m* rho - n*}.
inline bool membership(const ThresholdRegion& r, double rho0, double d0) {
    return rho0 > 0.0 && d0 > 0.0 && d0 > r.m_star * rho0 - r.n_star;
}

struct BoundaryResult {
    std::vector<std::array<double, 2>> points;  // (rho, d) sorted by rho
    bool starts_beyond_rho_max = false;
};

/// Points on the boundary line d = m* rho - n*, clipped to d >= 0, equally
/// spaced in rho from the intercept n*/m* up to rho_max.
inline BoundaryResult region_boundary(const ThresholdRegion& r, double rho_max,
                                      std::size_t num_points) {
    if (!(rho_max > 0.0)) throw std::invalid_argument("region_boundary: rho_max must be > 0");
    if (num_points < 2) throw std::invalid_argument("region_boundary: num_points must be >= 2");
    BoundaryResult out;
    const double rho_lo = r.n_star / r.m_star;
    if (rho_lo > rho_max) {
        out.starts_beyond_rho_max = true;
        return out;
    }
    out.points.reserve(num_points);
    for (std::size_t i = 0; i < num_points; ++i) {
        const double rho = rho_lo + (rho_max - rho_lo) * double(i) / double(num_points - 1);
        out.points.push_back({rho, r.m_star * rho - r.n_star});
    }
    return out;
}

// ============================================================================
// Feasibility search
// ============================================================================

class SearchFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SearchOptions {
    std::uint64_t seed = 20240901;
    int budget = 10000;          // number of candidate evaluations
    double feasibility_slack = 1e-6;  // required relative slack on every inequality
};

namespace detail {

// Polynomial case: m2 carries an explicit lower bound, so it is pinned to
// bound*(1+1e-2) and the search moves (m1, n1, n2, N, dM) with M = N + s + dM.
struct PolyEncoding {
    double s;
    static constexpr int dim = 5;
    std::array<double, dim> lo{1.45, 2.75, 1.001, 0.02, 0.02};
    std::array<double, dim> hi{30.0, 30.0, 8.0, 0.93, 4.0};

    ThresholdParams decode(const std::array<double, dim>& v) const {
        ThresholdParams p;
        p.envelope = Envelope::Polynomial;
        p.s = s;
        p.m1 = v[0];
        p.n1 = v[1];
        p.n2 = v[2];
        p.N = v[3];
        p.M = v[3] + s + v[4];
        p.m2 = 1.01 * poly_m2_lower_bound(p.m1, p.n1, p.n2, p.N, p.M, p.s);
        return p;
    }
};

// Exponential case: the explicit bound sits on n2 instead, and M must clear
// m2*sqrt(2) while the n2 bound itself depends on M. Pin the chain
// n2 = 1.01*bound, m2 = 1.01*n2, M = 1.01*sqrt(2)*m2 by a short fixed-point
// iteration and search over (m1, n1, N).
struct ExpEncoding {
    static constexpr int dim = 3;
    std::array<double, dim> lo{1.45, 1e-3, -4.0};
    std::array<double, dim> hi{30.0, 10.0, -0.02};

    ThresholdParams decode(const std::array<double, dim>& v) const {
        ThresholdParams p;
        p.envelope = Envelope::Exponential;
        p.s = 1.0;
        p.m1 = v[0];
        p.n1 = v[1];
        p.N = v[2];
        double M = 1.5;
        double n2 = 1.01, m2 = 1.0201;
        for (int it = 0; it < 40; ++it) {
            n2 = 1.01 * exp_n2_lower_bound(p.m1, p.n1, p.N, M);
            m2 = 1.01 * n2;
            M = 1.01 * std::sqrt(2.0) * m2;
        }
        p.n2 = n2;
        p.m2 = m2;
        p.M = M;
        return p;
    }
};

template <class Enc>
ThresholdParams coordinate_descent(const Enc& enc, const SearchOptions& opts) {
    Rng rng(opts.seed);
    int evals = 0;
    bool found = false;

    // objective: minimize m*; ties broken toward larger n* so the search does
    // not collapse the region when a coordinate stops affecting m*
    using Obj = std::pair<double, double>;  // (m*, -n*)
    auto better = [](const Obj& a, const Obj& b) {
        const double tol = 1e-12 * std::max({1.0, std::abs(a.first), std::abs(b.first)});
        if (a.first < b.first - tol) return true;
        if (a.first > b.first + tol) return false;
        return a.second < b.second - 1e-15;
    };
    Obj best_obj{std::numeric_limits<double>::infinity(), 0.0};
    ThresholdParams best;

    auto evaluate = [&](const std::array<double, Enc::dim>& v,
                        ThresholdParams& out) -> std::optional<Obj> {
        ++evals;
        out = enc.decode(v);
        if (!validate_threshold_params(out, opts.feasibility_slack).empty()) return std::nullopt;
        return Obj{out.m_star(), -out.n_star()};
    };

    const int n_starts = 8;
    for (int start = 0; start < n_starts && evals < opts.budget; ++start) {
        std::array<double, Enc::dim> v;
        for (int i = 0; i < Enc::dim; ++i) v[i] = rng.uniform(enc.lo[i], enc.hi[i]);
        ThresholdParams cand;
        auto obj = evaluate(v, cand);
        // walk infeasible random draws toward the middle of the box
        for (int tries = 0; tries < 20 && !obj && evals < opts.budget; ++tries) {
            for (int i = 0; i < Enc::dim; ++i) v[i] = 0.5 * (v[i] + 0.5 * (enc.lo[i] + enc.hi[i]));
            obj = evaluate(v, cand);
        }
        if (!obj) continue;

        std::array<double, Enc::dim> step;
        for (int i = 0; i < Enc::dim; ++i) step[i] = 0.25 * (enc.hi[i] - enc.lo[i]);
        Obj cur = *obj;
        while (evals < opts.budget) {
            bool improved = false;
            for (int i = 0; i < Enc::dim && evals < opts.budget; ++i) {
                for (double sgn : {-1.0, 1.0}) {
                    auto w = v;
                    w[i] = std::clamp(w[i] + sgn * step[i], enc.lo[i], enc.hi[i]);
                    if (w[i] == v[i]) continue;
                    ThresholdParams c2;
                    auto o2 = evaluate(w, c2);
                    if (o2 && better(*o2, cur)) {
                        v = w;
                        cur = *o2;
                        cand = c2;
                        improved = true;
                    }
                }
            }
            if (!improved) {
                bool done = true;
                for (int i = 0; i < Enc::dim; ++i) {
                    step[i] *= 0.5;
                    if (step[i] > 1e-6 * (enc.hi[i] - enc.lo[i])) done = false;
                }
                if (done) break;
            }
        }
        if (better(cur, best_obj)) {
            best_obj = cur;
            best = cand;
            found = true;
        }
    }
    if (!found) throw SearchFailed("find_feasible_params: no feasible point within budget");
    return best;
}

}  // namespace detail

/// Searches for validated threshold constants minimizing m* = m1 m2^M.
/// Deterministic for a fixed seed; throws SearchFailed when the budget is
/// exhausted without a feasible point.
inline ThresholdParams find_feasible_params(Envelope kind, double s, SearchOptions opts = {}) {
    if (kind == Envelope::Polynomial) {
        if (!(s >= 1.0)) throw std::invalid_argument("find_feasible_params: s must be >= 1");
        return detail::coordinate_descent(detail::PolyEncoding{s}, opts);
    }
    return detail::coordinate_descent(detail::ExpEncoding{}, opts);
}

}  // namespace epct
