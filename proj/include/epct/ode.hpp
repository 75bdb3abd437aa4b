#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace epct {

// ============================================================================
// Embedded Dormand-Prince 5(4) with PI step control and dense output
// ============================================================================

enum class OdeStatus { ReachedEnd, BlowUp, StepCollapse };

inline const char* to_string(OdeStatus s) {
    switch (s) {
        case OdeStatus::ReachedEnd: return "reached_t_end";
        case OdeStatus::BlowUp: return "blow_up";
        case OdeStatus::StepCollapse: return "step_collapse";
    }
    return "?";
}

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h0 = 0.0;                  // 0 = choose automatically
    double hmax = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 100000000;
    double blowup_threshold = 1e8;
    std::vector<std::size_t> blowup_watch;  // component indices; empty = all
    bool store_trajectory = true;
    bool store_dense = false;               // keep interpolation data for sample()
    std::vector<double> sample_times;       // dense-output samples (ascending)
    // called after every accepted step; may throw to abort the integration
    std::function<void(double t, std::span<const double> y)> observer;
};

struct OdeResult {
    std::vector<double> times;                   // accepted step times (incl. t0)
    std::vector<std::vector<double>> states;     // states at accepted steps
    OdeStatus status = OdeStatus::ReachedEnd;
    double t_final = 0.0;                        // last accepted time
    std::size_t steps = 0;
    std::size_t rejections = 0;
    std::vector<double> sampled_times;
    std::vector<std::vector<double>> sampled_states;

    // dense-output data per accepted step (5 coefficient vectors each)
    struct DenseSeg {
        double t0, h;
        std::vector<double> r1, r2, r3, r4, r5;
    };
    std::vector<DenseSeg> dense;

    /// Evaluate the continuous extension at time t (requires store_dense).
    std::vector<double> sample(double t) const {
        if (dense.empty()) throw std::logic_error("OdeResult::sample: dense output not stored");
        std::size_t lo = 0, hi = dense.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (dense[mid].t0 <= t) lo = mid; else hi = mid - 1;
        }
        const auto& s = dense[lo];
        const double th = std::clamp((t - s.t0) / s.h, 0.0, 1.0);
        const double th1 = 1.0 - th;
        std::vector<double> y(s.r1.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = s.r1[i] + th * (s.r2[i] + th1 * (s.r3[i] + th * (s.r4[i] + th1 * s.r5[i])));
        }
        return y;
    }
};

namespace dp5 {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// y5 - y4 quadrature weights
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// 4th-order continuous extension
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace dp5

namespace detail {

struct Dp5Work {
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
    explicit Dp5Work(std::size_t n)
        : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n) {}
};

// one DP5 step from (t, y) with k1 already evaluated; fills ynew, k7, err
template <class Rhs>
void dp5_step(Rhs&& rhs, double t, std::span<const double> y, double h, Dp5Work& w) {
    using namespace dp5;
    const std::size_t n = y.size();
    auto& yt = w.ytmp;
    for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * w.k1[i];
    rhs(t + c2 * h, yt, std::span<double>(w.k2));
    for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * w.k1[i] + a32 * w.k2[i]);
    rhs(t + c3 * h, yt, std::span<double>(w.k3));
    for (std::size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (a41 * w.k1[i] + a42 * w.k2[i] + a43 * w.k3[i]);
    rhs(t + c4 * h, yt, std::span<double>(w.k4));
    for (std::size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (a51 * w.k1[i] + a52 * w.k2[i] + a53 * w.k3[i] + a54 * w.k4[i]);
    rhs(t + c5 * h, yt, std::span<double>(w.k5));
    for (std::size_t i = 0; i < n; ++i)
        yt[i] = y[i] +
                h * (a61 * w.k1[i] + a62 * w.k2[i] + a63 * w.k3[i] + a64 * w.k4[i] + a65 * w.k5[i]);
    rhs(t + h, yt, std::span<double>(w.k6));
    for (std::size_t i = 0; i < n; ++i)
        w.ynew[i] = y[i] + h * (a71 * w.k1[i] + a73 * w.k3[i] + a74 * w.k4[i] + a75 * w.k5[i] +
                                a76 * w.k6[i]);
    rhs(t + h, std::span<const double>(w.ynew), std::span<double>(w.k7));
    for (std::size_t i = 0; i < n; ++i)
        w.err[i] = h * (e1 * w.k1[i] + e3 * w.k3[i] + e4 * w.k4[i] + e5 * w.k5[i] + e6 * w.k6[i] +
                        e7 * w.k7[i]);
}

}  // namespace detail

/// Adaptive integration of y' = rhs(t, y) from t0 to t_end.
template <class Rhs>
OdeResult integrate(Rhs&& rhs, std::span<const double> y0, double t0, double t_end,
                    const OdeOptions& opts = {}) {
    const std::size_t n = y0.size();
    detail::Dp5Work w(n);
    std::vector<double> y(y0.begin(), y0.end());
    double t = t0;

    OdeResult res;
    res.t_final = t0;
    auto record = [&](double tt, const std::vector<double>& yy) {
        if (opts.store_trajectory) {
            res.times.push_back(tt);
            res.states.push_back(yy);
        }
    };
    record(t, y);
    if (opts.observer) opts.observer(t, y);

    auto blown = [&](const std::vector<double>& yy) {
        if (opts.blowup_watch.empty()) {
            for (double v : yy)
                if (std::abs(v) > opts.blowup_threshold) return true;
        } else {
            for (std::size_t i : opts.blowup_watch)
                if (std::abs(yy[i]) > opts.blowup_threshold) return true;
        }
        return false;
    };

    rhs(t, std::span<const double>(y), std::span<double>(w.k1));

    // initial step: conservative scaling from the first derivative
    double h = opts.h0;
    if (h <= 0.0) {
        double dmax = 0.0, ymax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dmax = std::max(dmax, std::abs(w.k1[i]));
            ymax = std::max(ymax, std::abs(y[i]));
        }
        const double scale = std::max(1.0, ymax);
        h = dmax > 0.0 ? 0.01 * scale / dmax : 1e-3 * std::max(1.0, std::abs(t_end - t0));
        h = std::min(h, 0.1 * std::abs(t_end - t0));
    }
    h = std::min(h, opts.hmax);

    std::size_t next_sample = 0;
    const double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    double facold = 1e-4;

    while (t < t_end) {
        if (res.steps + res.rejections > opts.max_steps) {
            res.status = OdeStatus::StepCollapse;
            res.t_final = t;
            return res;
        }
        if (h < 1e-12 * std::max(1.0, std::abs(t))) {
            res.status = OdeStatus::StepCollapse;
            res.t_final = t;
            return res;
        }
        const bool last = t + h >= t_end;
        if (last) h = t_end - t;

        detail::dp5_step(rhs, t, std::span<const double>(y), h, w);

        double err = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(w.ynew[i])) {
                finite = false;
                break;
            }
            const double sk =
                opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(w.ynew[i]));
            const double r = w.err[i] / sk;
            err += r * r;
        }
        err = finite ? std::sqrt(err / double(n)) : std::numeric_limits<double>::infinity();

        if (err <= 1.0) {
            // accept; the step-size law uses the previous accepted error (PI)
            const double fac11 = std::pow(std::max(err, 1e-16), expo1);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(0.1, std::min(5.0, fac / safe));
            const double hnew = std::min(h / fac, opts.hmax);
            facold = std::max(err, 1e-4);

            if (opts.store_dense || next_sample < opts.sample_times.size()) {
                OdeResult::DenseSeg seg;
                seg.t0 = t;
                seg.h = h;
                seg.r1.resize(n);
                seg.r2.resize(n);
                seg.r3.resize(n);
                seg.r4.resize(n);
                seg.r5.resize(n);
                using namespace dp5;
                for (std::size_t i = 0; i < n; ++i) {
                    const double ydiff = w.ynew[i] - y[i];
                    const double bspl = h * w.k1[i] - ydiff;
                    seg.r1[i] = y[i];
                    seg.r2[i] = ydiff;
                    seg.r3[i] = bspl;
                    seg.r4[i] = ydiff - h * w.k7[i] - bspl;
                    seg.r5[i] = h * (d1 * w.k1[i] + d3 * w.k3[i] + d4 * w.k4[i] + d5 * w.k5[i] +
                                     d6 * w.k6[i] + d7 * w.k7[i]);
                }
                while (next_sample < opts.sample_times.size() &&
                       opts.sample_times[next_sample] <= t + h + 1e-14 * std::max(1.0, t + h)) {
                    const double ts = std::min(opts.sample_times[next_sample], t + h);
                    const double th = std::clamp((ts - t) / h, 0.0, 1.0), th1 = 1.0 - th;
                    std::vector<double> ys(n);
                    for (std::size_t i = 0; i < n; ++i)
                        ys[i] = seg.r1[i] +
                                th * (seg.r2[i] + th1 * (seg.r3[i] + th * (seg.r4[i] + th1 * seg.r5[i])));
                    res.sampled_times.push_back(ts);
                    res.sampled_states.push_back(std::move(ys));
                    ++next_sample;
                }
                if (opts.store_dense) res.dense.push_back(std::move(seg));
            }

            t += h;
            y.assign(w.ynew.begin(), w.ynew.end());
            std::swap(w.k1, w.k7);  // FSAL
            ++res.steps;
            res.t_final = t;
            record(t, y);
            if (opts.observer) opts.observer(t, y);
            if (blown(y)) {
                res.status = OdeStatus::BlowUp;
                return res;
            }
            if (last) break;
            h = hnew;
        } else {
            ++res.rejections;
            const double fac11 = std::pow(std::min(err, 1e16), expo1);
            h = h / std::min(10.0, fac11 / safe);
        }
    }
    res.status = OdeStatus::ReachedEnd;
    return res;
}

template <class Rhs>
OdeResult integrate(Rhs&& rhs, const std::vector<double>& y0, double t0, double t_end,
                    const OdeOptions& opts = {}) {
    return integrate(std::forward<Rhs>(rhs), std::span<const double>(y0), t0, t_end, opts);
}

/// Fixed-step driver over the same tableau (5th-order solution propagated);
/// used for observed-order measurements.
template <class Rhs>
std::vector<double> integrate_fixed_steps(Rhs&& rhs, std::span<const double> y0, double t0,
                                          double t_end, std::size_t n_steps) {
    const std::size_t n = y0.size();
    detail::Dp5Work w(n);
    std::vector<double> y(y0.begin(), y0.end());
    const double h = (t_end - t0) / double(n_steps);
    double t = t0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        rhs(t, std::span<const double>(y), std::span<double>(w.k1));
        detail::dp5_step(rhs, t, std::span<const double>(y), h, w);
        y.assign(w.ynew.begin(), w.ynew.end());
        t = t0 + double(k + 1) * h;
    }
    return y;
}

}  // namespace epct
