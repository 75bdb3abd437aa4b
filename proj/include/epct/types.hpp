#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace epct {

// ============================================================================
// Envelope for the nonlocal coefficient A(t)
// ============================================================================

enum class Envelope { Polynomial, Exponential };

inline const char* to_string(Envelope e) {
    return e == Envelope::Polynomial ? "polynomial" : "exponential";
}

/// Bounds for the admissible coefficient A(t): a decreasing lower-bound law
/// (either -(t+1)^s or -e^t) and the constant upper bound (1/2)(omega0/rho0)^2.
struct EnvelopeSpec {
    Envelope kind = Envelope::Polynomial;
    double s = 1.0;       // exponent of the polynomial law; ignored for exponential
    double upper = 0.0;   // (1/2)(omega0/rho0)^2

    double lower(double t) const {
        return kind == Envelope::Polynomial ? -std::pow(t + 1.0, s) : -std::exp(t);
    }

    static EnvelopeSpec polynomial(double s, double omega0_over_rho0 = 0.0) {
        return {Envelope::Polynomial, s, 0.5 * omega0_over_rho0 * omega0_over_rho0};
    }
    static EnvelopeSpec exponential(double omega0_over_rho0 = 0.0) {
        return {Envelope::Exponential, 1.0, 0.5 * omega0_over_rho0 * omega0_over_rho0};
    }
};

// ============================================================================
// Threshold constants
// ============================================================================

/// Constants (m1, m2, n1, n2, M, N, s) defining the envelope polynomials
/// m(x) = m1 (x+m2)^M and n(x) = n1 (x+n2)^N together with the envelope kind.
/// Use make_threshold_params to obtain a validated instance.
struct ThresholdParams {
    double m1 = 0, m2 = 0, n1 = 0, n2 = 0;
    double M = 0, N = 0;
    double s = 1.0;  // only meaningful for the polynomial envelope
    Envelope envelope = Envelope::Polynomial;

    double m_star() const { return m1 * std::pow(m2, M); }
    double n_star() const { return n1 * std::pow(n2, N); }
};

/// One violated constraint: the inequality by name plus both sides' values.
struct Violation {
    std::string name;
    double lhs = 0, rhs = 0;
};

class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string msg, std::vector<Violation> v)
        : std::runtime_error(std::move(msg)), violations(std::move(v)) {}
    std::vector<Violation> violations;
};

namespace detail {

// strict a > b with relative slack; guards against accepting values that sit
// on a constraint boundary up to rounding
inline bool strictly_greater(double a, double b, double slack) {
    return a - b > slack * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace detail

/// Explicit lower bound on m2 in the polynomial conditions.
inline double poly_m2_lower_bound(double m1, double n1, double n2, double N, double M, double s) {
    const double t2 =
        std::pow((m1 * n1 + M * m1 * m1 * n1 + n1 * n1) / (m1 * m1), 1.0 / (1.0 - N));
    const double t3 = std::pow(n1 / (2.0 * m1) * (1.0 + std::sqrt(5.0)), 1.0 / (M - N - s));
    return std::max({n2, t2, t3});
}

/// Explicit lower bound on n2 in the exponential conditions.
inline double exp_n2_lower_bound(double m1, double n1, double N, double M) {
    return std::max(1.0, std::pow(n1 / (2.0 * m1) * (1.0 + std::sqrt(5.0)), 1.0 / (M - N - 1.0)));
}

/// Checks every threshold inequality; returns the full list of violations
/// (empty means valid). `slack` is the relative slack used for the strict
/// inequalities (default matches the library-wide 1e-12; pass 1e-6 for the
/// re-validation used by the feasibility search).
inline std::vector<Violation> validate_threshold_params(const ThresholdParams& p,
                                                        double slack = 1e-12) {
    using detail::strictly_greater;
    std::vector<Violation> v;
    auto require = [&](bool ok, const char* name, double lhs, double rhs) {
        if (!ok) v.push_back({name, lhs, rhs});
    };

    for (double x : {p.m1, p.m2, p.n1, p.n2, p.M, p.N, p.s}) {
        if (!std::isfinite(x)) {
            v.push_back({"all values finite", x, 0.0});
            return v;
        }
    }

    const double sqrt2 = std::sqrt(2.0);
    if (p.envelope == Envelope::Polynomial) {
        require(strictly_greater(p.N, 0.0, slack), "N > 0", p.N, 0.0);
        require(strictly_greater(1.0, p.N, slack), "N < 1", 1.0, p.N);
        require(strictly_greater(p.M, p.N + p.s, slack), "M > N + s", p.M, p.N + p.s);
        require(strictly_greater(p.n1, 1.0 + std::sqrt(3.0), slack), "n1 > 1 + sqrt(3)", p.n1,
                1.0 + std::sqrt(3.0));
        require(strictly_greater(p.n2, 1.0, slack), "n2 > 1", p.n2, 1.0);
        require(strictly_greater(p.m1, sqrt2, slack), "m1 > sqrt(2)", p.m1, sqrt2);
        require(p.s >= 1.0, "s >= 1", p.s, 1.0);
        // the bound needs N < 1 and M > N + s to be well defined
        if (p.N < 1.0 && p.M > p.N + p.s) {
            const double bound = poly_m2_lower_bound(p.m1, p.n1, p.n2, p.N, p.M, p.s);
            require(strictly_greater(p.m2, bound, slack), "m2 > max(n2, c1^(1/(1-N)), c2^(1/(M-N-s)))",
                    p.m2, bound);
        }
    } else {
        require(strictly_greater(0.0, p.N, slack), "N < 0", 0.0, p.N);
        require(strictly_greater(p.M, p.m2 * sqrt2, slack), "M > m2*sqrt(2)", p.M, p.m2 * sqrt2);
        require(strictly_greater(p.m1, sqrt2, slack), "m1 > sqrt(2)", p.m1, sqrt2);
        require(strictly_greater(p.m2, p.n2, slack), "m2 > n2", p.m2, p.n2);
        require(strictly_greater(p.n1, 0.0, slack), "n1 > 0", p.n1, 0.0);
        if (p.M - p.N - 1.0 > 0.0) {
            const double bound = exp_n2_lower_bound(p.m1, p.n1, p.N, p.M);
            require(strictly_greater(p.n2, bound, slack), "n2 > max(1, c2^(1/(M-N-1)))", p.n2,
                    bound);
        } else {
            v.push_back({"M > N + 1", p.M, p.N + 1.0});
        }
    }
    return v;
}

/// Validating constructor. Throws ValidationError listing every violated
/// inequality by name.
inline ThresholdParams make_threshold_params(double m1, double m2, double n1, double n2, double M,
                                             double N, double s, Envelope envelope) {
    ThresholdParams p{m1, m2, n1, n2, M, N, s, envelope};
    auto violations = validate_threshold_params(p);
    if (!violations.empty()) {
        std::string msg = "threshold parameter validation failed:";
        for (const auto& viol : violations) {
            msg += " [" + viol.name + " (lhs=" + std::to_string(viol.lhs) +
                   ", rhs=" + std::to_string(viol.rhs) + ")]";
        }
        throw ValidationError(msg, std::move(violations));
    }
    return p;
}

// ============================================================================
// Phase-space states
// ============================================================================

/// (rho, d) of the reduced system along a characteristic.
struct PhaseState {
    double rho = 1.0;
    double d = 0.0;
    double t = 0.0;
};

/// (a, b, B) of the auxiliary system; B(0) = 1 and B >= 1 afterwards.
struct AuxState {
    double a = 0.0;
    double b = 0.0;
    double B = 1.0;
};

// ============================================================================
// Velocity-gradient decomposition
// ============================================================================

struct Mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
};

/// Four scalar quantities of a 2x2 velocity gradient: trace d, vorticity
/// omega = a21 - a12, eta = a11 - a22, xi = a12 + a21.
struct GradientDecomposition {
    double d = 0, omega = 0, eta = 0, xi = 0;
};

inline GradientDecomposition decompose_gradient(const Mat2& m) {
    return {m.a11 + m.a22, m.a21 - m.a12, m.a11 - m.a22, m.a12 + m.a21};
}

inline Mat2 reconstruct_gradient(const GradientDecomposition& g) {
    return {0.5 * (g.d + g.eta), 0.5 * (g.xi - g.omega), 0.5 * (g.xi + g.omega),
            0.5 * (g.d - g.eta)};
}

// ============================================================================
// Periodic scalar field
// ============================================================================

/// Real scalar samples on an nx-by-ny periodic grid over [0,lx) x [0,ly).
/// Grid sizes must be powers of two. Storage is row-major in i (x index).
class ScalarField2D {
public:
    ScalarField2D(std::size_t nx, std::size_t ny, double lx, double ly)
        : nx_(nx), ny_(ny), lx_(lx), ly_(ly), values_(nx * ny, 0.0) {
        auto pow2 = [](std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; };
        if (!pow2(nx) || !pow2(ny)) {
            throw std::invalid_argument("ScalarField2D: grid sizes must be powers of two");
        }
        if (!(lx > 0.0) || !(ly > 0.0)) {
            throw std::invalid_argument("ScalarField2D: domain lengths must be positive");
        }
    }

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }

    double& operator()(std::size_t i, std::size_t j) { return values_[i * ny_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * ny_ + j]; }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::size_t size() const { return values_.size(); }

    double x(std::size_t i) const { return lx_ * double(i) / double(nx_); }
    double y(std::size_t j) const { return ly_ * double(j) / double(ny_); }

    double mean() const {
        double s = 0.0;
        for (double v : values_) s += v;
        return s / double(values_.size());
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    template <class F>
    void fill(F&& f) {
        for (std::size_t i = 0; i < nx_; ++i)
            for (std::size_t j = 0; j < ny_; ++j) values_[i * ny_ + j] = f(x(i), y(j));
    }

private:
    std::size_t nx_, ny_;
    double lx_, ly_;
    std::vector<double> values_;
};

}  // namespace epct
