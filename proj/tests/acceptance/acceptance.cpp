// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Findings that a criterion cannot hold are reported, not
// papered over; see the README for the analysis of the exponential-envelope
// construction.

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "epct/dynamics.hpp"
#include "epct/format.hpp"
#include "epct/invariant_geometry.hpp"
#include "epct/pde.hpp"
#include "epct/riesz.hpp"
#include "epct/rng.hpp"
#include "epct/thresholds.hpp"

using namespace epct;

namespace {

int g_failures = 0;

void line(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%d] %-28s %s  %s\n", idx, name.c_str(), pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct FoundParams {
    std::vector<ThresholdParams> poly;  // s = 1, 2, 5
    ThresholdParams expo;
};

// ---------------------------------------------------------------------- 1
FoundParams criterion_1() {
    FoundParams found;
    bool pass = true;
    std::ostringstream detail;
    for (double s : {1.0, 2.0, 5.0}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto p = find_feasible_params(Envelope::Polynomial, s);
        const double dt = seconds_since(t0);
        const bool ok = validate_threshold_params(p, 1e-6).empty() && dt < 10.0;
        pass = pass && ok;
        found.poly.push_back(p);
        detail << "poly s=" << s << " m*=" << p.m_star() << " (" << fmt(dt)
               << "s) ";
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        found.expo = find_feasible_params(Envelope::Exponential, 1.0);
        const double dt = seconds_since(t0);
        pass = pass && validate_threshold_params(found.expo, 1e-6).empty() && dt < 10.0;
        detail << "exp m*=" << found.expo.m_star();
    }
    line(1, "parameter feasibility", pass, detail.str());
    return found;
}

// ---------------------------------------------------------------------- 2
void criterion_2(const FoundParams& found) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = default_x_grid();
    bool pass = true;
    std::ostringstream detail;
    for (const auto& p : found.poly) {
        for (auto id : {LemmaId::L41, LemmaId::L42}) {
            const auto r = verify_lemma(id, p, grid);
            if (!r.pass) {
                pass = false;
                detail << "poly s=" << p.s << " " << to_string(id) << " FAILED ";
            }
        }
    }
    detail << "4.1/4.2 margins positive for s=1,2,5; ";
    for (auto id : {LemmaId::L51, LemmaId::L52}) {
        const auto r = verify_lemma(id, found.expo, grid);
        if (!r.pass) {
            pass = false;
            detail << "5." << (id == LemmaId::L51 ? "1" : "2") << " worst margin "
                   << fmt(r.worst_margin) << " at x="
                   << fmt(r.worst_x)
                   << " (discriminant provably positive for every admissible parameter set); ";
        }
    }
    const double dt = seconds_since(t0);
    pass = pass && dt < 5.0;
    detail << "in " << fmt(dt) << "s";
    line(2, "lemma grid verification", pass, detail.str());
}

// ---------------------------------------------------------------------- 3
void criterion_3(const FoundParams& found) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool pass = true;
    for (auto kind : {Envelope::Polynomial, Envelope::Exponential}) {
        const ThresholdParams p = kind == Envelope::Polynomial ? found.poly[0] : found.expo;
        const auto region = ThresholdRegion::from_params(p);
        const double a_hi = 2.0 * region.n_star / region.m_star;
        Rng rng(kind == Envelope::Polynomial ? 301u : 302u);
        int failures = 0;
        for (int trial = 0; trial < 200; ++trial) {
            double a0 = 0, b0 = 0;
            do {
                a0 = rng.uniform(0.0, a_hi);
                b0 = rng.uniform(0.0, 5.0);
            } while (!membership(region, a0, b0));
            OdeOptions opts;
            opts.rtol = 1e-9;
            opts.atol = 1e-12;
            opts.store_trajectory = false;
            opts.blowup_watch = {0, 1};
            double min_b = 1e300, max_a = 0.0;
            opts.observer = [&](double, std::span<const double> y) {
                max_a = std::max(max_a, y[0]);
                min_b = std::min(min_b, y[1]);
            };
            const auto res = integrate(rhs_aux(kind, p.s), std::vector<double>{a0, b0, 1.0},
                                       0.0, 50.0, opts);
            const bool ok = res.status == OdeStatus::ReachedEnd && min_b > 0.0 &&
                            max_a <= a0 * (1.0 + 1e-9);
            if (!ok) ++failures;
        }
        if (failures > 0) pass = false;
        detail << to_string(kind) << ": " << failures << "/200 failed"
               << (failures > 0 ? " (region boundary leaks)" : "") << "; ";
    }
    const double dt = seconds_since(t0);
    pass = pass && dt < 60.0;
    detail << "in " << fmt(dt) << "s";
    line(3, "invariant region", pass, detail.str());
}

// ---------------------------------------------------------------------- 4
void criterion_4() {
    EnvelopeSpec env{Envelope::Polynomial, 1.0, 0.5};  // omega0/rho0 = 1
    Rng rng(401);
    bool pass = true;
    double worst_db = 1e300, worst_ar = 1e300;
    for (int k = 0; k < 100; ++k) {
        const double rho0 = rng.uniform(0.05, 0.4);
        const double a0 = rho0 + rng.uniform(0.02, 0.2);
        const double d0 = rng.uniform(0.6, 2.5);
        const double b0 = d0 - rng.uniform(0.02, 0.4);
        auto A = admissible_A(env, 4000 + std::uint64_t(k));
        OdeOptions opts;
        opts.rtol = 1e-10;
        opts.atol = 1e-13;
        opts.store_trajectory = false;
        const auto rep = run_comparison(rho0, d0, a0, b0, A, 20.0, opts);
        worst_db = std::min(worst_db, rep.min_gap_d_minus_b);
        worst_ar = std::min(worst_ar, rep.min_gap_a_minus_rho);
        pass = pass && rep.ordering_held;
    }
    std::ostringstream detail;
    detail << "100 admissible A; min gaps d-b=" << fmt(worst_db)
           << ", a-rho=" << fmt(worst_ar);
    line(4, "comparison principle", pass, detail.str());
}

// ---------------------------------------------------------------------- 5
void criterion_5(const FoundParams& found) {
    std::ostringstream detail;
    bool pass = true;
    for (auto kind : {Envelope::Polynomial, Envelope::Exponential}) {
        const ThresholdParams p = kind == Envelope::Polynomial ? found.poly[0] : found.expo;
        const auto region = ThresholdRegion::from_params(p);
        const double rb = 2.0 * region.n_star / region.m_star;
        std::vector<double> rho0s(50), d0s(50);
        for (int i = 0; i < 50; ++i) rho0s[i] = rb * double(i + 1) / 50.0;
        for (int j = 0; j < 50; ++j) d0s[j] = 5.0 * double(j + 1) / 50.0;
        EnvelopeSpec env{kind, p.s, 0.0};  // upper bound 0: blow-up oracle is rigorous
        SweepOptions sw;
        sw.t_end = 50.0;
        sw.seed = kind == Envelope::Polynomial ? 501u : 502u;
        sw.jobs = 4;
        const auto rows = sweep_classify(region, rho0s, d0s, env, sw);
        int members = 0, member_failures = 0;
        for (const auto& r : rows) {
            if (!r.member) continue;
            ++members;
            const bool ok = r.status == SweepStatus::Global &&
                            r.d_max <= upper_bound_d(r.rho_max, r.d0, 0.0) + 1e-6;
            if (!ok) ++member_failures;
        }
        if (member_failures > 0) pass = false;
        detail << to_string(kind) << ": " << members << " members, " << member_failures
               << " failed"
               << (member_failures > 0 ? " (members of the claimed region blow up)" : "") << "; ";
    }
    // deep-negative initial divergence: all blow up before t = 0.25
    {
        EnvelopeSpec env{Envelope::Polynomial, 1.0, 0.0};
        int bad = 0;
        int idx = 0;
        for (double rho0 : {0.5, 1.0, 1.5}) {
            for (double d0 : {-10.0, -12.0, -15.0}) {
                auto A = admissible_A(env, 5500 + std::uint64_t(idx++));
                OdeOptions opts;
                opts.rtol = 1e-9;
                opts.atol = 1e-12;
                opts.store_trajectory = false;
                const auto res =
                    integrate(rhs_reduced(A), std::vector<double>{rho0, d0}, 0.0, 1.0, opts);
                if (!(res.status == OdeStatus::BlowUp && res.t_final < 0.25)) ++bad;
            }
        }
        if (bad > 0) pass = false;
        detail << "d0<=-10: " << (9 - bad) << "/9 blew up before t=0.25";
    }
    line(5, "theorem-as-map sweep", pass, detail.str());
}

// ---------------------------------------------------------------------- 6
void criterion_6() {
    bool pass = true;
    // single-mode exactness
    {
        ScalarField2D h(64, 64, 2 * M_PI, 2 * M_PI);
        h.fill([](double x, double) { return std::cos(x); });
        auto r11 = riesz_apply(h, 1, 1);
        auto r22 = riesz_apply(h, 2, 2);
        auto r12 = riesz_apply(h, 1, 2);
        double e = 0;
        for (std::size_t i = 0; i < 64; ++i)
            for (std::size_t j = 0; j < 64; ++j)
                e = std::max(e, std::abs(r11(i, j) - h(i, j)));
        pass = pass && e < 1e-12 && r22.max_abs() < 1e-12 && r12.max_abs() < 1e-12;

        ScalarField2D g(64, 64, 2 * M_PI, 2 * M_PI);
        g.fill([](double x, double y) { return std::cos(x + y); });
        auto g12 = riesz_apply(g, 1, 2);
        e = 0;
        for (std::size_t i = 0; i < 64; ++i)
            for (std::size_t j = 0; j < 64; ++j)
                e = std::max(e, std::abs(g12(i, j) - 0.5 * g(i, j)));
        pass = pass && e < 1e-12;
    }
    // trace identity over 1000 random 64^2 fields
    double worst = 0;
    Rng rng(601);
    for (int trial = 0; trial < 1000; ++trial) {
        ScalarField2D h(64, 64, 2 * M_PI, 2 * M_PI);
        std::vector<std::array<double, 4>> modes;
        for (int m = 0; m < 8; ++m) {
            int kx = int(rng.uniform(0, 9)), ky = int(rng.uniform(0, 9));
            if (kx == 0 && ky == 0) kx = 1;
            modes.push_back(
                {double(kx), double(ky), rng.uniform(-1, 1), rng.uniform(0, 2 * M_PI)});
        }
        h.fill([&](double x, double y) {
            double v = 0;
            for (const auto& m : modes) v += m[2] * std::cos(m[0] * x + m[1] * y + m[3]);
            return v;
        });
        auto r11 = riesz_apply(h, 1, 1);
        auto r22 = riesz_apply(h, 2, 2);
        for (std::size_t i = 0; i < 64; ++i)
            for (std::size_t j = 0; j < 64; ++j)
                worst = std::max(worst, std::abs(r11(i, j) + r22(i, j) - h(i, j)));
    }
    pass = pass && worst < 1e-10;
    std::ostringstream detail;
    detail << "single modes exact; trace identity worst dev " << fmt(worst)
           << " over 1000 fields";
    line(6, "Riesz identities", pass, detail.str());
}

// ---------------------------------------------------------------------- 7
void criterion_7() {
    const auto t0 = std::chrono::steady_clock::now();
    auto run_case = [&](std::size_t n, double& ratio, double& ode) {
        PseudoSpectralSolver solver(n, n);
        const auto init = make_smooth_data(n, 0.1);
        const auto run = solver.run_to(init, 0.3);
        Rng rng(701);
        std::vector<std::array<double, 2>> x0s(16);
        for (auto& x : x0s) x = {rng.uniform(0, 2 * M_PI), rng.uniform(0, 2 * M_PI)};
        const auto traces = trace_characteristics(solver, run, x0s);
        ratio = 0;
        ode = 0;
        for (const auto& tr : traces) {
            const auto rep = verify_reduction(tr);
            ratio = std::max(ratio, rep.ratio_err);
            ode = std::max(ode, rep.ode_residual);
        }
    };
    double r128 = 0, o128 = 0, r256 = 0, o256 = 0;
    run_case(128, r128, o128);
    run_case(256, r256, o256);
    const double dt = seconds_since(t0);
    const double shrink_r = r128 / std::max(r256, 1e-300);
    const double shrink_o = o128 / std::max(o256, 1e-300);
    const bool pass =
        r128 < 1e-3 && o128 < 1e-2 && shrink_r >= 4.0 && shrink_o >= 4.0 && dt < 300.0;
    std::ostringstream detail;
    detail << "128^2 ratio=" << fmt(r128) << " ode="
           << fmt(o128) << "; shrink x" << fmt(shrink_r)
           << "/x" << fmt(shrink_o) << "; in "
           << fmt(dt) << "s";
    line(7, "reduction verification", pass, detail.str());
}

// ---------------------------------------------------------------------- 8
void criterion_8() {
    // logistic growth with its exact solution as the reference
    auto rhs = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[0] * (1.0 - y[0]);
    };
    const double y0 = 0.1, T = 6.0;
    const double ref = 1.0 / (1.0 + (1.0 / y0 - 1.0) * std::exp(-T));
    std::vector<double> errs;
    for (std::size_t n : {20, 40, 80}) {
        errs.push_back(
            std::abs(integrate_fixed_steps(rhs, std::vector<double>{y0}, 0.0, T, n)[0] - ref));
    }
    const double p1 = std::log2(errs[0] / errs[1]);
    const double p2 = std::log2(errs[1] / errs[2]);
    const bool pass = p1 > 3.8 && p1 < 5.2 && p2 > 3.8 && p2 < 5.2;
    std::ostringstream detail;
    detail << "observed orders " << fmt(p1) << ", "
           << fmt(p2);
    line(8, "integrator order", pass, detail.str());
}

// ---------------------------------------------------------------------- 9
void criterion_9() {
#ifndef EPCT_CLI_PATH
    line(9, "determinism", false, "CLI path not configured");
    return;
#else
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string cli = EPCT_CLI_PATH;
    char tmpl[] = "/tmp/epct_accept_XXXXXX";
    const std::string dir = mkdtemp(tmpl);
    auto sh = [&](const std::string& cmd) { return std::system(cmd.c_str()); };
    bool pass = true;

    sh(cli + " find-params --envelope poly --s 1 --budget 4000 --seed 7 --out " + dir + "/p1.json");
    sh(cli + " find-params --envelope poly --s 1 --budget 4000 --seed 7 --out " + dir + "/p2.json");
    pass = pass && !slurp(dir + "/p1.json").empty() &&
           slurp(dir + "/p1.json") == slurp(dir + "/p2.json");

    sh(cli + " simulate --system aux-poly --a0 0.05 --b0 1.0 --t-end 20 --out " + dir + "/s1.csv");
    sh(cli + " simulate --system aux-poly --a0 0.05 --b0 1.0 --t-end 20 --out " + dir + "/s2.csv");
    pass = pass && !slurp(dir + "/s1.csv").empty() &&
           slurp(dir + "/s1.csv") == slurp(dir + "/s2.csv");

    sh(cli + " sweep --params " + dir + "/p1.json --nr 10 --nd 10 --t-end 5 --seed 3 --jobs 3 --out " +
       dir + "/w1.csv");
    sh(cli + " sweep --params " + dir + "/p1.json --nr 10 --nd 10 --t-end 5 --seed 3 --jobs 1 --out " +
       dir + "/w2.csv");
    pass = pass && !slurp(dir + "/w1.csv").empty() &&
           slurp(dir + "/w1.csv") == slurp(dir + "/w2.csv");

    line(9, "determinism", pass, "find-params/simulate/sweep byte-identical across reruns and job counts");
#endif
}

}  // namespace

int main() {
    std::printf("acceptance suite\n----------------\n");
    const auto found = criterion_1();
    criterion_2(found);
    criterion_3(found);
    criterion_4();
    criterion_5(found);
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("----------------\n%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
