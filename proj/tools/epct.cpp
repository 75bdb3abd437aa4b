// Command-line front end: parameter validation and search, region export,
// simulations, sweeps, lemma verification, reduction verification and the
// comparison harness, with deterministic CSV/JSON outputs.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "epct/dynamics.hpp"
#include "epct/format.hpp"
#include "epct/invariant_geometry.hpp"
#include "epct/pde.hpp"
#include "epct/riesz.hpp"
#include "epct/thresholds.hpp"

using nlohmann::json;
using namespace epct;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

Envelope envelope_from_string(const std::string& s) {
    if (s == "poly" || s == "polynomial") return Envelope::Polynomial;
    if (s == "exp" || s == "exponential") return Envelope::Exponential;
    throw CLI::ValidationError("--envelope", "must be 'poly' or 'exp'");
}

json params_to_json(const ThresholdParams& p) {
    return json{{"envelope", to_string(p.envelope)}, {"m1", p.m1}, {"m2", p.m2},
                {"n1", p.n1},                        {"n2", p.n2}, {"M", p.M},
                {"N", p.N},                          {"s", p.s},   {"m_star", p.m_star()},
                {"n_star", p.n_star()}};
}

ThresholdParams params_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open params file: " + path);
    json j;
    in >> j;
    if (j.contains("params")) j = j["params"];  // accept find-params output as-is
    ThresholdParams p;
    p.envelope = j.at("envelope").get<std::string>() == "exponential" ? Envelope::Exponential
                                                                      : Envelope::Polynomial;
    p.m1 = j.at("m1").get<double>();
    p.m2 = j.at("m2").get<double>();
    p.n1 = j.at("n1").get<double>();
    p.n2 = j.at("n2").get<double>();
    p.M = j.at("M").get<double>();
    p.N = j.at("N").get<double>();
    p.s = j.value("s", 1.0);
    return p;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        out << text;
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

unsigned default_jobs() {
    if (const char* env = std::getenv("EPCT_JOBS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return unsigned(v);
    }
    return 1;
}

CoefficientTrajectory make_A(const std::string& kind, double a_value, EnvelopeSpec env,
                             std::uint64_t seed) {
    if (kind == "const") return constant_A(a_value, env);
    if (kind == "lower") return lower_envelope_A(env);
    if (kind == "admissible") return admissible_A(env, seed);
    throw CLI::ValidationError("--a-kind", "must be const, lower or admissible");
}

json violations_to_json(const std::vector<Violation>& v) {
    json arr = json::array();
    for (const auto& viol : v) {
        arr.push_back({{"inequality", viol.name}, {"lhs", viol.lhs}, {"rhs", viol.rhs}});
    }
    return arr;
}

// ---------------------------------------------------------------------------

struct ParamFlags {
    double m1 = 0, m2 = 0, n1 = 0, n2 = 0, M = 0, N = 0, s = 1.0;
    std::string envelope = "poly";
};

int cmd_validate_params(const ParamFlags& f, const std::string& out) {
    ThresholdParams p{f.m1, f.m2, f.n1, f.n2, f.M, f.N, f.s, envelope_from_string(f.envelope)};
    const auto viols = validate_threshold_params(p);
    json j{{"verdict", viols.empty() ? "valid" : "invalid"},
           {"violations", violations_to_json(viols)},
           {"config", params_to_json(p)}};
    emit(dump(j), out);
    return viols.empty() ? kExitOk : kExitFail;
}

int cmd_find_params(const std::string& envelope, double s, int budget, std::uint64_t seed,
                    const std::string& out) {
    SearchOptions opts;
    opts.budget = budget;
    opts.seed = seed;
    const auto kind = envelope_from_string(envelope);
    const auto p = find_feasible_params(kind, s, opts);
    const auto slack_check = validate_threshold_params(p, 1e-6);
    json j{{"params", params_to_json(p)},
           {"slack_1e-6_satisfied", slack_check.empty()},
           {"config", {{"envelope", envelope}, {"s", s}, {"budget", budget}, {"seed", seed}}}};
    emit(dump(j), out);
    return slack_check.empty() ? kExitOk : kExitFail;
}

int cmd_region(const std::string& params_path, double m_star, double n_star, double rho_max,
               std::size_t points, const std::string& out, const std::string& field_out,
               double field_x) {
    ThresholdRegion region;
    std::optional<ThresholdParams> params;
    if (!params_path.empty()) {
        params = params_from_json_file(params_path);
        region = ThresholdRegion::from_params(*params);
    } else {
        region = ThresholdRegion::from_line(m_star, n_star);
    }
    const auto b = region_boundary(region, rho_max, points);
    std::ostringstream csv;
    csv << "rho,d\n";
    if (b.starts_beyond_rho_max) csv << "# region starts beyond rho_max\n";
    for (const auto& pt : b.points) {
        csv << format_double(pt[0]) << "," << format_double(pt[1]) << "\n";
    }
    emit(csv.str(), out);

    // auxiliary vector field sampled on an (a, b) grid at fixed x, for plots
    if (!field_out.empty()) {
        if (!params) throw std::runtime_error("--field-out requires --params");
        auto rhs = rhs_aux(params->envelope, params->s);
        std::ostringstream fcsv;
        fcsv << "a,b,adot,bdot\n";
        const double a_hi = 2.0 * region.n_star / region.m_star;
        const std::size_t ngrid = 24;
        for (std::size_t i = 0; i <= ngrid; ++i) {
            for (std::size_t j = 0; j <= ngrid; ++j) {
                const double a = a_hi * double(i) / double(ngrid);
                const double d = 5.0 * double(j) / double(ngrid);
                std::vector<double> y{a, d, field_x + 1.0}, dy(3);
                rhs(0.0, y, dy);
                fcsv << format_double(a) << "," << format_double(d) << ","
                     << format_double(dy[0]) << "," << format_double(dy[1]) << "\n";
            }
        }
        emit(fcsv.str(), field_out);
    }
    return kExitOk;
}

struct SimFlags {
    std::string system = "reduced";
    double rho0 = 1.0, d0 = 0.0, a0 = 0.1, b0 = 1.0;
    double t_end = 50.0, rtol = 1e-9, atol = 1e-12;
    double s = 1.0, upper_ratio = 0.0, a_value = 0.0;
    std::string envelope = "poly", a_kind = "admissible";
    std::uint64_t seed = 1;
    double omega0 = 0.0, eta0 = 0.0, xi0 = 0.0;  // lagrangian initial data
    double k_coupling = -1.0, c_b = 1.0;
};

int cmd_simulate(const SimFlags& f, const std::string& out, const std::string& meta) {
    OdeOptions opts;
    opts.rtol = f.rtol;
    opts.atol = f.atol;
    std::ostringstream csv;
    OdeResult res;
    const auto kind = envelope_from_string(f.envelope);
    if (f.system == "reduced") {
        EnvelopeSpec env{kind, f.s, 0.5 * f.upper_ratio * f.upper_ratio};
        auto A = make_A(f.a_kind, f.a_value, env, f.seed);
        res = simulate_reduced({f.rho0, f.d0, 0.0}, A, f.t_end, opts);
        csv << "t,rho,d\n";
        for (std::size_t k = 0; k < res.times.size(); ++k) {
            csv << format_double(res.times[k]) << "," << format_double(res.states[k][0]) << ","
                << format_double(res.states[k][1]) << "\n";
        }
    } else if (f.system == "aux-poly" || f.system == "aux-exp") {
        const auto aux_kind =
            f.system == "aux-poly" ? Envelope::Polynomial : Envelope::Exponential;
        res = simulate_aux({f.a0, f.b0, 1.0}, aux_kind, f.s, f.t_end, opts);
        csv << "t,a,b,B\n";
        for (std::size_t k = 0; k < res.times.size(); ++k) {
            csv << format_double(res.times[k]) << "," << format_double(res.states[k][0]) << ","
                << format_double(res.states[k][1]) << "," << format_double(res.states[k][2])
                << "\n";
        }
    } else if (f.system == "lagrangian") {
        opts.observer = positivity_monitor({4});
        res = integrate(rhs_lagrangian(nullptr, nullptr, f.k_coupling, f.c_b),
                        std::vector<double>{f.d0, f.omega0, f.eta0, f.xi0, f.rho0}, 0.0, f.t_end,
                        opts);
        csv << "t,d,omega,eta,xi,rho\n";
        for (std::size_t k = 0; k < res.times.size(); ++k) {
            csv << format_double(res.times[k]);
            for (int c = 0; c < 5; ++c) csv << "," << format_double(res.states[k][c]);
            csv << "\n";
        }
    } else {
        throw CLI::ValidationError("--system", "must be reduced, aux-poly, aux-exp or lagrangian");
    }
    emit(csv.str(), out);
    if (!meta.empty()) {
        json j{{"status", to_string(res.status)},
               {"t_final", res.t_final},
               {"steps", res.steps},
               {"rejections", res.rejections},
               {"config",
                {{"system", f.system},       {"rho0", f.rho0},   {"d0", f.d0},
                 {"a0", f.a0},               {"b0", f.b0},       {"t_end", f.t_end},
                 {"rtol", f.rtol},           {"atol", f.atol},   {"s", f.s},
                 {"envelope", f.envelope},   {"a_kind", f.a_kind}, {"a_value", f.a_value},
                 {"upper_ratio", f.upper_ratio}, {"seed", f.seed}}}};
        emit(dump(j), meta);
    }
    return kExitOk;
}

struct SweepFlags {
    std::string params_path;
    double rho_min = 0.0, rho_max = 0.0;  // 0 => (0, 2 n*/m*]
    double d_min = 0.0, d_max = 5.0;
    std::size_t nr = 50, nd = 50;
    double t_end = 50.0, upper_ratio = 0.0;
    std::uint64_t seed = 1;
    unsigned jobs = 0;
};

int cmd_sweep(const SweepFlags& f, const std::string& out) {
    const auto params = params_from_json_file(f.params_path);
    const auto region = ThresholdRegion::from_params(params);
    const double rho_hi = f.rho_max > 0.0 ? f.rho_max : 2.0 * region.n_star / region.m_star;

    std::vector<double> rho0s(f.nr), d0s(f.nd);
    for (std::size_t i = 0; i < f.nr; ++i)
        rho0s[i] = f.rho_min + (rho_hi - f.rho_min) * double(i + 1) / double(f.nr);
    for (std::size_t j = 0; j < f.nd; ++j)
        d0s[j] = f.d_min + (f.d_max - f.d_min) * double(j + 1) / double(f.nd);

    EnvelopeSpec env{params.envelope, params.s, 0.5 * f.upper_ratio * f.upper_ratio};
    SweepOptions sw;
    sw.t_end = f.t_end;
    sw.seed = f.seed;
    sw.jobs = f.jobs > 0 ? f.jobs : default_jobs();
    const auto rows = sweep_classify(region, rho0s, d0s, env, sw);

    std::ostringstream csv;
    csv << "rho0,d0,member,status,t_end_or_blow\n";
    for (const auto& r : rows) {
        csv << format_double(r.rho0) << "," << format_double(r.d0) << "," << (r.member ? 1 : 0)
            << "," << to_string(r.status) << "," << format_double(r.t_end_or_blow) << "\n";
    }
    emit(csv.str(), out);
    return kExitOk;
}

int cmd_verify_lemmas(const std::string& lemma, const std::string& params_path,
                      std::size_t grid_points, double x_max, const std::string& out) {
    const auto params = params_from_json_file(params_path);
    std::vector<LemmaId> ids;
    if (lemma == "all") {
        if (params.envelope == Envelope::Polynomial) {
            ids = {LemmaId::L41, LemmaId::L42};
        } else {
            ids = {LemmaId::L51, LemmaId::L52};
        }
    } else {
        const auto id = lemma_from_string(lemma);
        const bool poly_lemma = id == LemmaId::L41 || id == LemmaId::L42;
        if (poly_lemma != (params.envelope == Envelope::Polynomial)) {
            throw CLI::ValidationError("--lemma", "lemma does not match the params envelope");
        }
        ids = {id};
    }
    const auto grid = default_x_grid(grid_points, x_max);
    bool all_pass = true;
    json margins = json::object();
    for (auto id : ids) {
        const auto rep = verify_lemma(id, params, grid);
        all_pass = all_pass && rep.pass;
        margins[to_string(id)] = {{"pass", rep.pass},
                                  {"worst_margin", rep.worst_margin},
                                  {"worst_x", rep.worst_x},
                                  {"points", rep.points}};
    }
    json j{{"verdict", all_pass ? "pass" : "fail"},
           {"margins", margins},
           {"config",
            {{"lemma", lemma}, {"grid_points", grid_points}, {"x_max", x_max},
             {"params", params_to_json(params)}}}};
    emit(dump(j), out);
    return all_pass ? kExitOk : kExitFail;
}

struct ReductionFlags {
    std::size_t nx = 128;
    bool refine = false;
    double t_end = 0.3, amplitude = 0.1;
    std::size_t traces = 16;
    std::uint64_t seed = 5;
    double max_ratio_err = 1e-3, max_ode_res = 1e-2, min_shrink = 4.0;
    std::string dump_traces;  // directory for per-characteristic CSV files
};

void dump_trace_csv(const CharacteristicTrace& tr, const std::string& path) {
    std::ostringstream csv;
    csv << "t,x1,x2,d,omega,eta,xi,rho,f1,f2\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        csv << format_double(tr.times[k]) << "," << format_double(tr.positions[k][0]) << ","
            << format_double(tr.positions[k][1]) << "," << format_double(tr.d[k]) << ","
            << format_double(tr.omega[k]) << "," << format_double(tr.eta[k]) << ","
            << format_double(tr.xi[k]) << "," << format_double(tr.rho[k]) << ","
            << format_double(tr.f1[k]) << "," << format_double(tr.f2[k]) << "\n";
    }
    emit(csv.str(), path);
}

json run_reduction(std::size_t n, const ReductionFlags& f, double& worst_ratio,
                   double& worst_ode) {
    PseudoSpectralSolver solver(n, n);
    const auto init = make_smooth_data(n, f.amplitude);
    const auto run = solver.run_to(init, f.t_end);
    Rng rng(f.seed);
    std::vector<std::array<double, 2>> x0s(f.traces);
    for (auto& x : x0s) x = {rng.uniform(0.0, 2.0 * M_PI), rng.uniform(0.0, 2.0 * M_PI)};
    const auto traces = trace_characteristics(solver, run, x0s);
    if (!f.dump_traces.empty()) {
        for (std::size_t k = 0; k < traces.size(); ++k) {
            char name[64];
            std::snprintf(name, sizeof name, "/trace_%03zu_nx%zu.csv", k, n);
            dump_trace_csv(traces[k], f.dump_traces + name);
        }
    }
    worst_ratio = 0.0;
    worst_ode = 0.0;
    double worst_eta = 0.0, worst_xi = 0.0;
    for (const auto& tr : traces) {
        const auto rep = verify_reduction(tr);
        worst_ratio = std::max(worst_ratio, rep.ratio_err);
        worst_ode = std::max(worst_ode, rep.ode_residual);
        worst_eta = std::max(worst_eta, rep.eta_residual);
        worst_xi = std::max(worst_xi, rep.xi_residual);
    }
    return json{{"nx", n},
                {"steps", run.states.size() - 1},
                {"mass_drift", run.mass_drift},
                {"ratio_err", worst_ratio},
                {"ode_residual", worst_ode},
                {"eta_residual", worst_eta},
                {"xi_residual", worst_xi},
                {"periodic_domain", true}};
}

int cmd_verify_reduction(const ReductionFlags& f, const std::string& out) {
    double r1 = 0, o1 = 0;
    json coarse = run_reduction(f.nx, f, r1, o1);
    bool pass = r1 < f.max_ratio_err && o1 < f.max_ode_res;
    json j{{"coarse", coarse}};
    if (f.refine) {
        double r2 = 0, o2 = 0;
        json fine = run_reduction(2 * f.nx, f, r2, o2);
        const double shrink_ratio = r1 / std::max(r2, 1e-300);
        const double shrink_ode = o1 / std::max(o2, 1e-300);
        j["fine"] = fine;
        j["shrink_ratio_err"] = shrink_ratio;
        j["shrink_ode_residual"] = shrink_ode;
        pass = pass && shrink_ratio >= f.min_shrink && shrink_ode >= f.min_shrink;
    }
    j["verdict"] = pass ? "pass" : "fail";
    j["config"] = {{"nx", f.nx},           {"refine", f.refine},
                   {"t_end", f.t_end},     {"amplitude", f.amplitude},
                   {"traces", f.traces},   {"seed", f.seed},
                   {"max_ratio_err", f.max_ratio_err}, {"max_ode_res", f.max_ode_res},
                   {"min_shrink", f.min_shrink}};
    emit(dump(j), out);
    return pass ? kExitOk : kExitFail;
}

struct CompareFlags {
    double rho0 = 0.5, d0 = 1.0, a0 = 0.6, b0 = 0.9;
    double t_end = 20.0, s = 1.0, upper_ratio = 1.0, a_value = 0.0;
    std::string envelope = "poly", a_kind = "admissible";
    std::uint64_t seed = 1;
};

int cmd_compare(const CompareFlags& f, const std::string& out) {
    const auto kind = envelope_from_string(f.envelope);
    EnvelopeSpec env{kind, f.s, 0.5 * f.upper_ratio * f.upper_ratio};
    auto A = make_A(f.a_kind, f.a_value, env, f.seed);
    OdeOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-13;
    opts.store_trajectory = false;
    const auto rep = run_comparison(f.rho0, f.d0, f.a0, f.b0, A, f.t_end, opts);
    json j{{"ordering_held", rep.ordering_held},
           {"min_gap_d_minus_b", rep.min_gap_d_minus_b},
           {"min_gap_a_minus_rho", rep.min_gap_a_minus_rho},
           {"status", to_string(rep.status)},
           {"config",
            {{"rho0", f.rho0}, {"d0", f.d0},           {"a0", f.a0},
             {"b0", f.b0},     {"t_end", f.t_end},     {"envelope", f.envelope},
             {"s", f.s},       {"a_kind", f.a_kind},   {"a_value", f.a_value},
             {"upper_ratio", f.upper_ratio}, {"seed", f.seed}}}};
    emit(dump(j), out);
    return rep.ordering_held ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for critical-threshold dynamics of the "
                 "two-dimensional attractive Euler-Poisson system"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --config appear after the subcommand name
    app.set_config("--config");

    std::string out, meta;

    // validate-params
    auto* vp = app.add_subcommand("validate-params", "check threshold constants");
    ParamFlags pf;
    vp->add_option("--envelope", pf.envelope, "poly or exp");
    vp->add_option("--m1", pf.m1)->required();
    vp->add_option("--m2", pf.m2)->required();
    vp->add_option("--n1", pf.n1)->required();
    vp->add_option("--n2", pf.n2)->required();
    vp->add_option("--M", pf.M)->required();
    vp->add_option("--N", pf.N)->required();
    vp->add_option("--s", pf.s);
    vp->add_option("--out", out);

    // find-params
    auto* fp = app.add_subcommand("find-params", "search feasible constants minimizing m*");
    std::string fp_env = "poly";
    double fp_s = 1.0;
    int fp_budget = 10000;
    std::uint64_t fp_seed = 20240901;
    fp->add_option("--envelope", fp_env);
    fp->add_option("--s", fp_s);
    fp->add_option("--budget", fp_budget);
    fp->add_option("--seed", fp_seed);
    fp->add_option("--out", out);

    // region
    auto* rg = app.add_subcommand("region", "export the threshold boundary line as CSV");
    std::string rg_params;
    double rg_mstar = 2.0, rg_nstar = 1.0, rg_rho_max = 1.0;
    std::size_t rg_points = 100;
    rg->add_option("--params", rg_params, "params JSON file");
    rg->add_option("--m-star", rg_mstar);
    rg->add_option("--n-star", rg_nstar);
    rg->add_option("--rho-max", rg_rho_max)->required();
    rg->add_option("--points", rg_points);
    rg->add_option("--out", out);
    std::string rg_field_out;
    double rg_field_x = 0.0;
    rg->add_option("--field-out", rg_field_out, "also sample the auxiliary vector field (CSV)");
    rg->add_option("--field-x", rg_field_x, "surface parameter x for --field-out");

    // simulate
    auto* sim = app.add_subcommand("simulate", "integrate one trajectory, CSV output");
    SimFlags sf;
    sim->add_option("--system", sf.system, "reduced | aux-poly | aux-exp | lagrangian");
    sim->add_option("--rho0", sf.rho0);
    sim->add_option("--d0", sf.d0);
    sim->add_option("--a0", sf.a0);
    sim->add_option("--b0", sf.b0);
    sim->add_option("--omega0", sf.omega0);
    sim->add_option("--eta0", sf.eta0);
    sim->add_option("--xi0", sf.xi0);
    sim->add_option("--t-end", sf.t_end);
    sim->add_option("--rtol", sf.rtol);
    sim->add_option("--atol", sf.atol);
    sim->add_option("--s", sf.s);
    sim->add_option("--envelope", sf.envelope);
    sim->add_option("--a-kind", sf.a_kind, "const | lower | admissible");
    sim->add_option("--a-value", sf.a_value);
    sim->add_option("--upper-ratio", sf.upper_ratio, "omega0/rho0 for the envelope upper bound");
    sim->add_option("--seed", sf.seed);
    sim->add_option("--out", out);
    sim->add_option("--meta", meta, "write status/config JSON here");

    // sweep
    auto* sw = app.add_subcommand("sweep", "classify a grid of initial data");
    SweepFlags wf;
    sw->add_option("--params", wf.params_path)->required();
    sw->add_option("--rho-min", wf.rho_min);
    sw->add_option("--rho-max", wf.rho_max, "default 2 n*/m*");
    sw->add_option("--d-min", wf.d_min);
    sw->add_option("--d-max", wf.d_max);
    sw->add_option("--nr", wf.nr);
    sw->add_option("--nd", wf.nd);
    sw->add_option("--t-end", wf.t_end);
    sw->add_option("--upper-ratio", wf.upper_ratio);
    sw->add_option("--seed", wf.seed);
    sw->add_option("--jobs", wf.jobs, "default from EPCT_JOBS, else 1");
    sw->add_option("--out", out);

    // verify-lemmas
    auto* vl = app.add_subcommand("verify-lemmas", "grid verification of the lemma inequalities");
    std::string vl_lemma = "all", vl_params;
    std::size_t vl_points = 10000;
    double vl_xmax = 1e3;
    vl->add_option("--lemma", vl_lemma, "4.1 | 4.2 | 5.1 | 5.2 | all");
    vl->add_option("--params", vl_params)->required();
    vl->add_option("--grid-points", vl_points);
    vl->add_option("--x-max", vl_xmax);
    vl->add_option("--out", out);

    // verify-reduction
    auto* vr = app.add_subcommand("verify-reduction", "short-time spectral verification");
    ReductionFlags rf;
    vr->add_option("--nx", rf.nx);
    vr->add_flag("--refine", rf.refine, "also run 2*nx and check residual shrink");
    vr->add_option("--t-end", rf.t_end);
    vr->add_option("--amplitude", rf.amplitude);
    vr->add_option("--traces", rf.traces);
    vr->add_option("--seed", rf.seed);
    vr->add_option("--max-ratio-err", rf.max_ratio_err);
    vr->add_option("--max-ode-res", rf.max_ode_res);
    vr->add_option("--min-shrink", rf.min_shrink);
    vr->add_option("--dump-traces", rf.dump_traces, "directory for per-characteristic CSVs");
    vr->add_option("--out", out);

    // compare
    auto* cp = app.add_subcommand("compare", "comparison harness for ordered initial data");
    CompareFlags cf;
    cp->add_option("--rho0", cf.rho0);
    cp->add_option("--d0", cf.d0);
    cp->add_option("--a0", cf.a0);
    cp->add_option("--b0", cf.b0);
    cp->add_option("--t-end", cf.t_end);
    cp->add_option("--envelope", cf.envelope);
    cp->add_option("--s", cf.s);
    cp->add_option("--a-kind", cf.a_kind);
    cp->add_option("--a-value", cf.a_value);
    cp->add_option("--upper-ratio", cf.upper_ratio);
    cp->add_option("--seed", cf.seed);
    cp->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (vp->parsed()) return cmd_validate_params(pf, out);
        if (fp->parsed()) return cmd_find_params(fp_env, fp_s, fp_budget, fp_seed, out);
        if (rg->parsed())
            return cmd_region(rg_params, rg_mstar, rg_nstar, rg_rho_max, rg_points, out,
                              rg_field_out, rg_field_x);
        if (sim->parsed()) return cmd_simulate(sf, out, meta);
        if (sw->parsed()) return cmd_sweep(wf, out);
        if (vl->parsed()) return cmd_verify_lemmas(vl_lemma, vl_params, vl_points, vl_xmax, out);
        if (vr->parsed()) return cmd_verify_reduction(rf, out);
        if (cp->parsed()) return cmd_compare(cf, out);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitFail;
    } catch (const EnvelopeViolation& e) {
        std::cerr << e.what() << "\n";
        return kExitFail;
    } catch (const PositivityViolation& e) {
        std::cerr << e.what() << "\n";
        return kExitFail;
    } catch (const SimulationAbort& e) {
        std::cerr << e.what() << "\n";
        return kExitFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
