#include "commands.hpp"
#include "output.hpp"

#include "kakinuma/consistency.hpp"
#include "kakinuma/errors.hpp"
#include "kakinuma/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace lab {

using namespace kakinuma;
namespace fs = std::filesystem;

namespace {

struct Setup {
    PeriodicGrid g;
    NondimParams prm;
    ExpansionSpec spec;
    ScalarField zeta, phi, b;
};

ScalarField profile(const PeriodicGrid& g, const ModeList& cos_modes, const ModeList& sin_modes) {
    ScalarField v = ScalarField::Zero(g.M());
    for (int j = 0; j < g.M(); ++j) {
        const double x = g.node(j) * g.xi1();
        for (const auto& [k, a] : cos_modes) v(j) += a * std::cos(k * x);
        for (const auto& [k, a] : sin_modes) v(j) += a * std::sin(k * x);
    }
    return v;
}

Setup setup(const RunConfig& c) {
    Setup s{PeriodicGrid(c.M, c.grid_length()), validate_params(c.rho1, c.h1, c.delta),
            ExpansionSpec::make(c.N, parse_hypothesis(c.hyp)), {}, {}, {}};
    s.zeta = profile(s.g, c.zeta_cos, c.zeta_sin);
    s.phi = profile(s.g, c.phi_cos, c.phi_sin);
    s.b = profile(s.g, c.b_cos, c.b_sin);
    const InterfaceState st{s.zeta, s.b};
    for (int l : {1, 2}) {
        const double hmin = thickness(st, s.prm, l).minCoeff();
        if (!(hmin > 0.0)) {
            std::ostringstream os;
            os << "[initial] zeta/b: non-cavitation violated, min H" << l << " = " << hmin;
            throw ConfigError(os.str());
        }
    }
    return s;
}

Json spec_json(const ExpansionSpec& spec) {
    return Json{{"N", spec.N}, {"Nstar", spec.Nstar}, {"case", to_string(spec.hyp)},
                {"exponents_layer1", spec.exponents(1)}, {"exponents_layer2", spec.exponents(2)}};
}

Json manifest(const Context& ctx, const std::string& command) {
    const RunConfig& c = ctx.cfg;
    const NondimParams prm = validate_params(c.rho1, c.h1, c.delta);
    Json j;
    j["command"] = command;
    j["config_sha1"] = ctx.config_sha1;
    j["config"] = to_ini(c);
    j["params"] = {{"rho1", prm.rho1}, {"rho2", prm.rho2}, {"h1", prm.h1},
                   {"h2", prm.h2},     {"delta", prm.delta}, {"regime_warning", prm.regime_warning}};
    j["grid"] = {{"M", c.M}, {"length", c.grid_length()}, {"dx", c.grid_length() / c.M},
                 {"P_reference", c.P_reference}};
    j["spec"] = spec_json(ExpansionSpec::make(c.N, parse_hypothesis(c.hyp)));
    j["threads"] = ctx.threads;
    j["seed"] = ctx.seed;
    return j;
}

Json fit_json(const OrderFit& f) {
    return Json{{"slope", f.slope},         {"intercept", f.intercept}, {"r2", f.r2},
                {"inconclusive", f.inconclusive}, {"samples", f.deltas.size()},
                {"excluded_deltas", f.excluded}};
}

}  // namespace

Context make_context(const std::string& config_path, const std::string& out_override, int threads,
                     std::uint64_t seed) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError(config_path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    Context ctx;
    ctx.cfg = parse_config_text(ss.str(), config_path);
    ctx.config_sha1 = git_blob_sha1(ss.str());
    ctx.out = out_override.empty() ? fs::path(ctx.cfg.directory) : fs::path(out_override);
    if (threads < 1) throw ConfigError("--threads must be at least 1");
    ctx.threads = threads;
    ctx.seed = seed;
    return ctx;
}

int cmd_simulate(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    Setup s = setup(c);
    if (c.dt > c.c_stab * s.g.dx()) {
        std::ostringstream os;
        os << "[run] dt: " << c.dt << " exceeds the step guard c_stab*dx = " << c.c_stab * s.g.dx();
        throw ConfigError(os.str());
    }
    TrajectoryOptions opt;
    opt.dt = c.dt;
    opt.T = c.T;
    opt.record_stride = c.output_stride;
    opt.snapshot_stride = c.snapshot_stride;
    opt.energy_order = c.energy_order;
    opt.evo.c_stab = c.c_stab;
    opt.evo.halt_on_instability = c.halt_on_instability;
    const CanonicalState init{0.0, s.zeta, s.phi};
    const TrajectoryRecord rec = run_trajectory(s.g, init, s.b, s.prm, s.spec, opt);

    fs::create_directories(ctx.out);
    if (c.wants("csv")) {
        CsvWriter w(ctx.out / "trajectory.csv", ctx.config_sha1,
                    {"t", "H_K", "mass", "min_margin", "E_m", "max_abs_zeta"});
        for (std::size_t i = 0; i < rec.t.size(); ++i) {
            w << rec.t[i] << rec.hamiltonian[i] << rec.mass[i] << rec.min_margin[i] << rec.energy_m[i]
              << rec.max_abs_zeta[i];
            w.end_row();
        }
        if (!rec.snapshots.empty()) {
            CsvWriter sw(ctx.out / "snapshots.csv", ctx.config_sha1, {"t", "x", "zeta", "phi"});
            for (const auto& snap : rec.snapshots)
                for (int j = 0; j < s.g.M(); ++j) {
                    sw << snap.t << s.g.node(j) << snap.zeta(j) << snap.phi(j);
                    sw.end_row();
                }
        }
    }
    double dH = 0.0, dm = 0.0, mmin = rec.min_margin.empty() ? 1.0 : rec.min_margin[0];
    for (std::size_t i = 0; i < rec.t.size(); ++i) {
        dH = std::max(dH, std::abs(rec.hamiltonian[i] - rec.hamiltonian[0]));
        dm = std::max(dm, std::abs(rec.mass[i] - rec.mass[0]));
        mmin = std::min(mmin, rec.min_margin[i]);
    }
    Json m = manifest(ctx, "simulate");
    m["result"] = {{"steps", rec.steps},
                   {"t_final", rec.t.empty() ? 0.0 : rec.t.back()},
                   {"records", rec.t.size()},
                   {"snapshots", rec.snapshots.size()},
                   {"halted", rec.halted},
                   {"halt_reason", rec.halt_reason},
                   {"max_compat_error", rec.max_compat_error},
                   {"max_hamiltonian_drift", dH},
                   {"max_mass_drift", dm},
                   {"min_margin", mmin}};
    write_json(ctx.out / "manifest.json", m);
    return rec.halted ? kInstability : kOk;
}

int cmd_prepare_init(const Context& ctx) {
    Setup s = setup(ctx.cfg);
    if (std::abs(s.g.mean(s.phi)) > 1e-12)
        throw ConfigError("[initial] phi: the initial potential must be mean-free");
    const PreparedData pd = prepare_initial_data(s.g, s.zeta, s.phi, s.b, s.prm, s.spec);
    const InterfaceState st{s.zeta, s.b};
    LayerOps o1(s.g, st, s.prm, s.spec, 1), o2(s.g, st, s.prm, s.spec, 2);
    const Vec s1 = o1.stack(pd.phi1), s2 = o2.stack(pd.phi2);

    Vec trace = s.prm.rho2 * (o2.l_row() * s2) - s.prm.rho1 * (o1.l_row() * s1) - s.g.to_modes(s.phi);
    trace(0) = 0.0;
    auto layer_residual = [&](const LayerOps& o, const Vec& st_modes) {
        double r = 0.0;
        for (int i = 1; i < o.K(); ++i) r = std::max(r, Vec(o.calL_row(i) * st_modes).norm());
        return r;
    };
    const Vec dz1 = -s.prm.h1 * (o1.calL_row(0) * s1), dz2 = s.prm.h2 * (o2.calL_row(0) * s2);

    fs::create_directories(ctx.out);
    if (ctx.cfg.wants("csv")) {
        std::vector<std::string> header = {"x", "zeta", "phi", "b"};
        for (int i = 0; i < o1.K(); ++i) header.push_back("phi1_" + std::to_string(i));
        for (int i = 0; i < o2.K(); ++i) header.push_back("phi2_" + std::to_string(i));
        CsvWriter w(ctx.out / "potentials.csv", ctx.config_sha1, header);
        for (int j = 0; j < s.g.M(); ++j) {
            w << s.g.node(j) << s.zeta(j) << s.phi(j) << s.b(j);
            for (int i = 0; i < o1.K(); ++i) w << pd.phi1(j, i);
            for (int i = 0; i < o2.K(); ++i) w << pd.phi2(j, i);
            w.end_row();
        }
    }
    Json m = manifest(ctx, "prepare-init");
    m["result"] = {{"trace_residual", trace.norm()},
                   {"layer1_residual", layer_residual(o1, s1)},
                   {"layer2_residual", layer_residual(o2, s2)},
                   {"dzeta_mismatch", (dz1 - dz2).norm()},
                   {"dzeta_relative_mismatch", compatibility_error(dz1, dz2)},
                   {"min_H1", o1.H().minCoeff()},
                   {"min_H2", o2.H().minCoeff()}};
    write_json(ctx.out / "manifest.json", m);
    return kOk;
}

int cmd_consistency(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    std::vector<ExpansionSpec> specs;
    for (int n : c.sweep_Ns) specs.push_back(ExpansionSpec::make(n, parse_hypothesis(c.hyp)));
    SweepProfiles prof{c.zeta_amp, c.b_amp, c.phi_amp};
    SweepOptions opt;
    opt.M = c.sweep_M;
    opt.P = c.sweep_P;
    opt.P_max = c.sweep_P_max;
    opt.M_max = c.sweep_M_max;
    opt.M_flat = c.sweep_M_flat;
    opt.residuals = c.residuals;
    opt.hamiltonian = c.hamiltonian;
    opt.floor = c.floor;
    opt.threads = ctx.threads;
    const auto results = consistency_sweep(c.rho1, c.h1, specs, c.deltas, prof, opt);

    fs::create_directories(ctx.out);
    if (c.wants("csv")) {
        CsvWriter w(ctx.out / "sweep.csv", ctx.config_sha1,
                    {"case", "N", "delta", "h1delta", "h2delta", "err_r1_flat", "err_r1", "err_r2", "err_r0",
                     "err_H", "P", "M", "ref_change", "converged"});
        for (const auto& res : results)
            for (const auto& r : res.rows) {
                w << to_string(res.spec.hyp) << res.spec.N << r.delta << r.h1delta << r.h2delta
                  << r.err_r1_flat << r.err_r1 << r.err_r2 << r.err_r0 << r.err_H << r.P << r.M
                  << r.ref_change << static_cast<int>(r.converged);
                w.end_row();
            }
    }
    Json fits = Json::array();
    for (const auto& res : results) {
        Json f{{"case", to_string(res.spec.hyp)}, {"N", res.spec.N}, {"expected_order", 4 * res.spec.N + 2}};
        f["r1_flat"] = fit_json(res.fit_r1_flat);
        if (c.residuals) {
            f["r1"] = fit_json(res.fit_r1);
            f["r2"] = fit_json(res.fit_r2);
            f["r0"] = fit_json(res.fit_r0);
        }
        if (c.hamiltonian) f["hamiltonian"] = fit_json(res.fit_H);
        f["notes"] = res.notes;
        fits.push_back(f);
    }
    if (c.wants("json"))
        write_json(ctx.out / "slopes.json", Json{{"config_sha1", ctx.config_sha1}, {"fits", fits}});
    Json m = manifest(ctx, "consistency");
    m["result"] = {{"fits", fits}};
    write_json(ctx.out / "manifest.json", m);
    return kOk;
}

int cmd_hamiltonian(const Context& ctx) {
    Setup s = setup(ctx.cfg);
    const double HK = hamiltonian_kakinuma(s.g, s.zeta, s.phi, s.b, s.prm, s.spec);
    const int P = ctx.cfg.P_reference;
    const double HIW = hamiltonian_full(s.g, s.zeta, s.phi, s.b, s.prm, P);
    const double HIW2 = hamiltonian_full(s.g, s.zeta, s.phi, s.b, s.prm, 2 * P);
    const Json r{{"H_K", HK}, {"H_IW", HIW}, {"error", HK - HIW}, {"H_IW_refined", HIW2},
                 {"reference_change", std::abs(HIW2 - HIW)}, {"P", P}};
    fs::create_directories(ctx.out);
    if (ctx.cfg.wants("json")) {
        Json h{{"config_sha1", ctx.config_sha1}};
        h.update(r);
        write_json(ctx.out / "hamiltonian.json", h);
    }
    Json m = manifest(ctx, "hamiltonian");
    m["result"] = r;
    write_json(ctx.out / "manifest.json", m);
    return kOk;
}

int cmd_dispersion(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const Hypothesis hyp = parse_hypothesis(c.hyp);
    fs::create_directories(ctx.out);
    std::vector<std::vector<double>> diff(c.dispersion_Ns.size() * c.xi.size());
    std::unique_ptr<CsvWriter> w;
    if (c.wants("csv"))
        w = std::make_unique<CsvWriter>(ctx.out / "dispersion.csv", ctx.config_sha1,
                                        std::vector<std::string>{"case", "N", "delta", "xi", "omega2_full",
                                                                 "omega2_kakinuma", "difference"});
    for (std::size_t a = 0; a < c.dispersion_Ns.size(); ++a) {
        const ExpansionSpec spec = ExpansionSpec::make(c.dispersion_Ns[a], hyp);
        for (double delta : c.deltas) {
            const NondimParams prm = validate_params(c.rho1, c.h1, delta);
            for (std::size_t k = 0; k < c.xi.size(); ++k) {
                const Dispersion d = dispersion_symbols(c.xi[k], prm, spec);
                diff[a * c.xi.size() + k].push_back(std::abs(d.difference));
                if (w) {
                    *w << c.hyp << spec.N << delta << c.xi[k] << d.omega2_full << d.omega2_kakinuma
                       << d.difference;
                    w->end_row();
                }
            }
        }
    }
    w.reset();
    Json fits = Json::array();
    for (std::size_t a = 0; a < c.dispersion_Ns.size(); ++a)
        for (std::size_t k = 0; k < c.xi.size(); ++k) {
            Json f{{"N", c.dispersion_Ns[a]}, {"xi", c.xi[k]}, {"expected_order", 4 * c.dispersion_Ns[a] + 2}};
            try {
                f["fit"] = fit_json(order_fit(c.deltas, diff[a * c.xi.size() + k], c.dispersion_floor));
            } catch (const BelowNoiseFloor& e) {
                f["fit"] = nullptr;
                f["note"] = e.what();
            }
            fits.push_back(f);
        }
    if (c.wants("json"))
        write_json(ctx.out / "dispersion_slopes.json", Json{{"config_sha1", ctx.config_sha1}, {"fits", fits}});
    Json m = manifest(ctx, "dispersion");
    m["result"] = {{"fits", fits}};
    write_json(ctx.out / "manifest.json", m);
    return kOk;
}

int cmd_stability_report(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    Setup s = setup(c);
    const InterfaceState st{s.zeta, s.b};
    const PreparedData pd = prepare_initial_data(s.g, s.zeta, s.phi, s.b, s.prm, s.spec);
    const TimeDerivatives td = recover_time_derivatives(s.g, st, pd.phi1, pd.phi2, s.prm, s.spec);
    const ScalarField a = stability_function_a(s.g, st, pd.phi1, pd.phi2, td, s.prm, s.spec);
    const Velocities v = compute_velocities(s.g, pd.phi1, pd.phi2, st, s.prm, s.spec);
    const ScalarField margin = stability_margin(st, v, a, s.prm, stability_constants(s.spec));

    std::mt19937_64 rng(ctx.seed);
    std::normal_distribution<double> normal;
    auto field = [&] {
        ScalarField f = ScalarField::Zero(s.g.M());
        for (int k = 1; k <= c.perturbation_modes; ++k) {
            const double ac = normal(rng), as = normal(rng);
            for (int j = 0; j < s.g.M(); ++j) {
                const double x = k * s.g.xi1() * s.g.node(j);
                f(j) += ac * std::cos(x) + as * std::sin(x);
            }
        }
        return f;
    };
    double qmin = INFINITY, ratio_min = INFINITY;
    int negatives = 0;
    for (int n = 0; n < c.samples; ++n) {
        Perturbation p;
        p.zeta = field();
        p.phi1.resize(s.g.M(), s.spec.count(1));
        p.phi2.resize(s.g.M(), s.spec.count(2));
        for (int i = 0; i < s.spec.count(1); ++i) p.phi1.col(i) = field();
        for (int i = 0; i < s.spec.count(2); ++i) p.phi2.col(i) = field();
        const double q = quadratic_form_A0mod(s.g, st, v, a, p, s.prm, s.spec);
        qmin = std::min(qmin, q);
        ratio_min = std::min(ratio_min, q / energy_E(s.g, p, s.prm));
        if (q < 0.0) ++negatives;
    }

    const Json r{{"min_H1", thickness(st, s.prm, 1).minCoeff()},
                 {"min_H2", thickness(st, s.prm, 2).minCoeff()},
                 {"min_margin", margin.minCoeff()},
                 {"max_margin", margin.maxCoeff()},
                 {"a", {{"min", a.minCoeff()}, {"max", a.maxCoeff()}, {"mean", a.mean()}}},
                 {"a_identically_one", (a.array() == 1.0).all()},
                 {"compat_error", td.compat_error},
                 {"random_form",
                  {{"samples", c.samples},
                   {"modes", c.perturbation_modes},
                   {"seed", ctx.seed},
                   {"min_value", qmin},
                   {"min_ratio_to_energy", ratio_min},
                   {"negative_count", negatives}}}};
    fs::create_directories(ctx.out);
    if (c.wants("json")) {
        Json h{{"config_sha1", ctx.config_sha1}};
        h.update(r);
        write_json(ctx.out / "stability_report.json", h);
    }
    Json m = manifest(ctx, "stability-report");
    m["result"] = r;
    write_json(ctx.out / "manifest.json", m);
    return kOk;
}

int run_command(const std::string& name, const Context& ctx) {
    try {
        if (name == "simulate") return cmd_simulate(ctx);
        if (name == "prepare-init") return cmd_prepare_init(ctx);
        if (name == "consistency") return cmd_consistency(ctx);
        if (name == "hamiltonian") return cmd_hamiltonian(ctx);
        if (name == "dispersion") return cmd_dispersion(ctx);
        if (name == "stability-report") return cmd_stability_report(ctx);
        std::cerr << "error: unknown subcommand " << name << "\n";
        return kConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const ConstraintViolation& e) {
        std::cerr << "constraint violated: " << e.what() << "\n";
        return kConfig;
    } catch (const NonZeroMean& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const StepRejected& e) {
        std::cerr << "instability: " << e.what() << "\n";
        return kInstability;
    } catch (const Error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolver;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
}

}  // namespace lab
