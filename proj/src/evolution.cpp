#include "kakinuma/evolution.hpp"
#include "kakinuma/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kakinuma {

namespace {

Vec mean_free(const PeriodicGrid& g, const Vec& values) {
    Vec m = g.to_modes(values);
    m(0) = 0.0;
    return g.to_values(m);
}

Vec row0(const LayerOps& o, const Vec& st) {
    const int n = o.n();
    Vec out = Vec::Zero(n);
    for (int j = 0; j < o.K(); ++j) out += o.block(0, j) * st.segment(j * n, n);
    return out;
}

// Pointwise l^{(k)} . X for a potential vector X given by values.
Vec dot_rows(const PotentialVec& l, const PotentialVec& X) {
    return (l.array() * X.array()).rowwise().sum().matrix();
}

PotentialVec columns_dx(const PeriodicGrid& g, const PotentialVec& X) {
    PotentialVec out(X.rows(), X.cols());
    for (int j = 0; j < X.cols(); ++j) out.col(j) = deriv(g, Vec(X.col(j)));
    return out;
}

}  // namespace

CanonicalRHS rhs_canonical(const PeriodicGrid& g, const ScalarField& zeta, const ScalarField& phi,
                           const ScalarField& b, const NondimParams& prm, const ExpansionSpec& spec,
                           double compat_tol) {
    const InterfaceState s{zeta, b};
    LayerOps o1(g, s, prm, spec, 1), o2(g, s, prm, spec, 2);
    CoupledRHS rhs = CoupledRHS::zeros(g, spec);
    rhs.f4 = mean_free(g, phi);
    const CoupledSolution sol = solve_coupled(o1, o2, rhs, prm);

    const Vec lam1 = row0(o1, sol.phi1_modes), lam2 = row0(o2, sol.phi2_modes);
    const Vec a = -prm.h1 * lam1, c = prm.h2 * lam2;
    CanonicalRHS out;
    out.compat_error = compatibility_error(a, c);
    if (out.compat_error > compat_tol) {
        std::ostringstream os;
        os << "the two expressions for dzeta/dt differ by " << out.compat_error;
        throw CompatibilityViolation(os.str());
    }
    Vec dz = a;
    dz(0) = 0.0;
    out.dzeta = g.to_values(dz);

    const Vec u1 = g.to_values(o1.u_modes(sol.phi1_modes));
    const Vec u2 = g.to_values(o2.u_modes(sol.phi2_modes));
    const Vec w1 = -g.to_values(o1.lprime_dot_modes(sol.phi1_modes));
    const Vec w2 = g.to_values(o2.lprime_dot_modes(sol.phi2_modes));
    const Vec L1 = g.to_values(lam1), L2 = g.to_values(lam2);
    const Vec B1 = 0.5 * (g.product(u1, u1) + o1.inv_layer_delta2() * g.product(w1, w1)) + g.product(w1, L1);
    const Vec B2 = 0.5 * (g.product(u2, u2) + o2.inv_layer_delta2() * g.product(w2, w2)) - g.product(w2, L2);
    out.dphi = mean_free(g, Vec(-zeta + prm.rho1 * B1 - prm.rho2 * B2));
    out.phi1_modes = sol.phi1_modes;
    out.phi2_modes = sol.phi2_modes;
    return out;
}

CanonicalState rk4_step(const PeriodicGrid& g, const CanonicalState& s, double dt,
                        const ScalarField& b, const NondimParams& prm, const ExpansionSpec& spec,
                        const EvolutionOptions& opt, double* max_compat) {
    if (!(dt > 0.0)) throw ConstraintViolation("time step must be positive");
    if (dt > opt.c_stab * g.dx() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "time step " << dt << " exceeds the guard " << opt.c_stab << " * dx = " << opt.c_stab * g.dx();
        throw ConstraintViolation(os.str());
    }
    auto f = [&](const Vec& z, const Vec& p) {
        try {
            CanonicalRHS r = rhs_canonical(g, z, p, b, prm, spec, opt.compat_tol);
            if (max_compat) *max_compat = std::max(*max_compat, r.compat_error);
            return r;
        } catch (const CavitationError& e) {
            throw StepRejected(std::string("stage state cavitates: ") + e.what());
        }
    };
    const CanonicalRHS k1 = f(s.zeta, s.phi);
    const CanonicalRHS k2 = f(s.zeta + 0.5 * dt * k1.dzeta, s.phi + 0.5 * dt * k1.dphi);
    const CanonicalRHS k3 = f(s.zeta + 0.5 * dt * k2.dzeta, s.phi + 0.5 * dt * k2.dphi);
    const CanonicalRHS k4 = f(s.zeta + dt * k3.dzeta, s.phi + dt * k3.dphi);
    CanonicalState out;
    out.t = s.t + dt;
    out.zeta = s.zeta + (dt / 6.0) * (k1.dzeta + 2.0 * k2.dzeta + 2.0 * k3.dzeta + k4.dzeta);
    out.phi = s.phi + (dt / 6.0) * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi);
    return out;
}

ScalarField stability_function_a(const PeriodicGrid& g, const InterfaceState& s,
                                 const PotentialVec& phi1, const PotentialVec& phi2,
                                 const TimeDerivatives& td, const NondimParams& prm,
                                 const ExpansionSpec& spec) {
    const ScalarField H1 = thickness(s, prm, 1), H2 = thickness(s, prm, 2);
    const PotentialVec l1p = l_vector(H1, spec, 1, 1), l1pp = l_vector(H1, spec, 1, 2);
    const PotentialVec l2p = l_vector(H2, spec, 2, 1), l2pp = l_vector(H2, spec, 2, 2);
    const Velocities v = compute_velocities(g, phi1, phi2, s, prm, spec);

    const PotentialVec D1 = td.dphi1 + (columns_dx(g, phi1).array().colwise() * v.u1.array()).matrix();
    const PotentialVec D2 = td.dphi2 + (columns_dx(g, phi2).array().colwise() * v.u2.array()).matrix();
    const Vec bx = deriv(g, s.b) / prm.h2;
    const double i1 = 1.0 / std::pow(prm.delta1(), 2), i2 = 1.0 / std::pow(prm.delta2(), 2);

    const Vec t1 = dot_rows(l1p, D1) - i1 * v.w1.cwiseProduct(dot_rows(l1pp, phi1));
    const Vec t2 = dot_rows(l2p, D2) +
                   (i2 * v.w2 - bx.cwiseProduct(v.u2)).cwiseProduct(dot_rows(l2pp, phi2));
    return Vec::Ones(g.M()) + (prm.rho1 / prm.h1) * t1 + (prm.rho2 / prm.h2) * t2;
}

ScalarField stability_margin(const InterfaceState& s, const Velocities& v, const ScalarField& a,
                             const NondimParams& prm, const StabilityConstants& c) {
    const ScalarField H1 = thickness(s, prm, 1), H2 = thickness(s, prm, 2);
    const Vec den = (prm.rho1 * prm.h2 * c.alpha2) * H2 + (prm.rho2 * prm.h1 * c.alpha1) * H1;
    const Vec shear = (v.u1 - v.u2).cwiseAbs2();
    return a - (prm.rho1 * prm.rho2) * shear.cwiseQuotient(den);
}

double energy_Em(const PeriodicGrid& g, const ScalarField& zeta, const PotentialVec& phi1,
                 const PotentialVec& phi2, int m, const NondimParams& prm) {
    if (m < 0) throw ConstraintViolation("energy order must be nonnegative");
    auto sq = [&](const Vec& f) { return std::pow(sobolev_norm(g, f, m), 2); };
    double E = sq(zeta);
    for (int l : {1, 2}) {
        const PotentialVec& X = l == 1 ? phi1 : phi2;
        double grad = 0.0, tail = 0.0;
        for (int j = 0; j < X.cols(); ++j) {
            grad += sq(deriv(g, Vec(X.col(j))));
            if (j > 0) tail += sq(Vec(X.col(j)));
        }
        E += prm.rho(l) * prm.h(l) * (grad + tail / std::pow(prm.layer_delta(l), 2));
    }
    return E;
}

double energy_E(const PeriodicGrid& g, const Perturbation& p, const NondimParams& prm) {
    return energy_Em(g, p.zeta, p.phi1, p.phi2, 0, prm);
}

double quadratic_form_A0mod(const PeriodicGrid& g, const InterfaceState& base,
                            const Velocities& v, const ScalarField& a, const Perturbation& p,
                            const NondimParams& prm, const ExpansionSpec& spec) {
    const StabilityConstants sc = stability_constants(spec);
    const ScalarField H1 = thickness(base, prm, 1), H2 = thickness(base, prm, 2);
    const Vec vel = v.u2 - v.u1;
    const Vec den = (prm.rho1 * prm.h2 * sc.alpha2) * H2 + (prm.rho2 * prm.h1 * sc.alpha1) * H1;
    const Vec theta1 = ((prm.rho2 * prm.h1 * sc.alpha1) * H1).cwiseQuotient(den);
    const Vec theta2 = Vec::Ones(g.M()) - theta1;

    double q = g.integrate(a.cwiseProduct(p.zeta.cwiseAbs2()));
    for (int l : {1, 2}) {
        const PotentialVec& X = l == 1 ? p.phi1 : p.phi2;
        const ScalarField& H = l == 1 ? H1 : H2;
        const std::vector<int> e = spec.exponents(l);
        const PotentialVec Xx = columns_dx(g, X);
        const PotentialVec lv = l_vector(H, spec, l, 0);
        const double inv = 1.0 / std::pow(prm.layer_delta(l), 2);
        Vec dens = Vec::Zero(g.M());
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::size_t j = 0; j < e.size(); ++j) {
                const int sum = e[i] + e[j];
                dens += (H.array().pow(sum + 1) / (sum + 1)).matrix().cwiseProduct(
                    Xx.col(i).cwiseProduct(Xx.col(j)));
                if (e[i] * e[j] != 0)
                    dens += (inv * e[i] * e[j] / double(sum - 1)) *
                            H.array().pow(sum - 1).matrix().cwiseProduct(X.col(i).cwiseProduct(X.col(j)));
            }
        q += prm.rho(l) * prm.h(l) * g.integrate(dens);
        const Vec& th = l == 1 ? theta1 : theta2;
        const Vec cross = th.cwiseProduct(vel).cwiseProduct(dot_rows(lv, Xx));
        q += 2.0 * prm.rho(l) * g.integrate(cross.cwiseProduct(p.zeta));
    }
    return q;
}

StateDiagnostics diagnose(const PeriodicGrid& g, const CanonicalState& st, const ScalarField& b,
                          const NondimParams& prm, const ExpansionSpec& spec, int m,
                          bool with_margin) {
    const InterfaceState s{st.zeta, b};
    LayerOps o1(g, s, prm, spec, 1), o2(g, s, prm, spec, 2);
    CoupledRHS rhs = CoupledRHS::zeros(g, spec);
    rhs.f4 = mean_free(g, st.phi);
    const CoupledSolution sol = solve_coupled(o1, o2, rhs, prm);

    StateDiagnostics d;
    d.hamiltonian = 0.5 * kinetic_form(o1, o2, sol.phi1_modes, sol.phi2_modes, prm) +
                    0.5 * g.to_modes(st.zeta).squaredNorm();
    d.mass = g.integrate(st.zeta);
    d.max_abs_zeta = st.zeta.cwiseAbs().maxCoeff();
    d.energy_m = energy_Em(g, st.zeta, sol.phi1, sol.phi2, m, prm);
    d.min_H1 = o1.H().minCoeff();
    d.min_H2 = o2.H().minCoeff();
    if (with_margin) {
        const TimeDerivatives td = recover_time_derivatives(g, s, sol.phi1, sol.phi2, prm, spec);
        d.a = stability_function_a(g, s, sol.phi1, sol.phi2, td, prm, spec);
        const Velocities v = compute_velocities(g, sol.phi1, sol.phi2, s, prm, spec);
        d.margin = stability_margin(s, v, d.a, prm, stability_constants(spec));
        d.min_margin = d.margin.minCoeff();
    }
    return d;
}

TrajectoryRecord run_trajectory(const PeriodicGrid& g, const CanonicalState& init,
                                const ScalarField& b, const NondimParams& prm,
                                const ExpansionSpec& spec, const TrajectoryOptions& opt) {
    if (!(opt.T >= 0.0) || !(opt.dt > 0.0)) throw ConfigError("trajectory needs T >= 0 and dt > 0");
    if (opt.record_stride < 1) throw ConfigError("record_stride must be at least 1");
    const std::int64_t nsteps = static_cast<std::int64_t>(std::llround(opt.T / opt.dt));
    TrajectoryRecord rec;
    auto record = [&](const CanonicalState& s) {
        const StateDiagnostics d = diagnose(g, s, b, prm, spec, opt.energy_order, opt.margin);
        rec.t.push_back(s.t);
        rec.hamiltonian.push_back(d.hamiltonian);
        rec.mass.push_back(d.mass);
        rec.min_margin.push_back(opt.margin ? d.min_margin : std::nan(""));
        rec.energy_m.push_back(d.energy_m);
        rec.max_abs_zeta.push_back(d.max_abs_zeta);
        return d;
    };

    CanonicalState s = init;
    s.zeta = init.zeta;
    s.phi = mean_free(g, init.phi);
    const StateDiagnostics d0 = record(s);
    if (opt.snapshot_stride > 0) rec.snapshots.push_back(s);
    if (opt.margin && opt.evo.halt_on_instability && d0.min_margin < 0.0) {
        rec.halted = true;
        rec.halt_reason = "stability margin negative at the initial state";
        return rec;
    }
    for (std::int64_t k = 1; k <= nsteps; ++k) {
        try {
            s = rk4_step(g, s, opt.dt, b, prm, spec, opt.evo, &rec.max_compat_error);
        } catch (const StepRejected& e) {
            if (!opt.evo.halt_on_instability) throw;
            rec.halted = true;
            rec.halt_reason = e.what();
            return rec;
        }
        s.t = k * opt.dt;
        rec.steps = k;
        if (opt.snapshot_stride > 0 && k % opt.snapshot_stride == 0) rec.snapshots.push_back(s);
        if (k % opt.record_stride == 0 || k == nsteps) {
            const StateDiagnostics d = record(s);
            if (opt.margin && opt.evo.halt_on_instability && d.min_margin < 0.0) {
                rec.halted = true;
                std::ostringstream os;
                os << "stability margin " << d.min_margin << " < 0 at t = " << s.t;
                rec.halt_reason = os.str();
                return rec;
            }
        }
    }
    return rec;
}

}  // namespace kakinuma
