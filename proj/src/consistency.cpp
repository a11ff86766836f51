#include "kakinuma/consistency.hpp"
#include "kakinuma/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>
#include <sstream>

namespace kakinuma {

namespace {

using Real50 = boost::multiprecision::cpp_bin_float_50;

double l2norm(const PeriodicGrid& g, const Vec& v) { return sobolev_norm(g, v, 0.0); }

template <class T>
T flat_symbol_t(T xi, T hd, const std::vector<int>& p) {
    const int K = static_cast<int>(p.size());
    std::vector<std::vector<T>> L(K, std::vector<T>(K));
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) {
            const int s = p[i] + p[j];
            L[i][j] = xi * xi / T(s + 1);
            if (p[i] * p[j] != 0) L[i][j] += T(p[i] * p[j]) / T(s - 1) / (hd * hd);
        }
    // sum_j phi_j = 1 and sum_j (L_ij - L_0j) phi_j = 0 for i >= 1
    std::vector<std::vector<T>> A(K, std::vector<T>(K + 1, T(0)));
    for (int j = 0; j < K; ++j) A[0][j] = 1;
    A[0][K] = 1;
    for (int i = 1; i < K; ++i)
        for (int j = 0; j < K; ++j) A[i][j] = L[i][j] - L[0][j];
    for (int c = 0; c < K; ++c) {
        int piv = c;
        for (int r = c + 1; r < K; ++r)
            if (abs(A[r][c]) > abs(A[piv][c])) piv = r;
        std::swap(A[piv], A[c]);
        if (A[c][c] == 0) throw SolverSingular("flat per-mode system is singular");
        for (int r = 0; r < K; ++r) {
            if (r == c) continue;
            const T f = A[r][c] / A[c][c];
            for (int k = c; k <= K; ++k) A[r][k] -= f * A[c][k];
        }
    }
    T lam = 0;
    for (int j = 0; j < K; ++j) lam += L[0][j] * (A[j][K] / A[j][j]);
    return lam;
}

using std::abs;

Vec state_profile(const PeriodicGrid& g, double amp, int k, bool sine) {
    Vec v(g.M());
    for (int j = 0; j < g.M(); ++j)
        v(j) = amp * (sine ? std::sin(k * g.node(j)) : std::cos(k * g.node(j)));
    return v;
}

OrderFit safe_fit(const std::vector<SweepRow>& rows, double SweepRow::*field, double floor,
                  std::vector<std::string>& notes, const std::string& name) {
    std::vector<double> d, e;
    for (const auto& r : rows) {
        d.push_back(r.delta);
        e.push_back(std::abs(r.*field));
    }
    try {
        return order_fit(d, e, floor);
    } catch (const BelowNoiseFloor& ex) {
        notes.push_back(name + ": " + ex.what());
        OrderFit f;
        f.deltas = d;
        f.errors = e;
        f.inconclusive = true;
        return f;
    }
}

}  // namespace

OrderFit order_fit(const std::vector<double>& deltas, const std::vector<double>& errors,
                   double floor, std::size_t min_samples) {
    if (deltas.size() != errors.size())
        throw ConstraintViolation("order fit: deltas and errors differ in length");
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1]))
            throw ConstraintViolation("order fit: deltas must be strictly decreasing");
    OrderFit f;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(errors[i] > floor) || !std::isfinite(errors[i])) {
            f.excluded.push_back(deltas[i]);
            continue;
        }
        f.deltas.push_back(deltas[i]);
        f.errors.push_back(errors[i]);
    }
    if (f.deltas.size() < min_samples) {
        std::ostringstream os;
        os << "only " << f.deltas.size() << " samples above the noise floor " << floor;
        throw BelowNoiseFloor(os.str());
    }
    const std::size_t n = f.deltas.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += std::log(f.deltas[i]);
        sy += std::log(f.errors[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(f.deltas[i]) - mx, dy = std::log(f.errors[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::log(f.errors[i]) - (f.intercept + f.slope * std::log(f.deltas[i]));
        ssr += r * r;
    }
    f.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
    f.inconclusive = f.r2 < 0.99;
    return f;
}

FullResiduals residuals_full_from_kakinuma(const PeriodicGrid& g, const ScalarField& phi1,
                                           const ScalarField& phi2, const InterfaceState& s,
                                           const NondimParams& prm, const ExpansionSpec& spec,
                                           int P) {
    FullResiduals out;
    TransmissionSolution t;
    ScalarField lamN[2], BN[2];
    for (int l : {1, 2}) {
        const ScalarField& tr = l == 1 ? phi1 : phi2;
        const PotentialVec vec = solve_layer_trace(g, tr, s, prm, spec, l);
        LayerOps o(g, s, prm, spec, l);
        Vec lm = o.calL_row(0) * o.stack(vec);
        lm(0) = 0.0;
        lamN[l - 1] = g.to_values(lm);
        BN[l - 1] = bernoulli_BN(g, vec, s, prm, spec, l);
        LayerReference ref(g, s, prm, l, P);
        const Vec pm = g.to_modes(tr);
        const Vec full = ref.apply_dtn(pm);
        if (l == 1) {
            t.psi1_modes = pm;
            t.dtn1 = g.to_values(full);
        } else {
            t.psi2_modes = pm;
            t.dtn2 = g.to_values(full);
        }
    }
    out.r1 = t.dtn1 - prm.h1 * lamN[0];
    out.r2 = prm.h2 * lamN[1] - t.dtn2;
    const auto [B1, B2] = bernoulli_full(g, t, s, prm);
    out.r0 = 0.5 * prm.rho1 * (B1 - BN[0]) - 0.5 * prm.rho2 * (B2 - BN[1]);
    out.norm_r1 = l2norm(g, out.r1);
    out.norm_r2 = l2norm(g, out.r2);
    out.norm_r0 = l2norm(g, out.r0);
    return out;
}

ScalarField residual_r1_flat(const PeriodicGrid& g, const ScalarField& phi1,
                             const NondimParams& prm, const ExpansionSpec& spec) {
    const InterfaceState flat = InterfaceState::flat(g);
    Vec m = g.to_modes(phi1);
    for (int i = 0; i < m.size(); ++i) m(i) *= flat_dtn_symbol(g.wavenumber(i), prm, 1);
    const ScalarField approx = approx_dtn(g, phi1, flat, prm, spec, 1);
    return g.to_values(m) - prm.h1 * approx;
}

KakinumaResiduals residuals_kakinuma_from_full(const PeriodicGrid& g, const ScalarField& zeta,
                                               const ScalarField& phi, const ScalarField& b,
                                               const NondimParams& prm, const ExpansionSpec& spec,
                                               int P) {
    InterfaceState s{zeta, b};
    const TransmissionSolution t = solve_transmission(g, phi, s, prm, P);
    Vec dzm = -g.to_modes(t.dtn1);
    dzm(0) = 0.0;
    const auto [B1, B2] = bernoulli_full(g, t, s, prm);
    const Vec dphi = prm.rho1 * B1 - prm.rho2 * B2 - zeta;

    const PreparedData pd = prepare_initial_data(g, zeta, phi, b, prm, spec);
    LayerOps o1(g, s, prm, spec, 1), o2(g, s, prm, spec, 2);
    const Vec s1 = o1.stack(pd.phi1), s2 = o2.stack(pd.phi2);
    const Vec L1 = o1.L_matrix() * s1, L2 = o2.L_matrix() * s2;
    const int n = o1.n();

    KakinumaResiduals r;
    r.r1.resize(g.M(), o1.K());
    r.r2.resize(g.M(), o2.K());
    for (int i = 0; i < o1.K(); ++i)
        r.r1.col(i) = g.to_values(Vec(o1.mult(o1.exponents()[i]) * dzm / prm.h1 + L1.segment(i * n, n)));
    for (int i = 0; i < o2.K(); ++i)
        r.r2.col(i) = g.to_values(Vec(o2.mult(o2.exponents()[i]) * dzm / prm.h2 - L2.segment(i * n, n)));

    const Vec dz = g.to_values(dzm);
    const Vec lp1 = g.to_values(o1.lprime_dot_modes(s1));
    const Vec lp2 = g.to_values(o2.lprime_dot_modes(s2));
    const Vec f4 = dphi + prm.rho1 * g.product(lp1, Vec(-dz / prm.h1)) -
                   prm.rho2 * g.product(lp2, Vec(dz / prm.h2));
    const Vec u1 = g.to_values(o1.u_modes(s1)), u2 = g.to_values(o2.u_modes(s2));
    const Vec w1 = -lp1, w2 = lp2;
    const Vec q1 = g.product(u1, u1) + o1.inv_layer_delta2() * g.product(w1, w1);
    const Vec q2 = g.product(u2, u2) + o2.inv_layer_delta2() * g.product(w2, w2);
    Vec r0 = -f4 + 0.5 * prm.rho1 * q1 - 0.5 * prm.rho2 * q2 - zeta;
    Vec r0m = g.to_modes(r0);
    r0m(0) = 0.0;  // the constant mode is a gauge
    r.r0 = g.to_values(r0m);

    double w = 0.0, a1 = 0.0, a2 = 0.0;
    for (int i = 0; i < o1.K(); ++i) a1 += std::pow(l2norm(g, r.r1.col(i)), 2);
    for (int i = 0; i < o2.K(); ++i) a2 += std::pow(l2norm(g, r.r2.col(i)), 2);
    w = prm.rho1 * prm.h1 * a1 + prm.rho2 * prm.h2 * a2;
    r.norm_r1 = std::sqrt(a1);
    r.norm_r2 = std::sqrt(a2);
    r.norm_r0 = l2norm(g, r.r0);
    r.weighted = w;
    return r;
}

double hamiltonian_kakinuma(const PeriodicGrid& g, const ScalarField& zeta, const ScalarField& phi,
                            const ScalarField& b, const NondimParams& prm,
                            const ExpansionSpec& spec) {
    InterfaceState s{zeta, b};
    LayerOps o1(g, s, prm, spec, 1), o2(g, s, prm, spec, 2);
    CoupledRHS rhs = CoupledRHS::zeros(g, spec);
    rhs.f4 = phi;
    const CoupledSolution sol = solve_coupled(o1, o2, rhs, prm);
    return 0.5 * kinetic_form(o1, o2, sol.phi1_modes, sol.phi2_modes, prm) +
           0.5 * g.to_modes(zeta).squaredNorm();
}

double hamiltonian_error(const PeriodicGrid& g, const ScalarField& zeta, const ScalarField& phi,
                         const ScalarField& b, const NondimParams& prm, const ExpansionSpec& spec,
                         int P) {
    return hamiltonian_kakinuma(g, zeta, phi, b, prm, spec) -
           hamiltonian_full(g, zeta, phi, b, prm, P);
}

double kakinuma_flat_symbol(double xi, const NondimParams& prm, const ExpansionSpec& spec,
                            int layer) {
    return static_cast<double>(
        flat_symbol_t<Real50>(Real50(xi), Real50(prm.h(layer)) * Real50(prm.delta), spec.exponents(layer)));
}

Dispersion dispersion_symbols(double xi, const NondimParams& prm, const ExpansionSpec& spec) {
    if (xi == 0.0) throw ConstraintViolation("dispersion needs a nonzero wavenumber");
    const Real50 x = abs(Real50(xi)), d = Real50(prm.delta);
    const Real50 r1 = Real50(prm.rho1), r2 = Real50(1) - r1;
    const Real50 h1 = Real50(prm.h1), h2 = r2 / (Real50(1) - r1 / h1);
    const Real50 s1 = x * tanh(h1 * d * x) / d, s2 = x * tanh(h2 * d * x) / d;
    const Real50 k1 = h1 * flat_symbol_t<Real50>(x, h1 * d, spec.exponents(1));
    const Real50 k2 = h2 * flat_symbol_t<Real50>(x, h2 * d, spec.exponents(2));
    const Real50 wf = Real50(1) / (r1 / s1 + r2 / s2);
    const Real50 wk = Real50(1) / (r1 / k1 + r2 / k2);
    Dispersion out;
    out.omega2_full = static_cast<double>(wf);
    out.omega2_kakinuma = static_cast<double>(wk);
    out.difference = static_cast<double>(wk - wf);
    return out;
}

std::vector<double> default_delta_sweep() { return {0.2, 0.15, 0.1, 0.07, 0.05, 0.035, 0.02}; }

std::vector<SweepResult> consistency_sweep(double rho1, double h1,
                                           const std::vector<ExpansionSpec>& specs,
                                           const std::vector<double>& deltas,
                                           const SweepProfiles& prof, const SweepOptions& opt) {
    if (deltas.empty()) throw ConfigError("delta sweep is empty");
    std::vector<SweepResult> results(specs.size());
    for (std::size_t q = 0; q < specs.size(); ++q) results[q].spec = specs[q];

    std::vector<std::vector<SweepRow>> point_rows(deltas.size());
    auto point = [&](std::size_t idx) {
        const double delta = deltas[idx];
        const NondimParams prm = validate_params(rho1, h1, delta);
        const double hmin = std::min(prm.h1, prm.h2);
        auto fields = [&](const PeriodicGrid& g) {
            struct F { Vec zeta, b, phi; };
            return F{state_profile(g, prof.zeta_amp * hmin, 1, true),
                     state_profile(g, prof.b_amp * prm.h2, 2, true),
                     state_profile(g, prof.phi_amp, 1, false)};
        };
        auto kakinuma_errors = [&](const PeriodicGrid& g, double HIW) {
            std::vector<double> e;
            const auto f = fields(g);
            for (const auto& sp : specs)
                e.push_back(hamiltonian_kakinuma(g, f.zeta, f.phi, f.b, prm, sp) - HIW);
            return e;
        };
        auto full = [&](int M, int P) {
            PeriodicGrid g(M);
            const auto f = fields(g);
            return hamiltonian_full(g, f.zeta, f.phi, f.b, prm, P);
        };

        int P = opt.P, M = opt.M;
        double HIW = 0.0, change = 0.0;
        bool converged = true;
        if (opt.hamiltonian) {
            HIW = full(M, P);
            if (opt.auto_refine) {
                auto threshold = [&](int m, double H) {
                    PeriodicGrid g(m);
                    const auto e = kakinuma_errors(g, H);
                    double emin = std::abs(H);
                    for (double v : e) emin = std::min(emin, std::abs(v));
                    return std::max(0.01 * emin, 4e-16 * std::abs(H));
                };
                double thr = threshold(M, HIW);
                while (true) {
                    const double H2 = full(M, 2 * P);
                    change = std::abs(H2 - HIW);
                    if (change <= thr) break;
                    if (2 * P > opt.P_max) {
                        converged = false;
                        break;
                    }
                    P *= 2;
                    HIW = H2;
                }
                while (2 * M <= opt.M_max) {
                    const double H2 = full(2 * M, P);
                    const double c = std::abs(H2 - HIW);
                    change = std::max(change, c);
                    if (c <= thr) break;
                    M *= 2;
                    HIW = H2;
                    thr = threshold(M, HIW);
                    if (2 * M > opt.M_max) converged = false;
                }
            }
        }

        PeriodicGrid g(M);
        const auto f = fields(g);
        InterfaceState s{f.zeta, f.b};
        for (std::size_t q = 0; q < specs.size(); ++q) {
            SweepRow row;
            row.delta = delta;
            row.h1delta = prm.delta1();
            row.h2delta = prm.delta2();
            row.P = P;
            row.M = M;
            row.ref_change = change;
            row.converged = converged;
            if (opt.hamiltonian)
                row.err_H = hamiltonian_kakinuma(g, f.zeta, f.phi, f.b, prm, specs[q]) - HIW;
            if (opt.residuals) {
                const PreparedData pd = prepare_initial_data(g, f.zeta, f.phi, f.b, prm, specs[q]);
                LayerOps o1(g, s, prm, specs[q], 1), o2(g, s, prm, specs[q], 2);
                const Vec t1 = g.to_values(Vec(o1.l_row() * o1.stack(pd.phi1)));
                const Vec t2 = g.to_values(Vec(o2.l_row() * o2.stack(pd.phi2)));
                const FullResiduals r = residuals_full_from_kakinuma(g, t1, t2, s, prm, specs[q], P);
                row.err_r1 = r.norm_r1;
                row.err_r2 = r.norm_r2;
                row.err_r0 = r.norm_r0;
            }
            if (opt.flat) {
                PeriodicGrid gf(opt.M_flat);
                const Vec phi = state_profile(gf, prof.phi_amp, 1, false);
                row.err_r1_flat = l2norm(gf, residual_r1_flat(gf, phi, prm, specs[q]));
            }
            point_rows[idx].push_back(row);
        }
    };

    // sweep points are independent; rows are merged back in delta order
    std::vector<std::exception_ptr> errors(deltas.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < deltas.size(); i = next++) {
            try {
                point(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int nthreads = std::max(1, std::min<int>(opt.threads, static_cast<int>(deltas.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    for (const auto& rows : point_rows)
        for (std::size_t q = 0; q < specs.size(); ++q) results[q].rows.push_back(rows[q]);
    for (auto& res : results) {
        if (opt.residuals) {
            res.fit_r1 = safe_fit(res.rows, &SweepRow::err_r1, opt.floor, res.notes, "err_r1");
            res.fit_r2 = safe_fit(res.rows, &SweepRow::err_r2, opt.floor, res.notes, "err_r2");
            res.fit_r0 = safe_fit(res.rows, &SweepRow::err_r0, opt.floor, res.notes, "err_r0");
        }
        if (opt.hamiltonian)
            res.fit_H = safe_fit(res.rows, &SweepRow::err_H, opt.floor, res.notes, "err_H");
        if (opt.flat)
            res.fit_r1_flat = safe_fit(res.rows, &SweepRow::err_r1_flat, opt.floor, res.notes, "err_r1_flat");
        for (const auto& r : res.rows)
            if (!r.converged) {
                std::ostringstream os;
                os << "reference not self-converged at delta=" << r.delta << " (change " << r.ref_change
                   << ")";
                res.notes.push_back(os.str());
            }
    }
    return results;
}

}  // namespace kakinuma
