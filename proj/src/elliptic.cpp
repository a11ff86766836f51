#include "kakinuma/elliptic.hpp"
#include "kakinuma/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace kakinuma {

namespace {

// Column scale of block j: phi_j = (h delta)^2 y_j for j >= 1 keeps every block O(1).
double column_scale(const LayerOps& o, int j) {
    return j == 0 ? 1.0 : 1.0 / o.inv_layer_delta2();
}

struct TraceSystem {
    Eigen::PartialPivLU<Mat> lu;
    const LayerOps* ops;
};

TraceSystem factor_trace(const LayerOps& o) {
    const int K = o.K(), n = o.n();
    Mat A(K * n, K * n);
    A.topRows(n) = o.l_row();
    for (int i = 1; i < K; ++i) A.middleRows(i * n, n) = o.calL_row(i);
    for (int j = 1; j < K; ++j) A.middleCols(j * n, n) *= column_scale(o, j);
    TraceSystem ts{Eigen::PartialPivLU<Mat>(A), &o};
    return ts;
}

Mat solve_trace(const TraceSystem& ts, const Mat& trace_modes) {
    const LayerOps& o = *ts.ops;
    const int K = o.K(), n = o.n();
    Mat rhs = Mat::Zero(K * n, trace_modes.cols());
    rhs.topRows(n) = trace_modes;
    Mat y = ts.lu.solve(rhs);
    for (int j = 1; j < K; ++j) y.middleRows(j * n, n) *= column_scale(o, j);
    return y;
}

double rel_residual(const Mat& A, const Mat& x, const Mat& b) {
    const double nb = b.norm();
    return (A * x - b).norm() / (nb > 0 ? nb : 1.0);
}

}  // namespace

CoupledRHS CoupledRHS::zeros(const PeriodicGrid& g, const ExpansionSpec& spec) {
    CoupledRHS r;
    r.f1prime.assign(spec.N, ScalarField::Zero(g.M()));
    r.f2prime.assign(spec.Nstar, ScalarField::Zero(g.M()));
    r.f3 = ScalarField::Zero(g.M());
    r.f4 = ScalarField::Zero(g.M());
    return r;
}

PotentialVec solve_layer_trace(const PeriodicGrid& g, const ScalarField& phi_trace,
                               const InterfaceState& s, const NondimParams& prm,
                               const ExpansionSpec& spec, int layer) {
    LayerOps o(g, s, prm, spec, layer);
    const Vec tm = g.to_modes(phi_trace);
    if (o.K() == 1) return o.unstack(tm);
    TraceSystem ts = factor_trace(o);
    const Vec st = solve_trace(ts, tm);
    return o.unstack(st);
}

ScalarField approx_dtn(const PeriodicGrid& g, const ScalarField& phi_trace,
                       const InterfaceState& s, const NondimParams& prm,
                       const ExpansionSpec& spec, int layer) {
    LayerOps o(g, s, prm, spec, layer);
    const Vec tm = g.to_modes(phi_trace);
    Vec st = tm;
    if (o.K() > 1) {
        TraceSystem ts = factor_trace(o);
        st = solve_trace(ts, tm);
    }
    Vec out = o.calL_row(0) * st;
    out(0) = 0.0;
    return g.to_values(out);
}

Mat approx_dtn_matrix(const PeriodicGrid& g, const InterfaceState& s, const NondimParams& prm,
                      const ExpansionSpec& spec, int layer) {
    LayerOps o(g, s, prm, spec, layer);
    const int n = o.n();
    Mat X = Mat::Identity(n, n);
    if (o.K() > 1) {
        TraceSystem ts = factor_trace(o);
        X = solve_trace(ts, Mat::Identity(n, n));
    }
    Mat out = o.calL_row(0) * X;
    out.row(0).setZero();
    return out;
}

Mat coupled_matrix(const PeriodicGrid& g, const InterfaceState& s, const NondimParams& prm,
                   const ExpansionSpec& spec) {
    LayerOps o1(g, s, prm, spec, 1), o2(g, s, prm, spec, 2);
    const int n = o1.n(), K1 = o1.K(), K2 = o2.K();
    const int c1 = K1 * n, c2 = K2 * n;
    Mat A = Mat::Zero(c1 + c2, c1 + c2);
    int r = 0;
    for (int i = 1; i < K1; ++i, r += n) A.block(r, 0, n, c1) = o1.calL_row(i);
    for (int i = 1; i < K2; ++i, r += n) A.block(r, c1, n, c2) = o2.calL_row(i);
    A.block(r, 0, n, c1) = prm.h1 * o1.calL_row(0);
    A.block(r, c1, n, c2) = prm.h2 * o2.calL_row(0);
    r += n;
    A.block(r, 0, n, c1) = -prm.rho1 * o1.l_row();
    A.block(r, c1, n, c2) = prm.rho2 * o2.l_row();
    return A;
}

CoupledSolution solve_coupled(const PeriodicGrid& g, const CoupledRHS& rhs,
                              const InterfaceState& s, const NondimParams& prm,
                              const ExpansionSpec& spec, const SolverOptions& opt) {
    LayerOps o1(g, s, prm, spec, 1), o2(g, s, prm, spec, 2);
    return solve_coupled(o1, o2, rhs, prm, opt);
}

CoupledSolution solve_coupled(const LayerOps& o1, const LayerOps& o2, const CoupledRHS& rhs,
                              const NondimParams& prm, const SolverOptions& opt) {
    const PeriodicGrid& g = o1.grid();
    const int n = o1.n(), K1 = o1.K(), K2 = o2.K();
    if (static_cast<int>(rhs.f1prime.size()) != K1 - 1 ||
        static_cast<int>(rhs.f2prime.size()) != K2 - 1)
        throw ConstraintViolation("coupled right-hand side does not match the expansion");

    // phi_{2,0} is eliminated through the trace row:
    //   phi_{2,0} = f4/rho2 + (rho1/rho2) l1.phi1 - sum_{j>=1} H2^{p_j} phi_{2,j}
    const int nu1 = K1 * n;
    const int nu = nu1 + (K2 - 1) * n + 1;
    const int lam = nu - 1;

    std::vector<double> sc1(K1), sc2(K2);
    for (int j = 0; j < K1; ++j) sc1[j] = column_scale(o1, j);
    for (int j = 0; j < K2; ++j) sc2[j] = column_scale(o2, j);

    Mat T = Mat::Zero(n, nu);
    for (int j = 0; j < K1; ++j)
        T.middleCols(j * n, n) = (prm.rho1 / prm.rho2 * sc1[j]) * o1.mult(o1.exponents()[j]);
    for (int j = 1; j < K2; ++j)
        T.middleCols(nu1 + (j - 1) * n, n) = -sc2[j] * o2.mult(o2.exponents()[j]);
    const Vec t0 = g.to_modes(rhs.f4) / prm.rho2;

    Mat A = Mat::Zero(nu, nu);
    Vec b = Vec::Zero(nu);

    auto place_layer1 = [&](int row, const Mat& R, double w) {
        for (int j = 0; j < K1; ++j)
            A.block(row, j * n, n, n) += (w * sc1[j]) * R.middleCols(j * n, n);
    };
    auto place_layer2 = [&](int row, const Mat& R, double w) {
        const Mat R0 = w * R.leftCols(n);
        // R0 * T block by block; exponent 0 blocks of T are multiples of the identity
        for (int j = 0; j < K1; ++j) {
            const double c = prm.rho1 / prm.rho2 * sc1[j];
            const int e = o1.exponents()[j];
            if (e == 0) A.block(row, j * n, n, n) += c * R0;
            else A.block(row, j * n, n, n).noalias() += c * (R0 * o1.mult(e));
        }
        for (int j = 1; j < K2; ++j)
            A.block(row, nu1 + (j - 1) * n, n, n).noalias() -= sc2[j] * (R0 * o2.mult(o2.exponents()[j]));
        b.segment(row, n) -= R0 * t0;
        for (int j = 1; j < K2; ++j)
            A.block(row, nu1 + (j - 1) * n, n, n) += (w * sc2[j]) * R.middleCols(j * n, n);
    };

    int row = 0;
    for (int i = 1; i < K1; ++i, row += n) {
        place_layer1(row, o1.calL_row(i), 1.0);
        b.segment(row, n) += g.to_modes(rhs.f1prime[i - 1]);
    }
    for (int i = 1; i < K2; ++i, row += n) {
        place_layer2(row, o2.calL_row(i), 1.0);
        b.segment(row, n) += g.to_modes(rhs.f2prime[i - 1]);
    }
    const int flux_row = row;
    place_layer1(flux_row, o1.calL_row(0), prm.h1);
    place_layer2(flux_row, o2.calL_row(0), prm.h2);
    if (rhs.div_f3) b.segment(flux_row, n) += g.to_modes(*rhs.div_f3);
    else b.segment(flux_row, n) += g.d_modes(g.to_modes(rhs.f3));
    // the mode-0 row of the flux equation is identically zero; it carries the border
    A(flux_row, lam) = 1.0;
    row += n;
    // gauge: the constant mode of phi_{1,0} vanishes
    A(row, 0) = 1.0;

    Eigen::PartialPivLU<Mat> lu(A);
    const Vec y = lu.solve(b);
    if (!y.allFinite()) throw SolverSingular("coupled system is singular");
    if (rel_residual(A, y, b) > 1e-8)
        throw SolverSingular("coupled system solve lost accuracy (residual " +
                             std::to_string(rel_residual(A, y, b)) + ")");

    CoupledSolution sol;
    sol.gauge = y(lam);
    const double scale = b.norm() + 1e-300;
    if (opt.check_gauge && std::abs(sol.gauge) > opt.gauge_tol * std::max(scale, 1.0))
        throw GaugeInconsistency("border multiplier " + std::to_string(sol.gauge) +
                                 " exceeds tolerance; right-hand side is not compatible");

    Vec s1(K1 * n), s2(K2 * n);
    for (int j = 0; j < K1; ++j) s1.segment(j * n, n) = sc1[j] * y.segment(j * n, n);
    s2.segment(0, n) = t0 + T * y;
    for (int j = 1; j < K2; ++j) s2.segment(j * n, n) = sc2[j] * y.segment(nu1 + (j - 1) * n, n);
    sol.phi1_modes = s1;
    sol.phi2_modes = s2;
    sol.phi1 = o1.unstack(s1);
    sol.phi2 = o2.unstack(s2);
    return sol;
}

PreparedData prepare_initial_data(const PeriodicGrid& g, const ScalarField& zeta0,
                                  const ScalarField& phi0, const ScalarField& b,
                                  const NondimParams& prm, const ExpansionSpec& spec) {
    if (std::abs(g.mean(phi0)) > 1e-10)
        throw NonZeroMean("initial potential must be mean-free");
    InterfaceState s{zeta0, b};
    CoupledRHS rhs = CoupledRHS::zeros(g, spec);
    rhs.f4 = phi0;
    const CoupledSolution sol = solve_coupled(g, rhs, s, prm, spec);
    return {sol.phi1, sol.phi2};
}

double compatibility_error(const Vec& a, const Vec& b) {
    const double d = (a - b).norm();
    const double sc = std::max(a.norm(), b.norm());
    if (d < 1e-14) return 0.0;
    return d / sc;
}

double kinetic_form(const LayerOps& o1, const LayerOps& o2, const Vec& s1, const Vec& s2,
                    const NondimParams& prm) {
    return prm.rho1 * prm.h1 * s1.dot(o1.L_matrix() * s1) +
           prm.rho2 * prm.h2 * s2.dot(o2.L_matrix() * s2);
}

TimeDerivatives recover_time_derivatives(const PeriodicGrid& g, const InterfaceState& s,
                                         const PotentialVec& phi1, const PotentialVec& phi2,
                                         const NondimParams& prm, const ExpansionSpec& spec,
                                         double compat_tol) {
    LayerOps o1(g, s, prm, spec, 1), o2(g, s, prm, spec, 2);
    const Vec s1 = o1.stack(phi1), s2 = o2.stack(phi2);
    const Vec a = -prm.h1 * (o1.calL_row(0) * s1);
    const Vec c = prm.h2 * (o2.calL_row(0) * s2);
    TimeDerivatives out;
    out.compat_error = compatibility_error(a, c);
    if (out.compat_error > compat_tol)
        throw CompatibilityViolation("the two expressions for dzeta/dt differ by " +
                                     std::to_string(out.compat_error));
    Vec dz = a;
    dz(0) = 0.0;
    out.dzeta = g.to_values(dz);

    const Vec dzp = g.to_padded(dz);
    const Vec hd1 = dzp / prm.h1;
    const Vec hd2 = dzp / prm.h2;

    CoupledRHS rhs = CoupledRHS::zeros(g, spec);
    for (int i = 1; i < o1.K(); ++i)
        rhs.f1prime[i - 1] = g.to_values(Vec(o1.calL_row_variation(i, hd1) * s1));
    for (int i = 1; i < o2.K(); ++i)
        rhs.f2prime[i - 1] = g.to_values(Vec(-(o2.calL_row_variation(i, hd2) * s2)));
    Vec div = prm.h1 * (o1.calL_row_variation(0, hd1) * s1) -
              prm.h2 * (o2.calL_row_variation(0, hd2) * s2);
    div(0) = 0.0;
    rhs.div_f3 = g.to_values(div);

    const Vec u1 = g.to_values(o1.u_modes(s1)), u2 = g.to_values(o2.u_modes(s2));
    const Vec w1 = -g.to_values(o1.lprime_dot_modes(s1)), w2 = g.to_values(o2.lprime_dot_modes(s2));
    const Vec q1 = g.product(u1, u1) + o1.inv_layer_delta2() * g.product(w1, w1);
    const Vec q2 = g.product(u2, u2) + o2.inv_layer_delta2() * g.product(w2, w2);
    Vec f4 = 0.5 * prm.rho1 * q1 - 0.5 * prm.rho2 * q2 - s.zeta;
    Vec f4m = g.to_modes(f4);
    f4m(0) = 0.0;
    rhs.f4 = g.to_values(f4m);

    SolverOptions opt;
    opt.check_gauge = false;
    const CoupledSolution sol = solve_coupled(o1, o2, rhs, prm, opt);
    out.dphi1 = sol.phi1;
    out.dphi2 = sol.phi2;
    return out;
}

}  // namespace kakinuma
