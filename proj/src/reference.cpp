#include "kakinuma/reference.hpp"
#include "kakinuma/errors.hpp"

#include <cmath>
#include <numbers>

namespace kakinuma {

double flat_dtn_symbol(double xi, const NondimParams& prm, int layer) {
    const double a = std::abs(xi);
    if (a == 0.0) return 0.0;
    return a * std::tanh(prm.h(layer) * prm.delta * a) / prm.delta;
}

ChebyshevLine ChebyshevLine::make(int P, double a, double b) {
    if (P < 8) throw ConstraintViolation("vertical resolution P must be at least 8");
    ChebyshevLine c;
    Vec t(P + 1);
    for (int k = 0; k <= P; ++k) t(k) = std::cos(std::numbers::pi * k / P);
    Mat D = Mat::Zero(P + 1, P + 1);
    auto cw = [P](int k) { return (k == 0 || k == P ? 2.0 : 1.0) * (k % 2 ? -1.0 : 1.0); };
    for (int i = 0; i <= P; ++i)
        for (int j = 0; j <= P; ++j)
            if (i != j) D(i, j) = cw(i) / cw(j) / (t(i) - t(j));
    for (int i = 0; i <= P; ++i) D(i, i) = -D.row(i).sum();

    Vec w = Vec::Zero(P + 1);
    Vec v = Vec::Ones(P - 1);
    auto th = [P](int k) { return std::numbers::pi * k / P; };
    if (P % 2 == 0) {
        w(0) = w(P) = 1.0 / (P * P - 1.0);
        for (int k = 1; k < P / 2; ++k)
            for (int i = 1; i < P; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * th(i)) / (4.0 * k * k - 1.0);
        for (int i = 1; i < P; ++i) v(i - 1) -= std::cos(P * th(i)) / (P * P - 1.0);
    } else {
        w(0) = w(P) = 1.0 / (double(P) * P);
        for (int k = 1; k <= (P - 1) / 2; ++k)
            for (int i = 1; i < P; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * th(i)) / (4.0 * k * k - 1.0);
    }
    for (int i = 1; i < P; ++i) w(i) = 2.0 * v(i - 1) / P;

    const double half = 0.5 * (b - a);
    c.z = (a + half * (t.array() + 1.0)).matrix();
    c.D = D / half;
    c.w = w * half;
    return c;
}

LayerReference::LayerReference(const PeriodicGrid& g, const InterfaceState& s,
                               const NondimParams& prm, int layer, int P)
    : g_(&g), layer_(layer), P_(P), delta_(prm.delta) {
    if (layer != 1 && layer != 2) throw IndexOutOfRange("layer must be 1 or 2");
    if (layer == 1) {
        line_ = ChebyshevLine::make(P, 0.0, prm.h1);
        iface_ = P;
        far_ = 0;
    } else {
        line_ = ChebyshevLine::make(P, -prm.h2, 0.0);
        iface_ = 0;
        far_ = P;
    }
    const Vec zm = g.to_modes(s.zeta);
    const Vec zx_m = g.d_modes(zm);
    zxp_ = g.to_padded(zx_m);
    if (layer == 1) {
        Jp_ = (1.0 - g.to_padded(zm).array() / prm.h1).matrix();
        Jxp_ = -zxp_ / prm.h1;
    } else {
        const Vec bm = g.to_modes(s.b);
        Jp_ = (1.0 + (g.to_padded(zm) - g.to_padded(bm)).array() / prm.h2).matrix();
        Jxp_ = (zxp_ - g.to_padded(g.d_modes(bm))) / prm.h2;
    }
    if (Jp_.minCoeff() <= 0.0) throw CavitationError("non-cavitation violated in reference layer");

    const double d2 = delta_ * delta_;
    const Vec inv = Jp_.cwiseInverse();
    Dx_ = g.d_matrix();
    GJ_ = g.galerkin(Jp_);
    GJx_ = g.galerkin(Jxp_);
    Gzx_ = g.galerkin(zxp_);
    W_[0] = g.galerkin(inv + d2 * zxp_.cwiseProduct(zxp_).cwiseProduct(inv));
    W_[1] = g.galerkin(2.0 * d2 * zxp_.cwiseProduct(Jxp_).cwiseProduct(inv));
    W_[2] = g.galerkin(d2 * Jxp_.cwiseProduct(Jxp_).cwiseProduct(inv));

    const int n = g.modes();
    const int nn = P + 1;
    const Mat& Dz = line_.D;
    const Vec& z = line_.z;
    Mat S[3];
    for (int m = 0; m < 3; ++m) S[m] = Dz * z.array().pow(m).matrix().asDiagonal() * Dz;

    std::vector<Mat> Z(nn), DZ(nn), ZD(nn), Wk(nn);
    for (int k = 0; k < nn; ++k) {
        Z[k] = Gzx_ + z(k) * GJx_;
        DZ[k] = Dx_ * Z[k];
        ZD[k] = Z[k] * Dx_;
        Wk[k] = W_[0] + z(k) * W_[1] + z(k) * z(k) * W_[2];
    }
    const Mat DJD = Dx_ * GJ_ * Dx_;

    // unknown block index for node k
    auto col = [this](int k) { return k < iface_ ? k : k - 1; };
    Mat A = Mat::Zero(P * n, P * n);
    for (int k = 0; k < nn; ++k) {
        if (k == iface_) continue;
        const int r = col(k) * n;
        for (int kp = 0; kp < nn; ++kp) {
            if (kp == iface_) continue;
            const int c = col(kp) * n;
            auto blk = A.block(r, c, n, n);
            if (k == far_) {
                blk += Dz(k, kp) * Wk[k];
                if (kp == k) blk -= d2 * ZD[k];
            } else {
                if (kp == k) blk += d2 * DJD;
                blk -= (d2 * Dz(k, kp)) * (DZ[k] + ZD[kp]);
                for (int m = 0; m < 3; ++m) blk += S[m](k, kp) * W_[m];
            }
        }
    }
    lu_ = Eigen::PartialPivLU<Mat>(A);
}

Mat LayerReference::rhs_matrix(const Mat& phi) const {
    const int n = g_->modes();
    Mat R(P_ * n, phi.cols());
    const Mat Dphi = Dx_ * phi;
    const Mat pde = -(Dx_ * (GJ_ * Dphi) - GJx_ * Dphi);
    auto col = [this](int k) { return k < iface_ ? k : k - 1; };
    for (int k = 0; k <= P_; ++k) {
        if (k == iface_) continue;
        if (k == far_) R.middleRows(col(k) * n, n) = (Gzx_ + line_.z(k) * GJx_) * Dphi;
        else R.middleRows(col(k) * n, n) = pde;
    }
    return R;
}

Mat LayerReference::lifted(const Mat& phi) const {
    const int n = g_->modes();
    const Mat y = lu_.solve(rhs_matrix(phi));
    if (!y.allFinite()) throw SolverSingular("reference layer system is singular");
    Mat chi = Mat::Zero((P_ + 1) * n, phi.cols());
    for (int k = 0; k <= P_; ++k) {
        if (k == iface_) continue;
        const int c = k < iface_ ? k : k - 1;
        chi.middleRows(k * n, n) = y.middleRows(c * n, n);
    }
    return chi;
}

Mat LayerReference::dtn_from_lifted(const Mat& phi, const Mat& chi) const {
    const int n = g_->modes();
    Mat dz = Mat::Zero(n, phi.cols());
    for (int k = 0; k <= P_; ++k) dz += line_.D(iface_, k) * chi.middleRows(k * n, n);
    Mat out = -Gzx_ * (Dx_ * phi) + W_[0] * dz;
    if (layer_ == 1) out = -out;
    out.row(0).setZero();
    return out;
}

Vec LayerReference::apply_dtn(const Vec& phi) const {
    return dtn_from_lifted(phi, lifted(phi));
}

Mat LayerReference::dtn_matrix() const {
    const int n = g_->modes();
    const Mat I = Mat::Identity(n, n);
    return dtn_from_lifted(I, lifted(I));
}

double LayerReference::energy(const Vec& phi) const {
    const PeriodicGrid& g = *g_;
    const int n = g.modes();
    const Mat chi = lifted(phi);
    const double d2 = delta_ * delta_;
    const Vec phix = g.to_padded(g.d_modes(phi));
    const double wx = g.length() / g.padded_size();
    double E = 0.0;
    for (int k = 0; k <= P_; ++k) {
        Vec cz = Vec::Zero(n);
        for (int q = 0; q <= P_; ++q) cz += line_.D(k, q) * chi.middleRows(q * n, n);
        const Vec ck = chi.middleRows(k * n, n);
        const Vec chix = g.to_padded(g.d_modes(ck));
        const Vec chiz = g.to_padded(cz);
        const Vec zt = zxp_ + line_.z(k) * Jxp_;
        const Vec hx = phix + d2 * (chix - zt.cwiseProduct(chiz).cwiseQuotient(Jp_));
        const Vec dens = Jp_.cwiseProduct(hx.cwiseAbs2()) + d2 * chiz.cwiseAbs2().cwiseQuotient(Jp_);
        E += line_.w(k) * wx * dens.sum();
    }
    return E;
}

ScalarField full_dtn(const PeriodicGrid& g, const ScalarField& phi_trace, const InterfaceState& s,
                     const NondimParams& prm, int layer, int P, ResolutionCheck* check,
                     double tol) {
    const Vec pm = g.to_modes(phi_trace);
    LayerReference ref(g, s, prm, layer, P);
    const Vec out = ref.apply_dtn(pm);
    if (check) {
        LayerReference fine(g, s, prm, layer, 2 * P);
        const Vec o2 = fine.apply_dtn(pm);
        const double sc = std::max(o2.norm(), 1e-300);
        check->change = (o2 - out).norm() / sc;
        if (o2.norm() == 0.0) check->change = 0.0;
        check->warning = check->change > tol;
    }
    return g.to_values(out);
}

TransmissionSolution solve_transmission(const PeriodicGrid& g, const ScalarField& phi,
                                        const InterfaceState& s, const NondimParams& prm, int P) {
    if (std::abs(g.mean(phi)) > 1e-10)
        throw NonZeroMean("transmission data must be mean-free");
    LayerReference r1(g, s, prm, 1, P), r2(g, s, prm, 2, P);
    const int n = g.modes();
    const Mat L1 = r1.dtn_matrix(), L2 = r2.dtn_matrix();
    Vec pm = g.to_modes(phi);
    pm(0) = 0.0;
    const int m = n - 1;
    const Mat S = prm.rho2 * L1.bottomRightCorner(m, m) + prm.rho1 * L2.bottomRightCorner(m, m);
    Eigen::PartialPivLU<Mat> lu(S);
    Vec p1 = Vec::Zero(n);
    p1.tail(m) = lu.solve(Vec(-(L2 * pm).tail(m)));
    if (!p1.allFinite()) throw SolverSingular("transmission operator is singular");
    const Vec p2 = (pm + prm.rho1 * p1) / prm.rho2;

    TransmissionSolution t;
    t.psi1_modes = p1;
    t.psi2_modes = p2;
    t.psi1 = g.to_values(p1);
    t.psi2 = g.to_values(p2);
    t.dtn1 = g.to_values(Vec(L1 * p1));
    t.dtn2 = g.to_values(Vec(L2 * p2));
    t.chi1 = r1.lifted(p1);
    t.chi2 = r2.lifted(p2);
    t.energy1 = r1.energy(p1);
    t.energy2 = r2.energy(p2);
    return t;
}

double hamiltonian_full(const PeriodicGrid& g, const ScalarField& zeta, const ScalarField& phi,
                        const ScalarField& b, const NondimParams& prm, int P) {
    InterfaceState s{zeta, b};
    const double pot = 0.5 * g.to_modes(zeta).squaredNorm();
    if (phi.cwiseAbs().maxCoeff() == 0.0) return pot;
    const TransmissionSolution t = solve_transmission(g, phi, s, prm, P);
    return 0.5 * (prm.rho1 * t.energy1 + prm.rho2 * t.energy2) + pot;
}

std::pair<ScalarField, ScalarField> bernoulli_full(const PeriodicGrid& g,
                                                   const TransmissionSolution& t,
                                                   const InterfaceState& s,
                                                   const NondimParams& prm) {
    const double d2 = prm.delta * prm.delta;
    const Vec zx = deriv(g, s.zeta);
    const Vec p1x = g.to_values(g.d_modes(t.psi1_modes));
    const Vec p2x = g.to_values(g.d_modes(t.psi2_modes));
    const Vec den = (1.0 + d2 * zx.array().square()).matrix();
    auto pad = [&](const Vec& v) { return g.padded_from_values(v); };
    auto back = [&](const Vec& p) { return g.to_values(g.from_padded(p)); };
    const Vec zxp = pad(zx), denp = pad(den);
    const Vec n1 = pad(t.dtn1) - zxp.cwiseProduct(pad(p1x));
    const Vec n2 = pad(t.dtn2) + zxp.cwiseProduct(pad(p2x));
    const Vec B1 = back(Vec(0.5 * pad(p1x).cwiseAbs2() - 0.5 * d2 * n1.cwiseAbs2().cwiseQuotient(denp)));
    const Vec B2 = back(Vec(0.5 * pad(p2x).cwiseAbs2() - 0.5 * d2 * n2.cwiseAbs2().cwiseQuotient(denp)));
    return {B1, B2};
}

}  // namespace kakinuma
