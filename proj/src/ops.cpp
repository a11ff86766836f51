#include "kakinuma/ops.hpp"
#include "kakinuma/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kakinuma {

ScalarField thickness(const InterfaceState& s, const NondimParams& prm, int layer) {
    if (layer == 1) return (1.0 - s.zeta.array() / prm.h1).matrix();
    return (1.0 + (s.zeta - s.b).array() / prm.h2).matrix();
}

CoefficientTable::CoefficientTable(const std::vector<int>& exponents) : p(exponents) {
    const int K = static_cast<int>(p.size());
    e.assign(K, std::vector<Entry>(K));
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j < K; ++j) {
            Entry& t = e[i][j];
            const int s = p[i] + p[j];
            t.a = 1.0 / (s + 1);
            t.ea = s + 1;
            t.eb = s;
            t.ec = s - 1;
            if (s > 0) {
                t.bi = static_cast<double>(p[i]) / s;
                t.bj = static_cast<double>(p[j]) / s;
            }
            if (p[i] * p[j] != 0) t.c = static_cast<double>(p[i] * p[j]) / (s - 1);
            else t.ec = 0;
        }
    }
}

LayerOps::LayerOps(const PeriodicGrid& g, const InterfaceState& s, const NondimParams& prm,
                   const ExpansionSpec& spec, int layer)
    : g_(&g), layer_(layer), p_(spec.exponents(layer)), table_(p_) {
    if (layer != 1 && layer != 2) throw IndexOutOfRange("layer must be 1 or 2");
    if (s.zeta.size() != g.M() || s.b.size() != g.M())
        throw ConstraintViolation("interface state does not match the grid");
    const double h = prm.h(layer);
    hd2inv_ = 1.0 / (h * prm.delta * h * prm.delta);
    H_ = thickness(s, prm, layer);
    const Vec zp = g.padded_from_values(s.zeta);
    if (layer == 1) {
        Hpad_ = (1.0 - zp.array() / prm.h1).matrix();
    } else {
        const Vec bp = g.padded_from_values(s.b);
        Hpad_ = (1.0 + (zp - bp).array() / prm.h2).matrix();
    }
    if (H_.minCoeff() <= 0.0 || Hpad_.minCoeff() <= 0.0)
        throw CavitationError("non-cavitation violated: min H" + std::to_string(layer) + " = " +
                              std::to_string(std::min(H_.minCoeff(), Hpad_.minCoeff())));

    const int pmax = *std::max_element(p_.begin(), p_.end());
    const int emax = 2 * pmax + 1;
    Hpow_.resize(emax + 1);
    Hpow_[0] = Vec::Ones(Hpad_.size());
    for (int e = 1; e <= emax; ++e) Hpow_[e] = Hpow_[e - 1].cwiseProduct(Hpad_);

    aux_[0] = Vec::Ones(Hpad_.size());
    aux_[1] = Vec::Zero(Hpad_.size());
    aux_[2] = Vec::Zero(Hpad_.size());
    if (layer == 2 && s.b.cwiseAbs().maxCoeff() > 0.0) {
        has_b_ = true;
        const Vec bx = g.to_padded(g.d_modes(g.to_modes(s.b))) / prm.h2;
        aux_[1] = bx;
        aux_[2] = bx.cwiseProduct(bx);
    }
}

Vec LayerOps::hpow_padded(int e) const { return Hpow_.at(e); }

const Vec& LayerOps::aux_padded(Aux aux) const { return aux_[static_cast<int>(aux)]; }

const Mat& LayerOps::mult(int e, Aux aux) const {
    const auto key = std::make_pair(e, static_cast<int>(aux));
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Mat G;
    if (aux == Aux::One && e == 0) G = Mat::Identity(n(), n());
    else if (aux == Aux::One) G = g_->galerkin(Hpow_.at(e));
    else G = g_->galerkin(Hpow_.at(e).cwiseProduct(aux_padded(aux)));
    return cache_.emplace(key, std::move(G)).first->second;
}

Mat LayerOps::assemble_block(int i, int j, const std::function<Mat(int, Aux)>& coef) const {
    const auto& t = table_.at(i, j);
    const PeriodicGrid& g = *g_;
    // -d/dx (a H^ea d/dx)
    Mat out = -t.a * g.d_left(g.d_right(coef(t.ea, Aux::One)));
    if (t.c != 0.0) {
        out += (t.c * hd2inv_) * coef(t.ec, Aux::One);
        if (has_b_) out += t.c * coef(t.ec, Aux::Bx2);
    }
    if (has_b_ && (t.bi != 0.0 || t.bj != 0.0)) {
        const Mat G = coef(t.eb, Aux::Bx);
        if (t.bj != 0.0) out += t.bj * g.d_left(G);
        if (t.bi != 0.0) out -= t.bi * g.d_right(G);
    }
    return out;
}

Mat LayerOps::block(int i, int j) const {
    return assemble_block(i, j, [this](int e, Aux a) { return mult(e, a); });
}

Mat LayerOps::block_variation(int i, int j, const Vec& Hdot) const {
    return assemble_block(i, j, [this, &Hdot](int e, Aux a) -> Mat {
        if (e == 0) return Mat::Zero(n(), n());
        Vec c = static_cast<double>(e) * Hpow_.at(e - 1).cwiseProduct(Hdot);
        if (a != Aux::One) c = c.cwiseProduct(aux_padded(a));
        return g_->galerkin(c);
    });
}

Mat LayerOps::L_matrix() const {
    const int K = this->K(), m = n();
    Mat L(K * m, K * m);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) L.block(i * m, j * m, m, m) = block(i, j);
    return L;
}

Mat LayerOps::calL_row(int i) const {
    const int K = this->K(), m = n();
    if (i < 0 || i >= K) throw IndexOutOfRange("calL index out of range");
    Mat R(m, K * m);
    for (int j = 0; j < K; ++j) {
        Mat b = block(i, j);
        if (i > 0) b -= mult(p_[i]) * block(0, j);
        R.block(0, j * m, m, m) = b;
    }
    return R;
}

Mat LayerOps::calL_row_variation(int i, const Vec& Hdot) const {
    const int K = this->K(), m = n();
    if (i < 0 || i >= K) throw IndexOutOfRange("calL index out of range");
    Mat R(m, K * m);
    Mat dpow;
    if (i > 0) dpow = g_->galerkin(static_cast<double>(p_[i]) * Hpow_.at(p_[i] - 1).cwiseProduct(Hdot));
    for (int j = 0; j < K; ++j) {
        Mat b = block_variation(i, j, Hdot);
        if (i > 0) b -= dpow * block(0, j) + mult(p_[i]) * block_variation(0, j, Hdot);
        R.block(0, j * m, m, m) = b;
    }
    return R;
}

Mat LayerOps::l_row() const {
    const int K = this->K(), m = n();
    Mat R(m, K * m);
    for (int j = 0; j < K; ++j) R.block(0, j * m, m, m) = mult(p_[j]);
    return R;
}

Mat LayerOps::lprime_row() const {
    const int K = this->K(), m = n();
    Mat R = Mat::Zero(m, K * m);
    for (int j = 0; j < K; ++j)
        if (p_[j] > 0) R.block(0, j * m, m, m) = p_[j] * mult(p_[j] - 1);
    return R;
}

Mat LayerOps::lsecond_row() const {
    const int K = this->K(), m = n();
    Mat R = Mat::Zero(m, K * m);
    for (int j = 0; j < K; ++j)
        if (p_[j] > 1) R.block(0, j * m, m, m) = (p_[j] * (p_[j] - 1)) * mult(p_[j] - 2);
    return R;
}

Vec LayerOps::u_modes(const Vec& st) const {
    const int m = n();
    Vec u = Vec::Zero(m);
    for (int j = 0; j < K(); ++j) {
        const auto phi = st.segment(j * m, m);
        u += mult(p_[j]) * g_->d_modes(phi);
        if (has_b_ && p_[j] > 0) u -= p_[j] * (mult(p_[j] - 1, Aux::Bx) * phi);
    }
    return u;
}

Vec LayerOps::lprime_dot_modes(const Vec& st) const {
    const int m = n();
    Vec w = Vec::Zero(m);
    for (int j = 0; j < K(); ++j)
        if (p_[j] > 0) w += p_[j] * (mult(p_[j] - 1) * st.segment(j * m, m));
    return w;
}

Vec LayerOps::stack(const PotentialVec& values) const {
    if (values.cols() != K())
        throw ConstraintViolation("potential vector has " + std::to_string(values.cols()) +
                                  " components, expected " + std::to_string(K()));
    const int m = n();
    Vec st(K() * m);
    for (int j = 0; j < K(); ++j) st.segment(j * m, m) = g_->to_modes(Vec(values.col(j)));
    return st;
}

PotentialVec LayerOps::unstack(const Vec& st) const {
    const int m = n();
    PotentialVec out(g_->M(), K());
    for (int j = 0; j < K(); ++j) out.col(j) = g_->to_values(Vec(st.segment(j * m, m)));
    return out;
}

PotentialVec l_vector(const ScalarField& H, const std::vector<int>& p, int order) {
    if (H.minCoeff() <= 0.0) throw CavitationError("l-vector needs H > 0");
    const int K = static_cast<int>(p.size());
    PotentialVec out = PotentialVec::Zero(H.size(), K);
    for (int i = 0; i < K; ++i) {
        double c = 1.0;
        int e = p[i];
        for (int d = 0; d < order; ++d) {
            c *= e;
            --e;
        }
        if (c == 0.0) continue;
        for (int x = 0; x < H.size(); ++x) {
            double v = 1.0;
            for (int r = 0; r < e; ++r) v *= H(x);
            out(x, i) = c * v;
        }
    }
    return out;
}

PotentialVec l_vector(const ScalarField& H, const ExpansionSpec& spec, int layer, int order) {
    return l_vector(H, spec.exponents(layer), order);
}

PotentialVec apply_L(const PeriodicGrid& g, const PotentialVec& phi, const InterfaceState& s,
                     const NondimParams& prm, const ExpansionSpec& spec, int layer) {
    LayerOps ops(g, s, prm, spec, layer);
    return ops.unstack(ops.L_matrix() * ops.stack(phi));
}

PotentialVec apply_L1(const PeriodicGrid& g, const PotentialVec& phi1, const InterfaceState& s,
                      const NondimParams& prm, const ExpansionSpec& spec) {
    return apply_L(g, phi1, s, prm, spec, 1);
}

PotentialVec apply_L2(const PeriodicGrid& g, const PotentialVec& phi2, const InterfaceState& s,
                      const NondimParams& prm, const ExpansionSpec& spec) {
    return apply_L(g, phi2, s, prm, spec, 2);
}

ScalarField apply_Lij(const PeriodicGrid& g, const ScalarField& f, const InterfaceState& s,
                      const NondimParams& prm, const ExpansionSpec& spec, int layer, int i, int j) {
    LayerOps ops(g, s, prm, spec, layer);
    if (i < 0 || j < 0 || i >= ops.K() || j >= ops.K()) throw IndexOutOfRange("L_ij index");
    return g.to_values(Vec(ops.block(i, j) * g.to_modes(f)));
}

ScalarField apply_calL(const PeriodicGrid& g, const PotentialVec& phi, const InterfaceState& s,
                       const NondimParams& prm, const ExpansionSpec& spec, int layer, int i) {
    LayerOps ops(g, s, prm, spec, layer);
    return g.to_values(Vec(ops.calL_row(i) * ops.stack(phi)));
}

PotentialVec apply_L2_alternate(const PeriodicGrid& g, const PotentialVec& phi2,
                                const InterfaceState& s, const NondimParams& prm,
                                const ExpansionSpec& spec) {
    const auto p = spec.exponents(2);
    const int K = static_cast<int>(p.size());
    if (phi2.cols() != K) throw ConstraintViolation("potential vector size mismatch");

    auto pad = [&](const Vec& modes) { return g.to_padded(modes); };
    const Vec zm = g.to_modes(s.zeta), bm = g.to_modes(s.b);
    const Vec H = (1.0 + (pad(zm) - pad(bm)).array() / prm.h2).matrix();
    if (H.minCoeff() <= 0.0) throw CavitationError("non-cavitation violated in layer 2");
    const Vec Hx = (pad(g.d_modes(zm)) - pad(g.d_modes(bm))) / prm.h2;
    const Vec bx = pad(g.d_modes(bm)) / prm.h2;
    const Vec bxx = pad(g.d_modes(g.d_modes(bm))) / prm.h2;
    const double hd2 = 1.0 / std::pow(prm.h2 * prm.delta, 2);
    auto Hp = [&](int e) { return H.array().pow(static_cast<double>(e)).matrix().eval(); };

    std::vector<Vec> f(K), fx(K), fxx(K);
    for (int j = 0; j < K; ++j) {
        const Vec m = g.to_modes(Vec(phi2.col(j)));
        f[j] = pad(m);
        fx[j] = pad(g.d_modes(m));
        fxx[j] = pad(g.d_modes(g.d_modes(m)));
    }
    Vec u2 = Vec::Zero(H.size());
    for (int j = 0; j < K; ++j) {
        u2 += Hp(p[j]).cwiseProduct(fx[j]);
        if (p[j] > 0) u2 -= (p[j] * Hp(p[j] - 1)).cwiseProduct(f[j]).cwiseProduct(bx);
    }
    const Vec uHx = u2.cwiseProduct(Hx);

    PotentialVec out(g.M(), K);
    for (int i = 0; i < K; ++i) {
        Vec acc = -Hp(p[i]).cwiseProduct(uHx);
        for (int j = 0; j < K; ++j) {
            const int sum = p[i] + p[j];
            const Vec A = Hp(sum + 1) / (sum + 1);
            acc -= A.cwiseProduct(fxx[j]);
            if (p[i] * p[j] != 0) {
                const Vec C = Hp(sum - 1) * (static_cast<double>(p[i] * p[j]) / (sum - 1));
                acc += hd2 * C.cwiseProduct(f[j]);
                acc += C.cwiseProduct(bx).cwiseProduct(bx).cwiseProduct(f[j]);
            }
            if (sum > 0) {
                const Vec B = Hp(sum) * (static_cast<double>(p[j]) / sum);
                const Vec Bt = Hp(sum) * (static_cast<double>(p[j] - p[i]) / sum);
                acc += Bt.cwiseProduct(bx).cwiseProduct(fx[j]);
                acc += B.cwiseProduct(bxx).cwiseProduct(f[j]);
            }
        }
        out.col(i) = g.to_values(g.from_padded(acc));
    }
    return out;
}

Velocities compute_velocities(const PeriodicGrid& g, const PotentialVec& phi1,
                              const PotentialVec& phi2, const InterfaceState& s,
                              const NondimParams& prm, const ExpansionSpec& spec) {
    LayerOps o1(g, s, prm, spec, 1), o2(g, s, prm, spec, 2);
    const Vec s1 = o1.stack(phi1), s2 = o2.stack(phi2);
    Velocities v;
    v.u1 = g.to_values(o1.u_modes(s1));
    v.w1 = -g.to_values(o1.lprime_dot_modes(s1));
    v.u2 = g.to_values(o2.u_modes(s2));
    v.w2 = g.to_values(o2.lprime_dot_modes(s2));
    return v;
}

ScalarField bernoulli_BN(const PeriodicGrid& g, const PotentialVec& phi, const InterfaceState& s,
                         const NondimParams& prm, const ExpansionSpec& spec, int layer) {
    LayerOps ops(g, s, prm, spec, layer);
    const Vec st = ops.stack(phi);
    const Vec u = g.to_values(ops.u_modes(st));
    Vec w = g.to_values(ops.lprime_dot_modes(st));
    if (layer == 1) w = -w;
    const Vec dtn = g.to_values(Vec(ops.calL_row(0) * st));
    const Vec kin = 0.5 * (g.product(u, u) + ops.inv_layer_delta2() * g.product(w, w));
    const Vec wl = g.product(w, dtn);
    return layer == 1 ? Vec(kin + wl) : Vec(kin - wl);
}

}  // namespace kakinuma
