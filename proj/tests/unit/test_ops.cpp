#include "doctest.h"
#include "kakinuma/errors.hpp"
#include "kakinuma/ops.hpp"
#include "oracles.hpp"

#include <random>

using namespace kakinuma;

namespace {

struct Setup {
    NondimParams prm = validate_params(0.45, 0.75, 0.3);
    PeriodicGrid g{64};
    PeriodicGrid fine{256};
};

Vec trig(const PeriodicGrid& g, double a0, double a1, double b2, double c3) {
    return oracle::sample(g, [=](double x) {
        return a0 + a1 * std::cos(x) + b2 * std::sin(2 * x) + c3 * std::cos(3 * x + 0.4);
    });
}

PotentialVec random_potential(const PeriodicGrid& g, int K, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    PotentialVec P(g.M(), K);
    for (int j = 0; j < K; ++j) P.col(j) = trig(g, n(rng), n(rng), n(rng), n(rng));
    return P;
}

}  // namespace

TEST_SUITE("kakinuma_ops") {

TEST_CASE("l vectors") {
    auto s1 = ExpansionSpec::make(2, Hypothesis::H1);
    Vec one = Vec::Ones(4);
    auto l0 = l_vector(one, s1, 1, 0);
    CHECK(l0.cwiseAbs().minCoeff() == 1.0);
    auto l1 = l_vector(one, s1, 1, 1);
    CHECK(l1(0, 0) == 0.0);
    CHECK(l1(0, 1) == 2.0);
    CHECK(l1(0, 2) == 4.0);
    auto s2 = ExpansionSpec::make(1, Hypothesis::H2);
    auto l2 = l_vector(Vec::Constant(3, 2.0), s2, 2, 0);
    CHECK(l2(1, 0) == 1.0);
    CHECK(l2(1, 1) == 2.0);
    CHECK(l2(1, 2) == 4.0);
    auto l2pp = l_vector(Vec::Constant(3, 2.0), s2, 2, 2);
    CHECK(l2pp(0, 1) == 0.0);
    CHECK(l2pp(0, 2) == 2.0);
}

TEST_CASE("coefficient table follows the 0/0 convention") {
    CoefficientTable t({0, 1, 2});
    CHECK(t.at(0, 0).c == 0.0);
    CHECK(t.at(0, 0).bi == 0.0);
    CHECK(t.at(0, 0).bj == 0.0);
    CHECK(t.at(0, 1).c == 0.0);
    CHECK(t.at(1, 1).c == doctest::Approx(1.0));
    CHECK(t.at(1, 2).c == doctest::Approx(1.0));
    CHECK(t.at(2, 2).c == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("constant vectors are annihilated") {
    Setup S;
    InterfaceState st{trig(S.g, 0, 0.05, 0.03, 0.01), trig(S.g, 0, 0.02, 0.05, 0)};
    for (auto hyp : {Hypothesis::H1, Hypothesis::H2}) {
        auto spec = ExpansionSpec::make(1, hyp);
        for (int l : {1, 2}) {
            PotentialVec phi = PotentialVec::Zero(S.g.M(), spec.count(l));
            phi.col(0).setConstant(2.5);
            CHECK(apply_L(S.g, phi, st, S.prm, spec, l).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK(apply_calL(S.g, phi, st, S.prm, spec, l, 1).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("flat single-mode values") {
    Setup S;
    auto st = InterfaceState::flat(S.g);
    auto spec0 = ExpansionSpec::make(0, Hypothesis::H1);
    const Vec c3 = oracle::sample(S.g, [](double x) { return std::cos(3 * x); });
    PotentialVec phi = c3;
    auto r = apply_L1(S.g, phi, st, S.prm, spec0);
    CHECK((r.col(0) - 9.0 * c3).cwiseAbs().maxCoeff() <= 1e-10);

    auto spec1 = ExpansionSpec::make(1, Hypothesis::H1);
    const Vec c1 = oracle::sample(S.g, [](double x) { return std::cos(x); });
    PotentialVec phi2 = PotentialVec::Zero(S.g.M(), 2);
    phi2.col(1) = c1;
    auto r2 = apply_L1(S.g, phi2, st, S.prm, spec1);
    const double hd2 = 1.0 / std::pow(S.prm.h1 * S.prm.delta, 2);
    CHECK((r2.col(1) - (4.0 / 3.0 * hd2 + 0.2) * c1).cwiseAbs().maxCoeff() <= 1e-11);
    CHECK((r2.col(0) - c1 / 3.0).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("operators against a term-by-term pointwise oracle") {
    Setup S;
    std::mt19937_64 rng(11);
    auto zeta = [&](const PeriodicGrid& g) { return trig(g, 0, 0.06, -0.04, 0.02); };
    auto bot = [&](const PeriodicGrid& g) { return Vec(0.1 * S.prm.h2 * oracle::sample(g, [](double x) { return std::sin(x); })); };
    for (auto hyp : {Hypothesis::H1, Hypothesis::H2}) {
        auto spec = ExpansionSpec::make(1, hyp);
        for (int l : {1, 2}) {
            for (bool with_b : {false, true}) {
                if (l == 1 && with_b) continue;
                const int K = spec.count(l);
                std::mt19937_64 r2(rng());
                PotentialVec phi = random_potential(S.g, K, r2);
                InterfaceState st{zeta(S.g), with_b ? bot(S.g) : Vec(Vec::Zero(S.g.M()))};
                auto got = apply_L(S.g, phi, st, S.prm, spec, l);

                // fine-grid oracle
                std::vector<Vec> pf;
                for (int j = 0; j < K; ++j) {
                    Vec m = S.g.to_modes(Vec(phi.col(j)));
                    Vec fine = Vec::Zero(S.fine.M());
                    // re-sample the same trigonometric polynomial on the fine grid
                    const Vec xf = S.fine.nodes();
                    for (int q = 0; q < S.fine.M(); ++q) {
                        double v = m(0) / std::sqrt(2 * M_PI);
                        for (int k = 1; k < S.g.M() / 2; ++k)
                            v += std::sqrt(1.0 / M_PI) * (m(2 * k - 1) * std::cos(k * xf(q)) + m(2 * k) * std::sin(k * xf(q)));
                        fine(q) = v;
                    }
                    pf.push_back(fine);
                }
                const Vec zf = zeta(S.fine);
                const Vec bf = with_b ? bot(S.fine) : Vec(Vec::Zero(S.fine.M()));
                Vec H = l == 1 ? Vec((1.0 - zf.array() / S.prm.h1).matrix())
                               : Vec((1.0 + (zf - bf).array() / S.prm.h2).matrix());
                Vec bxh = l == 2 ? Vec(oracle::dx(bf) / S.prm.h2) : Vec(Vec::Zero(S.fine.M()));
                const double hd2 = 1.0 / std::pow(S.prm.h(l) * S.prm.delta, 2);
                for (int i = 0; i < K; ++i) {
                    Vec ref = oracle::coarsen(oracle::L_row(i, spec.exponents(l), H, bxh, hd2, pf), S.g.M());
                    CHECK((got.col(i) - ref).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + ref.cwiseAbs().maxCoeff()));
                }
                if (l == 2) {
                    auto alt = apply_L2_alternate(S.g, phi, st, S.prm, spec);
                    CHECK((alt - got).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + got.cwiseAbs().maxCoeff()));
                }
            }
        }
    }
}

TEST_CASE("layer-2 operator reduces to the layer-1 formula for a flat bottom") {
    Setup S;
    auto spec = ExpansionSpec::make(1, Hypothesis::H1);
    InterfaceState st{trig(S.g, 0, 0.05, 0.02, 0), Vec::Zero(S.g.M())};
    // a layer-1 operator with h2 in place of h1 and -zeta*h1/h2 so that H matches
    std::mt19937_64 rng(3);
    PotentialVec phi = random_potential(S.g, 2, rng);
    auto r2 = apply_L2(S.g, phi, st, S.prm, spec);
    NondimParams swapped = S.prm;
    swapped.h1 = S.prm.h2;
    InterfaceState st1{Vec(-st.zeta), Vec::Zero(S.g.M())};
    auto r1 = apply_L1(S.g, phi, st1, swapped, spec);
    CHECK((r1 - r2).cwiseAbs().maxCoeff() <= 1e-11 * (1 + r2.cwiseAbs().maxCoeff()));
}

TEST_CASE("adjoint symmetry and divergence structure") {
    Setup S;
    InterfaceState st{trig(S.g, 0, 0.07, 0.03, -0.02), trig(S.g, 0, 0.04, 0, 0.03)};
    std::mt19937_64 rng(5);
    for (auto hyp : {Hypothesis::H1, Hypothesis::H2}) {
        auto spec = ExpansionSpec::make(2, hyp);
        for (int l : {1, 2}) {
            LayerOps o(S.g, st, S.prm, spec, l);
            for (int i = 0; i < o.K(); ++i)
                for (int j = 0; j < o.K(); ++j) {
                    const Vec f = S.g.to_modes(trig(S.g, 0.3, 1, -0.5, 0.2));
                    const Vec h = S.g.to_modes(trig(S.g, -0.1, 0.4, 0.7, -0.3));
                    const double lhs = h.dot(o.block(i, j) * f);
                    const double rhs = f.dot(o.block(j, i) * h);
                    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1 + std::abs(lhs)));
                }
            PotentialVec phi = random_potential(S.g, o.K(), rng);
            auto Lp = apply_L(S.g, phi, st, S.prm, spec, l);
            CHECK(std::abs(S.g.mean(Lp.col(0))) <= 1e-12 * (1 + Lp.col(0).cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("coercivity on flat states") {
    Setup S;
    auto st = InterfaceState::flat(S.g);
    auto spec = ExpansionSpec::make(2, Hypothesis::H2);
    std::mt19937_64 rng(9);
    for (int l : {1, 2}) {
        LayerOps o(S.g, st, S.prm, spec, l);
        const Mat L = o.L_matrix();
        for (int k = 0; k < 50; ++k) {
            PotentialVec phi = random_potential(S.g, o.K(), rng);
            const Vec s = o.stack(phi);
            const double q = s.dot(L * s);
            double ref = 0.0;
            for (int j = 0; j < o.K(); ++j) {
                const Vec m = s.segment(j * o.n(), o.n());
                ref += S.g.d_modes(m).squaredNorm();
                if (j > 0) ref += o.inv_layer_delta2() * m.squaredNorm();
            }
            CHECK(q >= 0.0);
            CHECK(q >= 1e-3 * ref);
        }
    }
}

TEST_CASE("velocities and the chain rule") {
    Setup S;
    InterfaceState st{trig(S.g, 0, 0.05, 0.02, 0.01), trig(S.g, 0, 0.03, -0.02, 0)};
    auto spec = ExpansionSpec::make(1, Hypothesis::H2);
    std::mt19937_64 rng(21);
    PotentialVec p1 = random_potential(S.g, 2, rng), p2 = random_potential(S.g, 3, rng);
    auto v = compute_velocities(S.g, p1, p2, st, S.prm, spec);
    const Vec zx = deriv(S.g, st.zeta);
    const Vec H1 = thickness(st, S.prm, 1), H2 = thickness(st, S.prm, 2);
    Vec t1 = Vec::Zero(S.g.M()), t2 = Vec::Zero(S.g.M());
    for (int j = 0; j < 2; ++j) t1 += oracle::powv(H1, 2 * j).cwiseProduct(p1.col(j));
    for (int j = 0; j < 3; ++j) t2 += oracle::powv(H2, j).cwiseProduct(p2.col(j));
    CHECK((deriv(S.g, t1) - v.u1 - v.w1.cwiseProduct(zx) / S.prm.h1).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((deriv(S.g, t2) - v.u2 - v.w2.cwiseProduct(zx) / S.prm.h2).cwiseAbs().maxCoeff() <= 1e-10);

    auto z = compute_velocities(S.g, PotentialVec::Zero(S.g.M(), 2), PotentialVec::Zero(S.g.M(), 3), st, S.prm, spec);
    CHECK(z.u1.norm() + z.u2.norm() + z.w1.norm() + z.w2.norm() == 0.0);

    auto spec0 = ExpansionSpec::make(0, Hypothesis::H1);
    auto v0 = compute_velocities(S.g, p1.leftCols(1), p2.leftCols(1), st, S.prm, spec0);
    CHECK((v0.u1 - deriv(S.g, p1.col(0))).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(v0.w1.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bernoulli terms against a pointwise assembly") {
    Setup S;
    InterfaceState st{trig(S.g, 0, 0.04, 0.02, 0), trig(S.g, 0, 0.03, 0, 0)};
    auto spec = ExpansionSpec::make(1, Hypothesis::H2);
    const Vec c = oracle::sample(S.g, [](double x) { return std::cos(x); });
    const Vec s2 = oracle::sample(S.g, [](double x) { return std::sin(2 * x); });
    PotentialVec p2(S.g.M(), 3);
    p2 << c, 0.1 * s2, 0.05 * c;
    const Vec H2 = thickness(st, S.prm, 2);
    const Vec bxh = deriv(S.g, st.b) / S.prm.h2;
    Vec u = Vec::Zero(S.g.M()), w = Vec::Zero(S.g.M());
    for (int j = 0; j < 3; ++j) {
        u += oracle::powv(H2, j).cwiseProduct(deriv(S.g, p2.col(j)));
        if (j > 0) {
            u -= j * oracle::powv(H2, j - 1).cwiseProduct(p2.col(j)).cwiseProduct(bxh);
            w += j * oracle::powv(H2, j - 1).cwiseProduct(p2.col(j));
        }
    }
    const Vec lam = apply_calL(S.g, p2, st, S.prm, spec, 2, 0);
    const double hd2 = 1.0 / std::pow(S.prm.h2 * S.prm.delta, 2);
    const Vec ref = 0.5 * (u.cwiseProduct(u) + hd2 * w.cwiseProduct(w)) - w.cwiseProduct(lam);
    const Vec got = bernoulli_BN(S.g, p2, st, S.prm, spec, 2);
    // the pointwise product aliases the top modes; the fields here are band limited well below M/3
    CHECK((got - ref).cwiseAbs().maxCoeff() <= 1e-10 * (1 + ref.cwiseAbs().maxCoeff()));

    auto flat = InterfaceState::flat(S.g);
    auto spec0 = ExpansionSpec::make(0, Hypothesis::H1);
    PotentialVec p1 = c;
    const Vec b1 = bernoulli_BN(S.g, p1, flat, S.prm, spec0, 1);
    CHECK((b1 - 0.5 * deriv(S.g, c).cwiseAbs2()).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(bernoulli_BN(S.g, PotentialVec::Zero(S.g.M(), 3), st, S.prm, spec, 2).norm() == 0.0);
}

TEST_CASE("cavitation and index errors") {
    Setup S;
    InterfaceState st{Vec::Constant(S.g.M(), S.prm.h1 * 1.1), Vec::Zero(S.g.M())};
    auto spec = ExpansionSpec::make(1, Hypothesis::H1);
    CHECK_THROWS_AS(LayerOps(S.g, st, S.prm, spec, 1), CavitationError);
    auto flat = InterfaceState::flat(S.g);
    CHECK_THROWS_AS(apply_calL(S.g, PotentialVec::Zero(S.g.M(), 2), flat, S.prm, spec, 1, 5), IndexOutOfRange);
}

}
