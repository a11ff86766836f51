#include "doctest.h"
#include "kakinuma/errors.hpp"
#include "kakinuma/reference.hpp"
#include "oracles.hpp"

using namespace kakinuma;

namespace {
Vec trig(const PeriodicGrid& g, double a1, double b2, double c3) {
    return oracle::sample(g, [=](double x) {
        return a1 * std::cos(x) + b2 * std::sin(2 * x) + c3 * std::cos(3 * x + 0.4);
    });
}
}  // namespace

TEST_SUITE("reference_laplace") {

TEST_CASE("flat symbols") {
    auto p = validate_params(0.5, 1.0, 0.1);
    CHECK(flat_dtn_symbol(0.0, p, 1) == 0.0);
    CHECK(flat_dtn_symbol(1.0, p, 1) == doctest::Approx(10.0 * std::tanh(0.1)).epsilon(1e-15));
    CHECK(flat_dtn_symbol(1.0, p, 1) == doctest::Approx(0.9966799462495582).epsilon(1e-12));
    auto q = validate_params(0.45, 0.75, 1e-5);
    CHECK(flat_dtn_symbol(1.0, q, 2) / (q.h2 * 1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("chebyshev line") {
    auto c = ChebyshevLine::make(16, -2.0, 0.0);
    CHECK(c.z(0) == doctest::Approx(0.0));
    CHECK(c.z(16) == doctest::Approx(-2.0));
    CHECK(c.w.sum() == doctest::Approx(2.0).epsilon(1e-14));
    const Vec z3 = c.z.array().cube().matrix();
    CHECK((c.D * z3 - 3.0 * c.z.cwiseAbs2()).cwiseAbs().maxCoeff() <= 1e-11);
    CHECK(c.w.dot(c.z.array().pow(4).matrix()) == doctest::Approx(32.0 / 5.0).epsilon(1e-13));
}

TEST_CASE("flat state reproduces the symbol mode by mode") {
    PeriodicGrid g(32);
    auto prm = validate_params(0.45, 0.75, 0.2);
    auto flat = InterfaceState::flat(g);
    for (int l : {1, 2}) {
        LayerReference ref(g, flat, prm, l, 24);
        const Mat D = ref.dtn_matrix();
        for (int idx = 1; idx < g.modes(); ++idx) {
            const double k = g.wavenumber(idx);
            if (k > g.M() / 4) continue;
            CHECK(std::abs(D(idx, idx) - flat_dtn_symbol(k, prm, l)) <= 1e-9 * flat_dtn_symbol(k, prm, l));
        }
        const Vec c = oracle::sample(g, [](double x) { return std::cos(5 * x); });
        const Vec out = full_dtn(g, c, flat, prm, l, 24);
        CHECK((out - flat_dtn_symbol(5, prm, l) * c).cwiseAbs().maxCoeff() <= 1e-9 * flat_dtn_symbol(5, prm, l));
        CHECK(full_dtn(g, Vec::Zero(32), flat, prm, l, 16).norm() == 0.0);
    }
}

TEST_CASE("spectral convergence under vertical refinement") {
    PeriodicGrid g(32);
    auto prm = validate_params(0.45, 0.75, 0.7);
    InterfaceState st{Vec(0.2 * oracle::sample(g, [](double x) { return std::sin(x); })), Vec::Zero(32)};
    const Vec phi = trig(g, 1, 0.3, 0.1);
    for (int l : {1, 2}) {
        const Vec ref = full_dtn(g, phi, st, prm, l, 48);
        double prev = 0.0;
        for (int P : {8, 16}) {
            const double e = (full_dtn(g, phi, st, prm, l, P) - ref).norm() / ref.norm();
            if (P == 16) CHECK(prev / std::max(e, 1e-16) >= 10.0);
            prev = e;
        }
        ResolutionCheck rc;
        full_dtn(g, phi, st, prm, l, 24, &rc);
        CHECK_FALSE(rc.warning);
        ResolutionCheck coarse;
        full_dtn(g, phi, st, prm, l, 8, &coarse, 1e-14);
        CHECK(coarse.warning);
    }
}

TEST_CASE("volume energy equals the flux pairing") {
    PeriodicGrid g(32);
    auto prm = validate_params(0.45, 0.75, 0.3);
    InterfaceState st{trig(g, 0.05, 0.03, -0.01), Vec(0.1 * prm.h2 * oracle::sample(g, [](double x) { return std::sin(2 * x); }))};
    const Vec pm = g.to_modes(trig(g, 1, 0.4, 0.2));
    for (int l : {1, 2}) {
        LayerReference ref(g, st, prm, l, 24);
        const double E = ref.energy(pm);
        const double F = pm.dot(ref.apply_dtn(pm));
        CHECK(E == doctest::Approx(F).epsilon(1e-11));
    }
}

TEST_CASE("transmission problem") {
    PeriodicGrid g(32);
    auto sym = validate_params(0.5, 1.0, 0.1);
    auto flat = InterfaceState::flat(g);
    const Vec c = oracle::sample(g, [](double x) { return std::cos(x); });
    auto t = solve_transmission(g, c, flat, sym, 16);
    CHECK((t.psi1 + c).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((t.psi2 - c).cwiseAbs().maxCoeff() <= 1e-10);
    auto z = solve_transmission(g, Vec::Zero(32), flat, sym, 16);
    CHECK(z.psi1.norm() + z.psi2.norm() == 0.0);

    // flat energy identity with the symbol of (rho1 L2 + rho2 L1)^{-1} L1 L2
    auto prm = validate_params(0.45, 0.75, 0.2);
    const Vec phi = trig(g, 1, 0.5, 0.25);
    auto tr = solve_transmission(g, phi, flat, prm, 24);
    const Vec pm = g.to_modes(phi);
    double ref = 0.0;
    for (int i = 1; i < g.modes(); ++i) {
        const double k = g.wavenumber(i);
        const double s1 = flat_dtn_symbol(k, prm, 1), s2 = flat_dtn_symbol(k, prm, 2);
        ref += s1 * s2 / (prm.rho1 * s2 + prm.rho2 * s1) * pm(i) * pm(i);
    }
    CHECK(prm.rho1 * tr.energy1 + prm.rho2 * tr.energy2 == doctest::Approx(ref).epsilon(1e-8));
    // transmission conditions
    CHECK((tr.dtn1 + tr.dtn2).cwiseAbs().maxCoeff() <= 1e-10 * tr.dtn2.cwiseAbs().maxCoeff());
    CHECK((prm.rho2 * tr.psi2 - prm.rho1 * tr.psi1 - phi).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("full hamiltonian") {
    PeriodicGrid g(32);
    auto sym = validate_params(0.5, 1.0, 0.1);
    auto flat = InterfaceState::flat(g);
    const Vec c = oracle::sample(g, [](double x) { return std::cos(x); });
    CHECK(hamiltonian_full(g, flat.zeta, c, flat.b, sym, 16) ==
          doctest::Approx(0.5 * 0.9966799462495582 * M_PI).epsilon(1e-10));
    CHECK(hamiltonian_full(g, flat.zeta, Vec::Zero(32), flat.b, sym, 16) == 0.0);
    const Vec z = 0.1 * c;
    CHECK(hamiltonian_full(g, z, Vec::Zero(32), flat.b, sym, 16) == doctest::Approx(0.5 * 0.01 * M_PI));

    // relabeling symmetry for symmetric parameters and a flat bottom
    const Vec zeta = trig(g, 0.05, 0.02, 0);
    const Vec phi = trig(g, 1, 0.3, 0.1);
    const double a = hamiltonian_full(g, zeta, phi, flat.b, sym, 24);
    const double b = hamiltonian_full(g, Vec(-zeta), Vec(-phi), flat.b, sym, 24);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

}
