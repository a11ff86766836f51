#include "doctest.h"
#include "kakinuma/consistency.hpp"
#include "kakinuma/errors.hpp"
#include "oracles.hpp"

using namespace kakinuma;

namespace {

// Two-term per-mode system written out by hand for exponents (0, 2).
double symbol_n1(double xi, double hd) {
    const double x2 = xi * xi;
    const double a = x2 / 3.0 - x2;
    const double c = x2 / 5.0 + 4.0 / (3.0 * hd * hd) - x2 / 3.0;
    const double p1 = -a / (c - a);
    return x2 * (1.0 - p1) + x2 / 3.0 * p1;
}

}  // namespace

TEST_SUITE("consistency_lab") {

TEST_CASE("order fit recovers an exact power law") {
    std::vector<double> d = default_delta_sweep(), e;
    for (double x : d) e.push_back(3.0 * std::pow(x, 2));
    auto f = order_fit(d, e);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK_FALSE(f.inconclusive);
}

TEST_CASE("order fit excludes samples under the floor") {
    std::vector<double> d = default_delta_sweep(), e;
    for (double x : d) e.push_back(1e-3 * std::pow(x, 6));
    auto f = order_fit(d, e, 1e-13);
    CHECK(f.excluded.size() == 1);
    CHECK(f.slope == doctest::Approx(6.0).epsilon(1e-12));
    CHECK_THROWS_AS(order_fit(d, e, 1e-9), BelowNoiseFloor);
}

TEST_CASE("order fit rejects unordered deltas") {
    CHECK_THROWS_AS(order_fit({0.1, 0.2, 0.05, 0.02}, {1, 1, 1, 1}), ConstraintViolation);
    CHECK_THROWS_AS(order_fit({0.2, 0.1}, {1}), ConstraintViolation);
}

TEST_CASE("order fit flags scattered data") {
    auto f = order_fit({0.2, 0.1, 0.05, 0.02}, {1e-3, 1e-2, 1e-4, 1e-3});
    CHECK(f.inconclusive);
}

TEST_CASE("flat Kakinuma symbol") {
    auto prm = validate_params(0.3, 0.6, 0.1);
    auto s0 = ExpansionSpec::make(0, Hypothesis::H1);
    auto s1 = ExpansionSpec::make(1, Hypothesis::H1);
    for (double xi : {0.5, 1.0, 3.0}) {
        CHECK(kakinuma_flat_symbol(xi, prm, s0, 1) == doctest::Approx(xi * xi).epsilon(1e-15));
        CHECK(kakinuma_flat_symbol(xi, prm, s1, 1) ==
              doctest::Approx(symbol_n1(xi, prm.delta1())).epsilon(1e-13));
        CHECK(kakinuma_flat_symbol(xi, prm, s1, 2) ==
              doctest::Approx(symbol_n1(xi, prm.delta2())).epsilon(1e-13));
    }
}

TEST_CASE("dispersion tends to the long-wave limit") {
    auto prm = validate_params(0.3, 0.6, 0.1);
    for (int N : {0, 1, 2}) {
        auto d = dispersion_symbols(1e-3, prm, ExpansionSpec::make(N, Hypothesis::H1));
        CHECK(std::abs(d.omega2_full / 1e-6 - 1.0) <= 1e-6);
        CHECK(std::abs(d.omega2_kakinuma / 1e-6 - 1.0) <= 1e-6);
    }
    CHECK_THROWS_AS(dispersion_symbols(0.0, prm, ExpansionSpec::make(0, Hypothesis::H1)),
                    ConstraintViolation);
}

TEST_CASE("dispersion difference decays with the expected order") {
    const double rho1 = 0.3, h1 = 0.6;
    for (int N : {0, 1, 2}) {
        std::vector<double> d = default_delta_sweep(), e;
        for (double x : d)
            e.push_back(std::abs(
                dispersion_symbols(1.0, validate_params(rho1, h1, x), ExpansionSpec::make(N, Hypothesis::H1))
                    .difference));
        auto f = order_fit(d, e, 1e-30);
        CHECK(std::abs(f.slope - (4 * N + 2)) <= 0.3);
    }
}

TEST_CASE("flat r1 equals the symbol difference") {
    PeriodicGrid g(32);
    auto prm = validate_params(0.3, 0.6, 0.15);
    auto spec = ExpansionSpec::make(1, Hypothesis::H1);
    const Vec phi = oracle::sample(g, [](double x) { return std::cos(x) + 0.5 * std::sin(3 * x); });
    const Vec r = residual_r1_flat(g, phi, prm, spec);
    auto diff = [&](double xi) {
        return std::tanh(prm.delta1() * xi) * xi / prm.delta - prm.h1 * symbol_n1(xi, prm.delta1());
    };
    const Vec expect = oracle::sample(g, [&](double x) {
        return diff(1.0) * std::cos(x) + 0.5 * diff(3.0) * std::sin(3 * x);
    });
    CHECK((r - expect).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("full residual paths agree at a flat interface") {
    PeriodicGrid g(32);
    auto prm = validate_params(0.3, 0.6, 0.1);
    auto spec = ExpansionSpec::make(0, Hypothesis::H1);
    auto flat = InterfaceState::flat(g);
    const Vec phi = oracle::sample(g, [](double x) { return std::cos(x); });
    auto r = residuals_full_from_kakinuma(g, phi, phi, flat, prm, spec, 16);
    CHECK((r.r1 - residual_r1_flat(g, phi, prm, spec)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(r.norm_r1 > 0.0);
}

TEST_CASE("flat Hamiltonian equals half the dispersion times the mode norm") {
    PeriodicGrid g(32);
    const Vec zero = Vec::Zero(g.M());
    const Vec phi = oracle::sample(g, [](double x) { return std::cos(x); });
    auto prm = validate_params(0.3, 0.6, 0.1);
    for (int N : {0, 1}) {
        auto spec = ExpansionSpec::make(N, Hypothesis::H1);
        auto d = dispersion_symbols(1.0, prm, spec);
        CHECK(hamiltonian_kakinuma(g, zero, phi, zero, prm, spec) ==
              doctest::Approx(0.5 * M_PI * d.omega2_kakinuma).epsilon(1e-12));
    }
    CHECK(hamiltonian_kakinuma(g, zero, phi, zero, prm, ExpansionSpec::make(0, Hypothesis::H1)) ==
          doctest::Approx(0.5 * M_PI).epsilon(1e-13));
}

TEST_CASE("Hamiltonian error shrinks with N") {
    PeriodicGrid g(32);
    auto prm = validate_params(0.3, 0.6, 0.1);
    const Vec zeta = oracle::sample(g, [&](double x) { return 0.06 * std::sin(x); });
    const Vec phi = oracle::sample(g, [](double x) { return std::cos(x); });
    const Vec zero = Vec::Zero(g.M());
    const double e0 = std::abs(hamiltonian_error(g, zeta, phi, zero, prm, ExpansionSpec::make(0, Hypothesis::H1), 16));
    const double e1 = std::abs(hamiltonian_error(g, zeta, phi, zero, prm, ExpansionSpec::make(1, Hypothesis::H1), 16));
    CHECK(e1 < 1e-4 * e0);
}

TEST_CASE("Kakinuma residuals from full data") {
    PeriodicGrid g(32);
    const Vec phi = oracle::sample(g, [](double x) { return std::cos(x); });
    const Vec zero = Vec::Zero(g.M());
    std::vector<double> d = {0.2, 0.1, 0.05, 0.025}, e0, e1;
    for (double x : d) {
        auto prm = validate_params(0.3, 0.6, x);
        const Vec zeta = oracle::sample(g, [&](double y) { return 0.06 * std::sin(y); });
        e0.push_back(residuals_kakinuma_from_full(g, zeta, phi, zero, prm, ExpansionSpec::make(0, Hypothesis::H1), 16).norm_r1);
        e1.push_back(residuals_kakinuma_from_full(g, zeta, phi, zero, prm, ExpansionSpec::make(1, Hypothesis::H1), 16).norm_r1);
    }
    CHECK(std::abs(order_fit(d, e0).slope - 2.0) <= 0.2);
    CHECK(std::abs(order_fit(d, e1).slope - 6.0) <= 0.4);
}

TEST_CASE("sweep rows and fits") {
    SweepProfiles prof;
    SweepOptions opt;
    const std::vector<double> d = {0.2, 0.14, 0.1, 0.07};
    auto res = consistency_sweep(0.3, 0.6, {ExpansionSpec::make(0, Hypothesis::H1)}, d, prof, opt);
    REQUIRE(res.size() == 1);
    REQUIRE(res[0].rows.size() == d.size());
    for (const auto& r : res[0].rows) {
        CHECK(r.converged);
        CHECK(r.h1delta == doctest::Approx(0.6 * r.delta));
    }
    CHECK(std::abs(res[0].fit_H.slope - 2.0) <= 0.5);
    CHECK(std::abs(res[0].fit_r1.slope - 2.0) <= 0.5);
    auto again = consistency_sweep(0.3, 0.6, {ExpansionSpec::make(0, Hypothesis::H1)}, d, prof, opt);
    CHECK(again[0].rows[2].err_H == res[0].rows[2].err_H);
    SweepOptions par = opt;
    par.threads = 3;
    auto threaded = consistency_sweep(0.3, 0.6, {ExpansionSpec::make(0, Hypothesis::H1)}, d, prof, par);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(threaded[0].rows[i].delta == d[i]);
        CHECK(threaded[0].rows[i].err_H == res[0].rows[i].err_H);
        CHECK(threaded[0].rows[i].err_r1_flat == res[0].rows[i].err_r1_flat);
    }
    CHECK(std::abs(res[0].fit_r1_flat.slope - 2.0) <= 0.1);
    CHECK_THROWS_AS(consistency_sweep(0.3, 0.6, {ExpansionSpec::make(0, Hypothesis::H1)}, {}, prof, opt),
                    ConfigError);
}

}
