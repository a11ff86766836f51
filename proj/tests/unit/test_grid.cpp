#include "doctest.h"
#include "kakinuma/errors.hpp"
#include "kakinuma/grid.hpp"

#include <cmath>
#include <numbers>

using namespace kakinuma;

namespace {
Vec sample(const PeriodicGrid& g, double (*f)(double)) {
    Vec v(g.M());
    for (int j = 0; j < g.M(); ++j) v(j) = f(g.node(j));
    return v;
}
}  // namespace

TEST_SUITE("spectral_grid") {

TEST_CASE("construction rules") {
    CHECK_THROWS_AS(PeriodicGrid(24), ConstraintViolation);
    CHECK_THROWS_AS(PeriodicGrid(8), ConstraintViolation);
    PeriodicGrid g(32);
    CHECK(g.modes() == 31);
    CHECK(g.padded_size() == 48);
}

TEST_CASE("derivatives") {
    PeriodicGrid g(32);
    const Vec s = sample(g, [](double x) { return std::sin(x); });
    const Vec c = sample(g, [](double x) { return std::cos(x); });
    CHECK((deriv(g, s) - c).cwiseAbs().maxCoeff() <= 1e-12);
    const Vec c2 = sample(g, [](double x) { return std::cos(2 * x); });
    CHECK((deriv(g, c2, 2) + 4 * c2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(deriv(g, Vec::Constant(32, 3.0)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("inverse laplacian") {
    PeriodicGrid g(32);
    const Vec c3 = sample(g, [](double x) { return std::cos(3 * x); });
    CHECK((inverse_laplacian(g, c3) + c3 / 9.0).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(inverse_laplacian(g, Vec::Zero(32)).norm() == 0.0);
    CHECK_THROWS_AS(inverse_laplacian(g, Vec::Constant(32, 0.1)), NonZeroMean);
    const Vec f = sample(g, [](double x) { return std::exp(std::sin(x)) - std::cyl_bessel_i(0.0, 1.0); });
    CHECK((deriv(g, inverse_laplacian(g, f), 2) - f).norm() / f.norm() <= 1e-10);
}

TEST_CASE("half inverse laplacian norm") {
    PeriodicGrid g(32);
    const Vec c = sample(g, [](double x) { return std::cos(4 * x); });
    CHECK(half_inverse_laplacian_norm(g, c, 0) == doctest::Approx(std::sqrt(std::numbers::pi) / 4));
    CHECK(half_inverse_laplacian_norm(g, Vec::Zero(32), 0) == 0.0);
    const Vec s = sample(g, [](double x) { return std::sin(x) + std::sin(2 * x); });
    CHECK(half_inverse_laplacian_norm(g, s, 0) ==
          doctest::Approx(std::sqrt(std::numbers::pi * 1.25)));
}

TEST_CASE("sobolev norms") {
    PeriodicGrid g(64);
    const Vec c = sample(g, [](double x) { return std::cos(x); });
    CHECK(sobolev_norm(g, c, 0) == doctest::Approx(std::sqrt(std::numbers::pi)));
    CHECK(sobolev_norm(g, c, 1) == doctest::Approx(std::sqrt(2 * std::numbers::pi)));
    CHECK(sobolev_norm(g, Vec::Ones(64), 0) == doctest::Approx(std::sqrt(2 * std::numbers::pi)));
    const Vec f = sample(g, [](double x) { return 1.0 / (2.0 + std::sin(x)); });
    CHECK(sobolev_norm(g, f, 0) * sobolev_norm(g, f, 0) ==
          doctest::Approx(g.integrate(f.cwiseProduct(f))).epsilon(1e-13));
}

TEST_CASE("linearity and galerkin products") {
    PeriodicGrid g(32);
    const Vec f = sample(g, [](double x) { return std::sin(x) * std::cos(3 * x); });
    const Vec h = sample(g, [](double x) { return std::cos(5 * x) + 0.2; });
    CHECK((deriv(g, 2 * f - 3 * h) - 2 * deriv(g, f) + 3 * deriv(g, h)).norm() <= 1e-12);
    // a * f with a and f both band limited below M/3 is exact
    const Vec a = sample(g, [](double x) { return 1.0 + 0.3 * std::sin(2 * x); });
    const Vec prod = g.to_values(Vec(g.galerkin(g.padded_from_values(a)) * g.to_modes(f)));
    CHECK((prod - a.cwiseProduct(f)).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((g.product(a, f) - a.cwiseProduct(f)).cwiseAbs().maxCoeff() <= 1e-13);
    const Mat D = g.d_matrix();
    CHECK((D + D.transpose()).norm() == 0.0);
}

}
