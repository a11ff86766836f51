#include "kakinuma/params.hpp"
#include "kakinuma/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kakinuma {

namespace {

Rational rational_det(std::vector<std::vector<Rational>> a) {
    const std::size_t n = a.size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return Rational(0);
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a[r][c] == 0) continue;
            Rational f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

}  // namespace

NondimParams NondimParams::with_delta(double d) const {
    NondimParams out = validate_params(rho1, h1, d);
    return out;
}

NondimParams validate_params(double rho1, double h1, double delta) {
    if (!(rho1 > 0.0 && rho1 < 1.0))
        throw ConstraintViolation("density relation: rho1 must lie in (0,1)");
    if (!(h1 > rho1))
        throw ConstraintViolation("depth relation: h1 must exceed rho1 so that h2 is positive");
    if (!(delta > 0.0)) throw ConstraintViolation("shallowness: delta must be positive");

    NondimParams p;
    p.rho1 = rho1;
    p.rho2 = 1.0 - rho1;
    p.h1 = h1;
    p.h2 = p.rho2 / (1.0 - rho1 / h1);
    p.delta = delta;

    if (p.h1 * delta > 1.0) {
        std::ostringstream os;
        os << "shallowness bound: h1*delta = " << p.h1 * delta << " exceeds 1";
        throw ConstraintViolation(os.str());
    }
    if (p.h2 * delta > 1.0) {
        std::ostringstream os;
        os << "shallowness bound: h2*delta = " << p.h2 * delta << " exceeds 1";
        throw ConstraintViolation(os.str());
    }
    const double m = std::min(p.h1 / p.rho1, p.h2 / p.rho2);
    if (!(m > 1.0 && m <= 2.0 + 1e-12))
        throw ConstraintViolation("parameter relation: min(h1/rho1, h2/rho2) must lie in (1,2]");
    p.regime_warning = (1.0 / p.h1 + 1.0 / p.h2) > 10.0;
    return p;
}

Hypothesis parse_hypothesis(const std::string& s) {
    if (s == "H1" || s == "h1") return Hypothesis::H1;
    if (s == "H2" || s == "h2") return Hypothesis::H2;
    throw ConfigError("unknown expansion case '" + s + "' (expected H1 or H2)");
}

std::string to_string(Hypothesis h) { return h == Hypothesis::H1 ? "H1" : "H2"; }

ExpansionSpec ExpansionSpec::make(int N, Hypothesis hyp) {
    if (N < 0) throw ConstraintViolation("expansion order N must be nonnegative");
    ExpansionSpec s;
    s.N = N;
    s.hyp = hyp;
    if (hyp == Hypothesis::H1) {
        s.Nstar = N;
        for (int i = 0; i <= N; ++i) s.p.push_back(2 * i);
    } else {
        s.Nstar = 2 * N;
        for (int i = 0; i <= 2 * N; ++i) s.p.push_back(i);
    }
    return s;
}

std::vector<int> ExpansionSpec::exponents(int layer) const {
    if (layer == 2) return p;
    std::vector<int> e;
    for (int i = 0; i <= N; ++i) e.push_back(2 * i);
    return e;
}

Eigen::MatrixXd base_matrix(const ExpansionSpec& spec, int layer) {
    const auto e = spec.exponents(layer);
    const int K = static_cast<int>(e.size());
    Eigen::MatrixXd A(K, K);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) A(i, j) = 1.0 / (e[i] + e[j] + 1);
    return A;
}

Rational alpha_exact(const std::vector<int>& e) {
    const std::size_t K = e.size();
    std::vector<std::vector<Rational>> A(K, std::vector<Rational>(K));
    std::vector<std::vector<Rational>> At(K + 1, std::vector<Rational>(K + 1));
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j) {
            A[i][j] = Rational(1, e[i] + e[j] + 1);
            At[i + 1][j + 1] = A[i][j];
        }
    At[0][0] = 0;
    for (std::size_t i = 0; i < K; ++i) {
        At[0][i + 1] = 1;
        At[i + 1][0] = -1;
    }
    const Rational dt = rational_det(At);
    if (dt == 0) throw SingularBorderedMatrix("bordered base matrix is singular");
    return rational_det(A) / dt;
}

double alpha_constant(const ExpansionSpec& spec, int layer) {
    return static_cast<double>(alpha_exact(spec.exponents(layer)));
}

StabilityConstants stability_constants(const ExpansionSpec& spec) {
    return {alpha_constant(spec, 1), alpha_constant(spec, 2)};
}

std::pair<double, double> theta_weights(const NondimParams& prm, double H1, double H2,
                                        double alpha1, double alpha2) {
    const double t1 = prm.rho2 * prm.h1 * H1 * alpha1;
    const double t2 = prm.rho1 * prm.h2 * H2 * alpha2;
    const double den = t1 + t2;
    if (!(den > 1e-300) || !std::isfinite(den))
        throw DegenerateDenominator("theta weights: denominator vanished (cavitation?)");
    const double th1 = t1 / den;
    return {th1, 1.0 - th1};
}

}  // namespace kakinuma
