#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <utility>
#include <vector>

namespace kakinuma {

using Rational = boost::multiprecision::cpp_rational;

// Relative densities, relative depths and the shallowness parameter.
struct NondimParams {
    double rho1 = 0.5;
    double rho2 = 0.5;
    double h1 = 1.0;
    double h2 = 1.0;
    double delta = 0.1;
    bool regime_warning = false;

    double rho(int layer) const { return layer == 1 ? rho1 : rho2; }
    double h(int layer) const { return layer == 1 ? h1 : h2; }
    double delta1() const { return h1 * delta; }
    double delta2() const { return h2 * delta; }
    double layer_delta(int layer) const { return h(layer) * delta; }
    NondimParams with_delta(double d) const;
};

NondimParams validate_params(double rho1, double h1, double delta);

enum class Hypothesis { H1, H2 };

Hypothesis parse_hypothesis(const std::string& s);
std::string to_string(Hypothesis h);

struct ExpansionSpec {
    int N = 0;
    int Nstar = 0;
    std::vector<int> p;  // lower-layer exponents p_0..p_{N*}
    Hypothesis hyp = Hypothesis::H1;

    static ExpansionSpec make(int N, Hypothesis hyp);

    // Exponents used in the given layer; the upper layer always uses 2i.
    std::vector<int> exponents(int layer) const;
    int count(int layer) const { return layer == 1 ? N + 1 : Nstar + 1; }
};

struct StabilityConstants {
    double alpha1 = 1.0;
    double alpha2 = 1.0;
};

Eigen::MatrixXd base_matrix(const ExpansionSpec& spec, int layer);

Rational alpha_exact(const std::vector<int>& exponents);
double alpha_constant(const ExpansionSpec& spec, int layer);
StabilityConstants stability_constants(const ExpansionSpec& spec);

std::pair<double, double> theta_weights(const NondimParams& prm, double H1, double H2,
                                        double alpha1, double alpha2);

}  // namespace kakinuma
