#pragma once

#include "kakinuma/ops.hpp"

#include <Eigen/LU>

namespace kakinuma {

// sigma_l(xi) = delta^{-1} |xi| tanh(h_l delta |xi|)
double flat_dtn_symbol(double xi, const NondimParams& prm, int layer);

// Chebyshev points on [a, b] ordered from b (k = 0) to a (k = P), with the
// differentiation matrix and Clenshaw-Curtis weights on the same interval.
struct ChebyshevLine {
    Vec z;
    Mat D;
    Vec w;
    static ChebyshevLine make(int P, double a, double b);
};

// One layer mapped to the flat strip z' in (0, h1) or (-h2, 0), where the physical
// height is z = zeta + H z'. The potential is written Psi = phi + delta^2 chi with
// chi = 0 on the interface; chi is collocated at the remaining P Chebyshev nodes.
class LayerReference {
public:
    LayerReference(const PeriodicGrid& g, const InterfaceState& s, const NondimParams& prm,
                   int layer, int P);

    int P() const { return P_; }
    int interface_node() const { return iface_; }
    const ChebyshevLine& line() const { return line_; }

    // chi at every node (row block k = node k, n modes each) for trace modes phi.
    Mat lifted(const Mat& phi_modes) const;
    // DtN map on coefficient vectors, mean-free output.
    Vec apply_dtn(const Vec& phi_modes) const;
    Mat dtn_matrix() const;
    // int int |grad Phi|^2 + delta^{-2} (d_z Phi)^2 over the physical layer.
    double energy(const Vec& phi_modes) const;

private:
    Mat rhs_matrix(const Mat& phi_modes) const;
    Mat dtn_from_lifted(const Mat& phi_modes, const Mat& chi) const;

    const PeriodicGrid* g_;
    int layer_;
    int P_;
    int iface_, far_;
    double delta_;
    ChebyshevLine line_;
    Mat Dx_;
    Mat GJ_, GJx_, Gzx_, W_[3];
    Vec Jp_, Jxp_, zxp_;
    Eigen::PartialPivLU<Mat> lu_;
};

struct ResolutionCheck {
    double change = 0.0;  // relative change when P is doubled
    bool warning = false;
};

ScalarField full_dtn(const PeriodicGrid& g, const ScalarField& phi_trace, const InterfaceState& s,
                     const NondimParams& prm, int layer, int P, ResolutionCheck* check = nullptr,
                     double tol = 1e-8);

struct TransmissionSolution {
    ScalarField psi1, psi2;        // interface traces
    ScalarField dtn1, dtn2;        // Lambda_1 psi1 and Lambda_2 psi2
    Vec psi1_modes, psi2_modes;
    Mat chi1, chi2;                // lifted interior unknowns per node
    double energy1 = 0.0, energy2 = 0.0;
};

TransmissionSolution solve_transmission(const PeriodicGrid& g, const ScalarField& phi,
                                        const InterfaceState& s, const NondimParams& prm, int P);

double hamiltonian_full(const PeriodicGrid& g, const ScalarField& zeta, const ScalarField& phi,
                        const ScalarField& b, const NondimParams& prm, int P);

// Full-model Bernoulli terms B_1, B_2 from the transmission traces.
std::pair<ScalarField, ScalarField> bernoulli_full(const PeriodicGrid& g,
                                                   const TransmissionSolution& t,
                                                   const InterfaceState& s,
                                                   const NondimParams& prm);

}  // namespace kakinuma
