#pragma once

#include "kakinuma/grid.hpp"
#include "kakinuma/params.hpp"

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace kakinuma {

struct InterfaceState {
    ScalarField zeta;
    ScalarField b;

    static InterfaceState flat(const PeriodicGrid& g) {
        return {ScalarField::Zero(g.M()), ScalarField::Zero(g.M())};
    }
};

ScalarField thickness(const InterfaceState& s, const NondimParams& prm, int layer);

struct Velocities {
    ScalarField u1, u2, w1, w2;
};

// Coefficients of L_{l,ij} indexed by the exponent pair. Entries that would
// read 0/0 are stored as exact zeros.
struct CoefficientTable {
    struct Entry {
        double a = 0.0;   // 1/(pi+pj+1), multiplies H^{pi+pj+1}
        double c = 0.0;   // pi pj/(pi+pj-1), multiplies H^{pi+pj-1}
        double bi = 0.0;  // pi/(pi+pj), multiplies H^{pi+pj}
        double bj = 0.0;  // pj/(pi+pj)
        int ea = 1, ec = 0, eb = 0;
    };
    std::vector<int> p;
    std::vector<std::vector<Entry>> e;

    explicit CoefficientTable(const std::vector<int>& exponents);
    const Entry& at(int i, int j) const { return e[i][j]; }
};

// Operator algebra of one layer for a frozen interface state.
//
// All matrices act on coefficient vectors of the grid's real Fourier basis; a stacked
// vector has K blocks of n = M-1 coefficients, block j holding phi_{l,j}. Products with
// functions of H are Galerkin products evaluated on the 3/2-padded grid.
class LayerOps {
public:
    LayerOps(const PeriodicGrid& g, const InterfaceState& s, const NondimParams& prm,
             const ExpansionSpec& spec, int layer);

    const PeriodicGrid& grid() const { return *g_; }
    int layer() const { return layer_; }
    int K() const { return static_cast<int>(p_.size()); }
    int n() const { return g_->modes(); }
    const std::vector<int>& exponents() const { return p_; }
    const CoefficientTable& table() const { return table_; }
    double inv_layer_delta2() const { return hd2inv_; }
    const Vec& H_padded() const { return Hpad_; }
    const ScalarField& H() const { return H_; }

    enum class Aux { One = 0, Bx = 1, Bx2 = 2 };

    // Galerkin matrix of H^e * aux.
    const Mat& mult(int e, Aux aux = Aux::One) const;
    Vec hpow_padded(int e) const;
    const Vec& aux_padded(Aux aux) const;

    Mat block(int i, int j) const;
    Mat block_variation(int i, int j, const Vec& Hdot_padded) const;
    Mat L_matrix() const;
    Mat calL_row(int i) const;
    Mat calL_row_variation(int i, const Vec& Hdot_padded) const;
    // Row operators for l.phi and l'.phi.
    Mat l_row() const;
    Mat lprime_row() const;
    Mat lsecond_row() const;

    // Horizontal velocity (modes) and l'.phi (modes) from stacked modes.
    Vec u_modes(const Vec& stacked) const;
    Vec lprime_dot_modes(const Vec& stacked) const;

    Vec stack(const PotentialVec& values) const;
    PotentialVec unstack(const Vec& stacked) const;

private:
    Mat assemble_block(int i, int j, const std::function<Mat(int, Aux)>& coef) const;

    const PeriodicGrid* g_;
    int layer_;
    std::vector<int> p_;
    CoefficientTable table_;
    double hd2inv_;
    ScalarField H_;
    Vec Hpad_;
    std::vector<Vec> Hpow_;
    Vec aux_[3];
    bool has_b_ = false;
    mutable std::map<std::pair<int, int>, Mat> cache_;
};

PotentialVec l_vector(const ScalarField& H, const std::vector<int>& exponents, int derivative_order);
PotentialVec l_vector(const ScalarField& H, const ExpansionSpec& spec, int layer,
                      int derivative_order);

PotentialVec apply_L(const PeriodicGrid& g, const PotentialVec& phi, const InterfaceState& s,
                     const NondimParams& prm, const ExpansionSpec& spec, int layer);
PotentialVec apply_L1(const PeriodicGrid& g, const PotentialVec& phi1, const InterfaceState& s,
                      const NondimParams& prm, const ExpansionSpec& spec);
PotentialVec apply_L2(const PeriodicGrid& g, const PotentialVec& phi2, const InterfaceState& s,
                      const NondimParams& prm, const ExpansionSpec& spec);
// L_2 assembled from A_2, C_2, B~_2, C~_2 with pointwise products.
PotentialVec apply_L2_alternate(const PeriodicGrid& g, const PotentialVec& phi2,
                                const InterfaceState& s, const NondimParams& prm,
                                const ExpansionSpec& spec);
// Single block L_{l,ij} applied to a scalar field.
ScalarField apply_Lij(const PeriodicGrid& g, const ScalarField& f, const InterfaceState& s,
                      const NondimParams& prm, const ExpansionSpec& spec, int layer, int i, int j);
ScalarField apply_calL(const PeriodicGrid& g, const PotentialVec& phi, const InterfaceState& s,
                       const NondimParams& prm, const ExpansionSpec& spec, int layer, int i);

Velocities compute_velocities(const PeriodicGrid& g, const PotentialVec& phi1,
                              const PotentialVec& phi2, const InterfaceState& s,
                              const NondimParams& prm, const ExpansionSpec& spec);

// B_l^{(N)} for a vector phi satisfying the layer compatibility conditions; the
// approximate DtN value Lambda_l^{(N)} phi_l is taken as calL_{l,0} phi.
ScalarField bernoulli_BN(const PeriodicGrid& g, const PotentialVec& phi, const InterfaceState& s,
                         const NondimParams& prm, const ExpansionSpec& spec, int layer);

}  // namespace kakinuma
