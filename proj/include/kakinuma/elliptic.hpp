#pragma once

#include "kakinuma/ops.hpp"

#include <optional>
#include <vector>

namespace kakinuma {

// Right-hand side of the coupled system. f3 is a flux whose x-derivative enters the
// trace-sum row; div_f3 (grid values) overrides it when given.
struct CoupledRHS {
    std::vector<ScalarField> f1prime;  // N fields, rows i = 1..N of layer 1
    std::vector<ScalarField> f2prime;  // N* fields
    ScalarField f3;
    ScalarField f4;
    std::optional<ScalarField> div_f3;

    static CoupledRHS zeros(const PeriodicGrid& g, const ExpansionSpec& spec);
};

struct CoupledSolution {
    PotentialVec phi1;
    PotentialVec phi2;
    double gauge = 0.0;  // border multiplier; vanishes for a compatible right-hand side
    Vec phi1_modes;       // stacked coefficient vectors
    Vec phi2_modes;
};

struct SolverOptions {
    double gauge_tol = 1e-8;
    bool check_gauge = true;
};

PotentialVec solve_layer_trace(const PeriodicGrid& g, const ScalarField& phi_trace,
                               const InterfaceState& s, const NondimParams& prm,
                               const ExpansionSpec& spec, int layer);

ScalarField approx_dtn(const PeriodicGrid& g, const ScalarField& phi_trace,
                       const InterfaceState& s, const NondimParams& prm,
                       const ExpansionSpec& spec, int layer);

// n x n matrix of the approximate DtN map Lambda^{(N)} acting on coefficient vectors.
Mat approx_dtn_matrix(const PeriodicGrid& g, const InterfaceState& s, const NondimParams& prm,
                      const ExpansionSpec& spec, int layer);

// Dense matrix of the coupled system before the gauge row and border column are
// added; unknowns are the stacked phi1 then phi2 coefficient vectors.
Mat coupled_matrix(const PeriodicGrid& g, const InterfaceState& s, const NondimParams& prm,
                   const ExpansionSpec& spec);

CoupledSolution solve_coupled(const PeriodicGrid& g, const CoupledRHS& rhs,
                              const InterfaceState& s, const NondimParams& prm,
                              const ExpansionSpec& spec, const SolverOptions& opt = {});

// Same solve with operators already assembled for the state.
CoupledSolution solve_coupled(const LayerOps& o1, const LayerOps& o2, const CoupledRHS& rhs,
                              const NondimParams& prm, const SolverOptions& opt = {});

struct PreparedData {
    PotentialVec phi1;
    PotentialVec phi2;
};

PreparedData prepare_initial_data(const PeriodicGrid& g, const ScalarField& zeta0,
                                  const ScalarField& phi0, const ScalarField& b,
                                  const NondimParams& prm, const ExpansionSpec& spec);

struct TimeDerivatives {
    ScalarField dzeta;
    PotentialVec dphi1;
    PotentialVec dphi2;
    double compat_error = 0.0;  // relative mismatch of the two expressions for dzeta
};

// Relative mismatch of -h1 calL_{1,0} phi1 and h2 calL_{2,0} phi2.
double compatibility_error(const Vec& a, const Vec& b);

TimeDerivatives recover_time_derivatives(const PeriodicGrid& g, const InterfaceState& s,
                                         const PotentialVec& phi1, const PotentialVec& phi2,
                                         const NondimParams& prm, const ExpansionSpec& spec,
                                         double compat_tol = 1e-9);

// Quadratic form sum_l rho_l h_l <L_l phi_l, phi_l>.
double kinetic_form(const LayerOps& o1, const LayerOps& o2, const Vec& s1, const Vec& s2,
                    const NondimParams& prm);

}  // namespace kakinuma
