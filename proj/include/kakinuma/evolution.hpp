#pragma once

#include "kakinuma/elliptic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kakinuma {

// Canonical pair (zeta, phi) with phi = rho2 l2.phi2 - rho1 l1.phi1 at the interface.
struct CanonicalState {
    double t = 0.0;
    ScalarField zeta;
    ScalarField phi;
};

struct EvolutionOptions {
    double c_stab = 0.5;
    bool halt_on_instability = true;
    double compat_tol = 1e-9;
};

struct CanonicalRHS {
    ScalarField dzeta;
    ScalarField dphi;
    double compat_error = 0.0;
    Vec phi1_modes, phi2_modes;  // reconstructed potentials of the evaluated state
};

CanonicalRHS rhs_canonical(const PeriodicGrid& g, const ScalarField& zeta, const ScalarField& phi,
                           const ScalarField& b, const NondimParams& prm, const ExpansionSpec& spec,
                           double compat_tol = 1e-9);

// Classical four-stage step. Throws StepRejected when a stage state cavitates.
CanonicalState rk4_step(const PeriodicGrid& g, const CanonicalState& s, double dt,
                        const ScalarField& b, const NondimParams& prm, const ExpansionSpec& spec,
                        const EvolutionOptions& opt = {}, double* max_compat = nullptr);

ScalarField stability_function_a(const PeriodicGrid& g, const InterfaceState& s,
                                 const PotentialVec& phi1, const PotentialVec& phi2,
                                 const TimeDerivatives& td, const NondimParams& prm,
                                 const ExpansionSpec& spec);

ScalarField stability_margin(const InterfaceState& s, const Velocities& v, const ScalarField& a,
                             const NondimParams& prm, const StabilityConstants& c);

double energy_Em(const PeriodicGrid& g, const ScalarField& zeta, const PotentialVec& phi1,
                 const PotentialVec& phi2, int m, const NondimParams& prm);

struct Perturbation {
    ScalarField zeta;
    PotentialVec phi1;
    PotentialVec phi2;
};

// Flat-state energy of a perturbation.
double energy_E(const PeriodicGrid& g, const Perturbation& p, const NondimParams& prm);

// (A0mod U, U) for the principal linearization around the base state.
double quadratic_form_A0mod(const PeriodicGrid& g, const InterfaceState& base,
                            const Velocities& v, const ScalarField& a, const Perturbation& p,
                            const NondimParams& prm, const ExpansionSpec& spec);

struct StateDiagnostics {
    double hamiltonian = 0.0;
    double mass = 0.0;
    double min_margin = 1.0;
    double energy_m = 0.0;
    double max_abs_zeta = 0.0;
    double min_H1 = 1.0, min_H2 = 1.0;
    ScalarField a, margin;
};

StateDiagnostics diagnose(const PeriodicGrid& g, const CanonicalState& s, const ScalarField& b,
                          const NondimParams& prm, const ExpansionSpec& spec, int m = 1,
                          bool with_margin = true);

struct TrajectoryOptions {
    double dt = 1e-3;
    double T = 1.0;
    int record_stride = 1;
    int snapshot_stride = 0;  // 0 disables snapshots
    int energy_order = 1;
    bool margin = true;
    EvolutionOptions evo;
};

struct TrajectoryRecord {
    std::vector<double> t, hamiltonian, mass, min_margin, energy_m, max_abs_zeta;
    std::vector<CanonicalState> snapshots;
    double max_compat_error = 0.0;
    std::int64_t steps = 0;
    bool halted = false;
    std::string halt_reason;
};

TrajectoryRecord run_trajectory(const PeriodicGrid& g, const CanonicalState& init,
                                const ScalarField& b, const NondimParams& prm,
                                const ExpansionSpec& spec, const TrajectoryOptions& opt);

}  // namespace kakinuma
