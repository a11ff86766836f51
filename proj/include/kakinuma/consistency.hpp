#pragma once

#include "kakinuma/elliptic.hpp"
#include "kakinuma/reference.hpp"

#include <functional>
#include <string>
#include <vector>

namespace kakinuma {

struct OrderFit {
    std::vector<double> deltas;
    std::vector<double> errors;
    std::vector<double> excluded;  // deltas whose error fell under the floor
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool inconclusive = false;     // r2 below 0.99
};

OrderFit order_fit(const std::vector<double>& deltas, const std::vector<double>& errors,
                   double floor = 1e-13, std::size_t min_samples = 4);

struct FullResiduals {
    ScalarField r1, r2, r0;
    double norm_r1 = 0.0, norm_r2 = 0.0, norm_r0 = 0.0;
};

// Residuals of the full model evaluated on Kakinuma data with interface traces phi1, phi2.
// Each trace is expanded by the layer trace problem; the exact DtN maps come from the
// reference solver with vertical resolution P.
FullResiduals residuals_full_from_kakinuma(const PeriodicGrid& g, const ScalarField& phi1,
                                           const ScalarField& phi2, const InterfaceState& s,
                                           const NondimParams& prm, const ExpansionSpec& spec,
                                           int P);

// r1 for a flat interface, with the exact DtN map applied as the Fourier multiplier sigma_1.
ScalarField residual_r1_flat(const PeriodicGrid& g, const ScalarField& phi1,
                             const NondimParams& prm, const ExpansionSpec& spec);

struct KakinumaResiduals {
    PotentialVec r1, r2;
    ScalarField r0;
    double norm_r1 = 0.0, norm_r2 = 0.0, norm_r0 = 0.0;
    double weighted = 0.0;  // sum_l rho_l h_l |r_l|^2
};

// Residuals of the Kakinuma model evaluated on data reconstructed from (zeta, phi), with
// the time derivative of zeta taken from the full model.
KakinumaResiduals residuals_kakinuma_from_full(const PeriodicGrid& g, const ScalarField& zeta,
                                               const ScalarField& phi, const ScalarField& b,
                                               const NondimParams& prm, const ExpansionSpec& spec,
                                               int P);

double hamiltonian_kakinuma(const PeriodicGrid& g, const ScalarField& zeta, const ScalarField& phi,
                            const ScalarField& b, const NondimParams& prm,
                            const ExpansionSpec& spec);

// H^K - H^IW
double hamiltonian_error(const PeriodicGrid& g, const ScalarField& zeta, const ScalarField& phi,
                         const ScalarField& b, const NondimParams& prm, const ExpansionSpec& spec,
                         int P);

// Flat symbol of Lambda_l^{(N)} at wavenumber xi (so that h_l times it approximates sigma_l).
double kakinuma_flat_symbol(double xi, const NondimParams& prm, const ExpansionSpec& spec,
                            int layer);

struct Dispersion {
    double omega2_full = 0.0;
    double omega2_kakinuma = 0.0;
    double difference = 0.0;  // omega2_kakinuma - omega2_full, evaluated without cancellation
};

Dispersion dispersion_symbols(double xi, const NondimParams& prm, const ExpansionSpec& spec);

// Profiles are fixed shapes in units of the layer depths so that only delta varies.
struct SweepProfiles {
    double zeta_amp = 0.1;   // zeta = zeta_amp * min(h1, h2) * sin(x)
    double b_amp = 0.0;      // b = b_amp * h2 * sin(2x)
    double phi_amp = 1.0;    // phi = phi_amp * cos(x)
};

struct SweepOptions {
    int M = 32;
    int P = 16;
    int P_max = 48;
    int M_max = 64;
    bool auto_refine = true;
    bool residuals = true;
    bool hamiltonian = true;
    bool flat = true;      // flat-state r1 on a grid of M_flat points
    int M_flat = 128;
    double floor = 1e-13;
    int threads = 1;
};

struct SweepRow {
    double delta = 0.0, h1delta = 0.0, h2delta = 0.0;
    double err_r1 = 0.0, err_r2 = 0.0, err_r0 = 0.0, err_H = 0.0, err_r1_flat = 0.0;
    int P = 0, M = 0;
    double ref_change = 0.0;
    bool converged = true;
};

struct SweepResult {
    ExpansionSpec spec;
    std::vector<SweepRow> rows;
    OrderFit fit_r1, fit_r2, fit_r0, fit_H, fit_r1_flat;
    std::vector<std::string> notes;
};

// One reference per delta is shared by every expansion in `specs`.
std::vector<SweepResult> consistency_sweep(double rho1, double h1,
                                           const std::vector<ExpansionSpec>& specs,
                                           const std::vector<double>& deltas,
                                           const SweepProfiles& prof, const SweepOptions& opt);

std::vector<double> default_delta_sweep();

}  // namespace kakinuma
