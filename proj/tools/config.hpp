#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lab {

using ModeList = std::vector<std::pair<int, double>>;  // (wavenumber index, amplitude)

struct RunConfig {
    // [params]
    double rho1 = 0.0;
    double h1 = 0.0;
    double delta = 0.1;
    std::vector<double> deltas;
    // [spec]
    int N = 0;
    std::string hyp;
    // [grid]
    int M = 64;
    double length = 0.0;  // 0 means 2 pi
    int P_reference = 16;
    // [initial]
    ModeList zeta_cos, zeta_sin, phi_cos, phi_sin, b_cos, b_sin;
    // [run]
    double T = 1.0;
    double dt = 1e-3;
    int output_stride = 1;
    bool halt_on_instability = true;
    double c_stab = 0.5;
    int energy_order = 1;
    int snapshot_stride = 0;
    // [output]
    std::string directory = "out";
    std::vector<std::string> formats = {"csv", "json"};
    // [sweep]
    std::vector<int> sweep_Ns = {0, 1};
    double zeta_amp = 0.1;
    double b_amp = 0.0;
    double phi_amp = 1.0;
    int sweep_M = 32;
    int sweep_P = 16;
    int sweep_P_max = 48;
    int sweep_M_max = 64;
    int sweep_M_flat = 128;
    double floor = 1e-13;
    bool residuals = true;
    bool hamiltonian = true;
    // [dispersion]
    std::vector<double> xi = {1.0};
    std::vector<int> dispersion_Ns = {0, 1, 2};
    double dispersion_floor = 1e-30;
    // [stability]
    int samples = 200;
    int perturbation_modes = 4;

    double grid_length() const;
    bool wants(const std::string& format) const;
};

RunConfig parse_config_text(const std::string& text, const std::string& source = "config");

// Canonical INI text of a resolved configuration; parsing it gives back the same values.
std::string to_ini(const RunConfig& c);

}  // namespace lab
