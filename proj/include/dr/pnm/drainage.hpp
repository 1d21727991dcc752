#pragma once

#include "dr/pnm/flow.hpp"

namespace dr::pnm {

/// Wetting/non-wetting pair; contact angle measured through the wetting
/// phase (drainage needs theta < pi/2).
struct FluidPair {
    double sigma_n_per_m = 0.05;
    double theta_rad = 0.0;
    double mu_w_pa_s = 1.0e-3;
    double mu_nw_pa_s = 0.92e-3;

    void validate() const;
};

/// Young-Laplace entry pressure (Pa) of a circular element of radius r.
double entry_pressure_pa(double radius_um, const FluidPair& fluids);

struct DrainageState {
    double pc_pa = 0.0;
    double sw = 1.0;
    std::vector<char> pore_invaded;
    std::vector<char> throat_invaded;
};

/// Quasi-static invasion percolation from the inlet face: at each
/// prescribed capillary pressure every element reachable through already
/// invaded elements with entry pressure <= P_c drains. Trapping, when
/// enabled, protects wetting clusters cut off from the outlet.
std::vector<DrainageState> drainage_simulate(const PoreNetwork& net, const FluidPair& fluids,
                                             const std::vector<double>& pc_steps_pa,
                                             bool trapping = false);

struct KrPoint {
    double pc_pa = 0.0;
    double sw = 1.0;
    double kr_w = 1.0;
    double kr_nw = 0.0;
};

/// Relative permeability along the drainage sequence. Invaded elements
/// carry bulk non-wetting conductance; wetting flow through any invaded
/// element survives only via the corner factor beta (0 blocks it).
std::vector<KrPoint> relative_permeability(const PoreNetwork& net, const FluidPair& fluids,
                                           const std::vector<DrainageState>& states,
                                           double corner_beta = 0.01);

void save_pc_curve_csv(const std::vector<DrainageState>& states, const std::string& path);
void save_kr_curve_csv(const std::vector<KrPoint>& points, const std::string& path);

}  // namespace dr::pnm
