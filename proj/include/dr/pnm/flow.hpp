#pragma once

#include "dr/pnm/network.hpp"

namespace dr::pnm {

// 1 darcy in um^2.
constexpr double kDarcyUm2 = 0.9869233;

struct FlowResult {
    double value = 0.0;          // K in um^2, or the formation factor
    bool connected = false;
    double flux_residual = 0.0;  // max interior net flux / total throughput
};

/// Laminar single-phase solve: throat conductance g = pi r^4 / (8 mu l),
/// unit pressure drop between inlet and outlet pores, flux conservation
/// at each interior pore. K = Q mu L / (A dP). Disconnected networks
/// report zero with the connected flag cleared.
FlowResult absolute_permeability(const PoreNetwork& net, double viscosity_pa_s = 1e-3);

inline double darcy_from_um2(double k_um2) { return k_um2 / kDarcyUm2; }

/// Electrical analogue with g_e = sigma pi r^2 / l; the formation factor
/// is sigma_w / sigma_effective (infinity when disconnected).
FlowResult formation_factor(const PoreNetwork& net);

struct PhaseConductances {
    std::vector<double> throat_g;  // per throat, zero drops the throat
};

/// Shared network solve used by the permeability, formation-factor and
/// relative-permeability paths: returns total inlet->outlet flux for a
/// unit potential drop, plus the conservation residual.
struct SolveOutcome {
    double flux = 0.0;
    bool connected = false;
    double residual = 0.0;
};
SolveOutcome solve_network(const PoreNetwork& net, const std::vector<double>& throat_g);

}  // namespace dr::pnm
