#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dr/voxel_grid.hpp"

namespace dr::micp {

/// Cumulative mercury intrusion curve: strictly increasing capillary
/// pressure against non-decreasing intruded bulk-volume fraction.
struct MicpCurve {
    struct Point {
        double pc = 0.0;  // capillary pressure
        double bv = 0.0;  // cumulative intruded bulk-volume fraction
    };
    std::vector<Point> points;

    void validate() const;
};

struct ThomeerSystem {
    double b_inf = 0.0;  // bulk-volume fraction at infinite pressure
    double g = 0.0;      // pore geometrical factor
    double p_d = 0.0;    // displacement pressure
};

/// Pore systems ordered by ascending displacement pressure.
struct ThomeerModel {
    std::vector<ThomeerSystem> systems;
};

/// B_v(P_c) = sum over systems of B_inf * exp(-G / log10(P_c / P_d)) for
/// P_c > P_d, with the right-limit convention of 0 at and below P_d.
double thomeer_eval(const ThomeerModel& model, double pc);

struct FitConfig {
    int multi_starts = 16;
    std::uint64_t seed = 0;
    bool log_residual = false;  // weight residuals in log-Bv space instead
    int max_iterations = 4000;
    std::vector<ThomeerSystem> init;  // optional warm start used as start 0
};

struct FitResult {
    ThomeerModel model;
    double rms = 0.0;
    bool converged = false;
};

/// Least-squares multi-start Nelder-Mead fit of n_systems hyperbolas.
/// Parameters respect their ranges through bounded transforms; the
/// derivative-free search avoids the gradient singularity at P_d.
FitResult thomeer_fit(const MicpCurve& curve, int n_systems, const FitConfig& cfg = {});

/// Two-system split: macro porosity from the low-P_d system, micro from
/// the high-P_d system, as bulk-volume fractions.
std::pair<double, double> partition_porosity(const ThomeerModel& model);

MicpCurve load_micp_csv(const std::string& path);
void save_model_csv(const ThomeerModel& model, double rms, const std::string& path);

}  // namespace dr::micp
