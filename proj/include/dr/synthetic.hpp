#pragma once

#include <cstdint>

#include "dr/micp.hpp"
#include "dr/volume.hpp"

namespace dr::synth {

/// Separable Gaussian blur, edge-clamped, kernel truncated at 3 sigma.
GridU8 gaussian_blur(const GridU8& g, double sigma);

struct SpherePack {
    GridU8 gray;        // blurred two-phase image
    GridU8 mask;        // ground-truth labels (seg::PORE / seg::GRAIN)
    double porosity = 0.0;  // exact mask pore fraction
};

struct SpherePackConfig {
    Dims3 dims{128, 128, 128};
    double target_porosity = 0.25;
    double radius_min = 6.0;
    double radius_max = 14.0;
    std::uint8_t pore_value = 40;
    std::uint8_t grain_value = 200;
    double blur_sigma = 1.0;
    double micro_fraction = 0.0;  // fraction of grain painted as micro-texture
    std::uint64_t seed = 0;
    double voxel_size_um = 2.68;
};

/// Random overlapping pore spheres in grain until the target pore
/// fraction is reached; the unblurred mask is the ground truth.
SpherePack sphere_pack(const SpherePackConfig& cfg);

struct TwoModeVolume {
    GridU8 grid;
    int valley = 60;        // strict minimum of the restricted marginal
    int pore_mode = 40;
    int grain_mode = 200;
};

/// Deterministic two-mode validation volume: a blurred pore cylinder in
/// grain plus an intensity ladder of constant stripes whose thickness
/// profile dips at the valley, so gradient-restricted histograms find
/// the same split under any sane cutoff.
TwoModeVolume two_mode_volume();

/// Blocky binary texture aligned to the scale grid: ideal SR targets are
/// piecewise constant, so learned upsamplers can beat linear kernels.
GridU8 texture_patch_2d(Index size, Index block, std::uint64_t seed);

/// Paired LR/HR 2D texture task; LR is the exact subsample (factor 1/scale).
PatchPairSet texture_task(int n_patches, Index hr_size, int scale, std::uint64_t seed);

/// 16-bit version of a sphere pack for the normalization stage.
GridU16 widen_to_u16(const GridU8& g, std::uint64_t seed, int noise = 64);

/// Noiseless MICP curve sampled from a Thomeer model at log-spaced
/// pressures spanning the systems.
micp::MicpCurve thomeer_curve(const micp::ThomeerModel& model, int n_points);

}  // namespace dr::synth
