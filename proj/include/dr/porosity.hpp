#pragma once

#include <optional>
#include <vector>

#include "dr/segment.hpp"
#include "dr/voxel_grid.hpp"

namespace dr::poro {

using PorosityMap = GridF32;  // phi_micro on GRAIN voxels, 0 on PORE voxels

/// Per-voxel micro-porosity on the grain phase:
/// phi = (T - T_grain) / (T_pore - T_grain), clamped to [0, 1].
PorosityMap local_porosity_map(const GridU8& grid, const seg::LabelGrid& labels,
                               const seg::ThresholdPair& thresholds);

struct PorositySummary {
    double macro = 0.0;
    double micro = 0.0;
    double total = 0.0;
};

/// macro = |PORE| / N; micro spreads the grain-voxel porosity over the
/// bulk volume: micro = sum(phi over grain) / N.
PorositySummary porosity_summary(const seg::LabelGrid& labels, const PorosityMap& pmap);

struct DpPoint {
    Index block_size = 0;
    double v_dp = 0.0;
    bool defined = false;
};

/// Dykstra-Parsons coefficient of a value population:
/// (P50 - P84.1) / P50 where P84.1 is the value exceeded by 84.1% of the
/// samples. Undefined when P50 is 0 or fewer than 2 samples exist.
std::optional<double> dykstra_parsons_coefficient(std::vector<double> values);

/// Heterogeneity curve: the volume is cut into non-overlapping cubes of
/// each block size (ragged remainders dropped), per-block porosity is
/// macro + micro within the block, and the coefficient is evaluated over
/// the block population.
std::vector<DpPoint> dykstra_parsons(const seg::LabelGrid& labels, const PorosityMap& pmap,
                                     const std::vector<Index>& block_sizes,
                                     bool include_micro = true);

}  // namespace dr::poro
