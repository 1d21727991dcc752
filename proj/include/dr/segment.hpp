#pragma once

#include <cstdint>
#include <vector>

#include "dr/metrics.hpp"
#include "dr/voxel_grid.hpp"

namespace dr::seg {

// Label values follow the white/black export convention.
constexpr std::uint8_t PORE = 255;
constexpr std::uint8_t GRAIN = 0;

using LabelGrid = GridU8;

struct ThresholdPair {
    int pore_max = 0;    // pure pore at intensity <= pore_max
    int grain_min = 0;   // pure grain at intensity >= grain_min
    double grad_cutoff = 0.0;

    void validate() const;
};

struct SelectConfig {
    int n_regions = 20;
    int half_width = 5;
    double interfacial_percentile = 0.90;  // over voxels with nonzero gradient
    Index region_radius = 3;
    int min_mode_separation = 16;
    std::uint64_t seed = 0;
};

/// Gradient-based optimal threshold selection: sample interfacial
/// regions, take the minimum gradient across them as the cutoff,
/// restrict the intensity histogram to voxels at or below the cutoff,
/// and split at the valley between the two dominant modes.
ThresholdPair select_optimal_thresholds(const GridU8& grid, const SelectConfig& cfg = {});

/// Marker-based watershed: thresholds seed the markers, unassigned
/// voxels flood by ascending gradient magnitude (ties by insertion
/// order) over 6-connectivity until every voxel is labeled.
LabelGrid watershed_segment(const GridU8& grid, const ThresholdPair& thresholds);

/// One segmentation per delta; each delta shifts both thresholds.
std::vector<LabelGrid> threshold_sweep(const GridU8& grid, const ThresholdPair& base,
                                       const std::vector<int>& deltas);

ThresholdPair shift_thresholds(const ThresholdPair& base, int delta);

}  // namespace dr::seg
