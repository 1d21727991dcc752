#pragma once

#include <string>
#include <vector>

#include "dr/segment.hpp"
#include "dr/voxel_grid.hpp"

namespace dr::pnm {

/// Per-voxel Euclidean distance (voxel units) to the nearest GRAIN voxel
/// center; exactly zero on GRAIN. Computed with the exact separable
/// squared-distance transform.
using DistanceField = GridF32;

DistanceField distance_transform(const seg::LabelGrid& labels);

struct Pore {
    Dims3 center{0, 0, 0};    // voxel coordinates of the seeding maximum
    double radius_um = 0.0;   // inscribed radius
    double volume_um3 = 0.0;
    bool inlet = false;       // region touches z = 0
    bool outlet = false;      // region touches z = nz - 1
};

struct Throat {
    Index pore_i = 0;
    Index pore_j = 0;
    double radius_um = 0.0;
    double length_um = 0.0;
};

struct PoreNetwork {
    std::vector<Pore> pores;
    std::vector<Throat> throats;
    double area_um2 = 0.0;    // inlet/outlet cross-section
    double length_um = 0.0;   // domain length along z
    double voxel_size_um = 1.0;

    void validate() const;
};

/// Maximal-sphere style extraction: pore seeds are 26-neighborhood local
/// maxima of the distance field (plateaus merged to their centroid),
/// regions grow by a watershed on descending distance, throats sit on
/// region adjacency faces.
PoreNetwork extract_network(const seg::LabelGrid& labels, const DistanceField& field);

struct PsdBin {
    double radius_lo_um = 0.0;
    double radius_hi_um = 0.0;
    std::uint64_t count = 0;
};

/// Histogram of pore (local-maximum) radii, bin width = voxel size.
std::vector<PsdBin> pore_size_distribution(const PoreNetwork& net);

void save_network_csv(const PoreNetwork& net, const std::string& pores_path,
                      const std::string& throats_path);
PoreNetwork load_network_csv(const std::string& pores_path, const std::string& throats_path);

/// key=value summary block (pore/throat counts, mean radii, domain).
std::string network_stats_text(const PoreNetwork& net);

}  // namespace dr::pnm
