#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dr/voxel_grid.hpp"

namespace dr::prep {

struct Histogram {
    std::vector<std::uint64_t> bins;  // 2^depth entries
    std::uint64_t total = 0;
};

struct NormalizationParams {
    double p_min = 0.0;
    double p_max = 0.0;
    double clip_fraction = 0.0;
};

template <typename T>
Histogram histogram(const VoxelGrid<T>& g) {
    static_assert(std::is_integral_v<T>, "histogram: integral grids only");
    Histogram h;
    h.bins.assign(std::size_t{1} << VoxelGrid<T>::depth(), 0);
    for (T v : g.data()) ++h.bins[v];
    h.total = static_cast<std::uint64_t>(g.size());
    return h;
}

/// 16-to-8-bit requantization: tail quantiles (clip_fraction per side)
/// become the cutoffs, values map affinely to [0,255], rounded half-up.
std::pair<GridU8, NormalizationParams> normalize_u16_to_u8(const GridU16& g,
                                                           double clip_fraction = 1e-4);

namespace detail {

template <typename T>
std::vector<T> match_lut(const Histogram& hs, const Histogram& hr) {
    if (hr.total == 0) throw std::invalid_argument("histogram_match: empty reference");
    const std::size_t n = hs.bins.size();
    std::vector<double> cdf_s(n), cdf_r(n);
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += hs.bins[i];
        cdf_s[i] = static_cast<double>(acc) / static_cast<double>(hs.total);
    }
    acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += hr.bins[i];
        cdf_r[i] = static_cast<double>(acc) / static_cast<double>(hr.total);
    }
    std::vector<T> lut(n);
    std::size_t h = 0;
    for (std::size_t gval = 0; gval < n; ++gval) {
        while (h + 1 < n && cdf_r[h] < cdf_s[gval]) ++h;
        lut[gval] = static_cast<T>(h);
    }
    return lut;
}

}  // namespace detail

/// Maps each gray level g of src to the smallest level h with
/// CDF_ref(h) >= CDF_src(g); the map is monotone non-decreasing.
template <typename T>
VoxelGrid<T> histogram_match(const VoxelGrid<T>& src, const VoxelGrid<T>& ref) {
    auto lut = detail::match_lut<T>(histogram(src), histogram(ref));
    VoxelGrid<T> out(src.dims(), src.voxel_size());
    for (Index i = 0; i < src.size(); ++i)
        out.data()[static_cast<std::size_t>(i)] = lut[src.data()[static_cast<std::size_t>(i)]];
    return out;
}

struct ProfileSample {
    double distance_um = 0.0;
    double intensity = 0.0;
};

/// Nearest-voxel samples at unit voxel steps along the segment, from
/// start to end (voxel coordinates). Distances are micrometres.
template <typename T>
std::vector<ProfileSample> line_profile(const VoxelGrid<T>& g, const std::array<double, 3>& start,
                                        const std::array<double, 3>& end) {
    auto inside = [&](const std::array<double, 3>& p) {
        for (int a = 0; a < 3; ++a)
            if (p[a] < -0.5 || p[a] > static_cast<double>(g.dims()[a]) - 0.5) return false;
        return true;
    };
    if (!inside(start) || !inside(end))
        throw std::out_of_range("line_profile: endpoint outside grid");
    double dx = end[0] - start[0], dy = end[1] - start[1], dz = end[2] - start[2];
    double len = std::sqrt(dx * dx + dy * dy + dz * dz);
    Index steps = static_cast<Index>(std::floor(len));
    std::vector<ProfileSample> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    for (Index k = 0; k <= steps; ++k) {
        double t = len > 0.0 ? static_cast<double>(k) / len : 0.0;
        auto nearest = [&](double c, Index n) {
            return std::clamp<Index>(static_cast<Index>(std::floor(c + 0.5)), 0, n - 1);
        };
        Index x = nearest(start[0] + t * dx, g.nx());
        Index y = nearest(start[1] + t * dy, g.ny());
        Index z = nearest(start[2] + t * dz, g.nz());
        out.push_back({static_cast<double>(k) * g.voxel_size(),
                       static_cast<double>(g(x, y, z))});
    }
    return out;
}

}  // namespace dr::prep
