#include "dr/segment.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include "dr/rng.hpp"

namespace dr::seg {

void ThresholdPair::validate() const {
    if (pore_max >= grain_min)
        throw std::invalid_argument("ThresholdPair: pore_max must be < grain_min");
    if (pore_max < 0 || grain_min > 255)
        throw std::invalid_argument("ThresholdPair: thresholds outside the 8-bit range");
    if (!(grad_cutoff > 0.0))
        throw std::invalid_argument("ThresholdPair: grad_cutoff must be > 0");
}

ThresholdPair select_optimal_thresholds(const GridU8& grid, const SelectConfig& cfg) {
    if (grid.empty()) throw std::invalid_argument("select_optimal_thresholds: empty grid");
    if (cfg.n_regions < 1 || cfg.half_width < 0)
        throw std::invalid_argument("select_optimal_thresholds: bad config");
    GridF32 mag = metrics::gradient_magnitude(grid);

    // Interfacial percentile over the nonzero-gradient population; a
    // constant volume has no interfaces to sample.
    std::vector<float> nonzero;
    nonzero.reserve(static_cast<std::size_t>(mag.size() / 8));
    for (float v : mag.data())
        if (v > 0.0f) nonzero.push_back(v);
    if (nonzero.empty())
        throw std::runtime_error("select_optimal_thresholds: gradient field is identically zero");
    std::size_t rank = static_cast<std::size_t>(
        cfg.interfacial_percentile * static_cast<double>(nonzero.size() - 1));
    std::nth_element(nonzero.begin(), nonzero.begin() + static_cast<std::ptrdiff_t>(rank),
                     nonzero.end());
    const double p_high = nonzero[rank];

    std::vector<Index> candidates;
    for (Index i = 0; i < mag.size(); ++i)
        if (mag.data()[static_cast<std::size_t>(i)] >= p_high) candidates.push_back(i);
    if (candidates.empty())
        throw std::runtime_error("select_optimal_thresholds: no interfacial candidates");

    // Sample regions around seeded interfacial voxels; the cutoff is the
    // minimum interfacial gradient seen across all sampled regions.
    Rng rng(cfg.seed);
    double cutoff = std::numeric_limits<double>::infinity();
    const Index r = cfg.region_radius;
    for (int k = 0; k < cfg.n_regions; ++k) {
        Index seed = candidates[rng.below(candidates.size())];
        Index sx = seed % grid.nx();
        Index sy = (seed / grid.nx()) % grid.ny();
        Index sz = seed / (grid.nx() * grid.ny());
        double region_min = std::numeric_limits<double>::infinity();
        for (Index z = std::max<Index>(0, sz - r); z <= std::min(grid.nz() - 1, sz + r); ++z)
            for (Index y = std::max<Index>(0, sy - r); y <= std::min(grid.ny() - 1, sy + r); ++y)
                for (Index x = std::max<Index>(0, sx - r); x <= std::min(grid.nx() - 1, sx + r);
                     ++x) {
                    double v = mag(x, y, z);
                    if (v >= p_high) region_min = std::min(region_min, v);
                }
        cutoff = std::min(cutoff, region_min);
    }

    // Intensity marginal restricted to gradient <= cutoff.
    std::vector<std::uint64_t> marginal(256, 0);
    for (Index i = 0; i < grid.size(); ++i)
        if (mag.data()[static_cast<std::size_t>(i)] <= cutoff)
            ++marginal[grid.data()[static_cast<std::size_t>(i)]];

    // Two dominant modes, then the lowest-count valley between them.
    int mode1 = 0;
    for (int g = 1; g < 256; ++g)
        if (marginal[static_cast<std::size_t>(g)] > marginal[static_cast<std::size_t>(mode1)])
            mode1 = g;
    int mode2 = -1;
    for (int g = 0; g < 256; ++g) {
        if (std::abs(g - mode1) < cfg.min_mode_separation) continue;
        if (mode2 < 0 ||
            marginal[static_cast<std::size_t>(g)] > marginal[static_cast<std::size_t>(mode2)])
            mode2 = g;
    }
    if (mode2 < 0 || marginal[static_cast<std::size_t>(mode2)] == 0)
        throw std::runtime_error("select_optimal_thresholds: restricted histogram is unimodal");
    int lo = std::min(mode1, mode2), hi = std::max(mode1, mode2);
    int valley = -1;
    // Ties in the count break toward the midpoint of the two modes.
    const int mid2 = lo + hi;
    auto better = [&](int g, int best) {
        auto cg = marginal[static_cast<std::size_t>(g)];
        auto cb = marginal[static_cast<std::size_t>(best)];
        if (cg != cb) return cg < cb;
        int dg = std::abs(2 * g - mid2), db = std::abs(2 * best - mid2);
        if (dg != db) return dg < db;
        return g < best;
    };
    for (int g = lo + 1; g < hi; ++g)
        if (valley < 0 || better(g, valley)) valley = g;
    if (valley < 0 ||
        marginal[static_cast<std::size_t>(valley)] >= marginal[static_cast<std::size_t>(lo)] ||
        marginal[static_cast<std::size_t>(valley)] >= marginal[static_cast<std::size_t>(hi)])
        throw std::runtime_error("select_optimal_thresholds: no valley between modes");

    ThresholdPair t;
    t.pore_max = valley - cfg.half_width;
    t.grain_min = valley + cfg.half_width;
    t.grad_cutoff = cutoff;
    t.validate();
    return t;
}

LabelGrid watershed_segment(const GridU8& grid, const ThresholdPair& thresholds) {
    thresholds.validate();
    if (grid.empty()) throw std::invalid_argument("watershed_segment: empty grid");
    GridF32 mag = metrics::gradient_magnitude(grid);

    constexpr std::uint8_t UNSET = 128;
    LabelGrid labels(grid.dims(), grid.voxel_size(), UNSET);
    std::uint64_t n_pore = 0, n_grain = 0;
    for (Index i = 0; i < grid.size(); ++i) {
        int v = grid.data()[static_cast<std::size_t>(i)];
        if (v <= thresholds.pore_max) {
            labels.data()[static_cast<std::size_t>(i)] = PORE;
            ++n_pore;
        } else if (v >= thresholds.grain_min) {
            labels.data()[static_cast<std::size_t>(i)] = GRAIN;
            ++n_grain;
        }
    }
    if (n_pore == 0 || n_grain == 0)
        throw std::runtime_error("watershed_segment: a marker class is empty");

    struct Entry {
        double priority;
        std::uint64_t order;
        Index index;
        std::uint8_t label;
    };
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.priority != b.priority) return a.priority > b.priority;
        return a.order > b.order;  // FIFO among equal priorities
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);
    std::uint64_t order = 0;

    const Index nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
    auto push_neighbors = [&](Index x, Index y, Index z, std::uint8_t label) {
        const Index deltas[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                    {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
        for (const auto& d : deltas) {
            Index px = x + d[0], py = y + d[1], pz = z + d[2];
            if (px < 0 || py < 0 || pz < 0 || px >= nx || py >= ny || pz >= nz) continue;
            if (labels(px, py, pz) != UNSET) continue;
            queue.push({static_cast<double>(mag(px, py, pz)), order++,
                        labels.index(px, py, pz), label});
        }
    };

    for (Index z = 0; z < nz; ++z)
        for (Index y = 0; y < ny; ++y)
            for (Index x = 0; x < nx; ++x)
                if (labels(x, y, z) != UNSET) push_neighbors(x, y, z, labels(x, y, z));

    while (!queue.empty()) {
        Entry e = queue.top();
        queue.pop();
        std::uint8_t& cell = labels.data()[static_cast<std::size_t>(e.index)];
        if (cell != UNSET) continue;
        cell = e.label;
        Index x = e.index % nx;
        Index y = (e.index / nx) % ny;
        Index z = e.index / (nx * ny);
        push_neighbors(x, y, z, e.label);
    }
    return labels;
}

ThresholdPair shift_thresholds(const ThresholdPair& base, int delta) {
    ThresholdPair t = base;
    t.pore_max += delta;
    t.grain_min += delta;
    t.validate();
    return t;
}

std::vector<LabelGrid> threshold_sweep(const GridU8& grid, const ThresholdPair& base,
                                       const std::vector<int>& deltas) {
    std::vector<LabelGrid> out;
    out.reserve(deltas.size());
    for (int d : deltas) out.push_back(watershed_segment(grid, shift_thresholds(base, d)));
    return out;
}

}  // namespace dr::seg
