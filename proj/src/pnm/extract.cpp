#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

#include "dr/pnm/network.hpp"

namespace dr::pnm {

void PoreNetwork::validate() const {
    for (const auto& t : throats) {
        if (t.pore_i == t.pore_j) throw std::invalid_argument("PoreNetwork: self-loop throat");
        if (t.pore_i < 0 || t.pore_j < 0 ||
            t.pore_i >= static_cast<Index>(pores.size()) ||
            t.pore_j >= static_cast<Index>(pores.size()))
            throw std::invalid_argument("PoreNetwork: throat references missing pore");
        if (!(t.radius_um > 0.0) || !(t.length_um > 0.0))
            throw std::invalid_argument("PoreNetwork: non-positive throat geometry");
    }
    for (const auto& p : pores)
        if (!(p.radius_um > 0.0)) throw std::invalid_argument("PoreNetwork: non-positive radius");
}

PoreNetwork extract_network(const seg::LabelGrid& labels, const DistanceField& field) {
    if (!labels.same_shape(field))
        throw std::invalid_argument("extract_network: labels/field shape mismatch");
    const Index nx = labels.nx(), ny = labels.ny(), nz = labels.nz();
    const double vox = labels.voxel_size();

    PoreNetwork net;
    net.voxel_size_um = vox;
    net.area_um2 = static_cast<double>(nx) * static_cast<double>(ny) * vox * vox;
    net.length_um = static_cast<double>(nz) * vox;

    auto is_pore = [&](Index x, Index y, Index z) { return labels(x, y, z) == seg::PORE; };

    // 26-neighborhood local maxima of the distance field.
    std::vector<char> is_max(static_cast<std::size_t>(labels.size()), 0);
    bool any_pore = false;
    for (Index z = 0; z < nz; ++z)
        for (Index y = 0; y < ny; ++y)
            for (Index x = 0; x < nx; ++x) {
                if (!is_pore(x, y, z)) continue;
                any_pore = true;
                float v = field(x, y, z);
                bool max_here = true;
                for (Index dz = -1; dz <= 1 && max_here; ++dz)
                    for (Index dy = -1; dy <= 1 && max_here; ++dy)
                        for (Index dx = -1; dx <= 1 && max_here; ++dx) {
                            if (!dx && !dy && !dz) continue;
                            Index px = x + dx, py = y + dy, pz = z + dz;
                            if (px < 0 || py < 0 || pz < 0 || px >= nx || py >= ny || pz >= nz)
                                continue;
                            if (field(px, py, pz) > v) max_here = false;
                        }
                if (max_here) is_max[static_cast<std::size_t>(labels.index(x, y, z))] = 1;
            }
    if (!any_pore) return net;  // empty pore space, empty network

    // Merge equal-value plateau maxima (26-connected components) onto the
    // voxel nearest the component centroid.
    std::vector<Index> region(static_cast<std::size_t>(labels.size()), -1);
    std::vector<Dims3> seeds;
    std::vector<std::vector<Index>> plateau_members;
    for (Index z = 0; z < nz; ++z)
        for (Index y = 0; y < ny; ++y)
            for (Index x = 0; x < nx; ++x) {
                Index i0 = labels.index(x, y, z);
                if (!is_max[static_cast<std::size_t>(i0)] ||
                    region[static_cast<std::size_t>(i0)] >= 0)
                    continue;
                float v = field(x, y, z);
                std::vector<Index> comp;
                std::queue<Dims3> bfs;
                bfs.push({x, y, z});
                region[static_cast<std::size_t>(i0)] = static_cast<Index>(seeds.size());
                while (!bfs.empty()) {
                    Dims3 c = bfs.front();
                    bfs.pop();
                    comp.push_back(labels.index(c[0], c[1], c[2]));
                    for (Index dz = -1; dz <= 1; ++dz)
                        for (Index dy = -1; dy <= 1; ++dy)
                            for (Index dx = -1; dx <= 1; ++dx) {
                                Index px = c[0] + dx, py = c[1] + dy, pz = c[2] + dz;
                                if (px < 0 || py < 0 || pz < 0 || px >= nx || py >= ny ||
                                    pz >= nz)
                                    continue;
                                Index pi = labels.index(px, py, pz);
                                if (!is_max[static_cast<std::size_t>(pi)] ||
                                    region[static_cast<std::size_t>(pi)] >= 0)
                                    continue;
                                if (field(px, py, pz) != v) continue;
                                region[static_cast<std::size_t>(pi)] =
                                    static_cast<Index>(seeds.size());
                                bfs.push({px, py, pz});
                            }
                }
                double cxm = 0, cym = 0, czm = 0;
                for (Index i : comp) {
                    cxm += static_cast<double>(i % nx);
                    cym += static_cast<double>((i / nx) % ny);
                    czm += static_cast<double>(i / (nx * ny));
                }
                cxm /= comp.size();
                cym /= comp.size();
                czm /= comp.size();
                Index best = comp.front();
                double best_d = std::numeric_limits<double>::infinity();
                for (Index i : comp) {
                    double dx = static_cast<double>(i % nx) - cxm;
                    double dy = static_cast<double>((i / nx) % ny) - cym;
                    double dz = static_cast<double>(i / (nx * ny)) - czm;
                    double dd = dx * dx + dy * dy + dz * dz;
                    if (dd < best_d || (dd == best_d && i < best)) {
                        best_d = dd;
                        best = i;
                    }
                }
                seeds.push_back({best % nx, (best / nx) % ny, best / (nx * ny)});
                plateau_members.push_back(std::move(comp));
            }

    // Region growth: watershed of -distance (descending distance flood,
    // ties by insertion order). 26-connectivity matches the maxima
    // neighborhood so every pore voxel of a component gets labeled.
    struct Entry {
        float priority;  // -distance
        std::uint64_t order;
        Index index;
        Index region_id;
    };
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.priority != b.priority) return a.priority > b.priority;
        return a.order > b.order;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);
    std::uint64_t order = 0;
    auto push_neighbors = [&](Index x, Index y, Index z, Index rid) {
        for (Index dz = -1; dz <= 1; ++dz)
            for (Index dy = -1; dy <= 1; ++dy)
                for (Index dx = -1; dx <= 1; ++dx) {
                    if (!dx && !dy && !dz) continue;
                    Index px = x + dx, py = y + dy, pz = z + dz;
                    if (px < 0 || py < 0 || pz < 0 || px >= nx || py >= ny || pz >= nz)
                        continue;
                    if (!is_pore(px, py, pz)) continue;
                    Index pi = labels.index(px, py, pz);
                    if (region[static_cast<std::size_t>(pi)] >= 0) continue;
                    queue.push({-field(px, py, pz), order++, pi, rid});
                }
    };
    for (std::size_t r = 0; r < plateau_members.size(); ++r)
        for (Index i : plateau_members[r])
            push_neighbors(i % nx, (i / nx) % ny, i / (nx * ny), static_cast<Index>(r));
    while (!queue.empty()) {
        Entry e = queue.top();
        queue.pop();
        if (region[static_cast<std::size_t>(e.index)] >= 0) continue;
        region[static_cast<std::size_t>(e.index)] = e.region_id;
        push_neighbors(e.index % nx, (e.index / nx) % ny, e.index / (nx * ny), e.region_id);
    }

    // Pore attributes from the regions.
    net.pores.resize(seeds.size());
    for (std::size_t r = 0; r < seeds.size(); ++r) {
        Pore& p = net.pores[r];
        p.center = seeds[r];
        p.radius_um = static_cast<double>(field(seeds[r][0], seeds[r][1], seeds[r][2])) * vox;
    }
    std::vector<std::uint64_t> counts(seeds.size(), 0);
    for (Index z = 0; z < nz; ++z)
        for (Index y = 0; y < ny; ++y)
            for (Index x = 0; x < nx; ++x) {
                Index rid = region[static_cast<std::size_t>(labels.index(x, y, z))];
                if (rid < 0) continue;
                ++counts[static_cast<std::size_t>(rid)];
                if (z == 0) net.pores[static_cast<std::size_t>(rid)].inlet = true;
                if (z == nz - 1) net.pores[static_cast<std::size_t>(rid)].outlet = true;
            }
    for (std::size_t r = 0; r < seeds.size(); ++r)
        net.pores[r].volume_um3 = static_cast<double>(counts[r]) * vox * vox * vox;

    // Throats on region adjacency faces: aperture = max over the face of
    // the smaller voxel distance, clamped by the adjacent pore radii.
    std::map<std::pair<Index, Index>, double> face_radius;
    const Index fdeltas[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (Index z = 0; z < nz; ++z)
        for (Index y = 0; y < ny; ++y)
            for (Index x = 0; x < nx; ++x) {
                Index ra = region[static_cast<std::size_t>(labels.index(x, y, z))];
                if (ra < 0) continue;
                for (const auto& d : fdeltas) {
                    Index px = x + d[0], py = y + d[1], pz = z + d[2];
                    if (px >= nx || py >= ny || pz >= nz) continue;
                    Index rb = region[static_cast<std::size_t>(labels.index(px, py, pz))];
                    if (rb < 0 || rb == ra) continue;
                    double aperture =
                        std::min(static_cast<double>(field(x, y, z)),
                                 static_cast<double>(field(px, py, pz)));
                    auto key = std::minmax(ra, rb);
                    auto [it, inserted] = face_radius.emplace(key, aperture);
                    if (!inserted) it->second = std::max(it->second, aperture);
                }
            }
    for (const auto& [key, aperture] : face_radius) {
        const Pore& a = net.pores[static_cast<std::size_t>(key.first)];
        const Pore& b = net.pores[static_cast<std::size_t>(key.second)];
        Throat t;
        t.pore_i = key.first;
        t.pore_j = key.second;
        t.radius_um = std::min({aperture * vox, a.radius_um, b.radius_um});
        double dx = static_cast<double>(a.center[0] - b.center[0]);
        double dy = static_cast<double>(a.center[1] - b.center[1]);
        double dz = static_cast<double>(a.center[2] - b.center[2]);
        double cc = std::sqrt(dx * dx + dy * dy + dz * dz) * vox;
        t.length_um = std::max(cc - a.radius_um - b.radius_um, vox);
        net.throats.push_back(t);
    }
    return net;
}

std::vector<PsdBin> pore_size_distribution(const PoreNetwork& net) {
    std::vector<PsdBin> bins;
    if (net.pores.empty()) return bins;
    const double w = net.voxel_size_um;
    double r_max = 0.0;
    for (const auto& p : net.pores) r_max = std::max(r_max, p.radius_um);
    std::size_t n = static_cast<std::size_t>(std::floor(r_max / w)) + 1;
    bins.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        bins[i].radius_lo_um = static_cast<double>(i) * w;
        bins[i].radius_hi_um = static_cast<double>(i + 1) * w;
    }
    for (const auto& p : net.pores)
        ++bins[static_cast<std::size_t>(std::floor(p.radius_um / w))].count;
    return bins;
}

}  // namespace dr::pnm
