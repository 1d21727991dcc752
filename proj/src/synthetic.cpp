#include "dr/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "dr/rng.hpp"
#include "dr/segment.hpp"

namespace dr::synth {

GridU8 gaussian_blur(const GridU8& g, double sigma) {
    if (!(sigma > 0.0)) return g;
    int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double v = std::exp(-0.5 * i * i / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : kernel) v /= sum;

    std::vector<double> buf(g.data().begin(), g.data().end());
    std::vector<double> tmp(buf.size());
    const Dims3 d = g.dims();
    const Index stride[3] = {1, d[0], d[0] * d[1]};
    for (int axis = 0; axis < 3; ++axis) {
        if (d[axis] < 2) continue;
        for (Index z = 0; z < d[2]; ++z)
            for (Index y = 0; y < d[1]; ++y)
                for (Index x = 0; x < d[0]; ++x) {
                    Index idx[3] = {x, y, z};
                    double acc = 0.0;
                    for (int k = -radius; k <= radius; ++k) {
                        Index j = std::clamp<Index>(idx[axis] + k, 0, d[axis] - 1);
                        Index src[3] = {x, y, z};
                        src[axis] = j;
                        acc += kernel[static_cast<std::size_t>(k + radius)] *
                               buf[static_cast<std::size_t>(src[0] * stride[0] +
                                                            src[1] * stride[1] +
                                                            src[2] * stride[2])];
                    }
                    tmp[static_cast<std::size_t>(x * stride[0] + y * stride[1] +
                                                 z * stride[2])] = acc;
                }
        buf.swap(tmp);
    }
    GridU8 out(d, g.voxel_size());
    for (std::size_t i = 0; i < buf.size(); ++i)
        out.data()[i] = static_cast<std::uint8_t>(
            std::min(255.0, std::floor(std::clamp(buf[i], 0.0, 255.0) + 0.5)));
    return out;
}

SpherePack sphere_pack(const SpherePackConfig& cfg) {
    GridU8 mask(cfg.dims, cfg.voxel_size_um, seg::GRAIN);
    Rng rng(cfg.seed);
    const Index n = mask.size();
    const auto target = static_cast<std::uint64_t>(cfg.target_porosity * static_cast<double>(n));
    std::uint64_t pore_count = 0;

    int guard = 0;
    while (pore_count < target && guard < 100000) {
        ++guard;
        double r = rng.uniform(cfg.radius_min, cfg.radius_max);
        double cx = rng.uniform(0.0, static_cast<double>(cfg.dims[0]));
        double cy = rng.uniform(0.0, static_cast<double>(cfg.dims[1]));
        double cz = rng.uniform(0.0, static_cast<double>(cfg.dims[2]));
        Index x0 = std::max<Index>(0, static_cast<Index>(std::floor(cx - r)));
        Index x1 = std::min(cfg.dims[0] - 1, static_cast<Index>(std::ceil(cx + r)));
        Index y0 = std::max<Index>(0, static_cast<Index>(std::floor(cy - r)));
        Index y1 = std::min(cfg.dims[1] - 1, static_cast<Index>(std::ceil(cy + r)));
        Index z0 = std::max<Index>(0, static_cast<Index>(std::floor(cz - r)));
        Index z1 = std::min(cfg.dims[2] - 1, static_cast<Index>(std::ceil(cz + r)));
        for (Index z = z0; z <= z1; ++z)
            for (Index y = y0; y <= y1; ++y)
                for (Index x = x0; x <= x1; ++x) {
                    double dx = x - cx, dy = y - cy, dz = z - cz;
                    if (dx * dx + dy * dy + dz * dz > r * r) continue;
                    auto& cell = mask.data()[static_cast<std::size_t>(mask.index(x, y, z))];
                    if (cell != seg::PORE) {
                        cell = seg::PORE;
                        ++pore_count;
                    }
                }
    }

    GridU8 gray(cfg.dims, cfg.voxel_size_um, cfg.grain_value);
    for (Index i = 0; i < n; ++i)
        if (mask.data()[static_cast<std::size_t>(i)] == seg::PORE)
            gray.data()[static_cast<std::size_t>(i)] = cfg.pore_value;

    // Optional micro-texture: small intermediate-intensity pockets in grain.
    if (cfg.micro_fraction > 0.0) {
        auto micro_target =
            static_cast<std::uint64_t>(cfg.micro_fraction * static_cast<double>(n));
        std::uint64_t painted = 0;
        int tries = 0;
        while (painted < micro_target && tries < 100000) {
            ++tries;
            Index side = 2 + static_cast<Index>(rng.below(3));
            Index x0 = static_cast<Index>(rng.below(static_cast<std::uint64_t>(
                std::max<Index>(1, cfg.dims[0] - side))));
            Index y0 = static_cast<Index>(rng.below(static_cast<std::uint64_t>(
                std::max<Index>(1, cfg.dims[1] - side))));
            Index z0 = static_cast<Index>(rng.below(static_cast<std::uint64_t>(
                std::max<Index>(1, cfg.dims[2] - side))));
            auto value = static_cast<std::uint8_t>(
                cfg.pore_value + 20 + rng.below(cfg.grain_value - cfg.pore_value - 40));
            for (Index z = z0; z < z0 + side; ++z)
                for (Index y = y0; y < y0 + side; ++y)
                    for (Index x = x0; x < x0 + side; ++x) {
                        Index i = mask.index(x, y, z);
                        if (mask.data()[static_cast<std::size_t>(i)] != seg::GRAIN) continue;
                        if (gray.data()[static_cast<std::size_t>(i)] != cfg.grain_value) continue;
                        gray.data()[static_cast<std::size_t>(i)] = value;
                        ++painted;
                    }
        }
    }

    SpherePack out;
    out.gray = gaussian_blur(gray, cfg.blur_sigma);
    out.mask = std::move(mask);
    out.porosity = static_cast<double>(pore_count) / static_cast<double>(n);
    return out;
}

TwoModeVolume two_mode_volume() {
    TwoModeVolume tm;
    const int valley = tm.valley;
    const std::uint8_t pore = 40, grain = 200;

    // Stripe thickness profile over the open interval (40, 200): 6 planes
    // everywhere except a 3-plane dip at the valley; the first and last
    // stripes get 3 guard planes against the domain boundary.
    std::vector<int> thickness;
    Index ladder_len = 0;
    for (int g = pore + 1; g < grain; ++g) {
        int t = g == valley ? 3 : 6;
        if (g == pore + 1 || g == grain - 1) t += 3;
        thickness.push_back(t);
        ladder_len += t;
    }

    const Index cyl_zone = 72;
    const Index gap = 16;
    Dims3 dims{cyl_zone + gap + ladder_len + gap, 24, 24};
    GridU8 g(dims, 1.0, grain);

    // Pore cylinder along x in the first zone; its blurred rim supplies
    // the interfacial gradient population.
    const double cy = 11.5, cz = 11.5, radius = 9.0;
    for (Index z = 0; z < dims[2]; ++z)
        for (Index y = 0; y < dims[1]; ++y) {
            double dy = y - cy, dz = z - cz;
            if (dy * dy + dz * dz > radius * radius) continue;
            for (Index x = 8; x < cyl_zone - 8; ++x) g(x, y, z) = pore;
        }
    g = gaussian_blur(g, 0.8);

    // Intensity ladder spanning the full cross-section, ascending so
    // neighbor stripes differ by one gray level.
    Index x = cyl_zone + gap;
    for (int gi = pore + 1; gi < grain; ++gi) {
        int t = thickness[static_cast<std::size_t>(gi - pore - 1)];
        for (int k = 0; k < t; ++k, ++x)
            for (Index z = 0; z < dims[2]; ++z)
                for (Index y = 0; y < dims[1]; ++y)
                    g(x, y, z) = static_cast<std::uint8_t>(gi);
    }
    tm.grid = std::move(g);
    return tm;
}

GridU8 texture_patch_2d(Index size, Index block, std::uint64_t seed) {
    Rng rng(seed);
    GridU8 g({size, size, 1}, 1.0);
    Index nb = (size + block - 1) / block;
    std::vector<std::uint8_t> cell(static_cast<std::size_t>(nb * nb));
    for (auto& v : cell) v = rng.below(2) ? 255 : 0;
    for (Index y = 0; y < size; ++y)
        for (Index x = 0; x < size; ++x)
            g(x, y, 0) = cell[static_cast<std::size_t>((x / block) + nb * (y / block))];
    return g;
}

PatchPairSet texture_task(int n_patches, Index hr_size, int scale, std::uint64_t seed) {
    PatchPairSet set;
    set.scale = scale;
    set.paired = true;
    for (int i = 0; i < n_patches; ++i) {
        GridU8 hr = texture_patch_2d(hr_size, scale, seed + static_cast<std::uint64_t>(i));
        GridU8 lr = resample_aniso(hr, 1.0 / scale, 1.0 / scale, 1.0, ResampleMethod::Nearest);
        set.hr_patches.push_back(std::move(hr));
        set.lr_patches.push_back(std::move(lr));
    }
    return set;
}

GridU16 widen_to_u16(const GridU8& g, std::uint64_t seed, int noise) {
    Rng rng(seed);
    GridU16 out(g.dims(), g.voxel_size());
    for (Index i = 0; i < g.size(); ++i) {
        int v = 257 * static_cast<int>(g.data()[static_cast<std::size_t>(i)]);
        v += static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * noise + 1))) - noise;
        out.data()[static_cast<std::size_t>(i)] =
            static_cast<std::uint16_t>(std::clamp(v, 0, 65535));
    }
    return out;
}

micp::MicpCurve thomeer_curve(const micp::ThomeerModel& model, int n_points) {
    double pd_min = std::numeric_limits<double>::infinity(), pd_max = 0.0;
    for (const auto& s : model.systems) {
        pd_min = std::min(pd_min, s.p_d);
        pd_max = std::max(pd_max, s.p_d);
    }
    double lo = std::log10(pd_min * 1.05);
    double hi = std::log10(pd_max * 1000.0);
    micp::MicpCurve curve;
    for (int i = 0; i < n_points; ++i) {
        double pc = std::pow(10.0, lo + (hi - lo) * i / (n_points - 1));
        curve.points.push_back({pc, micp::thomeer_eval(model, pc)});
    }
    curve.validate();
    return curve;
}

}  // namespace dr::synth
