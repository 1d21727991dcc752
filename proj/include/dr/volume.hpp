#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dr/interp.hpp"
#include "dr/voxel_grid.hpp"

namespace dr {

enum class ResampleMethod { Trilinear, BicubicSlices, Nearest };
enum class Plane { XY, XZ };

template <typename T>
VoxelGrid<T> crop(const VoxelGrid<T>& g, const Region& r) {
    if (!r.fits(g)) throw std::out_of_range("crop: region outside grid");
    VoxelGrid<T> out(r.shape, g.voxel_size());
    for (Index z = 0; z < r.shape[2]; ++z)
        for (Index y = 0; y < r.shape[1]; ++y)
            for (Index x = 0; x < r.shape[0]; ++x)
                out(x, y, z) = g(r.origin[0] + x, r.origin[1] + y, r.origin[2] + z);
    return out;
}

template <typename T>
VoxelGrid<T> pad(const VoxelGrid<T>& g, const Dims3& lo, const Dims3& hi, T fill = T{}) {
    Dims3 d{g.nx() + lo[0] + hi[0], g.ny() + lo[1] + hi[1], g.nz() + lo[2] + hi[2]};
    VoxelGrid<T> out(d, g.voxel_size(), fill);
    for (Index z = 0; z < g.nz(); ++z)
        for (Index y = 0; y < g.ny(); ++y)
            for (Index x = 0; x < g.nx(); ++x)
                out(x + lo[0], y + lo[1], z + lo[2]) = g(x, y, z);
    return out;
}

namespace detail {

template <typename T>
std::vector<double> to_double(const VoxelGrid<T>& g) {
    return std::vector<double>(g.data().begin(), g.data().end());
}

template <typename T>
VoxelGrid<T> from_double(const std::vector<double>& v, const Dims3& dims, double voxel_size) {
    VoxelGrid<T> out(dims, voxel_size);
    if constexpr (std::is_floating_point_v<T>) {
        for (std::size_t i = 0; i < v.size(); ++i) out.data()[i] = static_cast<T>(v[i]);
    } else {
        const double top = static_cast<double>((1u << VoxelGrid<T>::depth()) - 1);
        for (std::size_t i = 0; i < v.size(); ++i) {
            double x = std::floor(std::clamp(v[i], 0.0, top) + 0.5);
            out.data()[i] = static_cast<T>(std::min(x, top));
        }
    }
    return out;
}

}  // namespace detail

/// Resamples by factor along every axis (down when factor < 1). Output
/// dims are round(factor * dims); sampling is origin-aligned (output i
/// reads source i / factor), values clamped to the depth range and
/// rounded half-up for integer grids.
template <typename T>
VoxelGrid<T> resample_aniso(const VoxelGrid<T>& g, double fx, double fy, double fz,
                            ResampleMethod method) {
    if (!(fx > 0.0) || !(fy > 0.0) || !(fz > 0.0))
        throw std::invalid_argument("resample: factor must be positive");
    Dims3 od{interp::scaled_dim(g.nx(), fx), interp::scaled_dim(g.ny(), fy),
             interp::scaled_dim(g.nz(), fz)};
    if (od[0] <= 0 || od[1] <= 0 || od[2] <= 0)
        throw std::invalid_argument("resample: output dimension is zero");
    double out_voxel = g.voxel_size() / std::cbrt(fx * fy * fz);

    if (method == ResampleMethod::Nearest) {
        VoxelGrid<T> out(od, out_voxel);
        const double fac[3] = {fx, fy, fz};
        std::vector<Index> mx(od[0]), my(od[1]), mz(od[2]);
        auto fill = [&](std::vector<Index>& m, Index n_in, Index n_out, double f) {
            for (Index i = 0; i < n_out; ++i)
                m[static_cast<std::size_t>(i)] =
                    std::clamp<Index>(static_cast<Index>(std::floor(i / f + 0.5)), 0, n_in - 1);
        };
        fill(mx, g.nx(), od[0], fac[0]);
        fill(my, g.ny(), od[1], fac[1]);
        fill(mz, g.nz(), od[2], fac[2]);
        for (Index z = 0; z < od[2]; ++z)
            for (Index y = 0; y < od[1]; ++y)
                for (Index x = 0; x < od[0]; ++x)
                    out(x, y, z) = g(mx[static_cast<std::size_t>(x)],
                                     my[static_cast<std::size_t>(y)],
                                     mz[static_cast<std::size_t>(z)]);
        return out;
    }

    std::vector<double> src = detail::to_double(g);
    std::vector<double> res =
        method == ResampleMethod::Trilinear
            ? interp::resize_linear_3d(src.data(), g.dims(), od, fx, fy, fz)
            : interp::resize_cubic_slices(src.data(), g.dims(), od, fx, fy, fz);
    return detail::from_double<T>(res, od, out_voxel);
}

template <typename T>
VoxelGrid<T> resample(const VoxelGrid<T>& g, double factor, ResampleMethod method) {
    return resample_aniso(g, factor, factor, factor, method);
}

/// Cuts the grid into 2D slices. XY keeps (x,y) and iterates z; XZ keeps
/// (x,z) and iterates y. Slices are grids with nz = 1.
template <typename T>
std::vector<VoxelGrid<T>> reslice(const VoxelGrid<T>& g, Plane plane) {
    if (g.empty()) throw std::invalid_argument("reslice: empty grid");
    std::vector<VoxelGrid<T>> slices;
    if (plane == Plane::XY) {
        slices.reserve(static_cast<std::size_t>(g.nz()));
        for (Index z = 0; z < g.nz(); ++z) {
            VoxelGrid<T> s({g.nx(), g.ny(), 1}, g.voxel_size());
            for (Index y = 0; y < g.ny(); ++y)
                for (Index x = 0; x < g.nx(); ++x) s(x, y, 0) = g(x, y, z);
            slices.push_back(std::move(s));
        }
    } else {
        slices.reserve(static_cast<std::size_t>(g.ny()));
        for (Index y = 0; y < g.ny(); ++y) {
            VoxelGrid<T> s({g.nx(), g.nz(), 1}, g.voxel_size());
            for (Index z = 0; z < g.nz(); ++z)
                for (Index x = 0; x < g.nx(); ++x) s(x, z, 0) = g(x, y, z);
            slices.push_back(std::move(s));
        }
    }
    return slices;
}

template <typename T>
VoxelGrid<T> stack(const std::vector<VoxelGrid<T>>& slices, Plane plane) {
    if (slices.empty()) throw std::invalid_argument("stack: no slices");
    Dims3 sd = slices.front().dims();
    for (const auto& s : slices)
        if (s.dims() != sd) throw std::invalid_argument("stack: inconsistent slice shapes");
    Index n = static_cast<Index>(slices.size());
    if (plane == Plane::XY) {
        VoxelGrid<T> g({sd[0], sd[1], n}, slices.front().voxel_size());
        for (Index z = 0; z < n; ++z) {
            const auto& s = slices[static_cast<std::size_t>(z)];
            for (Index y = 0; y < sd[1]; ++y)
                for (Index x = 0; x < sd[0]; ++x) g(x, y, z) = s(x, y, 0);
        }
        return g;
    }
    VoxelGrid<T> g({sd[0], n, sd[1]}, slices.front().voxel_size());
    for (Index y = 0; y < n; ++y) {
        const auto& s = slices[static_cast<std::size_t>(y)];
        for (Index z = 0; z < sd[1]; ++z)
            for (Index x = 0; x < sd[0]; ++x) g(x, y, z) = s(x, z, 0);
    }
    return g;
}

/// Registered LR/HR training patches. When paired, HR windows sit at
/// scale * the LR window origin and counts match.
struct PatchPairSet {
    std::vector<GridU8> lr_patches;
    std::vector<GridU8> hr_patches;
    int scale = 1;
    bool paired = false;
};

inline Index window_count(Index n, Index patch, Index step) {
    return n < patch ? 0 : (n - patch) / step + 1;
}

/// Sliding-window pair extraction. Windows that do not fit are dropped;
/// an axis with extent 1 (2D slices) yields the single full window.
inline PatchPairSet extract_paired_patches(const GridU8& lr, const GridU8& hr, Index lr_patch,
                                           Index lr_step, int scale) {
    if (scale < 1) throw std::invalid_argument("extract_paired_patches: scale must be >= 1");
    // Degenerate axes (2D slices with nz = 1) are exempt from the scale rule.
    Dims3 axis_scale;
    for (int a = 0; a < 3; ++a) {
        axis_scale[a] = (lr.dims()[a] == 1 && hr.dims()[a] == 1) ? 1 : scale;
        if (hr.dims()[a] != lr.dims()[a] * axis_scale[a])
            throw std::invalid_argument("extract_paired_patches: hr dims != scale * lr dims");
    }
    if (lr_patch <= 0 || lr_step <= 0)
        throw std::invalid_argument("extract_paired_patches: patch and step must be positive");
    PatchPairSet set;
    set.scale = scale;
    set.paired = true;
    Dims3 p{std::min(lr_patch, lr.nx()), std::min(lr_patch, lr.ny()), std::min(lr_patch, lr.nz())};
    for (int a = 0; a < 3; ++a)
        if (lr.dims()[a] > 1 && p[a] != lr_patch)
            throw std::invalid_argument("extract_paired_patches: patch larger than lr dims");
    Index cx = window_count(lr.nx(), p[0], lr_step);
    Index cy = window_count(lr.ny(), p[1], lr_step);
    Index cz = window_count(lr.nz(), p[2], lr_step);
    for (Index kz = 0; kz < cz; ++kz)
        for (Index ky = 0; ky < cy; ++ky)
            for (Index kx = 0; kx < cx; ++kx) {
                Dims3 o{kx * lr_step, ky * lr_step, kz * lr_step};
                set.lr_patches.push_back(crop(lr, Region{o, p}));
                set.hr_patches.push_back(
                    crop(hr, Region{{o[0] * axis_scale[0], o[1] * axis_scale[1],
                                     o[2] * axis_scale[2]},
                                    {p[0] * axis_scale[0], p[1] * axis_scale[1],
                                     p[2] * axis_scale[2]}}));
            }
    return set;
}

/// Unpaired sliding-window extraction from a single volume.
inline std::vector<GridU8> extract_patches(const GridU8& g, Index patch, Index step) {
    if (patch <= 0 || step <= 0)
        throw std::invalid_argument("extract_patches: patch and step must be positive");
    Dims3 p{std::min(patch, g.nx()), std::min(patch, g.ny()), std::min(patch, g.nz())};
    std::vector<GridU8> out;
    Index cx = window_count(g.nx(), p[0], step);
    Index cy = window_count(g.ny(), p[1], step);
    Index cz = window_count(g.nz(), p[2], step);
    for (Index kz = 0; kz < cz; ++kz)
        for (Index ky = 0; ky < cy; ++ky)
            for (Index kx = 0; kx < cx; ++kx)
                out.push_back(crop(g, Region{{kx * step, ky * step, kz * step}, p}));
    return out;
}

}  // namespace dr
