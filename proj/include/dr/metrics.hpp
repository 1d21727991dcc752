#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "dr/voxel_grid.hpp"

namespace dr::metrics {

/// 20 log10(MAX) - 10 log10(MSE); +inf sentinel for identical inputs.
template <typename T>
double psnr(const VoxelGrid<T>& a, const VoxelGrid<T>& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
    double mse = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        double d = static_cast<double>(a.data()[static_cast<std::size_t>(i)]) -
                   static_cast<double>(b.data()[static_cast<std::size_t>(i)]);
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    const double max_val = static_cast<double>((1u << VoxelGrid<T>::depth()) - 1);
    return 20.0 * std::log10(max_val) - 10.0 * std::log10(mse);
}

struct SsimOptions {
    int window = 11;      // truncated Gaussian support per axis
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
};

/// Mean local SSIM over every voxel where the full window fits, with a
/// normalized 3D Gaussian window. The volume is treated volumetrically.
double ssim(const GridU8& a, const GridU8& b, const SsimOptions& opt = {});

/// Central differences in the interior, one-sided at faces; Euclidean
/// norm of the three partials, in intensity variation per voxel.
GridF32 gradient_magnitude(const GridU8& g);

struct JointHistogram {
    int intensity_bins = 256;
    int gradient_bins = 0;
    double gradient_bin_width = 0.0;  // intensity variation per voxel
    std::vector<std::uint64_t> counts;  // intensity-major: [intensity * gradient_bins + gbin]
    std::uint64_t total = 0;

    std::uint64_t at(int intensity, int gbin) const {
        return counts[static_cast<std::size_t>(intensity) *
                          static_cast<std::size_t>(gradient_bins) +
                      static_cast<std::size_t>(gbin)];
    }
    std::vector<std::uint64_t> intensity_marginal() const;
};

/// Joint intensity/gradient-magnitude counts. With a cutoff, only voxels
/// with magnitude <= cutoff enter and the gradient axis covers [0, cutoff];
/// otherwise it covers [0, max observed].
JointHistogram intensity_gradient_histogram(const GridU8& g, int gradient_bins = 64,
                                            std::optional<double> grad_cutoff = std::nullopt);

}  // namespace dr::metrics
