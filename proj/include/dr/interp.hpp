#pragma once

#include <cstdint>
#include <vector>

#include "dr/voxel_grid.hpp"

namespace dr::interp {

/// One output sample of a 1D linear kernel: v = v[i0] + w1 * (v[i1] - v[i0]).
struct LinearTap {
    Index i0 = 0;
    Index i1 = 0;
    double w1 = 0.0;
};

/// One output sample of a 1D Catmull-Rom kernel (a = -0.5), edge-clamped.
struct CubicTap {
    Index idx[4] = {0, 0, 0, 0};
    double w[4] = {0, 0, 0, 0};
};

/// Output index i samples source coordinate i / factor (origin-aligned).
/// Factor 1 is the identity; constants are preserved for any factor.
std::vector<LinearTap> linear_axis(Index n_in, Index n_out, double factor);
std::vector<CubicTap> cubic_axis(Index n_in, Index n_out, double factor);

/// Separable linear resize of a dense double buffer, x then y then z.
/// The volume resampler and the network upsampling layer both route
/// through here so their outputs agree bit-for-bit.
std::vector<double> resize_linear_3d(const double* src, const Dims3& in, const Dims3& out,
                                     double fx, double fy, double fz);

/// Adjoint of resize_linear_3d: scatters gradients at the output back to
/// source positions (transpose of the interpolation map).
std::vector<double> resize_linear_3d_adjoint(const double* grad_out, const Dims3& in,
                                             const Dims3& out, double fx, double fy, double fz);

/// Cubic in x and y, linear in z (the per-2D-slice bicubic convention).
std::vector<double> resize_cubic_slices(const double* src, const Dims3& in, const Dims3& out,
                                        double fx, double fy, double fz);

Index scaled_dim(Index n, double factor);

}  // namespace dr::interp
