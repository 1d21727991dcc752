#include "dr/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dr::interp {

Index scaled_dim(Index n, double factor) {
    return static_cast<Index>(std::floor(static_cast<double>(n) * factor + 0.5));
}

std::vector<LinearTap> linear_axis(Index n_in, Index n_out, double factor) {
    std::vector<LinearTap> taps(static_cast<std::size_t>(n_out));
    for (Index i = 0; i < n_out; ++i) {
        double src = static_cast<double>(i) / factor;
        Index i0 = static_cast<Index>(std::floor(src));
        double f = src - static_cast<double>(i0);
        if (i0 < 0) { i0 = 0; f = 0.0; }
        if (i0 >= n_in - 1) { i0 = n_in - 1; f = 0.0; }
        taps[static_cast<std::size_t>(i)] = {i0, std::min<Index>(i0 + 1, n_in - 1), f};
    }
    return taps;
}

namespace {

// Catmull-Rom weights for fractional offset f in [0,1): taps at i0-1..i0+2.
inline void catmull_rom(double f, double w[4]) {
    const double a = -0.5;
    double f2 = f * f, f3 = f2 * f;
    w[0] = a * f3 - 2.0 * a * f2 + a * f;
    w[1] = (a + 2.0) * f3 - (a + 3.0) * f2 + 1.0;
    w[2] = -(a + 2.0) * f3 + (2.0 * a + 3.0) * f2 - a * f;
    w[3] = -a * f3 + a * f2;
}

}  // namespace

std::vector<CubicTap> cubic_axis(Index n_in, Index n_out, double factor) {
    std::vector<CubicTap> taps(static_cast<std::size_t>(n_out));
    for (Index i = 0; i < n_out; ++i) {
        double src = static_cast<double>(i) / factor;
        Index i0 = static_cast<Index>(std::floor(src));
        double f = src - static_cast<double>(i0);
        CubicTap t;
        catmull_rom(f, t.w);
        for (int k = 0; k < 4; ++k)
            t.idx[k] = std::clamp<Index>(i0 - 1 + k, 0, n_in - 1);
        taps[static_cast<std::size_t>(i)] = t;
    }
    return taps;
}

namespace {

// Applies a linear axis table along one axis of a (nx,ny,nz) buffer.
std::vector<double> apply_linear_axis(const std::vector<double>& src, Dims3 d, int axis,
                                      const std::vector<LinearTap>& taps) {
    Dims3 od = d;
    od[axis] = static_cast<Index>(taps.size());
    std::vector<double> out(static_cast<std::size_t>(volume_of(od)));
    const Index stride[3] = {1, d[0], d[0] * d[1]};
    const Index ostride[3] = {1, od[0], od[0] * od[1]};
    for (Index z = 0; z < od[2]; ++z)
        for (Index y = 0; y < od[1]; ++y)
            for (Index x = 0; x < od[0]; ++x) {
                Index oi[3] = {x, y, z};
                const LinearTap& t = taps[static_cast<std::size_t>(oi[axis])];
                Index si[3] = {x, y, z};
                si[axis] = t.i0;
                Index s0 = si[0] * stride[0] + si[1] * stride[1] + si[2] * stride[2];
                si[axis] = t.i1;
                Index s1 = si[0] * stride[0] + si[1] * stride[1] + si[2] * stride[2];
                double v0 = src[static_cast<std::size_t>(s0)];
                double v1 = src[static_cast<std::size_t>(s1)];
                out[static_cast<std::size_t>(oi[0] * ostride[0] + oi[1] * ostride[1] +
                                             oi[2] * ostride[2])] = v0 + t.w1 * (v1 - v0);
            }
    return out;
}

std::vector<double> apply_cubic_axis(const std::vector<double>& src, Dims3 d, int axis,
                                     const std::vector<CubicTap>& taps) {
    Dims3 od = d;
    od[axis] = static_cast<Index>(taps.size());
    std::vector<double> out(static_cast<std::size_t>(volume_of(od)));
    const Index stride[3] = {1, d[0], d[0] * d[1]};
    const Index ostride[3] = {1, od[0], od[0] * od[1]};
    for (Index z = 0; z < od[2]; ++z)
        for (Index y = 0; y < od[1]; ++y)
            for (Index x = 0; x < od[0]; ++x) {
                Index oi[3] = {x, y, z};
                const CubicTap& t = taps[static_cast<std::size_t>(oi[axis])];
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) {
                    Index si[3] = {x, y, z};
                    si[axis] = t.idx[k];
                    acc += t.w[k] * src[static_cast<std::size_t>(si[0] * stride[0] +
                                                                 si[1] * stride[1] +
                                                                 si[2] * stride[2])];
                }
                out[static_cast<std::size_t>(oi[0] * ostride[0] + oi[1] * ostride[1] +
                                             oi[2] * ostride[2])] = acc;
            }
    return out;
}

}  // namespace

std::vector<double> resize_linear_3d(const double* src, const Dims3& in, const Dims3& out,
                                     double fx, double fy, double fz) {
    std::vector<double> buf(src, src + volume_of(in));
    Dims3 d = in;
    const double fac[3] = {fx, fy, fz};
    const Dims3 target = out;
    for (int axis = 0; axis < 3; ++axis) {
        if (d[axis] == target[axis] && fac[axis] == 1.0) continue;
        auto taps = linear_axis(d[axis], target[axis], fac[axis]);
        buf = apply_linear_axis(buf, d, axis, taps);
        d[axis] = target[axis];
    }
    return buf;
}

std::vector<double> resize_linear_3d_adjoint(const double* grad_out, const Dims3& in,
                                             const Dims3& out, double fx, double fy, double fz) {
    // Transpose per axis in reverse order (z, y, x).
    std::vector<double> buf(grad_out, grad_out + volume_of(out));
    Dims3 d = out;
    const double fac[3] = {fx, fy, fz};
    for (int axis = 2; axis >= 0; --axis) {
        if (d[axis] == in[axis] && fac[axis] == 1.0) continue;
        auto taps = linear_axis(in[axis], d[axis], fac[axis]);
        Dims3 od = d;
        od[axis] = in[axis];
        std::vector<double> acc(static_cast<std::size_t>(volume_of(od)), 0.0);
        const Index stride[3] = {1, d[0], d[0] * d[1]};
        const Index ostride[3] = {1, od[0], od[0] * od[1]};
        for (Index z = 0; z < d[2]; ++z)
            for (Index y = 0; y < d[1]; ++y)
                for (Index x = 0; x < d[0]; ++x) {
                    Index oi[3] = {x, y, z};
                    const LinearTap& t = taps[static_cast<std::size_t>(oi[axis])];
                    double g = buf[static_cast<std::size_t>(x * stride[0] + y * stride[1] +
                                                            z * stride[2])];
                    Index si[3] = {x, y, z};
                    si[axis] = t.i0;
                    acc[static_cast<std::size_t>(si[0] * ostride[0] + si[1] * ostride[1] +
                                                 si[2] * ostride[2])] += (1.0 - t.w1) * g;
                    si[axis] = t.i1;
                    acc[static_cast<std::size_t>(si[0] * ostride[0] + si[1] * ostride[1] +
                                                 si[2] * ostride[2])] += t.w1 * g;
                }
        buf = std::move(acc);
        d = od;
    }
    return buf;
}

std::vector<double> resize_cubic_slices(const double* src, const Dims3& in, const Dims3& out,
                                        double fx, double fy, double fz) {
    std::vector<double> buf(src, src + volume_of(in));
    Dims3 d = in;
    if (d[0] != out[0] || fx != 1.0) {
        buf = apply_cubic_axis(buf, d, 0, cubic_axis(d[0], out[0], fx));
        d[0] = out[0];
    }
    if (d[1] != out[1] || fy != 1.0) {
        buf = apply_cubic_axis(buf, d, 1, cubic_axis(d[1], out[1], fy));
        d[1] = out[1];
    }
    if (d[2] != out[2] || fz != 1.0) {
        buf = apply_linear_axis(buf, d, 2, linear_axis(d[2], out[2], fz));
        d[2] = out[2];
    }
    return buf;
}

}  // namespace dr::interp
