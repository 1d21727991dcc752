#include "dr/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace dr::metrics {

double ssim(const GridU8& a, const GridU8& b, const SsimOptions& opt) {
    if (!a.same_shape(b)) throw std::invalid_argument("ssim: shape mismatch");
    if (a.empty()) throw std::invalid_argument("ssim: empty grid");
    const int w = opt.window;
    for (int axis = 0; axis < 3; ++axis)
        if (a.dims()[axis] < w && a.dims()[axis] > 1)
            throw std::invalid_argument("ssim: window larger than grid");
    // Degenerate axes (2D slices) collapse the window along that axis.
    int wx = a.nx() > 1 ? w : 1, wy = a.ny() > 1 ? w : 1, wz = a.nz() > 1 ? w : 1;

    auto gauss1d = [&](int n) {
        std::vector<double> k(static_cast<std::size_t>(n));
        double c = (n - 1) / 2.0;
        for (int i = 0; i < n; ++i)
            k[static_cast<std::size_t>(i)] =
                std::exp(-0.5 * (i - c) * (i - c) / (opt.sigma * opt.sigma));
        return k;
    };
    auto kx = gauss1d(wx), ky = gauss1d(wy), kz = gauss1d(wz);
    std::vector<double> wgt(static_cast<std::size_t>(wx * wy * wz));
    double sum = 0.0;
    for (int z = 0; z < wz; ++z)
        for (int y = 0; y < wy; ++y)
            for (int x = 0; x < wx; ++x) {
                double v = kx[static_cast<std::size_t>(x)] * ky[static_cast<std::size_t>(y)] *
                           kz[static_cast<std::size_t>(z)];
                wgt[static_cast<std::size_t>(x + wx * (y + wy * z))] = v;
                sum += v;
            }
    for (double& v : wgt) v /= sum;

    const double max_val = 255.0;
    const double c1 = (opt.k1 * max_val) * (opt.k1 * max_val);
    const double c2 = (opt.k2 * max_val) * (opt.k2 * max_val);

    double total = 0.0;
    std::uint64_t count = 0;
    for (Index z0 = 0; z0 + wz <= a.nz(); ++z0)
        for (Index y0 = 0; y0 + wy <= a.ny(); ++y0)
            for (Index x0 = 0; x0 + wx <= a.nx(); ++x0) {
                double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
                std::size_t wi = 0;
                for (int z = 0; z < wz; ++z)
                    for (int y = 0; y < wy; ++y)
                        for (int x = 0; x < wx; ++x, ++wi) {
                            double va = a(x0 + x, y0 + y, z0 + z);
                            double vb = b(x0 + x, y0 + y, z0 + z);
                            double wv = wgt[wi];
                            ma += wv * va;
                            mb += wv * vb;
                            saa += wv * va * va;
                            sbb += wv * vb * vb;
                            sab += wv * va * vb;
                        }
                double var_a = saa - ma * ma;
                double var_b = sbb - mb * mb;
                double cov = sab - ma * mb;
                double s = ((2 * ma * mb + c1) * (2 * cov + c2)) /
                           ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
                total += s;
                ++count;
            }
    if (count == 0) throw std::invalid_argument("ssim: window larger than grid");
    return total / static_cast<double>(count);
}

GridF32 gradient_magnitude(const GridU8& g) {
    if (g.empty()) throw std::invalid_argument("gradient_magnitude: empty grid");
    GridF32 out(g.dims(), g.voxel_size());
    auto diff = [&](Index x, Index y, Index z, int axis) -> double {
        Index i[3] = {x, y, z};
        Index n = g.dims()[axis];
        if (n == 1) return 0.0;
        Index lo[3] = {x, y, z}, hi[3] = {x, y, z};
        if (i[axis] == 0) {
            hi[axis] = 1;
            return static_cast<double>(g(hi[0], hi[1], hi[2])) -
                   static_cast<double>(g(lo[0], lo[1], lo[2]));
        }
        if (i[axis] == n - 1) {
            lo[axis] = n - 2;
            return static_cast<double>(g(hi[0], hi[1], hi[2])) -
                   static_cast<double>(g(lo[0], lo[1], lo[2]));
        }
        lo[axis] = i[axis] - 1;
        hi[axis] = i[axis] + 1;
        return 0.5 * (static_cast<double>(g(hi[0], hi[1], hi[2])) -
                      static_cast<double>(g(lo[0], lo[1], lo[2])));
    };
    for (Index z = 0; z < g.nz(); ++z)
        for (Index y = 0; y < g.ny(); ++y)
            for (Index x = 0; x < g.nx(); ++x) {
                double gx = diff(x, y, z, 0);
                double gy = diff(x, y, z, 1);
                double gz = diff(x, y, z, 2);
                out(x, y, z) = static_cast<float>(std::sqrt(gx * gx + gy * gy + gz * gz));
            }
    return out;
}

std::vector<std::uint64_t> JointHistogram::intensity_marginal() const {
    std::vector<std::uint64_t> m(static_cast<std::size_t>(intensity_bins), 0);
    for (int i = 0; i < intensity_bins; ++i)
        for (int gb = 0; gb < gradient_bins; ++gb) m[static_cast<std::size_t>(i)] += at(i, gb);
    return m;
}

JointHistogram intensity_gradient_histogram(const GridU8& g, int gradient_bins,
                                            std::optional<double> grad_cutoff) {
    if (gradient_bins < 1)
        throw std::invalid_argument("intensity_gradient_histogram: need >= 1 gradient bin");
    if (grad_cutoff && *grad_cutoff < 0.0)
        throw std::invalid_argument("intensity_gradient_histogram: negative cutoff");
    GridF32 mag = gradient_magnitude(g);
    double top = 0.0;
    if (grad_cutoff) {
        top = *grad_cutoff;
    } else {
        for (float v : mag.data()) top = std::max(top, static_cast<double>(v));
    }
    JointHistogram jh;
    jh.intensity_bins = 256;
    jh.gradient_bins = gradient_bins;
    jh.gradient_bin_width = top > 0.0 ? top / gradient_bins : 0.0;
    jh.counts.assign(static_cast<std::size_t>(256 * gradient_bins), 0);
    for (Index i = 0; i < g.size(); ++i) {
        double m = mag.data()[static_cast<std::size_t>(i)];
        if (grad_cutoff && m > *grad_cutoff) continue;
        int gb = 0;
        if (jh.gradient_bin_width > 0.0) {
            gb = static_cast<int>(m / jh.gradient_bin_width);
            gb = std::min(gb, gradient_bins - 1);
        }
        std::size_t intensity = g.data()[static_cast<std::size_t>(i)];
        ++jh.counts[intensity * static_cast<std::size_t>(gradient_bins) +
                    static_cast<std::size_t>(gb)];
        ++jh.total;
    }
    return jh;
}

}  // namespace dr::metrics
