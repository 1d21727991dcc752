#include <cmath>
#include <limits>

#include "dr/pnm/network.hpp"

namespace dr::pnm {

namespace {

// Finite stand-in for "no grain reachable"; avoids inf - inf in the
// envelope intersections. Far larger than any real squared distance.
constexpr double kBig = 1e12;

// 1D lower-envelope squared distance transform (Felzenszwalb-Huttenlocher).
void edt_1d(const double* f, Index n, double* d, int* v, double* z) {
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            int p = v[k];
            s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
                (2.0 * q - 2.0 * p);
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = static_cast<double>(q - v[k]);
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

DistanceField distance_transform(const seg::LabelGrid& labels) {
    const Index nx = labels.nx(), ny = labels.ny(), nz = labels.nz();
    std::vector<double> sq(static_cast<std::size_t>(labels.size()));
    for (Index i = 0; i < labels.size(); ++i)
        sq[static_cast<std::size_t>(i)] =
            labels.data()[static_cast<std::size_t>(i)] == seg::GRAIN ? 0.0 : kBig;

    Index max_dim = std::max({nx, ny, nz});
    std::vector<double> f(static_cast<std::size_t>(max_dim)), d(static_cast<std::size_t>(max_dim));
    std::vector<int> v(static_cast<std::size_t>(max_dim));
    std::vector<double> zbuf(static_cast<std::size_t>(max_dim) + 1);

    auto pass = [&](int axis) {
        Index ext = labels.dims()[axis];
        if (ext < 2) return;
        Index outer1 = axis == 0 ? ny : nx;
        Index outer2 = axis == 2 ? ny : nz;
        for (Index b = 0; b < outer2; ++b)
            for (Index a = 0; a < outer1; ++a) {
                for (Index i = 0; i < ext; ++i) {
                    Index x = axis == 0 ? i : a;
                    Index y = axis == 1 ? i : (axis == 0 ? a : b);
                    Index z = axis == 2 ? i : b;
                    f[static_cast<std::size_t>(i)] =
                        sq[static_cast<std::size_t>(labels.index(x, y, z))];
                }
                edt_1d(f.data(), ext, d.data(), v.data(), zbuf.data());
                for (Index i = 0; i < ext; ++i) {
                    Index x = axis == 0 ? i : a;
                    Index y = axis == 1 ? i : (axis == 0 ? a : b);
                    Index z = axis == 2 ? i : b;
                    sq[static_cast<std::size_t>(labels.index(x, y, z))] =
                        std::min(d[static_cast<std::size_t>(i)], kBig);
                }
            }
    };
    pass(0);
    pass(1);
    pass(2);

    DistanceField out(labels.dims(), labels.voxel_size());
    for (Index i = 0; i < labels.size(); ++i) {
        double s = sq[static_cast<std::size_t>(i)];
        out.data()[static_cast<std::size_t>(i)] =
            s >= kBig ? std::numeric_limits<float>::infinity()
                      : static_cast<float>(std::sqrt(s));
    }
    return out;
}

}  // namespace dr::pnm
