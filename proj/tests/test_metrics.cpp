#include <cmath>

#include "doctest.h"
#include "dr/metrics.hpp"
#include "dr/prep.hpp"
#include "dr/rng.hpp"

using namespace dr;
using namespace dr::metrics;

namespace {

GridU8 random_u8(Dims3 dims, std::uint64_t seed) {
    GridU8 g(dims, 1.0);
    Rng rng(seed);
    for (auto& v : g.data()) v = static_cast<std::uint8_t>(rng.below(256));
    return g;
}

}  // namespace

TEST_CASE("psnr: sentinel, closed form, symmetry") {
    GridU8 a = random_u8({8, 8, 8}, 1);
    CHECK(std::isinf(psnr(a, a)));

    // Uniform offset 1 gives MSE 1 -> 20 log10(255).
    GridU8 b({8, 8, 8}, 1.0);
    GridU8 c({8, 8, 8}, 1.0);
    for (Index i = 0; i < b.size(); ++i) {
        b.data()[static_cast<std::size_t>(i)] = 100;
        c.data()[static_cast<std::size_t>(i)] = 101;
    }
    CHECK(psnr(b, c) == doctest::Approx(20.0 * std::log10(255.0)).epsilon(1e-12));
    CHECK(psnr(b, c) == doctest::Approx(48.1308).epsilon(1e-4));

    GridU8 d = random_u8({8, 8, 8}, 2);
    CHECK(psnr(a, d) == doctest::Approx(psnr(d, a)).epsilon(1e-14));

    GridU8 wrong({4, 4, 4}, 1.0);
    CHECK_THROWS_AS(psnr(a, wrong), std::invalid_argument);
}

TEST_CASE("ssim: identity, symmetry, inversion goes negative") {
    GridU8 a = random_u8({16, 16, 16}, 3);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    GridU8 b = random_u8({16, 16, 16}, 4);
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));

    // Two-valued image vs its inversion: structure term flips sign.
    GridU8 two({16, 16, 16}, 1.0);
    Rng rng(5);
    for (auto& v : two.data()) v = rng.below(2) ? 230 : 25;
    GridU8 inv({16, 16, 16}, 1.0);
    for (Index i = 0; i < two.size(); ++i)
        inv.data()[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(255 - two.data()[static_cast<std::size_t>(i)]);
    double s = ssim(two, inv);
    CHECK(s < 0.0);

    CHECK_THROWS_AS(ssim(a, random_u8({8, 8, 8}, 6)), std::invalid_argument);
    CHECK_THROWS_AS(ssim(random_u8({4, 4, 4}, 7), random_u8({4, 4, 4}, 8)),
                    std::invalid_argument);
}

TEST_CASE("ssim matches a direct per-window evaluation") {
    // Small volume, small window: recompute the Gaussian-windowed SSIM
    // from the formula, independently of the implementation loop order.
    GridU8 a = random_u8({12, 12, 12}, 9);
    GridU8 b = random_u8({12, 12, 12}, 10);
    SsimOptions opt;
    opt.window = 5;
    double got = ssim(a, b, opt);

    const int w = 5;
    std::vector<double> wt;
    double sum = 0;
    for (int z = 0; z < w; ++z)
        for (int y = 0; y < w; ++y)
            for (int x = 0; x < w; ++x) {
                double dx = x - 2.0, dy = y - 2.0, dz = z - 2.0;
                double v = std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * 1.5 * 1.5));
                wt.push_back(v);
                sum += v;
            }
    for (auto& v : wt) v /= sum;
    double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
    double total = 0;
    int count = 0;
    for (Index z0 = 0; z0 + w <= 12; ++z0)
        for (Index y0 = 0; y0 + w <= 12; ++y0)
            for (Index x0 = 0; x0 + w <= 12; ++x0) {
                double ma = 0, mb = 0, qa = 0, qb = 0, qab = 0;
                std::size_t k = 0;
                for (int z = 0; z < w; ++z)
                    for (int y = 0; y < w; ++y)
                        for (int x = 0; x < w; ++x, ++k) {
                            double va = a(x0 + x, y0 + y, z0 + z);
                            double vb = b(x0 + x, y0 + y, z0 + z);
                            ma += wt[k] * va;
                            mb += wt[k] * vb;
                            qa += wt[k] * va * va;
                            qb += wt[k] * vb * vb;
                            qab += wt[k] * va * vb;
                        }
                total += (2 * ma * mb + c1) * (2 * (qab - ma * mb) + c2) /
                         ((ma * ma + mb * mb + c1) * (qa - ma * ma + qb - mb * mb + c2));
                ++count;
            }
    CHECK(got == doctest::Approx(total / count).epsilon(1e-12));
}

TEST_CASE("gradient_magnitude: constants, ramps, isolated voxel") {
    GridU8 c({6, 6, 6}, 1.0, std::uint8_t{77});
    GridF32 gm = gradient_magnitude(c);
    for (auto v : gm.data()) CHECK(v == 0.0f);

    // x-ramp with slope 2: central difference gives 2 in the interior.
    GridU8 ramp({8, 4, 4}, 1.0);
    for (Index z = 0; z < 4; ++z)
        for (Index y = 0; y < 4; ++y)
            for (Index x = 0; x < 8; ++x) ramp(x, y, z) = static_cast<std::uint8_t>(2 * x);
    GridF32 g2 = gradient_magnitude(ramp);
    for (Index x = 1; x < 7; ++x) CHECK(g2(x, 2, 2) == doctest::Approx(2.0));
    CHECK(g2(0, 2, 2) == doctest::Approx(2.0));  // one-sided at the face

    // Isolated bright voxel: brute-force stencil oracle.
    GridU8 spike({5, 5, 5}, 1.0);
    spike(2, 2, 2) = 200;
    GridF32 g3 = gradient_magnitude(spike);
    auto diff1 = [&](Index x, Index y, Index z, int ax) {
        Index d[3] = {0, 0, 0};
        d[ax] = 1;
        Index n = spike.dims()[ax];
        Index i[3] = {x, y, z};
        if (i[ax] == 0)
            return double(spike(x + d[0], y + d[1], z + d[2])) - double(spike(x, y, z));
        if (i[ax] == n - 1)
            return double(spike(x, y, z)) - double(spike(x - d[0], y - d[1], z - d[2]));
        return 0.5 * (double(spike(x + d[0], y + d[1], z + d[2])) -
                      double(spike(x - d[0], y - d[1], z - d[2])));
    };
    for (Index z = 0; z < 5; ++z)
        for (Index y = 0; y < 5; ++y)
            for (Index x = 0; x < 5; ++x) {
                double gx = diff1(x, y, z, 0), gy = diff1(x, y, z, 1), gz = diff1(x, y, z, 2);
                CHECK(g3(x, y, z) ==
                      doctest::Approx(std::sqrt(gx * gx + gy * gy + gz * gz)).epsilon(1e-6));
            }
    // The spike has a symmetric nonzero halo.
    CHECK(g3(1, 2, 2) == g3(3, 2, 2));
    CHECK(g3(2, 1, 2) == g3(2, 3, 2));
    CHECK(g3(1, 2, 2) > 0.0f);
}

TEST_CASE("joint histogram: constant grid, marginals, cutoff") {
    GridU8 c({4, 4, 4}, 1.0, std::uint8_t{42});
    JointHistogram jh = intensity_gradient_histogram(c, 16);
    CHECK(jh.total == 64);
    CHECK(jh.at(42, 0) == 64);

    GridU8 r = random_u8({10, 10, 10}, 21);
    JointHistogram full = intensity_gradient_histogram(r, 32);
    auto marginal = full.intensity_marginal();
    auto h = prep::histogram(r);
    for (int i = 0; i < 256; ++i) CHECK(marginal[static_cast<std::size_t>(i)] == h.bins[static_cast<std::size_t>(i)]);
    CHECK(full.total == 1000);

    // Cutoff 0 on a ramp keeps only voxels with exactly zero magnitude.
    GridU8 ramp({8, 1, 1}, 1.0);
    for (Index x = 0; x < 8; ++x) ramp(x, 0, 0) = static_cast<std::uint8_t>(10 * x);
    JointHistogram cut = intensity_gradient_histogram(ramp, 8, 0.0);
    CHECK(cut.total == 0);

    CHECK_THROWS_AS(intensity_gradient_histogram(r, 8, -1.0), std::invalid_argument);
}
