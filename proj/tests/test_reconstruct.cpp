#include "doctest.h"
#include "dr/reconstruct.hpp"
#include "dr/rng.hpp"

using namespace dr;
using namespace dr::recon;

namespace {

GridU8 random_grid(Dims3 dims, std::uint64_t seed) {
    GridU8 g(dims, 1.0);
    Rng rng(seed);
    for (auto& v : g.data()) v = static_cast<std::uint8_t>(rng.below(256));
    return g;
}

}  // namespace

TEST_CASE("tiled trilinear equals the whole-volume resample") {
    GridU8 lr = random_grid({12, 10, 17}, 1);
    GridU8 whole = resample(lr, 4.0, ResampleMethod::Trilinear);
    for (Index slab : {1, 3, 4, 17}) {
        GridU8 tiled = sr_reconstruct_tiled(lr, Upsampler::trilinear(4), slab);
        CHECK(tiled.dims() == Dims3{48, 40, 68});
        CHECK(tiled.data() == whole.data());
    }
    GridU8 bic_whole = resample(lr, 4.0, ResampleMethod::BicubicSlices);
    GridU8 bic_tiled = sr_reconstruct_tiled(lr, Upsampler::bicubic(4), 5);
    CHECK(bic_tiled.data() == bic_whole.data());
}

TEST_CASE("tiled neural reconstruction: shape, full-depth slab, overlap") {
    Rng rng(2);
    nn::EdsrConfig cfg;
    cfg.dims = 3;
    cfg.filters = 3;
    cfg.residual_blocks = 1;
    cfg.scale = 2;
    nn::EdsrNet net = nn::make_edsr(cfg, rng);
    GridU8 lr = random_grid({6, 6, 8}, 3);

    Upsampler up = Upsampler::edsr_net(net);
    GridU8 out = sr_reconstruct_tiled(lr, up, 4);
    CHECK(out.dims() == Dims3{12, 12, 16});

    // Full-depth slab is identical to the unsplit reconstruction.
    GridU8 unsplit = up.apply(lr);
    GridU8 one_slab = sr_reconstruct_tiled(lr, up, 8);
    CHECK(one_slab.data() == unsplit.data());

    // Overlap changes seam voxels only; shape is preserved.
    GridU8 with_overlap = sr_reconstruct_tiled(lr, up, 4, 2);
    CHECK(with_overlap.dims() == out.dims());

    CHECK_THROWS_AS(sr_reconstruct_tiled(lr, up, 0), std::invalid_argument);
}

TEST_CASE("boundary_artifact_report flags constructed seams") {
    // Trilinear reconstruction has no seams: ratios within 5% of 1.
    GridU8 lr = random_grid({32, 32, 12}, 4);
    GridU8 sr = sr_reconstruct_tiled(lr, Upsampler::trilinear(4), 4);
    auto rep = boundary_artifact_report(sr, 4, 4);
    REQUIRE(!rep.empty());
    for (const auto& s : rep) CHECK(std::abs(s.ratio - 1.0) < 0.05);

    // Alternate slabs biased +10 gray: seam jump of about 10 over baseline.
    GridU8 biased = sr;
    const Index slab_out = 16;
    for (Index z = 0; z < biased.nz(); ++z) {
        if ((z / slab_out) % 2 == 0) continue;
        for (Index y = 0; y < biased.ny(); ++y)
            for (Index x = 0; x < biased.nx(); ++x)
                biased(x, y, z) = static_cast<std::uint8_t>(
                    std::min(255, static_cast<int>(biased(x, y, z)) + 10));
    }
    auto rep2 = boundary_artifact_report(biased, 4, 4);
    auto rep_plain = boundary_artifact_report(sr, 4, 4);
    REQUIRE(rep2.size() == rep_plain.size());
    for (std::size_t i = 0; i < rep2.size(); ++i)
        CHECK(rep2[i].jump - rep_plain[i].jump == doctest::Approx(10.0).epsilon(0.05));

    // Single slab: empty report.
    CHECK(boundary_artifact_report(sr, 12, 4).empty());
}

TEST_CASE("cincgan 2d3d chain with identity nets equals the step-wise oracle") {
    Rng rng(5);
    nn::TranslatorConfig g1c{2, 3, 1, 3, 1};
    nn::TranslatorNet g1 = nn::make_translator(g1c, rng);
    for (auto& p : g1.params()) p->val.setZero();  // identity translator

    nn::EdsrConfig ec;
    ec.dims = 2;
    ec.filters = 3;
    ec.residual_blocks = 1;
    ec.scale = 4;
    nn::EdsrNet edsr = nn::make_edsr(ec, rng);
    for (auto& p : edsr.params()) p->val.setZero();  // pure bilinear upsampler

    GridU8 lr = random_grid({9, 7, 5}, 6);
    GridU8 got = cincgan_reconstruct_2d3d(lr, g1, edsr);
    CHECK(got.dims() == Dims3{36, 28, 20});

    // Step-wise interpolation oracle mirroring the three bullet steps.
    std::vector<GridU8> sr_xy;
    for (const auto& s : reslice(lr, Plane::XY))
        sr_xy.push_back(resample_aniso(s, 4.0, 4.0, 1.0, ResampleMethod::Trilinear));
    GridU8 vol = stack(sr_xy, Plane::XY);
    std::vector<GridU8> xz;
    for (const auto& s : reslice(vol, Plane::XZ)) {
        GridU8 down = resample_aniso(s, 0.25, 1.0, 1.0, ResampleMethod::BicubicSlices);
        xz.push_back(resample_aniso(down, 4.0, 4.0, 1.0, ResampleMethod::Trilinear));
    }
    GridU8 expect = stack(xz, Plane::XZ);
    CHECK(got.dims() == expect.dims());
    CHECK(got.data() == expect.data());

    // Constant volume stays constant through the whole chain.
    GridU8 c({6, 6, 4}, 1.0, std::uint8_t{123});
    GridU8 cc = cincgan_reconstruct_2d3d(c, g1, edsr);
    for (auto v : cc.data()) CHECK(v == 123);
}

TEST_CASE("upsampler validation") {
    Rng rng(7);
    nn::EdsrConfig ec;
    ec.dims = 2;
    ec.filters = 2;
    ec.residual_blocks = 1;
    ec.scale = 4;
    nn::EdsrNet e2d = nn::make_edsr(ec, rng);

    Upsampler bad = Upsampler::edsr_net(e2d);
    bad.scale = 2;  // mismatched with the attached network
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    nn::TranslatorConfig down{2, 2, 1, 3, 4};
    nn::TranslatorNet g3 = nn::make_translator(down, rng);
    CHECK_THROWS_AS(Upsampler::cincgan_chain(g3, e2d).validate(), std::invalid_argument);
}
