#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "dr/rng.hpp"
#include "dr/volume.hpp"
#include "dr/volume_io.hpp"

using namespace dr;

namespace {

GridU8 random_grid(Dims3 dims, std::uint64_t seed, double voxel = 1.0) {
    GridU8 g(dims, voxel);
    Rng rng(seed);
    for (auto& v : g.data()) v = static_cast<std::uint8_t>(rng.below(256));
    return g;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("drtest_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("load_raw reads x-fastest order") {
    TempDir td;
    std::string raw = td.file("v.raw"), meta = td.file("v.raw.meta");
    {
        std::ofstream f(raw, std::ios::binary);
        unsigned char bytes[8] = {0, 1, 2, 3, 4, 5, 6, 7};
        f.write(reinterpret_cast<char*>(bytes), 8);
        std::ofstream m(meta);
        m << "nx=2\nny=2\nnz=2\ndepth=8\nvoxel_size_um=1.5\nbyte_order=little\n";
    }
    GridU8 g = load_raw_u8(raw, meta);
    CHECK(g.dims() == Dims3{2, 2, 2});
    CHECK(g.voxel_size() == doctest::Approx(1.5));
    // x fastest: (1,0,0) is the second byte, (0,1,0) the third.
    CHECK(g(0, 0, 0) == 0);
    CHECK(g(1, 0, 0) == 1);
    CHECK(g(0, 1, 0) == 2);
    CHECK(g(0, 0, 1) == 4);
}

TEST_CASE("16-bit raw decodes little-endian") {
    TempDir td;
    std::string raw = td.file("v16.raw"), meta = td.file("v16.raw.meta");
    {
        std::ofstream f(raw, std::ios::binary);
        // {0x0001, 0x0100} little-endian -> bytes 01 00 00 01.
        unsigned char bytes[4] = {0x01, 0x00, 0x00, 0x01};
        f.write(reinterpret_cast<char*>(bytes), 4);
        std::ofstream m(meta);
        m << "nx=2\nny=1\nnz=1\ndepth=16\nvoxel_size_um=1\nbyte_order=little\n";
    }
    GridU16 g = load_raw_u16(raw, meta);
    CHECK(g(0, 0, 0) == 1);
    CHECK(g(1, 0, 0) == 256);
}

TEST_CASE("save_raw/load_raw round-trip is bit-identical") {
    TempDir td;
    GridU8 g = random_grid({5, 4, 3}, 7, 2.68);
    save_raw(g, td.file("g.raw"), td.file("g.raw.meta"));
    GridU8 back = load_raw_u8(td.file("g.raw"), td.file("g.raw.meta"));
    CHECK(back == g);

    GridU16 h({3, 2, 2}, 10.72);
    Rng rng(3);
    for (auto& v : h.data()) v = static_cast<std::uint16_t>(rng.below(65536));
    save_raw(h, td.file("h.raw"), td.file("h.raw.meta"));
    CHECK(load_raw_u16(td.file("h.raw"), td.file("h.raw.meta")) == h);
}

TEST_CASE("save_raw writes exactly nx*ny*nz*(depth/8) bytes") {
    TempDir td;
    GridU8 g({380, 380, 512}, 10.72);
    save_raw(g, td.file("big.raw"), td.file("big.raw.meta"));
    CHECK(std::filesystem::file_size(td.file("big.raw")) == 73932800u);
    RawMeta m = parse_sidecar(td.file("big.raw.meta"));
    CHECK(m.dims == Dims3{380, 380, 512});
    CHECK(m.depth == 8);
}

TEST_CASE("load_raw errors: size mismatch and missing key") {
    TempDir td;
    {
        std::ofstream f(td.file("bad.raw"), std::ios::binary);
        f << "abc";
        std::ofstream m(td.file("bad.raw.meta"));
        m << "nx=2\nny=2\nnz=2\ndepth=8\nvoxel_size_um=1\nbyte_order=little\n";
    }
    CHECK_THROWS_WITH_AS(load_raw_u8(td.file("bad.raw"), td.file("bad.raw.meta")),
                         doctest::Contains("size mismatch"), std::runtime_error);
    {
        std::ofstream m(td.file("nokey.meta"));
        m << "nx=2\nny=2\ndepth=8\nvoxel_size_um=1\nbyte_order=little\n";
    }
    CHECK_THROWS_WITH_AS(load_raw_u8(td.file("bad.raw"), td.file("nokey.meta")),
                         doctest::Contains("missing key"), std::runtime_error);
}

TEST_CASE("crop: full region identity, offsets, bounds") {
    GridU8 g = random_grid({4, 4, 4}, 11);
    CHECK(crop(g, Region{{0, 0, 0}, {4, 4, 4}}) == g);

    GridU8 c = crop(g, Region{{1, 1, 1}, {2, 2, 2}});
    // Index-arithmetic oracle over every cropped voxel.
    for (Index z = 0; z < 2; ++z)
        for (Index y = 0; y < 2; ++y)
            for (Index x = 0; x < 2; ++x) CHECK(c(x, y, z) == g(x + 1, y + 1, z + 1));

    CHECK_THROWS_AS(crop(g, Region{{3, 0, 0}, {2, 1, 1}}), std::out_of_range);
}

TEST_CASE("crop of pad restores the original") {
    GridU8 g = random_grid({3, 5, 2}, 13);
    GridU8 p = pad(g, {1, 2, 0}, {2, 0, 3}, std::uint8_t{7});
    CHECK(crop(p, Region{{1, 2, 0}, g.dims()}) == g);
}

TEST_CASE("extract_paired_patches counts and windows") {
    GridU8 lr = random_grid({100, 100, 100}, 17);
    GridU8 hr({400, 400, 400}, 0.25);
    // HR is the LR value replicated so HR windows can be checked by oracle.
    for (Index z = 0; z < 400; ++z)
        for (Index y = 0; y < 400; ++y)
            for (Index x = 0; x < 400; ++x) hr(x, y, z) = lr(x / 4, y / 4, z / 4);

    PatchPairSet set = extract_paired_patches(lr, hr, 40, 20, 4);
    // floor((100-40)/20)+1 = 4 windows per axis.
    CHECK(set.lr_patches.size() == 64);
    CHECK(set.hr_patches.size() == 64);
    CHECK(set.paired);
    for (const auto& p : set.lr_patches) CHECK(p.dims() == Dims3{40, 40, 40});
    for (const auto& p : set.hr_patches) CHECK(p.dims() == Dims3{160, 160, 160});

    // Every HR patch equals the crop of HR at scale x the LR origin.
    Rng rng(5);
    for (int t = 0; t < 4; ++t) {
        std::size_t k = rng.below(set.lr_patches.size());
        Index kx = static_cast<Index>(k % 4), ky = static_cast<Index>((k / 4) % 4),
              kz = static_cast<Index>(k / 16);
        GridU8 expect =
            crop(hr, Region{{kx * 20 * 4, ky * 20 * 4, kz * 20 * 4}, {160, 160, 160}});
        CHECK(set.hr_patches[k] == expect);
    }
}

TEST_CASE("extract_paired_patches: single window and errors") {
    GridU8 lr = random_grid({40, 40, 40}, 19);
    GridU8 hr = random_grid({160, 160, 160}, 23);
    PatchPairSet set = extract_paired_patches(lr, hr, 40, 20, 4);
    REQUIRE(set.lr_patches.size() == 1);
    CHECK(set.lr_patches[0] == lr);
    CHECK(set.hr_patches[0] == hr);

    GridU8 bad = random_grid({80, 160, 160}, 29);
    CHECK_THROWS_AS(extract_paired_patches(lr, bad, 40, 20, 4), std::invalid_argument);
}

TEST_CASE("resample: constants, identity, ramp midpoints") {
    GridU8 g({3, 3, 3}, 1.0, std::uint8_t{100});
    for (auto m : {ResampleMethod::Trilinear, ResampleMethod::BicubicSlices,
                   ResampleMethod::Nearest}) {
        GridU8 up = resample(g, 2.5, m);
        CHECK(up.dims() == Dims3{8, 8, 8});
        for (auto v : up.data()) CHECK(v == 100);
    }

    GridU8 r = random_grid({4, 5, 6}, 31);
    CHECK(resample(r, 1.0, ResampleMethod::Trilinear) == r);

    // 1D ramp {0,100}: output samples at source coords {0, 0.5, 1, 1.5}.
    GridU8 ramp({2, 1, 1}, 1.0);
    ramp(0, 0, 0) = 0;
    ramp(1, 0, 0) = 100;
    GridU8 up = resample(ramp, 2.0, ResampleMethod::Trilinear);
    REQUIRE(up.dims() == Dims3{4, 2, 2});
    CHECK(up(0, 0, 0) == 0);
    CHECK(up(1, 0, 0) == 50);
    CHECK(up(2, 0, 0) == 100);
    CHECK(up(3, 0, 0) == 100);
}

TEST_CASE("resample errors") {
    GridU8 r = random_grid({4, 5, 6}, 31);
    CHECK_THROWS_AS(resample(r, 0.0, ResampleMethod::Trilinear), std::invalid_argument);
    CHECK_THROWS_AS(resample(r, 0.01, ResampleMethod::Trilinear), std::invalid_argument);
}

TEST_CASE("resample preserves global bounds") {
    GridU8 r = random_grid({6, 6, 6}, 37);
    std::uint8_t lo = 255, hi = 0;
    for (auto v : r.data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (auto m : {ResampleMethod::Trilinear, ResampleMethod::BicubicSlices}) {
        GridU8 up = resample(r, 1.7, m);
        for (auto v : up.data()) {
            // Cubic kernels may overshoot; output must stay clamped to depth.
            CHECK(v <= 255);
        }
        GridU8 lin = resample(r, 1.7, ResampleMethod::Trilinear);
        for (auto v : lin.data()) {
            CHECK(v >= lo);
            CHECK(v <= hi);
        }
    }
}

TEST_CASE("reslice/stack round-trips and shapes") {
    GridU8 g = random_grid({5, 4, 3}, 41, 2.0);
    CHECK(stack(reslice(g, Plane::XY), Plane::XY) == g);
    CHECK(stack(reslice(g, Plane::XZ), Plane::XZ) == g);

    auto xy = reslice(g, Plane::XY);
    CHECK(xy.size() == 3);
    CHECK(xy[0].dims() == Dims3{5, 4, 1});
    auto xz = reslice(g, Plane::XZ);
    CHECK(xz.size() == 4);
    CHECK(xz[0].dims() == Dims3{5, 3, 1});
    // Axis bookkeeping oracle: slice y = 2 holds g(x, 2, z) at (x, z).
    for (Index z = 0; z < 3; ++z)
        for (Index x = 0; x < 5; ++x) CHECK(xz[2](x, z, 0) == g(x, 2, z));

    auto bad = xy;
    bad.push_back(random_grid({2, 2, 1}, 43));
    CHECK_THROWS_AS(stack(bad, Plane::XY), std::invalid_argument);
}
