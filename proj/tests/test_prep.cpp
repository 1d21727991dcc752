#include "doctest.h"
#include "dr/prep.hpp"
#include "dr/rng.hpp"

using namespace dr;
using namespace dr::prep;

namespace {

GridU16 ramp_u16() {
    GridU16 g({256, 16, 16}, 1.0);
    // Every 16-bit value exactly once.
    for (Index i = 0; i < g.size(); ++i)
        g.data()[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(i);
    return g;
}

}  // namespace

TEST_CASE("normalize endpoints and midpoint") {
    GridU16 g({4, 1, 1}, 1.0);
    g(0, 0, 0) = 1000;
    g(1, 0, 0) = 3000;
    g(2, 0, 0) = 2000;
    g(3, 0, 0) = 1500;
    auto [out, params] = normalize_u16_to_u8(g, 0.0);
    CHECK(params.p_min == 1000);
    CHECK(params.p_max == 3000);
    CHECK(out(0, 0, 0) == 0);
    CHECK(out(1, 0, 0) == 255);
    // Midpoint 2000 -> 0.5 -> 127.5 rounds half-up to 128.
    CHECK(out(2, 0, 0) == 128);
}

TEST_CASE("normalize with zero clip is the linear 256-level requantization") {
    GridU16 g = ramp_u16();
    auto [out, params] = normalize_u16_to_u8(g, 0.0);
    CHECK(params.p_min == 0);
    CHECK(params.p_max == 65535);
    // Brute-force per-voxel mapping oracle.
    for (Index i = 0; i < g.size(); i += 97) {
        double p = static_cast<double>(g.data()[static_cast<std::size_t>(i)]);
        auto expect = static_cast<std::uint8_t>(std::floor(p / 65535.0 * 255.0 + 0.5));
        CHECK(out.data()[static_cast<std::size_t>(i)] == expect);
    }
}

TEST_CASE("normalize clips tail quantiles") {
    GridU16 g({1000, 1, 1}, 1.0);
    for (Index i = 0; i < 1000; ++i)
        g.data()[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(i);
    auto [out, params] = normalize_u16_to_u8(g, 0.01);
    // ceil(0.01 * 1000) = 10th smallest / largest values.
    CHECK(params.p_min == 9);
    CHECK(params.p_max == 990);
    CHECK(out(0, 0, 0) == 0);    // below p_min clamps
    CHECK(out(999, 0, 0) == 255);
}

TEST_CASE("normalize rejects degenerate range and bad clip") {
    GridU16 g({8, 1, 1}, 1.0);
    for (auto& v : g.data()) v = 1234;
    CHECK_THROWS_WITH_AS(normalize_u16_to_u8(g, 0.0), doctest::Contains("degenerate"),
                         std::runtime_error);
    CHECK_THROWS_AS(normalize_u16_to_u8(g, 0.5), std::invalid_argument);
}

TEST_CASE("Eq.1 output is affine on the unclipped range") {
    Rng rng(99);
    GridU16 g({32, 32, 8}, 1.0);
    for (auto& v : g.data()) v = static_cast<std::uint16_t>(2000 + rng.below(30000));
    auto [out, params] = normalize_u16_to_u8(g, 0.0);
    double scale = 255.0 / (params.p_max - params.p_min);
    for (Index i = 0; i < g.size(); i += 31) {
        double expect = (g.data()[static_cast<std::size_t>(i)] - params.p_min) * scale;
        double got = out.data()[static_cast<std::size_t>(i)];
        CHECK(std::abs(got - expect) <= 0.5);  // within rounding of the affine map
    }
}

TEST_CASE("histogram counts exactly") {
    GridU8 g({10, 10, 10}, 1.0, std::uint8_t{100});
    Histogram h = histogram(g);
    CHECK(h.total == 1000);
    CHECK(h.bins[100] == 1000);
    CHECK(h.bins[99] == 0);

    GridU8 t({3, 1, 1}, 1.0);
    t(0, 0, 0) = 0;
    t(1, 0, 0) = 0;
    t(2, 0, 0) = 255;
    Histogram h2 = histogram(t);
    CHECK(h2.bins[0] == 2);
    CHECK(h2.bins[255] == 1);

    Rng rng(1);
    GridU8 r({17, 13, 11}, 1.0);
    for (auto& v : r.data()) v = static_cast<std::uint8_t>(rng.below(256));
    Histogram h3 = histogram(r);
    std::uint64_t sum = 0;
    for (auto c : h3.bins) sum += c;
    CHECK(sum == static_cast<std::uint64_t>(r.size()));
}

TEST_CASE("histogram_match: identity, constant reference, monotonicity") {
    Rng rng(2);
    GridU8 src({16, 16, 4}, 1.0);
    for (auto& v : src.data()) v = static_cast<std::uint8_t>(rng.below(256));

    // Self-match maps every voxel to a level with identical CDF value.
    GridU8 self = histogram_match(src, src);
    Histogram hs = histogram(src);
    std::vector<double> cdf(256);
    std::uint64_t acc = 0;
    for (int i = 0; i < 256; ++i) {
        acc += hs.bins[static_cast<std::size_t>(i)];
        cdf[static_cast<std::size_t>(i)] = static_cast<double>(acc) / static_cast<double>(hs.total);
    }
    for (Index i = 0; i < src.size(); ++i)
        CHECK(cdf[self.data()[static_cast<std::size_t>(i)]] ==
              doctest::Approx(cdf[src.data()[static_cast<std::size_t>(i)]]));

    // Constant reference collapses everything onto that constant.
    GridU8 uniform({256, 1, 1}, 1.0);
    for (Index i = 0; i < 256; ++i)
        uniform.data()[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    GridU8 ref({4, 4, 4}, 1.0, std::uint8_t{100});
    GridU8 matched = histogram_match(uniform, ref);
    for (auto v : matched.data()) CHECK(v == 100);

    // Monotone map: g1 <= g2 implies map(g1) <= map(g2).
    GridU8 ref2({16, 16, 4}, 1.0);
    for (auto& v : ref2.data()) v = static_cast<std::uint8_t>(rng.below(256));
    GridU8 m2 = histogram_match(src, ref2);
    std::array<int, 256> mapped;
    mapped.fill(-1);
    for (Index i = 0; i < src.size(); ++i)
        mapped[src.data()[static_cast<std::size_t>(i)]] = m2.data()[static_cast<std::size_t>(i)];
    int prev = 0;
    for (int gv = 0; gv < 256; ++gv) {
        if (mapped[static_cast<std::size_t>(gv)] < 0) continue;
        CHECK(mapped[static_cast<std::size_t>(gv)] >= prev);
        prev = mapped[static_cast<std::size_t>(gv)];
    }
}

TEST_CASE("histogram_match CDF sup-distance is bounded by the largest reference bin") {
    Rng rng(77);
    GridU8 src({24, 24, 4}, 1.0);
    for (auto& v : src.data()) v = static_cast<std::uint8_t>(40 + rng.below(60));
    GridU8 ref({24, 24, 4}, 1.0);
    for (auto& v : ref.data()) v = static_cast<std::uint8_t>(150 + rng.below(80));

    GridU8 outg = histogram_match(src, ref);
    Histogram ho = histogram(outg), hr = histogram(ref);
    double max_bin = 0.0, sup = 0.0, co = 0.0, cr = 0.0;
    for (int i = 0; i < 256; ++i) {
        max_bin = std::max(max_bin, static_cast<double>(hr.bins[static_cast<std::size_t>(i)]) /
                                        static_cast<double>(hr.total));
        co += static_cast<double>(ho.bins[static_cast<std::size_t>(i)]) /
              static_cast<double>(ho.total);
        cr += static_cast<double>(hr.bins[static_cast<std::size_t>(i)]) /
              static_cast<double>(hr.total);
        sup = std::max(sup, std::abs(co - cr));
    }
    CHECK(sup <= max_bin + 1e-12);
}

TEST_CASE("histogram_match rejects empty reference") {
    GridU8 src({2, 2, 2}, 1.0);
    GridU8 ref({0, 0, 0}, 1.0);
    CHECK_THROWS_AS(histogram_match(src, ref), std::invalid_argument);
}

TEST_CASE("line_profile samples along segments") {
    GridU8 g({3, 1, 1}, 2.5);
    g(0, 0, 0) = 10;
    g(1, 0, 0) = 20;
    g(2, 0, 0) = 30;
    auto prof = prep::line_profile(g, {0, 0, 0}, {2, 0, 0});
    REQUIRE(prof.size() == 3);
    CHECK(prof[0].intensity == 10);
    CHECK(prof[1].intensity == 20);
    CHECK(prof[2].intensity == 30);
    CHECK(prof[1].distance_um == doctest::Approx(2.5));

    auto single = prep::line_profile(g, {1, 0, 0}, {1, 0, 0});
    REQUIRE(single.size() == 1);
    CHECK(single[0].intensity == 20);

    CHECK_THROWS_AS(prep::line_profile(g, {0, 0, 0}, {5, 0, 0}), std::out_of_range);
}

TEST_CASE("line_profile diagonal matches nearest-voxel oracle") {
    GridU8 g({8, 8, 1}, 1.0);
    for (Index y = 0; y < 8; ++y)
        for (Index x = 0; x < 8; ++x) g(x, y, 0) = x + y < 8 ? 40 : 200;
    auto prof = prep::line_profile(g, {0, 0, 0}, {7, 7, 0});
    double len = std::sqrt(2.0) * 7.0;
    for (std::size_t k = 0; k < prof.size(); ++k) {
        double t = static_cast<double>(k) / len;
        Index x = static_cast<Index>(std::floor(t * 7.0 + 0.5));
        Index y = static_cast<Index>(std::floor(t * 7.0 + 0.5));
        CHECK(prof[k].intensity == g(x, y, 0));
    }
    // Two-phase step crossed once: profile is monotone non-decreasing.
    for (std::size_t k = 1; k < prof.size(); ++k)
        CHECK(prof[k].intensity >= prof[k - 1].intensity);
}
