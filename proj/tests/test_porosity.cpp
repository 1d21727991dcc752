#include <cmath>

#include "doctest.h"
#include "dr/porosity.hpp"
#include "dr/rng.hpp"

using namespace dr;
using namespace dr::poro;
using dr::seg::GRAIN;
using dr::seg::PORE;

namespace {

const seg::ThresholdPair kThr{55, 65, 10.0};

}

TEST_CASE("local porosity map endpoints and clamping") {
    GridU8 g({4, 1, 1}, 1.0);
    g(0, 0, 0) = 65;   // grain_min -> phi 0
    g(1, 0, 0) = 55;   // pore_max -> phi 1
    g(2, 0, 0) = 250;  // beyond grain: raw Eq. value negative, clamps to 0
    g(3, 0, 0) = 60;   // halfway
    seg::LabelGrid lab({4, 1, 1}, 1.0, GRAIN);
    PorosityMap m = local_porosity_map(g, lab, kThr);
    CHECK(m(0, 0, 0) == doctest::Approx(0.0));
    CHECK(m(1, 0, 0) == doctest::Approx(1.0));
    CHECK(m(2, 0, 0) == doctest::Approx(0.0));
    CHECK(m(3, 0, 0) == doctest::Approx(0.5));

    // PORE voxels carry no micro-porosity.
    seg::LabelGrid lab2({4, 1, 1}, 1.0, PORE);
    PorosityMap m2 = local_porosity_map(g, lab2, kThr);
    for (auto v : m2.data()) CHECK(v == 0.0f);

    CHECK_THROWS_AS(local_porosity_map(g, lab, seg::ThresholdPair{60, 60, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("porosity map is monotone non-increasing in intensity") {
    GridU8 g({201, 1, 1}, 1.0);
    seg::LabelGrid lab({201, 1, 1}, 1.0, GRAIN);
    for (Index i = 0; i < 201; ++i)
        g.data()[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i + 40);
    PorosityMap m = local_porosity_map(g, lab, kThr);
    for (Index i = 1; i < 201; ++i)
        CHECK(m.data()[static_cast<std::size_t>(i)] <=
              m.data()[static_cast<std::size_t>(i - 1)]);
}

TEST_CASE("porosity summary closed forms") {
    // All pore.
    seg::LabelGrid all_pore({4, 4, 4}, 1.0, PORE);
    PorosityMap zero({4, 4, 4}, 1.0);
    PorositySummary s = porosity_summary(all_pore, zero);
    CHECK(s.macro == doctest::Approx(1.0));
    CHECK(s.micro == doctest::Approx(0.0));
    CHECK(s.total == doctest::Approx(1.0));

    // Half pore, half grain at phi = 0.4: macro 0.5, micro 0.2.
    seg::LabelGrid half({8, 8, 8}, 1.0, GRAIN);
    PorosityMap pm({8, 8, 8}, 1.0);
    for (Index z = 0; z < 8; ++z)
        for (Index y = 0; y < 8; ++y)
            for (Index x = 0; x < 8; ++x) {
                if (z < 4)
                    half(x, y, z) = PORE;
                else
                    pm(x, y, z) = 0.4f;
            }
    PorositySummary s2 = porosity_summary(half, pm);
    CHECK(s2.macro == doctest::Approx(0.5));
    CHECK(s2.micro == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(s2.total == doctest::Approx(0.7).epsilon(1e-6));

    // Macro is invariant under any PORE-preserving relabeling of the map.
    PorosityMap other({8, 8, 8}, 1.0, 0.9f);
    CHECK(porosity_summary(half, other).macro == doctest::Approx(0.5));

    CHECK_THROWS_AS(porosity_summary(half, PorosityMap({2, 2, 2}, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("dykstra-parsons: homogeneous zero, degenerate single block") {
    seg::LabelGrid lab({16, 16, 16}, 1.0, GRAIN);
    PorosityMap pm({16, 16, 16}, 1.0, 0.3f);
    auto curve = dykstra_parsons(lab, pm, {2, 4, 8});
    for (const auto& pt : curve) {
        CHECK(pt.defined);
        CHECK(pt.v_dp == doctest::Approx(0.0));
    }
    auto single = dykstra_parsons(lab, pm, {16});
    REQUIRE(single.size() == 1);
    CHECK(!single[0].defined);

    CHECK_THROWS_AS(dykstra_parsons(lab, pm, {32}), std::invalid_argument);
}

TEST_CASE("dykstra-parsons matches the log-normal closed form") {
    // Block porosities drawn log-normal with sigma_ln = 0.5:
    // V_DP -> 1 - exp(-0.5) as the sample count grows.
    Rng rng(123);
    std::vector<double> values;
    for (int i = 0; i < 10000; ++i)
        values.push_back(0.1 * std::exp(0.5 * rng.normal()));
    auto v = dykstra_parsons_coefficient(values);
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(0.08));
    CHECK(std::abs(*v - 0.3935) < 0.03);

    // The volume path agrees with the value path: constant-per-block map.
    const Index nb = 10, b = 2;
    seg::LabelGrid lab({nb * b, nb * b, nb * b}, 1.0, GRAIN);
    PorosityMap pm({nb * b, nb * b, nb * b}, 1.0);
    Rng rng2(9);
    std::vector<double> block_values;
    for (Index kz = 0; kz < nb; ++kz)
        for (Index ky = 0; ky < nb; ++ky)
            for (Index kx = 0; kx < nb; ++kx) {
                double phi = std::min(1.0, 0.2 * std::exp(0.5 * rng2.normal()));
                block_values.push_back(phi);
                for (Index z = kz * b; z < (kz + 1) * b; ++z)
                    for (Index y = ky * b; y < (ky + 1) * b; ++y)
                        for (Index x = kx * b; x < (kx + 1) * b; ++x)
                            pm(x, y, z) = static_cast<float>(phi);
            }
    auto curve = dykstra_parsons(lab, pm, {b});
    REQUIRE(curve.size() == 1);
    REQUIRE(curve[0].defined);
    auto direct = dykstra_parsons_coefficient(block_values);
    CHECK(curve[0].v_dp == doctest::Approx(*direct).epsilon(1e-4));

    // V_DP stays in [0, 1) whenever defined.
    CHECK(curve[0].v_dp >= 0.0);
    CHECK(curve[0].v_dp < 1.0);
}
