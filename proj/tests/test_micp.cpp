#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "dr/micp.hpp"
#include "dr/synthetic.hpp"

using namespace dr;
using namespace dr::micp;

TEST_CASE("thomeer_eval closed forms") {
    ThomeerModel m{{{0.18, 0.5, 10.0}}};

    // At and below the displacement pressure the contribution is zero.
    CHECK(thomeer_eval(m, 10.0) == doctest::Approx(0.0));
    CHECK(thomeer_eval(m, 5.0) == doctest::Approx(0.0));

    // Direct substitution: log10(100/10) = 1 -> 0.18 e^-0.5.
    CHECK(thomeer_eval(m, 100.0) == doctest::Approx(0.18 * std::exp(-0.5)).epsilon(1e-12));
    CHECK(thomeer_eval(m, 100.0) == doctest::Approx(0.1092).epsilon(1e-3));

    // P_c to infinity approaches the total B_inf.
    ThomeerModel two{{{0.18, 0.5, 10.0}, {0.11, 0.8, 1000.0}}};
    CHECK(thomeer_eval(two, 1e12) == doctest::Approx(0.29).epsilon(1e-3));

    CHECK_THROWS_AS(thomeer_eval(m, 0.0), std::invalid_argument);
}

TEST_CASE("thomeer_eval is non-decreasing and continuous above P_d") {
    ThomeerModel m{{{0.2, 0.7, 50.0}}};
    double prev = 0.0;
    for (double lp = 0.0; lp < 6.0; lp += 0.01) {
        double v = thomeer_eval(m, std::pow(10.0, lp));
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
    // Right limit at P_d is 0.
    CHECK(thomeer_eval(m, 50.0 * (1.0 + 1e-9)) < 1e-6);
}

TEST_CASE("single-system fit recovers parameters within 1%") {
    ThomeerModel truth{{{0.18, 0.5, 10.0}}};
    MicpCurve curve = synth::thomeer_curve(truth, 30);
    FitResult fit = thomeer_fit(curve, 1);
    REQUIRE(fit.model.systems.size() == 1);
    CHECK(fit.model.systems[0].b_inf ==
          doctest::Approx(0.18).epsilon(0.01));
    CHECK(fit.model.systems[0].g == doctest::Approx(0.5).epsilon(0.01));
    CHECK(fit.model.systems[0].p_d == doctest::Approx(10.0).epsilon(0.01));
    CHECK(fit.rms < 1e-8);
}

TEST_CASE("two-system fit recovers well-separated systems within 2%") {
    ThomeerModel truth{{{0.1784, 0.4, 10.0}, {0.1097, 0.9, 1000.0}}};
    MicpCurve curve = synth::thomeer_curve(truth, 60);
    FitResult fit = thomeer_fit(curve, 2);
    REQUIRE(fit.model.systems.size() == 2);
    CHECK(fit.model.systems[0].b_inf == doctest::Approx(0.1784).epsilon(0.02));
    CHECK(fit.model.systems[1].b_inf == doctest::Approx(0.1097).epsilon(0.02));
    CHECK(fit.model.systems[0].p_d < fit.model.systems[1].p_d);

    // Refitting from the recovered model is a fixed point.
    FitConfig warm;
    warm.init = fit.model.systems;
    warm.multi_starts = 1;
    FitResult refit = thomeer_fit(curve, 2, warm);
    for (std::size_t s = 0; s < 2; ++s) {
        CHECK(refit.model.systems[s].b_inf ==
              doctest::Approx(fit.model.systems[s].b_inf).epsilon(1e-5));
        CHECK(refit.model.systems[s].p_d ==
              doctest::Approx(fit.model.systems[s].p_d).epsilon(1e-5));
    }
}

TEST_CASE("degenerate and invalid fits") {
    // Constant-zero curve: the fitted volume fraction collapses.
    MicpCurve flat;
    for (int i = 0; i < 12; ++i)
        flat.points.push_back({std::pow(10.0, 0.2 * i), 0.0});
    FitResult fit = thomeer_fit(flat, 1);
    CHECK(thomeer_eval(fit.model, 1e6) < 1e-3);

    MicpCurve short_curve;
    short_curve.points = {{1.0, 0.0}, {2.0, 0.1}};
    CHECK_THROWS_AS(thomeer_fit(short_curve, 1), std::invalid_argument);

    MicpCurve bad;
    bad.points = {{2.0, 0.0}, {1.0, 0.1}, {3.0, 0.2}};
    CHECK_THROWS_AS(thomeer_fit(bad, 1), std::invalid_argument);
}

TEST_CASE("partition_porosity splits the paper fractions") {
    ThomeerModel m{{{0.1784, 0.5, 10.0}, {0.1097, 0.8, 2000.0}}};
    auto [macro, micro] = partition_porosity(m);
    CHECK(macro == doctest::Approx(0.1784));
    CHECK(micro == doctest::Approx(0.1097));
    CHECK(macro + micro == doctest::Approx(0.2979).epsilon(1e-6));

    // Vanishing second system.
    ThomeerModel one_sided{{{0.25, 0.5, 10.0}, {1e-9, 0.8, 2000.0}}};
    auto [ma, mi] = partition_porosity(one_sided);
    CHECK(ma == doctest::Approx(0.25));
    CHECK(mi == doctest::Approx(0.0).epsilon(1e-6));

    // Symmetric systems give an equal split.
    ThomeerModel sym{{{0.15, 0.5, 10.0}, {0.15, 0.5, 500.0}}};
    auto [sa, sb] = partition_porosity(sym);
    CHECK(sa == doctest::Approx(sb));

    ThomeerModel three{{{0.1, 0.5, 1.0}, {0.1, 0.5, 10.0}, {0.1, 0.5, 100.0}}};
    CHECK_THROWS_AS(partition_porosity(three), std::invalid_argument);
}

TEST_CASE("micp csv round trip") {
    namespace fs = std::filesystem;
    ThomeerModel truth{{{0.2, 0.6, 20.0}}};
    MicpCurve curve = synth::thomeer_curve(truth, 15);
    auto path = (fs::temp_directory_path() / "micp_test.csv").string();
    {
        std::ofstream f(path);
        f << "pc,bv\n";
        for (const auto& p : curve.points) {
            f.precision(15);
            f << p.pc << "," << p.bv << "\n";
        }
    }
    MicpCurve back = load_micp_csv(path);
    REQUIRE(back.points.size() == curve.points.size());
    for (std::size_t i = 0; i < back.points.size(); ++i) {
        CHECK(back.points[i].pc == doctest::Approx(curve.points[i].pc).epsilon(1e-12));
        CHECK(back.points[i].bv == doctest::Approx(curve.points[i].bv).epsilon(1e-12));
    }
    fs::remove(path);
}
