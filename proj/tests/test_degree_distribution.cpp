#include <catch2/catch_amalgamated.hpp>

#include <ldpcopt/degree_distribution.hpp>

using ldpcopt::DegreeDistribution;
using ldpcopt::NodeKind;
using ldpcopt::design_rate;

TEST_CASE("regular distribution exposes x^(d-1)") {
    DegreeDistribution rho(NodeKind::check, {{6, 1.0}});
    auto p = rho.poly();
    REQUIRE(p.degree() == 5);
    CHECK(p.coeff(5) == Catch::Approx(1.0));
    for (std::size_t i = 0; i < 5; ++i) CHECK(p.coeff(i) == 0.0);
    CHECK(rho.max_degree() == 6);
}

TEST_CASE("irregular check distribution") {
    DegreeDistribution rho(NodeKind::check, {{3, 0.5821}, {4, 0.4179}});
    auto p = rho.poly();
    REQUIRE(p.degree() == 3);
    CHECK(p.coeff(2) == Catch::Approx(0.5821));
    CHECK(p.coeff(3) == Catch::Approx(0.4179));
    CHECK(p.eval(1.0) == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(DegreeDistribution(NodeKind::variable, {{2, 0.6}, {3, 0.5}}),
                    ldpcopt::WeightsNotNormalized);
    CHECK_THROWS_AS(DegreeDistribution(NodeKind::variable, {{2, -0.1}, {3, 1.1}}),
                    ldpcopt::NegativeWeight);
    CHECK_THROWS_AS(DegreeDistribution(NodeKind::variable, {{1, 0.5}, {3, 0.5}}),
                    ldpcopt::DegreeBelowTwo);
    CHECK_THROWS_AS(DegreeDistribution(NodeKind::check, {}),
                    ldpcopt::WeightsNotNormalized);
}

TEST_CASE("near-normalized input is renormalized") {
    DegreeDistribution d(NodeKind::variable, {{2, 0.5}, {3, 0.5 + 4e-10}});
    double sum = 0.0;
    for (const auto& [deg, w] : d.weights()) sum += w;
    CHECK(sum == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(d.poly().eval(1.0) == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("design rate") {
    DegreeDistribution lam3(NodeKind::variable, {{3, 1.0}});
    DegreeDistribution rho6(NodeKind::check, {{6, 1.0}});
    CHECK(design_rate(lam3, rho6) == Catch::Approx(0.5).epsilon(1e-12));

    DegreeDistribution lam2(NodeKind::variable, {{2, 1.0}});
    DegreeDistribution rho2(NodeKind::check, {{2, 1.0}});
    CHECK(design_rate(lam2, rho2) == Catch::Approx(0.0).margin(1e-15));

    // regular (d_v, d_c): rate is exactly 1 - d_v/d_c
    for (int dv = 2; dv <= 6; ++dv)
        for (int dc = dv + 1; dc <= 12; ++dc) {
            DegreeDistribution l(NodeKind::variable, {{dv, 1.0}});
            DegreeDistribution r(NodeKind::check, {{dc, 1.0}});
            CHECK(design_rate(l, r) ==
                  Catch::Approx(1.0 - double(dv) / dc).epsilon(1e-12));
        }
}

TEST_CASE("negative design rate is returned, not thrown") {
    DegreeDistribution lam(NodeKind::variable, {{6, 1.0}});
    DegreeDistribution rho(NodeKind::check, {{3, 0.5821}, {4, 0.4179}});
    CHECK(design_rate(lam, rho) == Catch::Approx(-0.79105).epsilon(1e-5));
}
