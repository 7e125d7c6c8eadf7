#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include <ldpcopt/density_evolution.hpp>

using namespace ldpcopt;

namespace {

double uniform01(std::mt19937& rng) { return rng() * (1.0 / 4294967296.0); }

DegreeDistribution random_distribution(std::mt19937& rng, NodeKind kind,
                                       int max_deg) {
    std::map<int, double> w;
    double sum = 0.0;
    for (int d = 2; d <= max_deg; ++d) {
        if (uniform01(rng) < 0.5 && d != max_deg) continue;
        double v = 0.05 + uniform01(rng);
        w[d] = v;
        sum += v;
    }
    for (auto& [d, v] : w) v /= sum;
    return DegreeDistribution(kind, w);
}

// minimum over interior grid points (f(0) = 0 structurally for DE constraints)
template <class F>
double interior_grid_min(F&& f, double end, int n) {
    double m = f(end / (n - 1));
    for (int k = 2; k < n; ++k) m = std::min(m, f(end * k / (n - 1)));
    return m;
}

} // namespace

TEST_CASE("bec constraint polynomial, concrete") {
    DegreeDistribution lam(NodeKind::variable, {{3, 1.0}});
    DegreeDistribution rho(NodeKind::check, {{3, 1.0}});
    auto P = build_de_poly_bec(lam, rho, 0.5);
    REQUIRE(P.num_vars() == 0);
    Polynomial p = P.instantiate({});
    // x - 0.5*(2x - x^2)^2
    REQUIRE(p.degree() == 4);
    CHECK(p.coeff(0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(p.coeff(1) == Catch::Approx(1.0));
    CHECK(p.coeff(2) == Catch::Approx(-2.0));
    CHECK(p.coeff(3) == Catch::Approx(2.0));
    CHECK(p.coeff(4) == Catch::Approx(-0.5));
}

TEST_CASE("bec endpoints: P(0)=0 and P(1)=1-eps") {
    std::mt19937 rng(991);
    // nested evaluation holds the identities at machine precision at any size
    for (int i = 0; i < 20; ++i) {
        auto lam = random_distribution(rng, NodeKind::variable, 8);
        auto rho = random_distribution(rng, NodeKind::check, 10);
        double eps = 0.05 + 0.9 * uniform01(rng);
        CHECK(eval_de_bec(lam, rho, eps, 0.0) == Catch::Approx(0.0).margin(1e-12));
        CHECK(eval_de_bec(lam, rho, eps, 1.0) ==
              Catch::Approx(1.0 - eps).margin(1e-12));
    }
    // the expanded coefficients satisfy them too while they are well-conditioned
    for (int i = 0; i < 20; ++i) {
        auto lam = random_distribution(rng, NodeKind::variable, 4);
        auto rho = random_distribution(rng, NodeKind::check, 5);
        double eps = 0.05 + 0.9 * uniform01(rng);
        Polynomial p = build_de_poly_bec(lam, rho, eps).instantiate({});
        CHECK(p.eval(0.0) == Catch::Approx(0.0).margin(1e-12));
        CHECK(p.eval(1.0) == Catch::Approx(1.0 - eps).margin(1e-12));
    }
    // at larger sizes the identity degrades with the coefficient magnitudes;
    // assert the conditioning-scaled version
    for (int i = 0; i < 10; ++i) {
        auto lam = random_distribution(rng, NodeKind::variable, 8);
        auto rho = random_distribution(rng, NodeKind::check, 10);
        double eps = 0.05 + 0.9 * uniform01(rng);
        Polynomial p = build_de_poly_bec(lam, rho, eps).instantiate({});
        double l1 = 0.0;
        for (double c : p.coeffs()) l1 += std::abs(c);
        CHECK(p.eval(1.0) ==
              Catch::Approx(1.0 - eps).margin(1e-13 * (1.0 + l1)));
    }
}

TEST_CASE("bec free side matches concrete instantiations") {
    DegreeDistribution rho(NodeKind::check, {{2, 1.0}});
    auto Pf = build_de_poly_bec(FreeSide{3}, rho, 0.4);
    REQUIRE(Pf.num_vars() == 2);

    Polynomial at_basis2 = Pf.instantiate({1.0, 0.0});
    Polynomial concrete2 =
        build_de_poly_bec(DegreeDistribution(NodeKind::variable, {{2, 1.0}}), rho, 0.4)
            .instantiate({});
    for (int k = 0; k <= 20; ++k) {
        double x = k / 20.0;
        CHECK(at_basis2.eval(x) == Catch::Approx(concrete2.eval(x)).margin(1e-12));
    }

    Polynomial at_basis3 = Pf.instantiate({0.0, 1.0});
    Polynomial concrete3 =
        build_de_poly_bec(DegreeDistribution(NodeKind::variable, {{3, 1.0}}), rho, 0.4)
            .instantiate({});
    for (int k = 0; k <= 20; ++k) {
        double x = k / 20.0;
        CHECK(at_basis3.eval(x) == Catch::Approx(concrete3.eval(x)).margin(1e-12));
    }

    Polynomial mixed = Pf.instantiate({0.25, 0.75});
    DegreeDistribution lam(NodeKind::variable, {{2, 0.25}, {3, 0.75}});
    Polynomial concrete_mixed = build_de_poly_bec(lam, rho, 0.4).instantiate({});
    for (int k = 0; k <= 20; ++k) {
        double x = k / 20.0;
        CHECK(mixed.eval(x) == Catch::Approx(concrete_mixed.eval(x)).margin(1e-12));
    }
}

TEST_CASE("bec rejects epsilon outside (0,1)") {
    DegreeDistribution lam(NodeKind::variable, {{3, 1.0}});
    DegreeDistribution rho(NodeKind::check, {{6, 1.0}});
    CHECK_THROWS_AS(build_de_poly_bec(lam, rho, 0.0), EpsilonOutOfRange);
    CHECK_THROWS_AS(build_de_poly_bec(lam, rho, 1.0), EpsilonOutOfRange);
    CHECK_THROWS_AS(build_de_poly_bec(lam, rho, -0.2), EpsilonOutOfRange);
}

TEST_CASE("bsc constraint polynomial, concrete") {
    DegreeDistribution lam(NodeKind::variable, {{3, 1.0}});
    DegreeDistribution rho(NodeKind::check, {{2, 1.0}});
    Polynomial p = build_de_poly_bsc(lam, rho, 0.1).instantiate({});
    // x - 0.9 x^2 - 0.1 (1 - (1-x)^2) = 0.8x - 0.8x^2
    REQUIRE(p.degree() == 2);
    CHECK(p.coeff(0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(p.coeff(1) == Catch::Approx(0.8));
    CHECK(p.coeff(2) == Catch::Approx(-0.8));
}

TEST_CASE("bsc P(0)=0 for normalized lambda") {
    std::mt19937 rng(313);
    for (int i = 0; i < 20; ++i) {
        auto lam = random_distribution(rng, NodeKind::variable, 7);
        auto rho = random_distribution(rng, NodeKind::check, 9);
        double p = 0.01 + 0.45 * uniform01(rng);
        Polynomial poly = build_de_poly_bsc(lam, rho, p).instantiate({});
        CHECK(poly.eval(0.0) == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("bsc free side matches concrete at sample points") {
    DegreeDistribution rho(NodeKind::check, {{6, 1.0}});
    auto Pf = build_de_poly_bsc(FreeSide{2}, rho, 0.05);
    REQUIRE(Pf.num_vars() == 1);
    Polynomial inst = Pf.instantiate({1.0});
    Polynomial conc =
        build_de_poly_bsc(DegreeDistribution(NodeKind::variable, {{2, 1.0}}), rho, 0.05)
            .instantiate({});
    for (int k = 0; k <= 20; ++k) {
        double x = 0.05 * k / 20.0;
        CHECK(inst.eval(x) == Catch::Approx(conc.eval(x)).margin(1e-12));
    }
}

TEST_CASE("bsc rejects crossover outside (0,0.5)") {
    DegreeDistribution lam(NodeKind::variable, {{3, 1.0}});
    DegreeDistribution rho(NodeKind::check, {{6, 1.0}});
    CHECK_THROWS_AS(build_de_poly_bsc(lam, rho, 0.5), CrossoverOutOfRange);
    CHECK_THROWS_AS(build_de_poly_bsc(lam, rho, 0.0), CrossoverOutOfRange);
}

TEST_CASE("dual (check-side) constraint polynomial") {
    DegreeDistribution lam(NodeKind::variable, {{3, 1.0}});
    DegreeDistribution rho(NodeKind::check, {{2, 1.0}});
    Polynomial q = build_de_poly_bec_dual(lam, rho, 0.4).instantiate({});
    // (1 - 0.4 x^2) - (1 - x) = x - 0.4 x^2
    REQUIRE(q.degree() == 2);
    CHECK(q.coeff(0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(q.coeff(1) == Catch::Approx(1.0));
    CHECK(q.coeff(2) == Catch::Approx(-0.4));

    auto Qf = build_de_poly_bec_dual(lam, FreeSide{4}, 0.4);
    REQUIRE(Qf.num_vars() == 3);
    DegreeDistribution rho_mix(NodeKind::check, {{2, 0.3}, {4, 0.7}});
    Polynomial inst = Qf.instantiate({0.3, 0.0, 0.7});
    Polynomial conc = build_de_poly_bec_dual(lam, rho_mix, 0.4).instantiate({});
    for (int k = 0; k <= 20; ++k) {
        double x = k / 20.0;
        CHECK(inst.eval(x) == Catch::Approx(conc.eval(x)).margin(1e-12));
    }
}

TEST_CASE("grid feasibility oracle") {
    auto r1 = check_feasibility_grid(Polynomial{0.0, 1.0, -1.0}, 1.0, 1001, 1e-8);
    CHECK(r1.feasible);
    CHECK(r1.max_violation <= 0.0 + 1e-12);
    CHECK(r1.grid_size == 1001);

    DegreeDistribution lam(NodeKind::variable, {{3, 1.0}});
    DegreeDistribution rho(NodeKind::check, {{6, 1.0}});
    Polynomial bad = build_de_poly_bec(lam, rho, 0.45).instantiate({});
    auto r2 = check_feasibility_grid(bad, 1.0, 10000, 1e-8);
    CHECK_FALSE(r2.feasible);
    CHECK(r2.max_violation > 1e-4);
    CHECK(r2.argmax_x > 0.0);
    CHECK(r2.argmax_x < 1.0);

    auto r3 = check_feasibility_grid(Polynomial::constant(-1.0), 1.0, 100, 1e-8);
    CHECK_FALSE(r3.feasible);
    CHECK(r3.max_violation == Catch::Approx(1.0));
}

TEST_CASE("fixed-point recursion") {
    DegreeDistribution lam(NodeKind::variable, {{3, 1.0}});
    DegreeDistribution rho(NodeKind::check, {{6, 1.0}});

    auto good = de_recursion_bec(lam, rho, 0.40);
    CHECK(good.converged);
    CHECK(good.final_x < de_defaults::conv_tol);

    auto bad = de_recursion_bec(lam, rho, 0.45);
    CHECK_FALSE(bad.converged);
    CHECK(bad.final_x > 1e-3);

    auto tiny = de_recursion_bec(lam, rho, 1e-4);
    CHECK(tiny.converged);
    CHECK(tiny.iters <= 10);
}

TEST_CASE("threshold bisection") {
    DegreeDistribution lam3(NodeKind::variable, {{3, 1.0}});
    DegreeDistribution rho6(NodeKind::check, {{6, 1.0}});
    double t36 = threshold_bec(lam3, rho6, 1e-4);
    CHECK(t36 > 0.4284);
    CHECK(t36 < 0.4304);

    DegreeDistribution lam2(NodeKind::variable, {{2, 1.0}});
    double t26 = threshold_bec(lam2, rho6, 1e-4);
    CHECK(t26 > 0.1999);
    CHECK(t26 < 0.2001);

    // convergence is monotone around the returned threshold
    for (int k = 1; k <= 5; ++k) {
        CHECK(de_recursion_bec(lam3, rho6, t36 - 2e-3 * k).converged);
        CHECK_FALSE(de_recursion_bec(lam3, rho6, t36 + 2e-3 * k).converged);
    }
}

TEST_CASE("restricting the bec grid to [0,eps] never changes the verdict") {
    std::mt19937 rng(2024);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 30; ++i) {
        auto lam = random_distribution(rng, NodeKind::variable, 8);
        auto rho = random_distribution(rng, NodeKind::check, 10);
        double eps = 0.05 + 0.9 * uniform01(rng);
        auto f = [&](double x) { return eval_de_bec(lam, rho, eps, x); };
        if (std::abs(interior_grid_min(f, 1.0, 10000)) < 1e-6) continue;
        auto full = check_feasibility_grid_fn(f, 1.0, 10000, 1e-6);
        auto restricted = check_feasibility_grid_fn(f, eps, 10000, 1e-6);
        CHECK(full.feasible == restricted.feasible);
        ++checked;
    }
    CHECK(checked == 30);
}

TEST_CASE("variable-side and check-side forms agree on feasibility") {
    std::mt19937 rng(5150);
    int checked = 0;
    for (int i = 0; i < 2000 && checked < 50; ++i) {
        auto lam = random_distribution(rng, NodeKind::variable, 8);
        auto rho = random_distribution(rng, NodeKind::check, 10);
        double eps = 0.05 + 0.9 * uniform01(rng);
        auto f = [&](double x) { return eval_de_bec(lam, rho, eps, x); };
        auto g = [&](double x) { return eval_de_bec_dual(lam, rho, eps, x); };
        if (std::abs(interior_grid_min(f, 1.0, 10000)) < 1e-6) continue;
        auto vp = check_feasibility_grid_fn(f, 1.0, 10000, 1e-6);
        auto vq = check_feasibility_grid_fn(g, 1.0, 10000, 1e-6);
        CHECK(vp.feasible == vq.feasible);
        ++checked;
    }
    CHECK(checked == 50);
}

TEST_CASE("nested evaluation matches expanded coefficients at small sizes") {
    std::mt19937 rng(88);
    for (int i = 0; i < 10; ++i) {
        auto lam = random_distribution(rng, NodeKind::variable, 4);
        auto rho = random_distribution(rng, NodeKind::check, 5);
        double eps = 0.05 + 0.9 * uniform01(rng);
        Polynomial P = build_de_poly_bec(lam, rho, eps).instantiate({});
        Polynomial Q = build_de_poly_bec_dual(lam, rho, eps).instantiate({});
        double pc = 0.05 + 0.4 * uniform01(rng);
        Polynomial B = build_de_poly_bsc(lam, rho, pc).instantiate({});
        for (int k = 0; k <= 25; ++k) {
            double x = k / 25.0;
            CHECK(P.eval(x) ==
                  Catch::Approx(eval_de_bec(lam, rho, eps, x)).margin(1e-11));
            CHECK(Q.eval(x) ==
                  Catch::Approx(eval_de_bec_dual(lam, rho, eps, x)).margin(1e-11));
            CHECK(B.eval(x * pc) ==
                  Catch::Approx(eval_de_bsc(lam, rho, pc, x * pc)).margin(1e-11));
        }
    }
}
