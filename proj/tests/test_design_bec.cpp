#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <ldpcopt/design.hpp>

using namespace ldpcopt;

namespace {

DegreeDistribution regular(NodeKind kind, int degree) {
    return DegreeDistribution(kind, {{degree, 1.0}});
}

// Check-side analogue of the grid-LP baseline, used here as an independent
// cross-check: min sum rho_j/j with rho(1 - eps*lambda(x_k)) >= 1 - x_k.
// Same dual construction as the variable-side version.
double rho_grid_lp_objective(const DegreeDistribution& lambda, double epsilon,
                             int D_c, int grid_size) {
    const int K = D_c - 1;
    const int npts = grid_size;
    const int nvars = npts + 2 + K;
    ConicProgram prog;
    prog.cones = {{ConeBlock::Type::nonneg, nvars}};
    prog.c.assign(nvars, 0.0);
    prog.b.assign(K, 0.0);
    for (int j = 2; j <= D_c; ++j) prog.b[j - 2] = 1.0 / j;
    prog.c[npts] = -1.0;
    prog.c[npts + 1] = 1.0;
    for (int r = 0; r < K; ++r) {
        prog.A.push_back({r, npts, 1.0});
        prog.A.push_back({r, npts + 1, -1.0});
        prog.A.push_back({r, npts + 2 + r, 1.0});
    }
    for (int k = 0; k < grid_size; ++k) {
        double x = static_cast<double>(k) / (grid_size - 1);
        double w = 1.0 - epsilon * lambda.eval(x);
        prog.c[k] = -(1.0 - x);
        double g = w;
        for (int j = 2; j <= D_c; ++j) {
            prog.A.push_back({j - 2, k, g});
            g *= w;
        }
    }
    // this standard form is the negated dual of the check-side grid LP, so
    // its optimal value is minus the relaxed minimum
    auto sol = solve(prog);
    REQUIRE(sol.status == SolveStatus::optimal);
    return -sol.objective_value;
}

} // namespace

TEST_CASE("forced regular design at the boundary erasure rate") {
    auto res = optimize_lambda_bec(regular(NodeKind::check, 6), 0.2, 2);
    REQUIRE(res.distribution.weights().size() == 1);
    CHECK(res.distribution.weights().at(2) == Catch::Approx(1.0).margin(1e-9));
    CHECK(res.design_rate == Catch::Approx(2.0 / 3.0).margin(1e-9));
    CHECK(res.objective == Catch::Approx(0.5).margin(1e-9));
    CHECK(res.validation.feasible);
    CHECK(res.solver_stats.status == SolveStatus::optimal);
    CHECK(res.certificate.dim > 0);
}

TEST_CASE("forced regular design just past the boundary is infeasible") {
    CHECK_THROWS_AS(optimize_lambda_bec(regular(NodeKind::check, 6), 0.25, 2),
                    Infeasible);
}

TEST_CASE("irregular design at eps 0.3 brackets between known codes and capacity") {
    auto res = optimize_lambda_bec(regular(NodeKind::check, 6), 0.3, 10);
    CHECK(res.design_rate >= 0.5);
    CHECK(res.design_rate <= 0.7 + 1e-9);
    CHECK(res.design_rate <= 1.0 - 0.3 + 1e-9);
    CHECK(res.validation.feasible);

    auto lp = optimize_lambda_grid_lp(regular(NodeKind::check, 6), 0.3, 10,
                                      de_defaults::grid_size);
    CHECK(lp.objective >= res.objective - 1e-9);
    CHECK(std::abs(lp.objective - res.objective) <= 2e-3);
}

TEST_CASE("grid LP on the forced instance recovers the forced solution") {
    auto lp = optimize_lambda_grid_lp(regular(NodeKind::check, 6), 0.2, 2,
                                      de_defaults::grid_size);
    CHECK(lp.design_rate == Catch::Approx(2.0 / 3.0).margin(1e-7));
    CHECK(lp.distribution.weights().at(2) == Catch::Approx(1.0).margin(1e-7));
    CHECK(lp.certificate.dim == 0);
}

TEST_CASE("grid LP reports infeasibility past the boundary") {
    CHECK_THROWS_AS(optimize_lambda_grid_lp(regular(NodeKind::check, 6), 0.25, 2,
                                            de_defaults::grid_size),
                    Infeasible);
}

TEST_CASE("sos objective is within the lp relaxation sandwich") {
    DesignOptions opts;
    opts.solver.tol = 1e-10; // solver noise must stay below the 1e-9 margin
    for (double eps : {0.25, 0.35, 0.45}) {
        auto sos = optimize_lambda_bec(regular(NodeKind::check, 5), eps, 8, opts);
        auto lp = optimize_lambda_grid_lp(regular(NodeKind::check, 5), eps, 8,
                                          de_defaults::grid_size, opts);
        INFO("eps = " << eps);
        CHECK(lp.objective >= sos.objective - 1e-9);
        CHECK(lp.objective - sos.objective <= 2e-3);
    }
}

TEST_CASE("lp relaxation gap shrinks as the grid refines") {
    auto sos = optimize_lambda_bec(regular(NodeKind::check, 6), 0.4, 8);
    double prev_gap = std::numeric_limits<double>::infinity();
    for (int n : {100, 1000, 10000}) {
        auto lp = optimize_lambda_grid_lp(regular(NodeKind::check, 6), 0.4, 8, n);
        double gap = lp.objective - sos.objective;
        CHECK(gap >= -1e-9);
        CHECK(gap <= prev_gap + 1e-9);
        prev_gap = gap;
    }
    CHECK(prev_gap <= 2e-3);
}

TEST_CASE("objective is monotone in the maximum variable degree") {
    DesignOptions opts;
    opts.solver.tol = 1e-10; // the curve is nearly flat here, so keep noise low
    double prev = 0.0;
    for (int dv : {4, 6, 8, 10}) {
        auto res =
            optimize_lambda_bec(regular(NodeKind::check, 5), 0.35, dv, opts);
        CHECK(res.objective >= prev - 1e-9);
        prev = res.objective;
    }
}

TEST_CASE("forced check-side design") {
    auto res = optimize_rho_bec(regular(NodeKind::variable, 3), 0.4, 2);
    REQUIRE(res.distribution.weights().size() == 1);
    CHECK(res.distribution.weights().at(2) == Catch::Approx(1.0).margin(1e-9));
    CHECK(res.objective == Catch::Approx(0.5).margin(1e-9));
    CHECK(res.validation.feasible);
}

TEST_CASE("check-side design matches its grid analogue") {
    auto res = optimize_rho_bec(regular(NodeKind::variable, 3), 0.4, 8);
    double lp = rho_grid_lp_objective(regular(NodeKind::variable, 3), 0.4, 8,
                                      2000);
    CHECK(std::abs(res.objective - lp) <= 2e-3);
    // fewer constraints on the grid: the relaxed minimum cannot be larger
    CHECK(lp <= res.objective + 1e-9);
    CHECK(res.design_rate <= 1.0 - 0.4 + 1e-9);
    CHECK(res.validation.feasible);
}

TEST_CASE("check-side design rate respects capacity across max degrees") {
    for (int dc : {2, 4, 6, 8}) {
        auto res = optimize_rho_bec(regular(NodeKind::variable, 3), 0.4, dc);
        CHECK(res.design_rate <= 1.0 - 0.4 + 1e-9);
        CHECK(res.validation.feasible);
    }
}

TEST_CASE("design rate is recomputable from the stored sides") {
    auto res = optimize_lambda_bec(regular(NodeKind::check, 6), 0.3, 10);
    CHECK(design_rate(res.distribution, res.fixed_side) ==
          Catch::Approx(res.design_rate).margin(1e-9));
    auto rres = optimize_rho_bec(regular(NodeKind::variable, 3), 0.4, 8);
    CHECK(design_rate(rres.fixed_side, rres.distribution) ==
          Catch::Approx(rres.design_rate).margin(1e-9));
}

TEST_CASE("gram certificate of a design is sound") {
    auto res = optimize_lambda_bec(regular(NodeKind::check, 6), 0.3, 6);
    REQUIRE(res.certificate.dim > 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.certificate.entries,
                                                      Eigen::EigenvaluesOnly);
    double scale = std::max(1.0, res.certificate.entries.cwiseAbs().maxCoeff());
    CHECK(es.eigenvalues().minCoeff() >= -1e-7 * scale);
}

TEST_CASE("design argument validation") {
    auto rho = regular(NodeKind::check, 6);
    auto lam = regular(NodeKind::variable, 3);
    CHECK_THROWS_AS(optimize_lambda_bec(rho, 0.3, 1), ParamOutOfRange);
    CHECK_THROWS_AS(optimize_lambda_bec(lam, 0.3, 5), ParamOutOfRange);
    CHECK_THROWS_AS(optimize_lambda_bec(rho, 0.0, 5), EpsilonOutOfRange);
    CHECK_THROWS_AS(optimize_lambda_bec(rho, 1.0, 5), EpsilonOutOfRange);
    CHECK_THROWS_AS(optimize_rho_bec(rho, 0.3, 5), ParamOutOfRange);
    CHECK_THROWS_AS(optimize_lambda_grid_lp(rho, 0.3, 5, 50), ParamOutOfRange);
}

TEST_CASE("designs are deterministic") {
    auto a = optimize_lambda_bec(regular(NodeKind::check, 6), 0.3, 8);
    auto b = optimize_lambda_bec(regular(NodeKind::check, 6), 0.3, 8);
    REQUIRE(a.distribution.weights().size() == b.distribution.weights().size());
    for (const auto& [d, w] : a.distribution.weights())
        CHECK(w == b.distribution.weights().at(d));
    CHECK(a.objective == b.objective);
}
