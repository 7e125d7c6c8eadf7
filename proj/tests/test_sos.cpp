#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <ldpcopt/density_evolution.hpp>
#include <ldpcopt/sos.hpp>

using namespace ldpcopt;

namespace {
double uniform01(std::mt19937& rng) { return rng() * (1.0 / 4294967296.0); }
} // namespace

TEST_CASE("lift of known polynomials") {
    AffinePolynomial x(0, Polynomial{0.0, 1.0});
    Polynomial t2 = lift_to_real_line(x, 1.0).instantiate({});
    REQUIRE(t2.degree() == 2);
    CHECK(t2.coeff(2) == Catch::Approx(1.0));
    CHECK(t2.coeff(0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(t2.coeff(1) == Catch::Approx(0.0).margin(1e-15));

    AffinePolynomial x1mx(0, Polynomial{0.0, 1.0, -1.0});
    Polynomial t2b = lift_to_real_line(x1mx, 1.0).instantiate({});
    REQUIRE(t2b.degree() == 2);
    CHECK(t2b.coeff(2) == Catch::Approx(1.0));

    AffinePolynomial one(0, Polynomial::constant(1.0));
    Polynomial lifted_one = lift_to_real_line(one, 1.0).instantiate({});
    REQUIRE(lifted_one.degree() == 0);
    CHECK(lifted_one.coeff(0) == Catch::Approx(1.0));
}

TEST_CASE("lift input validation") {
    CHECK_THROWS_AS(lift_to_real_line(AffinePolynomial(0), 1.0), ZeroPolynomial);
    AffinePolynomial x(0, Polynomial{0.0, 1.0});
    CHECK_THROWS_AS(lift_to_real_line(x, 0.0), ParamOutOfRange);
    CHECK_THROWS_AS(lift_to_real_line(x, 1.5), ParamOutOfRange);
    AffinePolynomial big(0, Polynomial::monomial(201));
    CHECK_THROWS_AS(lift_to_real_line(big, 1.0), ParamOutOfRange);
}

TEST_CASE("lift matches pointwise definition") {
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 20; ++trial) {
        int deg = 1 + static_cast<int>(uniform01(rng) * 40);
        std::vector<double> c(deg + 1);
        for (double& v : c) v = 2.0 * uniform01(rng) - 1.0;
        if (std::abs(c.back()) < 0.1) c.back() = 0.5;
        Polynomial P{c};
        double a = 0.1 + 0.9 * uniform01(rng);
        std::size_t q = P.degree();
        Polynomial Pi = lift_to_real_line(AffinePolynomial(0, P), a).instantiate({});
        for (int k = 0; k < 100; ++k) {
            double t = -10.0 + 20.0 * uniform01(rng);
            double mult = std::pow(1.0 + t * t, static_cast<double>(q));
            double expect = mult * P.eval(a * t * t / (1.0 + t * t));
            CHECK(Pi.eval(t) ==
                  Catch::Approx(expect).epsilon(1e-9).margin(1e-9 * mult));
        }
    }
}

TEST_CASE("lift keeps affine structure") {
    DegreeDistribution rho(NodeKind::check, {{4, 1.0}});
    auto P = build_de_poly_bec(FreeSide{4}, rho, 0.35);
    auto Pi = lift_to_real_line(P, 1.0);
    REQUIRE(Pi.num_vars() == 3);
    std::vector<double> z{0.2, 0.5, 0.3};
    Polynomial direct = lift_to_real_line(
        AffinePolynomial(0, P.instantiate(z)), 1.0).instantiate({});
    Polynomial via_affine = Pi.instantiate(z);
    for (int k = 0; k <= 30; ++k) {
        double t = -3.0 + 6.0 * k / 30.0;
        CHECK(via_affine.eval(t) ==
              Catch::Approx(direct.eval(t)).epsilon(1e-11).margin(1e-11));
    }
}

TEST_CASE("sos fragment and assembly dimensions") {
    // rho = x^5, eps = 0.3, free lambda up to D_v = 3: q = 10, side 11
    DegreeDistribution rho(NodeKind::check, {{6, 1.0}});
    auto P = build_de_poly_bec(FreeSide{3}, rho, 0.3);
    REQUIRE(P.degree() == 10);
    auto Pi = lift_to_real_line(P, 1.0);
    auto frag = build_sos_feasibility(Pi);
    CHECK(frag.gram_side == 11);

    AffineExpr obj;
    obj.gradient[0] = 1.0 / 2.0;
    obj.gradient[1] = 1.0 / 3.0;
    LinearConstraint norm;
    norm.coeffs[0] = 1.0;
    norm.coeffs[1] = 1.0;
    norm.rhs = 1.0;
    auto ap = assemble_program(obj, true, 2, {frag}, {norm});

    CHECK(ap.prog.cones.size() == 2);
    CHECK(ap.prog.cones[0].type == ConeBlock::Type::nonneg);
    CHECK(ap.prog.cones[0].size == 2);
    CHECK(ap.prog.cones[1].type == ConeBlock::Type::psd);
    CHECK(ap.prog.cones[1].size == 11);
    CHECK(ap.prog.num_vars() == 2 + svec_len(11));
    CHECK(ap.prog.num_rows() == 21 + 1);
    CHECK(ap.objective_sign == -1.0);
    // maximization negated into minimization
    CHECK(ap.prog.c[0] == Catch::Approx(-0.5));
    CHECK(ap.prog.c[1] == Catch::Approx(-1.0 / 3.0));
}

TEST_CASE("assembly rejects mismatched index spaces") {
    AffinePolynomial p1(1, Polynomial{0.0, 0.0, 1.0});
    AffinePolynomial p2(2, Polynomial{0.0, 0.0, 1.0});
    auto f1 = build_sos_feasibility(p1);
    auto f2 = build_sos_feasibility(p2);
    CHECK_THROWS_AS(assemble_program(AffineExpr{}, false, 1, {f1, f2}, {}),
                    IndexSpaceMismatch);
    AffineExpr bad_obj;
    bad_obj.gradient[5] = 1.0;
    CHECK_THROWS_AS(assemble_program(bad_obj, false, 1, {f1}, {}),
                    IndexSpaceMismatch);
}

TEST_CASE("gram coupling rows encode anti-diagonal sums") {
    // Pi = (t-1)^2 = 1 - 2t + t^2, concrete: side 2, three rows
    AffinePolynomial Pi(0, Polynomial{1.0, -2.0, 1.0});
    auto frag = build_sos_feasibility(Pi);
    REQUIRE(frag.gram_side == 2);
    auto ap = assemble_program(AffineExpr{}, false, 0, {frag}, {});
    REQUIRE(ap.prog.num_rows() == 3);
    REQUIRE(ap.prog.num_vars() == 3);

    // verify A against the svec of a hand-chosen symmetric matrix:
    // B = [[1,-1],[-1,1]] has anti-diagonal sums (1, -2, 1) = Pi
    Eigen::MatrixXd B(2, 2);
    B << 1.0, -1.0, -1.0, 1.0;
    Eigen::MatrixXd Bhat(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            Bhat(i, j) = B(i, j) / (frag.basis_scale[i] * frag.basis_scale[j]);
    Eigen::VectorXd z = svec_pack(Bhat);
    std::vector<double> resid(3, 0.0);
    for (const auto& t : ap.prog.A) resid[t.row] += t.value * z[t.col];
    for (int l = 0; l < 3; ++l)
        CHECK(resid[l] == Catch::Approx(ap.prog.b[l]).margin(1e-12));
}

TEST_CASE("gram extraction undoes the basis scaling") {
    AffinePolynomial Pi(0, Polynomial{4.0, 0.0, 9.0});
    auto frag = build_sos_feasibility(Pi);
    auto ap = assemble_program(AffineExpr{}, false, 0, {frag}, {});
    Eigen::MatrixXd B(2, 2);
    B << 4.0, 0.5, 0.5, 9.0;
    Eigen::MatrixXd Bhat(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            Bhat(i, j) = B(i, j) / (frag.basis_scale[i] * frag.basis_scale[j]);
    Eigen::VectorXd zv = svec_pack(Bhat);
    std::vector<double> z(zv.data(), zv.data() + zv.size());
    auto g = extract_gram(ap, z, 0);
    REQUIRE(g.dim == 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(g.entries(i, j) == Catch::Approx(B(i, j)).margin(1e-12));
}

TEST_CASE("svec round trip and inner products") {
    Eigen::MatrixXd M(3, 3);
    M << 2, -1, 0.5, -1, 3, 0.25, 0.5, 0.25, 1;
    Eigen::VectorXd v = svec_pack(M);
    REQUIRE(v.size() == 6);
    Eigen::MatrixXd back = svec_unpack(v, 3);
    CHECK((back - M).cwiseAbs().maxCoeff() < 1e-14);

    Eigen::MatrixXd N(3, 3);
    N << 1, 0.2, 0, 0.2, -1, 0.7, 0, 0.7, 2;
    double trace_inner = (M * N).trace();
    double vec_inner = v.dot(svec_pack(N));
    CHECK(vec_inner == Catch::Approx(trace_inner).epsilon(1e-12));
}
