#include "phia/catalog.hpp"
#include "phia/cre.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace phia;

namespace {

Vecd v2(double a, double b) {
    Vecd r(2);
    r << a, b;
    return r;
}

// Rows are dependent variables (u, v, w), columns independent ones.
Matd coeffs(int n, int k, std::initializer_list<double> v) { return detail::mat(n, k, v); }

bool equal_up_to_sign(const Matd& a, const Matd& b, double tol = 1e-14) {
    return (a - b).cwiseAbs().maxCoeff() <= tol || (a + b).cwiseAbs().maxCoeff() <= tol;
}

// Each expected equation must appear among the emitted ones (up to sign).
void expect_contains_all(const std::vector<Matd>& emitted, const std::vector<Matd>& expected) {
    for (std::size_t e = 0; e < expected.size(); ++e) {
        bool found = false;
        for (const auto& m : emitted) found = found || equal_up_to_sign(m, expected[e]);
        EXPECT_TRUE(found) << "expected equation " << e << ":\n" << expected[e];
    }
}

Poly1 P(double c, double x = 0, double y = 0) { return {c, x, y}; }

// y u_x + x u_y - a x v_x + a y v_y = 0
// x u_x - y u_y - (y - b x) v_x - (x + b y) v_y = 0
TwoPDESystem sal1e(double a, double b) {
    TwoPDESystem s;
    s.a[0] = {P(0, 0, 1), P(0, 1, 0), P(0, -a, 0), P(0, 0, a)};
    s.a[1] = {P(0, 1, 0), P(0, 0, -1), P(0, b, -1), P(0, -1, -b)};
    return s;
}

// (g y - x) u_x + (g x + y) u_y + y v_x + x v_y = 0
// d y u_x + d x u_y - x v_x + y v_y = 0
TwoPDESystem sal2e(double g, double d) {
    TwoPDESystem s;
    s.a[0] = {P(0, -1, g), P(0, g, 1), P(0, 0, 1), P(0, 1, 0)};
    s.a[1] = {P(0, 0, d), P(0, d, 0), P(0, -1, 0), P(0, 0, 1)};
    return s;
}

// y u_x + x u_y = 0, x v_x - y v_y = 0
TwoPDESystem sdedp3() {
    TwoPDESystem s;
    s.a[0] = {P(0, 0, 1), P(0, 1, 0), P(0), P(0)};
    s.a[1] = {P(0), P(0), P(0, 1, 0), P(0, 0, -1)};
    return s;
}

// Constant c with J_expected = R(c) J_got at the sample points.
Vecd regular_factor(const RealAlgebra& A, const PhiMap& expected, const PhiMap& got) {
    Matd S(0, A.dim());
    Vecd rhs(0);
    for (const auto& p : default_sample_points()) {
        const Vecd u = v2(p[0], p[1]);
        const Matd Jg = got.jacobian(u), Je = expected.jacobian(u);
        const Matd Sp = detail::stacked_operator(A, Jg);
        Matd S2(S.rows() + Sp.rows(), A.dim());
        S2 << S, Sp;
        S = S2;
        Vecd r2(rhs.size() + Je.size());
        r2 << rhs, Eigen::Map<const Vecd>(Je.data(), Je.size());
        rhs = r2;
    }
    const Vecd c = lstsq(S, rhs);
    EXPECT_LE((S * c - rhs).cwiseAbs().maxCoeff(), 1e-12);
    return c;
}

}  // namespace

TEST(EmitCre, ComplexWithSwappedCoordinates) {
    const auto s = emit_cre(build_complex(), catalog_phi("swap").phi);
    ASSERT_EQ(s.num_equations(), 2);
    EXPECT_TRUE(s.constant);
    // u_x = -v_y, v_x = u_y
    const auto c = s.coefficients();
    EXPECT_TRUE(equal_up_to_sign(c[0], coeffs(2, 2, {1, 0, 0, 1})));
    EXPECT_TRUE(equal_up_to_sign(c[1], coeffs(2, 2, {0, -1, 1, 0})));
}

TEST(EmitCre, ComplexIdentityGivesClassicalEquations) {
    const auto s = emit_cre(build_complex(), identity_map(2));
    // u_x - v_y = 0, u_y + v_x = 0
    expect_contains_all(s.coefficients(), {coeffs(2, 2, {1, 0, 0, -1}), coeffs(2, 2, {0, 1, 1, 0})});
}

TEST(EmitCre, ComplexDegenerateAndMixedMaps) {
    const auto A = build_complex();
    // u_x = 0, v_x = 0
    const auto c0 = emit_cre(A, catalog_phi("y0").phi).coefficients();
    EXPECT_TRUE(equal_up_to_sign(c0[0], coeffs(2, 2, {1, 0, 0, 0})));
    EXPECT_TRUE(equal_up_to_sign(c0[1], coeffs(2, 2, {0, 0, 1, 0})));
    // v_y = v_x - u_x, u_y = u_x + v_x
    const auto c1 = emit_cre(A, catalog_phi("y_xy").phi).coefficients();
    EXPECT_TRUE(equal_up_to_sign(c1[0], coeffs(2, 2, {1, 0, -1, 1})));
    EXPECT_TRUE(equal_up_to_sign(c1[1], coeffs(2, 2, {1, -1, 1, 0})));
}

TEST(EmitCre, ThreeIndependentVariables) {
    const auto s = emit_cre(build_complex(), catalog_phi("xz_y").phi);
    EXPECT_EQ(s.num_equations(), 2 * 3 * 2 / 2);
    // u_x = v_y, v_x = -u_y, u_x = u_z, v_x = v_z
    const auto c = s.coefficients();
    expect_contains_all(c, {coeffs(2, 3, {1, 0, 0, 0, -1, 0}), coeffs(2, 3, {0, 1, 0, 1, 0, 0}),
                            coeffs(2, 3, {1, 0, -1, 0, 0, 0}), coeffs(2, 3, {0, 0, 0, 1, 0, -1})});
    // the (y, z) pair adds nothing: rank of all six equals rank of the four
    Matd all(6, 6);
    for (int e = 0; e < 6; ++e) all.row(e) = Eigen::Map<const Vecd>(c[e].data(), 6).transpose();
    EXPECT_EQ(numerical_rank(all), 4);
}

TEST(EmitCre, NonlinearMapGivesPositionDependentCoefficients) {
    const auto s = emit_cre(build_complex(), catalog_phi("nonlin3").phi);
    EXPECT_FALSE(s.constant);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 10; ++t) {
        Vecd u(3);
        u << 1.5 * (t - 5) / 5.0, 0.5 + 0.1 * t, 0.3;
        const double x = u(0), y = u(1);
        // -u_x/y^2 = 2x v_y, v_x/y^2 = 2x u_y, u_x = 2x u_z, v_x = 2x v_z
        expect_contains_all(s.coefficients(u),
                            {coeffs(2, 3, {-1 / (y * y), 0, 0, 0, -2 * x, 0}),
                             coeffs(2, 3, {0, -2 * x, 0, 1 / (y * y), 0, 0}),
                             coeffs(2, 3, {1, 0, -2 * x, 0, 0, 0}), coeffs(2, 3, {0, 0, 0, 1, 0, -2 * x})});
    }
}

class A31Golden : public ::testing::TestWithParam<std::array<double, 6>> {};

TEST_P(A31Golden, MatchesPrintedSystems) {
    const auto p = GetParam();
    const auto A = build_A3_1<double>(p);
    const double p1 = p[0], p2 = p[1], p3 = p[2], p4 = p[3], p5 = p[4], p6 = p[5];
    // the table's own dependent entries
    const double p7 = A.c(1, 1, 0), p8 = A.c(1, 2, 0), p9 = A.c(2, 2, 0);

    // u_y = p7 v_x + p8 w_x; v_y = u_x + p1 v_x + p3 w_x; w_y = p2 v_x + p4 w_x
    const auto xy0 = emit_cre(A, catalog_phi("xy0").phi).coefficients();
    ASSERT_EQ(xy0.size(), 3u);
    EXPECT_TRUE(equal_up_to_sign(xy0[0], coeffs(3, 2, {0, -1, p7, 0, p8, 0})));
    EXPECT_TRUE(equal_up_to_sign(xy0[1], coeffs(3, 2, {1, 0, p1, -1, p3, 0})));
    EXPECT_TRUE(equal_up_to_sign(xy0[2], coeffs(3, 2, {0, 0, p2, 0, p4, -1})));

    // u_y = p8 v_x + p9 w_x; v_y = p3 v_x + p5 w_x; w_y = u_x + p4 v_x + p6 w_x
    const auto x0y = emit_cre(A, catalog_phi("x0y").phi).coefficients();
    EXPECT_TRUE(equal_up_to_sign(x0y[0], coeffs(3, 2, {0, -1, p8, 0, p9, 0})));
    EXPECT_TRUE(equal_up_to_sign(x0y[1], coeffs(3, 2, {0, 0, p3, -1, p5, 0})));
    EXPECT_TRUE(equal_up_to_sign(x0y[2], coeffs(3, 2, {1, 0, p4, 0, p6, -1})));

    // p8 v_x + p9 w_x - p7 v_y - p8 w_y = 0
    // p3 v_x + p5 w_x - u_y - p1 v_y - p3 w_y = 0
    // u_x + p4 v_x + p6 w_x - p2 v_y - p4 w_y = 0
    const auto oxy = emit_cre(A, catalog_phi("0xy").phi).coefficients();
    EXPECT_TRUE(equal_up_to_sign(oxy[0], coeffs(3, 2, {0, 0, p8, -p7, p9, -p8})));
    EXPECT_TRUE(equal_up_to_sign(oxy[1], coeffs(3, 2, {0, -1, p3, -p1, p5, -p3})));
    EXPECT_TRUE(equal_up_to_sign(oxy[2], coeffs(3, 2, {1, 0, p4, -p2, p6, -p4})));
}

INSTANTIATE_TEST_SUITE_P(Params, A31Golden,
                         ::testing::Values(std::array<double, 6>{-1, -1, -1, -1, -1, -1},
                                           std::array<double, 6>{0, 0, 0, 0, 0, 0},
                                           std::array<double, 6>{0.3, -0.7, 1.1, 0.4, -0.2, 0.9},
                                           std::array<double, 6>{2, 1, -1.5, 0.25, 3, -0.5}));

TEST(EmitCre, CatalogFunctionsSolveEmittedSystems) {
    std::mt19937_64 rng(2);
    for (const auto& pair : catalog_pairs()) {
        const auto entry = catalog_phi(pair.phi_id);
        const auto A = catalog_algebra(pair.algebra_id);
        const auto s = emit_cre(A, entry.phi);
        EXPECT_EQ(s.num_equations(), A.dim() * entry.phi.k * (entry.phi.k - 1) / 2);
        // ten differentiable functions: catalog ones plus random polynomials in phi
        std::vector<VectorFunction> fs;
        for (const auto& id : {"e", "phi", "phi^2", "phi^3"}) fs.push_back(catalog_function(id, entry.phi, A));
        for (int r = 0; r < 6; ++r)
            fs.push_back(phi_polynomial(
                {A.random_element(rng), A.random_element(rng), A.random_element(rng), A.random_element(rng)},
                entry.phi, A));
        for (const auto& f : fs)
            for (int t = 0; t < 20; ++t) {
                const Vecd u = sample_in_box(rng, entry.lo, entry.hi);
                EXPECT_LE(s.residual(f, u), 1e-8) << pair.phi_id << " " << pair.algebra_id;
            }
    }
}

TEST(EmitCre, DimensionMismatch) {
    try {
        emit_cre(build_complex(), catalog_phi("xy0").phi);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(EmitCre, JsonAndLatex) {
    const auto s = emit_cre(build_complex(), catalog_phi("swap").phi);
    const auto j = cre_to_json(s);
    ASSERT_EQ(j["equations"].size(), 2u);
    EXPECT_EQ(j["equations"][0]["coefficients"][0][0].get<double>(), 1.0);
    EXPECT_EQ(j["equations"][0]["coefficients"][1][1].get<double>(), 1.0);
    EXPECT_EQ(cre_to_latex(s), "u_{x} + v_{y} = 0 \\\\\n-u_{y} + v_{x} = 0");
}

TEST(WeightedCre, SelectsFirstEquation) {
    const auto A = build_A2_1(0.3, -1.2);
    const auto phi = catalog_phi("sq").phi;
    const auto w = emit_weighted_cre(A, phi, 1.0, 0.0);
    const auto base = emit_cre(A, phi);
    const Vecd u = v2(0.4, -0.9);
    EXPECT_EQ(w.coefficients(u)[0], base.coefficients(u)[0]);
}

TEST(WeightedCre, MatchesExpandedFormsForAllFamilies) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(-2, 2);
    const auto phi = catalog_phi("sq").phi;
    for (int t = 0; t < 10; ++t) {
        const double k = ud(rng), l = ud(rng), al = ud(rng), be = ud(rng);
        const Vecd u = v2(ud(rng), ud(rng));
        const Matd J = phi.jacobian(u);
        const double p1x = J(0, 0), p1y = J(0, 1), p2x = J(1, 0), p2y = J(1, 1);
        const double kl = k * al + l * be;
        // rows (r, s), columns (x, y)
        const Matd a11 = coeffs(2, 2,
                                {k * p1y + l * p2y, -(k * p1x + l * p2x), l * p1y + kl * p2y, -(l * p1x + kl * p2x)});
        const Matd a12 = coeffs(2, 2,
                                {k * p2y + kl * p1y, -(kl * p1x + k * p2x), k * p1y + l * p2y, -(k * p1x + l * p2x)});
        const Matd a13 = coeffs(2, 2, {k * p1y, -k * p1x, l * p2y, -l * p2x});
        const auto w1 = emit_weighted_cre(build_A2_1(al, be), phi, k, l).coefficients(u)[0];
        const auto w2 = emit_weighted_cre(build_A2_2(al, be), phi, k, l).coefficients(u)[0];
        const auto w3 = emit_weighted_cre(build_A2_12(), phi, k, l).coefficients(u)[0];
        EXPECT_LE((w1 - a11).cwiseAbs().maxCoeff(), 1e-13);
        EXPECT_LE((w2 - a12).cwiseAbs().maxCoeff(), 1e-13);
        EXPECT_LE((w3 - a13).cwiseAbs().maxCoeff(), 1e-13);
        // exact linear combination
        const auto base = emit_cre(build_A2_1(al, be), phi).coefficients(u);
        EXPECT_EQ(w1, k * base[0] + l * base[1]);
    }
}

TEST(WeightedCre, DifferentiableFunctionsSatisfyWeightedEquation) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ud(-2, 2);
    for (const char* alg : {"A2_1:0.5,-1", "A2_2:1.5,0.25", "A2_12"}) {
        const auto A = catalog_algebra(alg);
        const auto phi = catalog_phi("sq").phi;
        const auto f = catalog_function("phi^3", phi, A);
        const auto w = emit_weighted_cre(A, phi, ud(rng), ud(rng));
        for (int t = 0; t < 20; ++t) {
            const Vecd u = v2(ud(rng), ud(rng));
            EXPECT_LE(w.residual(f, u), 1e-8) << alg;
        }
    }
}

TEST(Equivalence, IdenticalSystemsGiveIdentity) {
    const auto s = sal1e(0.5, 1.5);
    for (const auto& M : find_equivalence_matrix(s, s, default_sample_points()))
        EXPECT_LE((M - Matd::Identity(2, 2)).norm(), 1e-12);
}

TEST(Equivalence, ScaledRows) {
    const auto s1 = sal1e(-1, 0);
    TwoPDESystem s2 = s1;
    for (auto& p : s2.a[0]) p = p * 2.0;
    for (auto& p : s2.a[1]) p = p * 3.0;
    for (const auto& M : find_equivalence_matrix(s1, s2, default_sample_points())) {
        EXPECT_NEAR(M(0, 0), 2.0, 1e-12);
        EXPECT_NEAR(M(1, 1), 3.0, 1e-12);
        EXPECT_NEAR(M(0, 1), 0.0, 1e-12);
        EXPECT_NEAR(M(1, 0), 0.0, 1e-12);
    }
}

TEST(Equivalence, IndependentSystemsAreRejected) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ud(-1, 1);
    TwoPDESystem s1, s2;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c) {
            s1.a[r][c] = P(ud(rng));
            s2.a[r][c] = P(ud(rng));
        }
    try {
        find_equivalence_matrix(s1, s2, default_sample_points());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotEquivalent);
    }
}

TEST(Recovery, FirstFamilyExample) {
    for (auto [a, b] : {std::pair{-1.0, 0.0}, std::pair{0.5, 1.5}, std::pair{2.0, -0.75}, std::pair{0.0, 0.0}}) {
        const auto r = recover_phi_algebra(sal1e(a, b));
        EXPECT_EQ(r.planar_case, PlanarCase::A2_1);
        EXPECT_NEAR(r.params[0], a, 1e-10);
        EXPECT_NEAR(r.params[1], b, 1e-10);
        // (x^2 - y^2, 2xy) up to a constant regular factor
        const auto A = build_A2_1(a, b);
        const Vecd c = regular_factor(A, catalog_phi("sq").phi, r.phi);
        EXPECT_TRUE(A.is_regular(c));
        EXPECT_NEAR(c(0), 2.0, 1e-12);
        EXPECT_NEAR(c(1), 0.0, 1e-12);
        // potentials have no constant term
        EXPECT_EQ(r.potentials[0].c, 0.0);
        EXPECT_EQ(r.potentials[1].c, 0.0);
    }
}

TEST(Recovery, SecondFamilyExampleWithHint) {
    const auto r = recover_phi_algebra(sal2e(0.75, -1.5), PlanarCase::A2_2);
    EXPECT_EQ(r.planar_case, PlanarCase::A2_2);
    EXPECT_NEAR(r.params[0], 0.75, 1e-10);
    EXPECT_NEAR(r.params[1], -1.5, 1e-10);
    const Vecd c = regular_factor(build_A2_2(0.75, -1.5), catalog_phi("sq").phi, r.phi);
    // -2 times the unit e2
    EXPECT_NEAR(c(0), 0.0, 1e-12);
    EXPECT_NEAR(c(1), -2.0, 1e-12);
}

TEST(Recovery, SecondFamilyWithoutHintStillEquivalent) {
    const auto sys = sal2e(0.75, -1.5);
    const auto r = recover_phi_algebra(sys);
    // whichever family matched, re-emitting must reproduce an equivalent system
    EXPECT_TRUE(detail::verify_recovery(sys, r));
}

TEST(Recovery, SplitFamilyExample) {
    const auto r = recover_phi_algebra(sdedp3());
    EXPECT_EQ(r.planar_case, PlanarCase::A2_12);
    const auto A = build_A2_12();
    const Vecd c = regular_factor(A, catalog_phi("half_sq").phi, r.phi);
    EXPECT_NEAR(c(0), -1.0, 1e-12);
    EXPECT_NEAR(c(1), 1.0, 1e-12);
    // recovered: (-x^2/2 + y^2/2, xy)
    EXPECT_EQ(r.potentials[0].xx, -0.5);
    EXPECT_EQ(r.potentials[0].yy, 0.5);
    EXPECT_EQ(r.potentials[1].xy, 1.0);
}

TEST(Recovery, RoundTripForLinearMaps) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> ud(-2, 2);
    for (int t = 0; t < 20; ++t) {
        Matd M(2, 2);
        do {
            M << ud(rng), ud(rng), ud(rng), ud(rng);
        } while (std::abs(M.determinant()) < 0.2);
        const PhiMap phi = linear_map(M);
        const double p = ud(rng), q = ud(rng);
        const std::vector<std::pair<PlanarCase, RealAlgebra>> fams = {
            {PlanarCase::A2_1, build_A2_1(p, q)}, {PlanarCase::A2_2, build_A2_2(p, q)}, {PlanarCase::A2_12, build_A2_12()}};
        for (const auto& [tag, A] : fams) {
            const auto sys = to_two_pde(emit_cre(A, phi));
            const auto r = recover_phi_algebra(sys, tag);
            EXPECT_EQ(r.planar_case, tag);
            for (int i = 0; i < A.dim() * A.dim() * A.dim(); ++i)
                EXPECT_NEAR(r.algebra.constants()[static_cast<std::size_t>(i)], A.constants()[static_cast<std::size_t>(i)],
                            1e-10);
            const Vecd u = v2(ud(rng), ud(rng));
            EXPECT_LE((r.phi.jacobian(u) - M).cwiseAbs().maxCoeff(), 1e-12) << to_string(tag);
        }
    }
}

TEST(Recovery, NonConservativeFieldsAreRejected) {
    // u-only and v-only rows whose fields have nonzero curl
    TwoPDESystem s;
    s.a[0] = {P(0, 1, 0), P(0, 1, 0), P(0), P(0)};
    s.a[1] = {P(0), P(0), P(1), P(0, 0, 1)};
    try {
        recover_phi_algebra(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoMatch);
    }
}

TEST(Recovery, InhomogeneousSystemNeedsParticularSolution) {
    auto s = sdedp3();
    s.F[0] = P(1);
    try {
        recover_phi_algebra(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoMatch);
        EXPECT_NE(std::string(e.what()).find("particular"), std::string::npos);
    }
}

TEST(Recovery, JsonRoundTrip) {
    const auto s = sal1e(0.5, 1.5);
    const auto j = two_pde_to_json(s);
    const auto back = two_pde_from_json(j);
    for (const auto& p : default_sample_points()) EXPECT_EQ(back.matrix(p[0], p[1]), s.matrix(p[0], p[1]));
    try {
        two_pde_from_json(nlohmann::json::parse(R"({"A": [[1,2,3]]})"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    }
}
