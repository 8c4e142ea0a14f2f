#include "phia/catalog.hpp"
#include "phia/ode.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <random>

using namespace phia;
using detail::vec;
using C = std::complex<double>;

namespace {

const RealAlgebra kC = build_complex<double>();

C as_c(const Vecd& v) { return {v(0), v(1)}; }

std::vector<Vecd> box(double lo, double hi, std::uint64_t seed = 1) {
    return sample_grid(vec({lo, lo}), vec({hi, hi}), 20, seed);
}

}  // namespace

TEST(SquareRhs, ZeroKernelGivesConstant) {
    const RealAlgebra A = build_A2_1(0.8, -0.3);
    const Vecd Cc = vec({2.0, 0.5});
    const auto z = constant_map(2, A.zero());
    const auto sol = solve_square_rhs(z, z, Cc, identity_map(2), A, box(-1, 1));
    const Vecd expected = -A.inverse(Cc);
    for (const Vecd& w : sol.samples.ws) EXPECT_LE((w - expected).norm(), 1e-15);
    EXPECT_LE(sol.samples.max_residual, 1e-12);
}

TEST(SquareRhs, PrintedQuadraticSystemIsKTimesSquare) {
    const double al = 0.8, be = -0.3;
    const RealAlgebra A = build_A2_1(al, be);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ud(-2, 2);
    for (int t = 0; t < 20; ++t) {
        const double x = ud(rng), y = ud(rng), k = ud(rng), l = ud(rng);
        const double r1 = k * (x * x + al * y * y) + al * l * (2 * x * y + be * y * y);
        const double r2 = k * (2 * x * y + be * y * y) + l * (x * x + al * y * y) + be * l * (2 * x * y + be * y * y);
        const Vecd w = vec({x, y});
        const Vecd got = A.product(vec({k, l}), A.product(w, w));
        EXPECT_NEAR(got(0), r1, 1e-12);
        EXPECT_NEAR(got(1), r2, 1e-12);
    }
}

TEST(SquareRhs, ConstantKernelInTwoParameterFamily) {
    const RealAlgebra A = build_A2_1(0.8, -0.3);
    const auto phi = catalog_phi("sq").phi;
    const Vecd K0 = vec({0.7, -0.4});
    const auto K = constant_map(2, K0);
    const auto H = algebra_product(K, phi, A);  // antiderivative of a constant
    const auto sol = solve_square_rhs(K, H, vec({3.0, 0.0}), phi, A, box(-0.5, 0.5));
    EXPECT_LE(sol.samples.max_residual, 1e-6);
}

TEST(SquareRhs, KernelEqualToPhi) {
    for (const char* aid : {"C", "A2_1:0.8,-0.3", "A2_12"}) {
        const RealAlgebra A = catalog_algebra(aid);
        const auto phi = catalog_phi("sq").phi;
        const auto H = phi_polynomial({A.zero(), A.zero(), A.unit() / 2}, phi, A);
        const auto sol = solve_square_rhs(phi, H, 2.0 * A.unit(), phi, A, box(-0.7, 0.7));
        EXPECT_LE(sol.samples.max_residual, 1e-6) << aid;
        // closed form -e / (phi^2 / 2 + C)
        for (std::size_t i = 0; i < sol.samples.taus.size(); ++i) {
            const Vecd p = phi(sol.samples.taus[i]);
            const Vecd expected = -A.inverse(A.product(p, p) / 2 + 2.0 * A.unit());
            EXPECT_LE((sol.samples.ws[i] - expected).norm(), 1e-14) << aid;
        }
    }
}

TEST(SquareRhs, SingularDenominatorRaises) {
    const auto z = constant_map(2, kC.zero());
    try {
        solve_square_rhs(z, z, kC.zero(), identity_map(2), kC, box(-1, 1));
        FAIL() << "expected SingularElement";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularElement);
    }
}

TEST(PhiRhs, LinearKernel) {
    const RealAlgebra A = build_A2_2(0.7, -1.3);
    const auto K = linear_map(detail::mat(2, 2, {1, 2, -0.5, 1.5}));
    const auto s0 = solve_phi_rhs(K, A.zero(), A, box(-2, 2));
    EXPECT_LE(s0.samples.max_residual, 1e-8);
    const auto s1 = solve_phi_rhs(K, vec({5.0, -3.0}), A, box(-2, 2));
    EXPECT_NEAR(s1.samples.max_residual, s0.samples.max_residual, 1e-8);
    for (std::size_t i = 0; i < s0.samples.ws.size(); ++i)
        EXPECT_LE((s1.samples.ws[i] - s0.samples.ws[i] - vec({5.0, -3.0})).norm(), 1e-12);
}

TEST(PhiRhs, RandomPolynomialKernel) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(-1, 1);
    for (const char* aid : {"C", "A2_1:-0.5,1.5", "A2_2:0.7,-1.3", "A2_12", "A3_1:0.3,-0.7,1.1,0.4,-0.2,0.9"}) {
        const RealAlgebra A = catalog_algebra(aid);
        const int n = A.dim();
        Matd c1(n, 2), c2(n, 3);
        for (int i = 0; i < n; ++i) {
            c1.row(i) << ud(rng), ud(rng);
            c2.row(i) << ud(rng), ud(rng), ud(rng);
        }
        // an arbitrary quadratic map R^2 -> A
        const PhiMap K(2, n, [c1, c2](const Vecd& u) -> Vecd {
            return c1 * u + c2 * vec({u(0) * u(0), u(0) * u(1), u(1) * u(1)});
        });
        const auto s = solve_phi_rhs(K, A.random_element(rng), A, box(-1.5, 1.5));
        EXPECT_LE(s.samples.max_residual, 1e-6) << aid;
    }
}

TEST(Exponential, ZeroPhiGivesUnit) {
    for (const char* aid : {"C", "A2_12", "A3_1:-1,-1,-1,-1,-1,-1"}) {
        const RealAlgebra A = catalog_algebra(aid);
        const auto s = solve_exponential(constant_map(2, A.zero()), A, A.unit(), box(-1, 1));
        for (const Vecd& w : s.samples.ws) EXPECT_LE((w - A.unit()).norm(), 1e-15) << aid;
    }
}

TEST(Exponential, ComplexIdentityIsClassicalExp) {
    const Vecd Cc = vec({0.5, -1.0});
    const auto s = solve_exponential(identity_map(2), kC, Cc, box(-2, 2));
    EXPECT_LE(s.samples.max_residual, 1e-6);
    for (std::size_t i = 0; i < s.samples.taus.size(); ++i) {
        const C expected = as_c(Cc) * std::exp(as_c(s.samples.taus[i]));
        EXPECT_LE(std::abs(as_c(s.samples.ws[i]) - expected), 1e-12 * (1 + std::abs(expected)));
    }
}

TEST(Exponential, SplitAlgebraIsComponentwise) {
    const RealAlgebra A = build_A2_12();
    const Vecd Cc = vec({2.0, -0.5});
    const auto s = solve_exponential(identity_map(2), A, Cc, box(-2, 2));
    EXPECT_LE(s.samples.max_residual, 1e-6);
    for (std::size_t i = 0; i < s.samples.taus.size(); ++i) {
        const Vecd& t = s.samples.taus[i];
        EXPECT_NEAR(s.samples.ws[i](0), 2.0 * std::exp(t(0)), 1e-12 * std::exp(2.0));
        EXPECT_NEAR(s.samples.ws[i](1), -0.5 * std::exp(t(1)), 1e-12 * std::exp(2.0));
    }
}

TEST(Exponential, InitialValueIdentity) {
    std::mt19937_64 rng(4);
    for (const auto& [pid, aid] : catalog_pairs()) {
        const auto c = catalog_phi(pid);
        const RealAlgebra A = catalog_algebra(aid);
        const Vecd Cc = A.random_element(rng);
        const Vecd tau0 = sample_in_box(rng, c.lo, c.hi);
        const auto s = solve_exponential(c.phi, A, Cc, {tau0});
        EXPECT_EQ(s.samples.ws[0], A.product(Cc, A.exp(c.phi(tau0))));
        EXPECT_LE(s.samples.max_residual, 1e-6) << pid << " " << aid;
    }
}

TEST(Separable, UnitDenominatorIsDirectIntegration) {
    const auto id = identity_map(2);
    const auto one = constant_map(2, kC.unit());
    const Vecd w0 = vec({0.3, -0.2}), t0 = vec({0.1, 0.1});
    const auto w = separable_solve(id, one, id, kC, w0, t0);
    for (const Vecd& t : box(-1, 1)) {
        const C z = as_c(t), z0 = as_c(t0);
        const C expected = as_c(w0) + (z * z - z0 * z0) / 2.0;
        EXPECT_LE(std::abs(as_c(w(t)) - expected), 1e-10);
    }
}

TEST(Separable, SquareDenominatorAgreesWithClosedForm) {
    for (const char* aid : {"C", "A2_1:0.8,-0.3", "A2_12"}) {
        const RealAlgebra A = catalog_algebra(aid);
        const auto phi = catalog_phi("sq").phi;
        const auto e = constant_map(2, A.unit());
        const VectorFunction sqr(2, 2, [A](const Vecd& v) -> Vecd { return A.product(v, v); });
        const Vecd t0 = vec({0.2, 0.1}), w0 = vec({0.5, 0.3});
        const auto w = separable_solve(e, sqr, phi, A, w0, t0);
        // H = phi, C = -phi(t0) - w0^{-1}
        const Vecd Cc = -phi(t0) - A.inverse(w0);
        const auto ref = solve_square_rhs(e, phi, Cc, phi, A, box(-0.4, 0.4));
        for (std::size_t i = 0; i < ref.samples.taus.size(); ++i)
            EXPECT_LE((w(ref.samples.taus[i]) - ref.samples.ws[i]).norm(), 1e-6) << aid;
        EXPECT_LE(ref.samples.max_residual, 1e-6);
    }
}

TEST(Separable, LogarithmBranchFollowsThePath) {
    // dw / w = dz from w(0) = 1: w = exp(z), past the principal branch
    const auto id = identity_map(2);
    const VectorFunction L(2, 2, [](const Vecd& v) -> Vecd { return v; });
    const auto w = separable_solve(constant_map(2, kC.unit()), L, id, kC, vec({1, 0}), vec({0, 0}),
                                   SeparableOptions{64, 16, 50});
    for (const Vecd& t : {vec({0, 2}), vec({0, 4}), vec({0.3, 5.5}), vec({-0.5, -4.5})}) {
        const C expected = std::exp(as_c(t));
        EXPECT_LE(std::abs(as_c(w(t)) - expected), 1e-8) << t.transpose();
    }
}

TEST(Separable, FailureModes) {
    const auto id = identity_map(2);
    const VectorFunction L(2, 2, [](const Vecd& v) -> Vecd { return v; });
    const auto e = constant_map(2, kC.unit());
    try {
        separable_solve(e, L, id, kC, kC.zero(), vec({0, 0}))(vec({0.5, 0.5}));
        FAIL() << "expected SingularElement";
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::SingularElement);
    }
    try {
        separable_solve(e, L, id, kC, vec({1, 0}), vec({0, 0}), SeparableOptions{4, 16, 1})(vec({0.5, 0.5}));
        FAIL() << "expected NewtonDivergence";
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::NewtonDivergence);
    }
}

TEST(Picard, ZeroFieldIsConstant) {
    const auto F = constant_map(2, kC.zero());
    const Vecd w0 = vec({0.4, -0.9});
    const auto r = picard(F, identity_map(2), kC, w0, segment_path(vec({0, 0}), vec({1, 0}), 64));
    EXPECT_EQ(r.iterations, 1);
    for (const Vecd& w : r.samples.ws) EXPECT_EQ(w, w0);
}

TEST(Picard, IdentityFieldReachesExponential) {
    const auto id = identity_map(2);
    const Vecd w0 = vec({1.0, 0.5}), t0 = vec({0, 0});
    for (const Vecd& end : {vec({1, 0}), vec({-1, 0}), vec({0.6, 0.8})}) {
        const auto r = picard(id, id, kC, w0, segment_path(t0, end, 512));
        EXPECT_LE(r.iterations, 30);
        for (std::size_t i = 0; i < r.samples.taus.size(); ++i) {
            const C expected = as_c(w0) * std::exp(as_c(r.samples.taus[i]) - as_c(t0));
            EXPECT_LE(std::abs(as_c(r.samples.ws[i]) - expected), 1e-8);
        }
        EXPECT_LE(r.samples.max_residual, 1e-6);
        for (std::size_t i = 2; i < r.history.size(); ++i) EXPECT_LT(r.history[i], r.history[i - 1]);
    }
}

TEST(Picard, QuadraticFieldMatchesClosedForm) {
    const auto id = identity_map(2);
    const VectorFunction F(2, 2, [](const Vecd& v) -> Vecd { return kC.product(v, v); });
    const Vecd w0 = vec({0.5, 0.2});
    const auto r = picard(F, id, kC, w0, segment_path(vec({0, 0}), vec({0.4, 0.3}), 256));
    for (std::size_t i = 0; i < r.samples.taus.size(); ++i) {
        const C z = as_c(r.samples.taus[i]), a = as_c(w0);
        EXPECT_LE(std::abs(as_c(r.samples.ws[i]) - a / (1.0 - a * z)), 1e-6);
    }
}

TEST(Picard, DeterministicAcrossRuns) {
    const auto id = identity_map(2);
    const auto path = segment_path(vec({0, 0}), vec({0.6, 0.8}), 256);
    const auto a = picard(id, id, kC, vec({1, 0}), path);
    const auto b = picard(id, id, kC, vec({1, 0}), path);
    ASSERT_EQ(a.samples.ws.size(), b.samples.ws.size());
    for (std::size_t i = 0; i < a.samples.ws.size(); ++i) EXPECT_LE((a.samples.ws[i] - b.samples.ws[i]).norm(), 1e-12);
}

TEST(Picard, IterationCapRaisesWithHistory) {
    const auto id = identity_map(2);
    try {
        picard(id, id, kC, vec({1, 0}), segment_path(vec({0, 0}), vec({1, 0}), 64), 3);
        FAIL() << "expected NoConvergence";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
        EXPECT_EQ(e.history().size(), 3u);
    }
}

TEST(Canonical, IdentityForUnitField) {
    const VectorFunction F = constant_map(2, vec({1, 0}));
    EXPECT_LE(verify_canonical(identity_map(2), F, box(-2, 2)), 1e-9);
}

TEST(Canonical, AntiderivativeOfReciprocalField) {
    // F(z) = z^2 over C with phi = identity: R' = 1 / z^2, R = -1 / z
    const VectorFunction F(2, 2, [](const Vecd& v) -> Vecd { return kC.product(v, v); });
    const VectorFunction R(2, 2, [](const Vecd& v) -> Vecd { return -kC.inverse(v); });
    EXPECT_LE(verify_canonical(R, F, box(0.5, 2)), 1e-6);
    // the construction gives dR(F) = e, which reads (1, 0) when the unit is e1;
    // x^2 - 0.3xy + 0.8y^2 > 0 keeps every nonzero element regular
    const RealAlgebra A = build_A2_1(-0.8, -0.3);
    const VectorFunction F2(2, 2, [A](const Vecd& v) -> Vecd { return A.product(v, v); });
    const VectorFunction R2(2, 2, [A](const Vecd& v) -> Vecd { return -A.inverse(v); });
    EXPECT_LE(verify_canonical(R2, F2, box(1.0, 2)), 1e-6);
    // split algebra, unit (1, 1): same construction lands on e, not on (1, 0)
    const RealAlgebra S = build_A2_12();
    const VectorFunction F3(2, 2, [S](const Vecd& v) -> Vecd { return S.product(v, v); });
    const VectorFunction R3(2, 2, [S](const Vecd& v) -> Vecd { return -S.inverse(v); });
    EXPECT_NEAR(verify_canonical(R3, F3, box(0.5, 2)), 1.0, 1e-6);
}

TEST(Canonical, ArbitraryMapIsRejected) {
    const VectorFunction F(2, 2, [](const Vecd& v) -> Vecd { return kC.product(v, v); });
    const VectorFunction R(2, 2, [](const Vecd& v) -> Vecd { return vec({v(0) + v(1) * v(1), std::sin(v(1))}); });
    EXPECT_GT(verify_canonical(R, F, box(0.5, 2)), 0.1);
}
