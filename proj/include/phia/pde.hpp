#pragma once

#include "phia/diff_map.hpp"
#include "phia/error.hpp"
#include "phia/linalg.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace phia {

// ---- finite-difference residual oracle ----

struct Derivs {
    Vecd u;
    Matd J;              // components x variables
    std::vector<Matd> H;  // one Hessian per component; empty for first-order operators
};

struct PDETerms {
    Vecd residual;
    double largest_term = 0.0;
};

struct PDEOperator {
    std::string name;
    int dim = 2;         // independent variables
    int components = 1;  // dependent variables
    bool second_order = false;
    std::function<PDETerms(const Vecd& x, const Derivs& d)> eval;
};

struct ResidualReport {
    double absolute = 0.0;  // max |residual|
    double relative = 0.0;  // max |residual| / max(1, largest term)
    int points = 0;
};

// Central differences: h1 = 1e-5 (1 + |x|) for first derivatives,
// h2 = 1e-4 (1 + |x|) for second derivatives.
inline Derivs fd_derivs(const VectorFunction& f, const Vecd& x, bool second) {
    Derivs d;
    d.u = f(x);
    const auto k = x.size();
    const double h1 = 1e-5 * (1.0 + x.norm()), h2 = 1e-4 * (1.0 + x.norm());
    d.J.resize(d.u.size(), k);
    auto shifted = [&](std::initializer_list<std::pair<Eigen::Index, double>> s) {
        Vecd p = x;
        for (auto [i, h] : s) p(i) += h;
        return f(p);
    };
    for (Eigen::Index i = 0; i < k; ++i) d.J.col(i) = (shifted({{i, h1}}) - shifted({{i, -h1}})) / (2 * h1);
    if (!second) return d;
    d.H.assign(static_cast<std::size_t>(d.u.size()), Matd::Zero(k, k));
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i; j < k; ++j) {
            Vecd v;
            if (i == j)
                v = (shifted({{i, h2}}) - 2.0 * d.u + shifted({{i, -h2}})) / (h2 * h2);
            else
                v = (shifted({{i, h2}, {j, h2}}) - shifted({{i, h2}, {j, -h2}}) - shifted({{i, -h2}, {j, h2}}) +
                     shifted({{i, -h2}, {j, -h2}})) /
                    (4 * h2 * h2);
            for (Eigen::Index m = 0; m < d.u.size(); ++m) {
                d.H[static_cast<std::size_t>(m)](i, j) = v(m);
                d.H[static_cast<std::size_t>(m)](j, i) = v(m);
            }
        }
    return d;
}

inline ResidualReport pde_residual(const VectorFunction& sol, const PDEOperator& op, const std::vector<Vecd>& points) {
    if (sol.k != op.dim || sol.n != op.components)
        throw Error(ErrorKind::DimensionMismatch, "solution does not match operator " + op.name);
    ResidualReport r;
    for (const Vecd& x : points) {
        const PDETerms t = op.eval(x, fd_derivs(sol, x, op.second_order));
        const double a = t.residual.cwiseAbs().maxCoeff();
        r.absolute = std::max(r.absolute, a);
        r.relative = std::max(r.relative, a / std::max(1.0, t.largest_term));
        ++r.points;
    }
    return r;
}

namespace detail {
inline double largest(std::initializer_list<double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}
}  // namespace detail

// a u_x + b v_x - c u_y - d v_y, coefficients possibly depending on (x, y).
using Coefficient = std::function<double(const Vecd&)>;

inline PDEOperator first_order_operator(Coefficient a, Coefficient b, Coefficient c, Coefficient d) {
    return {"first-order", 2, 2, false, [=](const Vecd& x, const Derivs& D) -> PDETerms {
                const double t1 = a(x) * D.J(0, 0), t2 = b(x) * D.J(1, 0), t3 = c(x) * D.J(0, 1),
                             t4 = d(x) * D.J(1, 1);
                Vecd r(1);
                r << t1 + t2 - t3 - t4;
                return {r, detail::largest({t1, t2, t3, t4})};
            }};
}

inline PDEOperator first_order_operator(double a, double b, double c, double d) {
    auto k = [](double v) { return Coefficient([v](const Vecd&) { return v; }); };
    return first_order_operator(k(a), k(b), k(c), k(d));
}

// variables (x, t), components (y, z):
//   a1 y_x + y_t + b1 y - b1 z = 0,  -a2 z_x + z_t - b2 y + b2 z = 0
inline PDEOperator system451_operator(double a1, double a2, double b1, double b2) {
    return {"system451", 2, 2, false, [=](const Vecd&, const Derivs& D) -> PDETerms {
                const double y = D.u(0), z = D.u(1);
                const double s1 = a1 * D.J(0, 0), s2 = D.J(0, 1), s3 = b1 * y, s4 = b1 * z;
                const double q1 = a2 * D.J(1, 0), q2 = D.J(1, 1), q3 = b2 * y, q4 = b2 * z;
                Vecd r(2);
                r << s1 + s2 + s3 - s4, -q1 + q2 - q3 + q4;
                return {r, detail::largest({s1, s2, s3, s4, q1, q2, q3, q4})};
            }};
}

// A u_xx + 2B u_xy + C u_yy + D u_x + E u_y
inline PDEOperator second_order_operator(double A, double B, double C, double D, double E) {
    return {"second-order", 2, 1, true, [=](const Vecd&, const Derivs& d) -> PDETerms {
                const Matd& H = d.H[0];
                const double t1 = A * H(0, 0), t2 = 2 * B * H(0, 1), t3 = C * H(1, 1), t4 = D * d.J(0, 0),
                             t5 = E * d.J(0, 1);
                Vecd r(1);
                r << t1 + t2 + t3 + t4 + t5;
                return {r, detail::largest({t1, t2, t3, t4, t5})};
            }};
}

// variables (t, x, y, z): alpha (u_xx + u_yy + u_zz) - u_t
inline PDEOperator heat_operator(double alpha) {
    return {"heat", 4, 1, true, [=](const Vecd&, const Derivs& d) -> PDETerms {
                const Matd& H = d.H[0];
                const double lap = alpha * (H(1, 1) + H(2, 2) + H(3, 3)), ut = d.J(0, 0);
                Vecd r(1);
                r << lap - ut;
                return {r, detail::largest({lap, ut})};
            }};
}

// variables (t, x): k u_xx - u_t
inline PDEOperator heat1d_operator(double k) {
    return {"heat1d", 2, 1, true, [=](const Vecd&, const Derivs& d) -> PDETerms {
                const double a = k * d.H[0](1, 1), b = d.J(0, 0);
                Vecd r(1);
                r << a - b;
                return {r, detail::largest({a, b})};
            }};
}

inline PDEOperator laplace_operator(int dim) {
    return {"laplace", dim, 1, true, [](const Vecd&, const Derivs& d) -> PDETerms {
                Vecd r(1);
                r << d.H[0].trace();
                return {r, d.H[0].diagonal().cwiseAbs().maxCoeff()};
            }};
}

// Fixed evaluation points in a box.
inline std::vector<Vecd> residual_points(const Vecd& lo, const Vecd& hi, int count = 20, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::vector<Vecd> pts;
    for (int i = 0; i < count; ++i) {
        Vecd p(lo.size());
        for (Eigen::Index j = 0; j < lo.size(); ++j) p(j) = lo(j) + (hi(j) - lo(j)) * ud(rng);
        pts.push_back(p);
    }
    return pts;
}

// ---- first-order equation a u_x + b v_x - c u_y - d v_y = 0 ----

struct FirstOrderPDE {
    double a = 0, b = 0, c = 0, d = 0;
};

// Linear phi for which every phi A2_1(alpha, beta)-differentiable pair (u, v)
// solves the equation, from the weights k = l = 1; s = alpha + beta:
//   phi = (((c s - d) x + (a s - b) y) / (s - 1), ((d - c) x + (b - a) y) / (s - 1))
inline PhiMap first_order_phi(const FirstOrderPDE& p, double alpha, double beta) {
    const double s = alpha + beta;
    if (std::abs(s - 1.0) <= 1e-14 * std::max(1.0, std::abs(s)))
        throw Error(ErrorKind::DegenerateParameters, "alpha + beta = 1");
    Matd M(2, 2);
    M << p.c * s - p.d, p.a * s - p.b, p.d - p.c, p.b - p.a;
    return linear_map(M / (s - 1.0));
}

// The coefficients exactly as printed, kept for comparison only.
inline PhiMap first_order_phi_printed(const FirstOrderPDE& p, double alpha, double beta) {
    const double s = alpha + beta;
    if (std::abs(s - 1.0) <= 1e-14 * std::max(1.0, std::abs(s)))
        throw Error(ErrorKind::DegenerateParameters, "alpha + beta = 1");
    Matd M(2, 2);
    M << -p.c * s + p.d, p.a * s - p.b, -p.c + p.d, p.a - p.b;
    return linear_map(M / (s - 1.0));
}

// ---- two-equation system in (x, t) ----

enum class Family451 { trig, hyperbolic };

struct System451Report {
    VectorFunction solution;  // (x, t) -> (y, z)
    ResidualReport residual;
};

inline System451Report system_451_solutions(double a1, double a2, double b1, double b2, Family451 family, double c1,
                                            double c2) {
    const double s = a1 + a2;
    if (std::abs(s) <= 1e-14 * std::max({1.0, std::abs(a1), std::abs(a2)}))
        throw Error(ErrorKind::DegenerateParameters, "a1 + a2 = 0");
    VectorFunction sol;
    if (family == Family451::trig) {
        const double hx1 = (-b1 + b2) / s, ht1 = (-a1 * b2 - a2 * b1) / s;
        const double hx2 = (b1 + b2) / s, ht2 = (-a1 * b2 + a2 * b1) / s;
        sol = VectorFunction(2, 2, [=](const Vecd& p) -> Vecd {
            const double h1 = hx1 * p(0) + ht1 * p(1), h2 = hx2 * p(0) + ht2 * p(1);
            const double e = std::exp(h1), co = std::cos(h2), si = std::sin(h2);
            Vecd r(2);
            r << c1 * e * co + c2 * e * si, -c1 * e * si + c2 * e * co;
            return r;
        });
    } else {
        const double hx = (b1 - b2) / s, ht = (a1 * b2 + a2 * b1) / s;
        sol = VectorFunction(2, 2, [=](const Vecd& p) -> Vecd {
            const double h = hx * p(0) + ht * p(1);
            const double e = std::exp(-h), ch = std::cosh(h), sh = std::sinh(h);
            Vecd r(2);
            r << c1 * e * ch + c2 * e * sh, c1 * e * sh + c2 * e * ch;
            return r;
        });
    }
    const auto pts = residual_points(Vecd::Constant(2, -1.0), Vecd::Constant(2, 1.0));
    return {sol, pde_residual(sol, system451_operator(a1, a2, b1, b2), pts)};
}

// ---- second-order equation A u_xx + 2B u_xy + C u_yy + D u_x + E u_y = 0 ----

struct SecondOrderPDE {
    double A = 0, B = 0, C = 0, D = 0, E = 0;
    double p1 = 0, p2 = 0;  // algebra parameters supplied by the caller
};

struct SecondOrderReport {
    int branch = 1;  // 1: Delta != 0, 2: Delta = 0
    double Delta = 0.0;
    double a = 0.0, b = 0.0, amplitude = 0.0;  // u = amplitude * exp(a x + b y)
    VectorFunction u;
    ResidualReport residual;
};

inline SecondOrderReport second_order_solution(const SecondOrderPDE& q, double alpha, double beta) {
    const double A = q.A, B = q.B, C = q.C, D = q.D, E = q.E;
    if (std::abs(D) + std::abs(E) == 0.0) throw Error(ErrorKind::ConditionViolated, "|D| + |E| = 0");
    const double s = q.p1 + q.p2 * B;
    SecondOrderReport r;
    r.Delta = A * C + s * s - 2 * s * B;
    const double scale = std::max({1.0, std::abs(A * C), s * s, std::abs(2 * s * B)});
    const double cscale = std::max({1.0, std::abs(alpha), std::abs(beta)}) *
                          std::max({1.0, std::abs(A * E), std::abs(s * D), std::abs(B * E), std::abs(C * D), std::abs(s * E)});
    if (std::abs(r.Delta) > 1e-12 * scale) {
        const double lhs = alpha * (-A * E + s * D), rhs = beta * (2 * B * E - C * D - s * E);
        if (std::abs(lhs - rhs) > 1e-10 * cscale)
            throw Error(ErrorKind::ConditionViolated, "alpha (-AE + (p1 + p2 B) D) != beta (2BE - CD - (p1 + p2 B) E)");
        r.branch = 1;
        r.a = (2 * B * E - C * D - s * E) / r.Delta;
        r.b = (-A * E + s * D) / r.Delta;
    } else {
        if (std::abs(A * E - s * D) > 1e-10 * cscale)
            throw Error(ErrorKind::ConditionViolated, "Delta = 0 requires AE = (p1 + p2 B) D");
        const double den = beta * (s - 2 * B) - alpha * A;
        if (std::abs(den) <= 1e-14 * cscale)
            throw Error(ErrorKind::ConditionViolated, "Delta = 0 requires alpha A != beta (p1 + p2 B - 2B)");
        r.branch = 2;
        r.a = alpha * D / den;
        r.b = beta * D / den;
    }
    if (r.a == 0.0) throw Error(ErrorKind::DegenerateParameters, "a = 0 in the amplitude alpha / a");
    r.amplitude = alpha / r.a;
    const double amp = r.amplitude, ea = r.a, eb = r.b;
    r.u = VectorFunction(2, 1, [=](const Vecd& p) -> Vecd {
        Vecd v(1);
        v << amp * std::exp(ea * p(0) + eb * p(1));
        return v;
    });
    const auto pts = residual_points(Vecd::Constant(2, -1.0), Vecd::Constant(2, 1.0));
    r.residual = pde_residual(r.u, second_order_operator(A, B, C, D, E), pts);
    return r;
}

// ---- heat equation alpha (u_xx + u_yy + u_zz) = u_t ----

struct HeatProblem {
    double alpha = 1.0;
    std::array<double, 6> p{};
    double amplitude = 1.0;
};

// Matrix of the linear conditions on (b1, b2, b3, b4); right side (1, 0, 0, 0).
inline Matd heat_matrix(double alpha, const std::array<double, 6>& p) {
    Matd M(4, 4);
    M << 0, -p[0], -p[1], -p[2],  //
        p[0], alpha, -p[3], -p[4],  //
        p[1], p[3], alpha, -p[5],   //
        p[2], p[4], p[5], alpha;
    return M;
}

inline double heat_delta(double alpha, const std::array<double, 6>& p) {
    const double p1 = p[0], p2 = p[1], p3 = p[2], p4 = p[3], p5 = p[4], p6 = p[5];
    return alpha * alpha * (p1 * p1 + p2 * p2 + p3 * p3) + p6 * p6 * p1 * p1 + p5 * p5 * p2 * p2 +
           p4 * p4 * p3 * p3 + 2 * p6 * p4 * p3 * p1 - 2 * p6 * p5 * p2 * p1 - 2 * p5 * p4 * p3 * p2;
}

// Cofactor solution of the linear conditions (Delta != 0).
inline std::array<double, 4> heat_b_closed_form(double al, const std::array<double, 6>& p) {
    const double p1 = p[0], p2 = p[1], p3 = p[2], p4 = p[3], p5 = p[4], p6 = p[5];
    const double D = heat_delta(al, p);
    return {al * (al * al + p4 * p4 + p5 * p5 + p6 * p6) / D,
            (-al * al * p1 - p6 * p6 * p1 + p6 * p5 * p2 - al * p5 * p3 - al * p4 * p2 - p6 * p4 * p3) / D,
            (p6 * p5 * p1 - al * al * p2 - p2 * p5 * p5 - al * p6 * p3 + al * p1 * p4 + p5 * p4 * p3) / D,
            (al * p5 * p1 + al * p6 * p2 - al * al * p3 - p4 * p4 * p3 - p6 * p4 * p1 + p5 * p4 * p2) / D};
}

// The four numerators exactly as printed, kept for comparison only.
inline std::array<double, 4> heat_b_printed(double al, const std::array<double, 6>& p) {
    const double p1 = p[0], p2 = p[1], p3 = p[2], p4 = p[3], p5 = p[4], p6 = p[5];
    const double D = heat_delta(al, p);
    return {(al * al * al + al * p4 + al * p5 + al * p6) / D,
            (-al * al * p1 - p6 * p6 * p1 + p6 * p5 * p2 - al * p5 * p3 - al * p4 * p2 - p6 * p4 * p3) / D,
            (p6 * p5 * p1 - al * al * p2 - p5 * p2 - al * p6 * p3 + al * p1 * p4 + p5 * p4 * p3) / D,
            (al * p5 * p1 + al * p6 * p2 - al * al * p3 - p4 * p4 * p3 - p6 * p4 * p1 + p5 * p4 * p2) / D};
}

// max |M b - (1, 0, 0, 0)|
inline double heat_bij_residual(double alpha, const std::array<double, 6>& p, const std::array<double, 4>& b) {
    const Vecd bv = Eigen::Map<const Vecd>(b.data(), 4);
    Vecd rhs = Vecd::Zero(4);
    rhs(0) = 1.0;
    return (heat_matrix(alpha, p) * bv - rhs).cwiseAbs().maxCoeff();
}

struct HeatReport {
    bool closed_form = true;  // false: Delta = 0, least-squares branch
    double Delta = 0.0;
    std::array<double, 4> b{};
    double bij_residual = 0.0;
    double diagnostic = 0.0;  // alpha (b2^2 + b3^2 + b4^2) - b1; zero iff u solves the equation
    VectorFunction u;         // (t, x, y, z) -> u
    ResidualReport residual;
};

inline HeatReport heat_solution(const HeatProblem& hp) {
    HeatReport r;
    const double al = hp.alpha;
    r.Delta = heat_delta(al, hp.p);
    double scale = al * al;
    for (double v : hp.p) scale = std::max(scale, v * v);
    scale = std::max(1.0, scale * scale);
    if (std::abs(r.Delta) > 1e-12 * scale) {
        r.b = heat_b_closed_form(al, hp.p);
    } else {
        r.closed_form = false;
        const Matd M = heat_matrix(al, hp.p);
        Vecd rhs = Vecd::Zero(4);
        rhs(0) = 1.0;
        const Vecd b = M.completeOrthogonalDecomposition().solve(rhs);
        if ((M * b - rhs).norm() > 1e-10 * rhs.norm())
            throw Error(ErrorKind::DeltaZeroInconsistent, "Delta = 0 and the linear conditions are inconsistent");
        for (int i = 0; i < 4; ++i) r.b[static_cast<std::size_t>(i)] = b(i);
    }
    r.bij_residual = heat_bij_residual(al, hp.p, r.b);
    if (r.b[0] == 0.0 || std::abs(r.b[0]) <= 1e-14 * Eigen::Map<const Vecd>(r.b.data(), 4).norm())
        throw Error(ErrorKind::B1Zero, "b1 = 0");
    r.diagnostic = al * (r.b[1] * r.b[1] + r.b[2] * r.b[2] + r.b[3] * r.b[3]) - r.b[0];
    const double amp = hp.amplitude / r.b[0];
    const Vecd B = Eigen::Map<const Vecd>(r.b.data(), 4);
    r.u = VectorFunction(4, 1, [amp, B](const Vecd& tau) -> Vecd {
        Vecd v(1);
        v << amp * std::exp(B.dot(tau));
        return v;
    });
    Vecd lo(4), hi(4);
    lo << 0.0, -0.5, -0.5, -0.5;
    hi << 0.5, 0.5, 0.5, 0.5;
    r.residual = pde_residual(r.u, heat_operator(al), residual_points(lo, hi));
    return r;
}

}  // namespace phia
