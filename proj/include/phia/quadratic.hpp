#pragma once

#include "phia/algebra.hpp"
#include "phia/diff_map.hpp"
#include "phia/phi_calculus.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <random>
#include <vector>

namespace phia {

// f(x,y) = (a0 + a1 x + a2 y + a3 x^2 + a4 xy + a5 y^2, b0 + ... + b5 y^2)
template <class T = double>
struct QuadraticVFT {
    std::array<T, 6> a{};
    std::array<T, 6> b{};

    std::array<T, 2> operator()(T x, T y) const {
        return {a[0] + a[1] * x + a[2] * y + a[3] * x * x + a[4] * x * y + a[5] * y * y,
                b[0] + b[1] * x + b[2] * y + b[3] * x * x + b[4] * x * y + b[5] * y * y};
    }
    Mat<T> jacobian(T x, T y) const {
        Mat<T> J(2, 2);
        J << a[1] + T(2) * a[3] * x + a[4] * y, a[2] + a[4] * x + T(2) * a[5] * y, b[1] + T(2) * b[3] * x + b[4] * y,
            b[2] + b[4] * x + T(2) * b[5] * y;
        return J;
    }
    bool quadratic_part_zero() const {
        for (int i = 3; i < 6; ++i)
            if (a[i] != T(0) || b[i] != T(0)) return false;
        return true;
    }
    bool linear_part_zero() const {
        for (int i = 1; i < 3; ++i)
            if (a[i] != T(0) || b[i] != T(0)) return false;
        return true;
    }
};

using QuadraticVF = QuadraticVFT<double>;

inline VectorFunction as_function(const QuadraticVF& f) {
    return VectorFunction(
        2, 2,
        [f](const Vecd& u) -> Vecd {
            auto r = f(u(0), u(1));
            Vecd out(2);
            out << r[0], r[1];
            return out;
        },
        [f](const Vecd& u) -> Matd { return f.jacobian(u(0), u(1)); });
}

// Case numbering of the three planar families.
enum class QuadCase { A2_1 = 1, A2_2 = 2, A2_12 = 3 };

inline const char* to_string(QuadCase c) {
    switch (c) {
        case QuadCase::A2_1: return "A2_1";
        case QuadCase::A2_2: return "A2_2";
        case QuadCase::A2_12: return "A2_12";
    }
    return "?";
}

// Rows in the printed order. p, q are (alpha, beta) for case 1 and (gamma, delta)
// for case 2; case 3 ignores them.
inline Matd build_M6(const QuadraticVF& f, QuadCase c, double p = 0.0, double q = 0.0) {
    const auto& a = f.a;
    const auto& b = f.b;
    Matd M(6, 4);
    switch (c) {
        case QuadCase::A2_1: {
            const double al = p, be = q;
            M << be * b[1] + a[1], -b[1], be * b[2] + a[2], -b[2],                      //
                2 * be * b[3] + 2 * a[3], -2 * b[3], be * b[4] + a[4], -b[4],          //
                be * b[4] + a[4], -b[4], 2 * be * b[5] + 2 * a[5], -2 * b[5],          //
                al * b[1], -a[1], al * b[2], -a[2],                                    //
                2 * al * b[3], -2 * a[3], al * b[4], -a[4],                            //
                al * b[4], -a[4], 2 * al * b[5], -2 * a[5];
            break;
        }
        case QuadCase::A2_2: {
            const double g = p, d = q;
            M << a[1], g * a[1] - b[1], a[2], g * a[2] - b[2],                          //
                2 * a[3], 2 * g * a[3] - 2 * b[3], a[4], g * a[4] - b[4],              //
                a[4], g * a[4] - b[4], 2 * a[5], 2 * g * a[5] - 2 * b[5],              //
                b[1], -d * a[1], b[2], -d * a[2],                                      //
                2 * b[3], -2 * d * a[3], b[4], -d * a[4],                              //
                b[4], -d * a[4], 2 * b[5], -2 * d * a[5];
            break;
        }
        case QuadCase::A2_12: {
            M << 0, a[1], 0, a[2],          //
                0, 2 * a[3], 0, a[4],       //
                0, a[4], 0, 2 * a[5],       //
                b[1], 0, b[2], 0,           //
                2 * b[3], 0, b[4], 0,       //
                b[4], 0, 2 * b[5], 0;
            break;
        }
    }
    return M;
}

// Rows 2, 3, 5, 6 of M6.
inline Matd build_M4(const QuadraticVF& f, QuadCase c, double p = 0.0, double q = 0.0) {
    const Matd M6 = build_M6(f, c, p, q);
    Matd M(4, 4);
    M << M6.row(1), M6.row(2), M6.row(4), M6.row(5);
    return M;
}

// Rows 1 and 4 of M6.
inline Matd build_M2(const QuadraticVF& f, QuadCase c, double p = 0.0, double q = 0.0) {
    const Matd M6 = build_M6(f, c, p, q);
    Matd M(2, 4);
    M << M6.row(0), M6.row(3);
    return M;
}

// phi(s,t) = (ds - bt, at - cs) / (ad - bc) for v = (a, b, c, d).
inline PhiMap phi_from_v(const std::array<double, 4>& v) {
    const double det = v[0] * v[3] - v[1] * v[2];
    if (std::abs(det) <= 1e-300) throw Error(ErrorKind::DegenerateParameters, "ad - bc = 0");
    Matd Pinv(2, 2);
    Pinv << v[3], -v[1], -v[2], v[0];
    return linear_map(Pinv / det);
}

struct AlgebrizationWitness {
    QuadCase kind = QuadCase::A2_1;
    std::vector<double> params;          // (alpha, beta) or printed (gamma, delta); empty for case 3
    std::vector<double> algebra_params;  // parameters of the witnessing algebra
    std::array<double, 4> v{};
    PhiMap phi;
    RealAlgebra algebra = build_A2_12();
    double residual = 0.0;     // max CRE residual on the verification grid
    double det_M4 = 0.0;       // det M4 at params
    double orthogonality = 0.0;  // max |row . v| / |row| over the matrices used
};

struct AlgebrizeOptions {
    std::vector<QuadCase> cases = {QuadCase::A2_1, QuadCase::A2_2, QuadCase::A2_12};
    double lo = -10.0, hi = 10.0, step = 0.25;
    double tol = 1e-8;
};

namespace detail {

// Algebra realising case c for parameters in the M-matrix convention. The
// printed case-2 rows encode R(A2_2(-gamma, delta)).
inline RealAlgebra witness_algebra(QuadCase c, double p, double q, std::vector<double>& alg_params) {
    switch (c) {
        case QuadCase::A2_1: alg_params = {p, q}; return build_A2_1(p, q);
        case QuadCase::A2_2: alg_params = {-p, q}; return build_A2_2(-p, q);
        case QuadCase::A2_12: alg_params = {}; return build_A2_12();
    }
    throw Error(ErrorKind::DimensionMismatch, "unknown case");
}

inline double m4_scale(const QuadraticVF& f, double p, double q) {
    double s = 0.0;
    for (int i = 3; i < 6; ++i) s = std::max({s, std::abs(f.a[i]), std::abs(f.b[i])});
    s *= std::max({1.0, std::abs(p), std::abs(q)});
    return std::max(s, 1e-300);
}

inline double det4(const QuadraticVF& f, QuadCase c, double p, double q) { return build_M4(f, c, p, q).determinant(); }

// det M4 along one axis is a polynomial of degree <= 2; exact coefficients from three samples.
inline std::array<double, 3> axis_quadratic(const QuadraticVF& f, QuadCase c, bool vary_p, double fixed) {
    auto at = [&](double t) { return vary_p ? det4(f, c, t, fixed) : det4(f, c, fixed, t); };
    const double f0 = at(0.0), f1 = at(1.0), fm = at(-1.0);
    return {f0, (f1 - fm) / 2.0, (f1 + fm) / 2.0 - f0};  // c0, c1, c2
}

// Newton on grad(det) = 0 for near-double roots, using central differences.
inline std::pair<double, double> refine_stationary(const QuadraticVF& f, QuadCase c, double p, double q) {
    for (int it = 0; it < 40; ++it) {
        const double h = 1e-4 * (1.0 + std::abs(p) + std::abs(q));
        auto F = [&](double x, double y) { return det4(f, c, x, y); };
        const double fpp = F(p + h, q), fmm = F(p - h, q), fqp = F(p, q + h), fqm = F(p, q - h), f0 = F(p, q);
        const double gp = (fpp - fmm) / (2 * h), gq = (fqp - fqm) / (2 * h);
        const double hpp = (fpp - 2 * f0 + fmm) / (h * h), hqq = (fqp - 2 * f0 + fqm) / (h * h);
        const double hpq = (F(p + h, q + h) - F(p + h, q - h) - F(p - h, q + h) + F(p - h, q - h)) / (4 * h * h);
        const double det = hpp * hqq - hpq * hpq;
        if (std::abs(det) < 1e-300) break;
        const double dp = (hqq * gp - hpq * gq) / det, dq = (hpp * gq - hpq * gp) / det;
        p -= dp;
        q -= dq;
        if (!std::isfinite(p) || !std::isfinite(q)) break;
        if (std::abs(dp) + std::abs(dq) < 1e-14 * (1 + std::abs(p) + std::abs(q))) break;
    }
    return {p, q};
}

inline void push_unique(std::vector<std::pair<double, double>>& v, double p, double q) {
    if (!std::isfinite(p) || !std::isfinite(q)) return;
    for (const auto& e : v)
        if (std::abs(e.first - p) <= 1e-6 && std::abs(e.second - q) <= 1e-6) return;
    v.emplace_back(p, q);
}

// Exact source: the span W of the Jacobian coefficient matrices. When W is a
// two-dimensional space containing an invertible Q, W Q^{-1} is the only
// candidate for R(A).
inline std::vector<std::pair<double, double>> span_candidates(const QuadraticVF& f, QuadCase c) {
    std::vector<std::pair<double, double>> out;
    Matd J0(2, 2), Jx(2, 2), Jy(2, 2);
    J0 << f.a[1], f.a[2], f.b[1], f.b[2];
    Jx << 2 * f.a[3], f.a[4], 2 * f.b[3], f.b[4];
    Jy << f.a[4], 2 * f.a[5], f.b[4], 2 * f.b[5];
    Matd W(4, 3);
    W.col(0) = Eigen::Map<const Vecd>(J0.data(), 4);
    W.col(1) = Eigen::Map<const Vecd>(Jx.data(), 4);
    W.col(2) = Eigen::Map<const Vecd>(Jy.data(), 4);
    Eigen::JacobiSVD<Matd> svd(W, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    if (s(0) == 0.0) return out;
    const int rank = static_cast<int>((s.array() > 1e-10 * s(0)).count());
    if (rank != 2) return out;
    Matd B1 = Eigen::Map<const Matd>(Vecd(svd.matrixU().col(0)).data(), 2, 2);
    Matd B2 = Eigen::Map<const Matd>(Vecd(svd.matrixU().col(1)).data(), 2, 2);
    // pick an invertible combination and the other basis element
    Matd Q, O;
    bool found = false;
    for (double t : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
        Q = std::cos(t) * B1 + std::sin(t) * B2;
        if (std::abs(Q.determinant()) > 1e-6) {
            O = -std::sin(t) * B1 + std::cos(t) * B2;
            found = true;
            break;
        }
    }
    if (!found) return out;
    const Matd Z = O * Q.inverse();
    const double zs = std::max(1.0, Z.norm());
    if (c == QuadCase::A2_1 && std::abs(Z(1, 0)) > 1e-8 * zs) {
        const Matd Zp = (Z - Z(0, 0) * Matd::Identity(2, 2)) / Z(1, 0);
        out.emplace_back(Zp(0, 1), Zp(1, 1));
    }
    if (c == QuadCase::A2_2 && std::abs(Z(0, 1)) > 1e-8 * zs) {
        const Matd Zp = (Z - Z(1, 1) * Matd::Identity(2, 2)) / Z(0, 1);
        // printed convention carries -gamma
        out.emplace_back(-Zp(0, 0), Zp(1, 0));
    }
    return out;
}

inline std::vector<std::pair<double, double>> parameter_candidates(const QuadraticVF& f, QuadCase c,
                                                                   const AlgebrizeOptions& o) {
    std::vector<std::pair<double, double>> out;
    if (f.quadratic_part_zero()) {
        // det M4 vanishes identically; any algebra serves
        for (auto pq : {std::pair{-1.0, 0.0}, std::pair{0.0, 0.0}, std::pair{1.0, 0.0}}) push_unique(out, pq.first, pq.second);
        return out;
    }
    for (auto pq : span_candidates(f, c))
        if (pq.first >= o.lo && pq.first <= o.hi && pq.second >= o.lo && pq.second <= o.hi)
            push_unique(out, pq.first, pq.second);

    std::vector<std::pair<double, double>> seeds;
    const int steps = static_cast<int>(std::lround((o.hi - o.lo) / o.step));
    for (int axis = 0; axis < 2; ++axis)
        for (int i = 0; i <= steps; ++i) {
            const double fixed = o.lo + i * o.step;
            const bool vary_p = axis == 1;
            auto [c0, c1, c2] = axis_quadratic(f, c, vary_p, fixed);
            auto add = [&](double t) {
                if (t < o.lo - o.step || t > o.hi + o.step) return;
                if (vary_p)
                    seeds.emplace_back(t, fixed);
                else
                    seeds.emplace_back(fixed, t);
            };
            const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2), 1e-300});
            if (std::abs(c2) <= 1e-12 * scale) {
                if (std::abs(c1) > 1e-12 * scale) add(-c0 / c1);
                continue;
            }
            const double disc = c1 * c1 - 4 * c2 * c0;
            const double vertex = -c1 / (2 * c2);
            if (disc >= 0) {
                const double r = std::sqrt(disc);
                add((-c1 + r) / (2 * c2));
                add((-c1 - r) / (2 * c2));
            }
            // near-double root: the vertex is the closest approach to zero
            const double vmin = c0 + c1 * vertex + c2 * vertex * vertex;
            if (std::abs(vmin) <= 1e-2 * scale) add(vertex);
        }
    for (const auto& [p, q] : seeds) {
        const double s4 = std::pow(m4_scale(f, p, q), 4);
        if (std::abs(det4(f, c, p, q)) <= 1e-8 * s4) {
            push_unique(out, p, q);
            continue;
        }
        auto [rp, rq] = refine_stationary(f, c, p, q);
        if (rp < o.lo || rp > o.hi || rq < o.lo || rq > o.hi) continue;
        if (std::isfinite(rp) && std::isfinite(rq) && std::abs(det4(f, c, rp, rq)) <= 1e-8 * std::pow(m4_scale(f, rp, rq), 4))
            push_unique(out, rp, rq);
    }
    return out;
}

// Null-space vector with the largest |ad - bc|; smallest singular vectors of M.
inline std::optional<std::array<double, 4>> best_v(const Matd& M) {
    Eigen::JacobiSVD<Matd> svd(M, Eigen::ComputeFullV);
    const Vecd s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    int null_dim = 4 - static_cast<int>((s.array() > 1e-10 * smax).count());
    if (smax == 0.0) null_dim = 4;
    null_dim = std::max(null_dim, 1);
    const Matd N = svd.matrixV().rightCols(null_dim);
    auto detv = [](const Vecd& v) { return v(0) * v(3) - v(1) * v(2); };
    Vecd best = N.col(0);
    if (null_dim == 2) {
        for (int k = 0; k < 720; ++k) {
            const double t = M_PI * k / 720.0;
            Vecd v = std::cos(t) * N.col(0) + std::sin(t) * N.col(1);
            if (std::abs(detv(v)) > std::abs(detv(best))) best = v;
        }
    } else if (null_dim > 2) {
        std::mt19937_64 rng(0x5eed);
        std::normal_distribution<double> nd;
        for (int k = 0; k < 4096; ++k) {
            Vecd w(null_dim);
            for (int i = 0; i < null_dim; ++i) w(i) = nd(rng);
            Vecd v = N * w;
            v.normalize();
            if (std::abs(detv(v)) > std::abs(detv(best))) best = v;
        }
    }
    best.normalize();
    if (std::abs(detv(best)) <= 1e-9) return std::nullopt;
    // sign convention: first nonzero component positive
    for (int i = 0; i < 4; ++i)
        if (std::abs(best(i)) > 1e-12) {
            if (best(i) < 0) best = -best;
            break;
        }
    return std::array<double, 4>{best(0), best(1), best(2), best(3)};
}

inline double witness_residual(const QuadraticVF& f, const PhiMap& phi, const RealAlgebra& A) {
    const VectorFunction F = as_function(f);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            Vecd u(2);
            u << -1.0 + 0.5 * i, -1.0 + 0.5 * j;
            worst = std::max(worst, cre_residual(F, phi, A, u));
        }
    return worst;
}

inline double orthogonality(const Matd& M, const std::array<double, 4>& v) {
    const Eigen::Map<const Vecd> vv(v.data(), 4);
    double worst = 0.0;
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        const double n = M.row(r).norm();
        if (n > 0) worst = std::max(worst, std::abs(M.row(r).dot(vv)) / n);
    }
    return worst;
}

}  // namespace detail

// Witnesses (case, params, v, phi) with f phiA-differentiable, each certified by
// its CRE residual. An empty result means none was found in the search box.
inline std::vector<AlgebrizationWitness> algebrize(const QuadraticVF& f, const AlgebrizeOptions& o = {}) {
    std::vector<AlgebrizationWitness> out;
    const bool homogeneous = f.linear_part_zero();
    for (QuadCase c : o.cases) {
        std::vector<std::pair<double, double>> cands;
        if (c == QuadCase::A2_12)
            cands = {{0.0, 0.0}};
        else
            cands = detail::parameter_candidates(f, c, o);
        std::vector<AlgebrizationWitness> found;
        for (const auto& [p, q] : cands) {
            if (c != QuadCase::A2_12 && !f.quadratic_part_zero() && (p < o.lo || p > o.hi || q < o.lo || q > o.hi)) continue;
            const Matd M = homogeneous ? build_M4(f, c, p, q) : build_M6(f, c, p, q);
            auto v = detail::best_v(M);
            if (!v) continue;
            AlgebrizationWitness w;
            w.kind = c;
            if (c != QuadCase::A2_12) w.params = {p, q};
            w.algebra = detail::witness_algebra(c, p, q, w.algebra_params);
            w.v = *v;
            w.phi = phi_from_v(*v);
            w.residual = detail::witness_residual(f, w.phi, w.algebra);
            w.det_M4 = build_M4(f, c, p, q).determinant();
            w.orthogonality = detail::orthogonality(M, *v);
            if (w.residual <= o.tol) found.push_back(std::move(w));
        }
        std::sort(found.begin(), found.end(),
                  [](const AlgebrizationWitness& x, const AlgebrizationWitness& y) { return x.params < y.params; });
        for (auto& w : found) out.push_back(std::move(w));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Billiards field F(u,v) = (b u^2 - (b+c) uv, a v^2 - (a+c) uv) over complex pairs.

struct BilliardsField {
    double a, b, c;

    QuadraticVFT<cd> complex_field() const {
        QuadraticVFT<cd> f;
        f.a[3] = b;
        f.a[4] = -(b + c);
        f.b[4] = -(a + c);
        f.b[5] = a;
        return f;
    }
    // same coefficients read as a real planar field
    QuadraticVF real_planar_field() const {
        QuadraticVF f;
        f.a[3] = b;
        f.a[4] = -(b + c);
        f.b[4] = -(a + c);
        f.b[5] = a;
        return f;
    }
    std::array<cd, 2> operator()(cd u, cd v) const { return {b * u * u - (b + c) * u * v, a * v * v - (a + c) * u * v}; }
    // four-dimensional real realisation in (x1, y1, x2, y2)
    std::array<double, 4> real4(double x1, double y1, double x2, double y2) const {
        return {b * (x1 * x1 - y1 * y1) - (b + c) * (x1 * x2 - y1 * y2),
                2 * b * x1 * y1 - (b + c) * (x1 * y2 + x2 * y1),
                a * (x2 * x2 - y2 * y2) - (a + c) * (x1 * x2 - y1 * y2),
                2 * a * x2 * y2 - (a + c) * (x1 * y2 + x2 * y1)};
    }
};

inline BilliardsField billiards_field(double a, double b, double c) { return {a, b, c}; }

struct BilliardsReport {
    double alpha = 0.0, beta = 0.0;
    std::array<double, 4> v{};
    double residual = 0.0;   // max over the grid of |F(w) - b phi(w)^2|
    double det_M4 = 0.0;
    double orthogonality = 0.0;
};

inline std::array<double, 2> billiards_alpha_beta(double a, double b, double c) {
    const double s = a + c;
    return {-(b + c) * (b + c) / (s * s), -2 * (b + c) / s + 4 * a * b / (s * s)};
}

inline BilliardsReport verify_billiards_algebrization(double a, double b, double c) {
    if (b == 0.0) throw Error(ErrorKind::DegenerateParameters, "b = 0");
    if (a + c == 0.0) throw Error(ErrorKind::DegenerateParameters, "a + c = 0");
    BilliardsReport r;
    const auto ab = billiards_alpha_beta(a, b, c);
    r.alpha = ab[0];
    r.beta = ab[1];
    r.v = {1.0, -(b + c) / (a + c), 0.0, -2 * b / (a + c)};
    const BilliardsField F{a, b, c};
    const Matd M4 = build_M4(F.real_planar_field(), QuadCase::A2_1, r.alpha, r.beta);
    r.det_M4 = M4.determinant();
    r.orthogonality = detail::orthogonality(M4, r.v);
    const auto A = build_A2_1<cd>(cd(r.alpha), cd(r.beta));
    auto phi = [&](cd u, cd v) {
        Vecc w(2);
        w << u - (b + c) / (2 * b) * v, -(a + c) / (2 * b) * v;
        return w;
    };
    const std::array<cd, 4> grid = {cd(-1.0, 0.5), cd(-0.3, -0.8), cd(0.4, 0.2), cd(1.1, -0.6)};
    for (const cd& u : grid)
        for (const cd& v : grid) {
            const cd vv = v * cd(0.7, 0.4);
            const Vecc p = phi(u, vv);
            const Vecc rhs = cd(b) * A.product(p, p);
            const auto lhs = F(u, vv);
            r.residual = std::max({r.residual, std::abs(lhs[0] - rhs(0)), std::abs(lhs[1] - rhs(1))});
        }
    return r;
}

}  // namespace phia
