#pragma once

#include "phia/algebra.hpp"
#include "phia/diff_map.hpp"
#include "phia/phi_calculus.hpp"

#include <json.hpp>

#include <array>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace phia {

// Homogeneous linear first-order system. Equation e reads
// sum_{m,i} a_e(m,i) d f_m / d u_i = 0, with a_e an n x k matrix.
struct CRESystem {
    struct Label {
        int i, j, q;  // independent pair (i<j) and algebra component q
    };
    int n = 0;
    int k = 0;
    std::vector<Label> labels;
    std::function<std::vector<Matd>(const Vecd&)> coefficients_at;
    bool constant = false;

    int num_equations() const { return static_cast<int>(labels.size()); }

    std::vector<Matd> coefficients(const Vecd& u = Vecd()) const {
        return coefficients_at(u.size() ? u : Vecd::Zero(k));
    }

    // max_e |<a_e, Jf>| / max(1, |a_e|_F |Jf|_F)
    double residual(const Matd& Jf, const Vecd& u) const {
        double worst = 0.0;
        for (const Matd& a : coefficients(u)) {
            const double s = (a.array() * Jf.array()).sum();
            worst = std::max(worst, std::abs(s) / std::max(1.0, a.norm() * Jf.norm()));
        }
        return worst;
    }
    double residual(const VectorFunction& f, const Vecd& u) const { return residual(f.jacobian(u), u); }
};

namespace detail {
inline std::vector<Matd> cre_coefficients(const RealAlgebra& A, const Matd& Jphi) {
    const int n = A.dim();
    const auto k = static_cast<int>(Jphi.cols());
    std::vector<Matd> out;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            for (int q = 0; q < n; ++q) {
                Matd a = Matd::Zero(n, k);
                for (int m = 0; m < n; ++m) {
                    double sj = 0.0, si = 0.0;
                    for (int l = 0; l < n; ++l) {
                        sj += Jphi(l, j) * A.c(l, m, q);
                        si += Jphi(l, i) * A.c(l, m, q);
                    }
                    a(m, i) = sj;
                    a(m, j) = -si;
                }
                out.push_back(std::move(a));
            }
    return out;
}

inline Vecd probe_point(int k, int t) {
    Vecd u(k);
    for (int i = 0; i < k; ++i) u(i) = 0.29 + 0.37 * t - 0.61 * i + 0.13 * t * i;
    return u;
}

inline bool jacobian_is_constant(const PhiMap& phi) {
    const Matd J0 = phi.jacobian(probe_point(phi.k, 0));
    if (!J0.allFinite()) return false;
    const double scale = std::max(1.0, J0.norm());
    for (int t = 1; t <= 3; ++t) {
        const Matd J = phi.jacobian(probe_point(phi.k, t));
        if (!J.allFinite() || (J - J0).norm() > 1e-9 * scale) return false;
    }
    return true;
}
}  // namespace detail

// One equation per pair i<j and component q: coefficient of f_{m,u_i} is
// sum_l phi_{l,u_j} c_{lmq}, of f_{m,u_j} is -sum_l phi_{l,u_i} c_{lmq}.
inline CRESystem emit_cre(const RealAlgebra& A, const PhiMap& phi) {
    if (phi.n != A.dim()) throw Error(ErrorKind::DimensionMismatch, "phi codomain must equal algebra dim");
    CRESystem s;
    s.n = A.dim();
    s.k = phi.k;
    for (int i = 0; i < phi.k; ++i)
        for (int j = i + 1; j < phi.k; ++j)
            for (int q = 0; q < A.dim(); ++q) s.labels.push_back({i, j, q});
    s.constant = detail::jacobian_is_constant(phi);
    if (s.constant) {
        auto fixed = detail::cre_coefficients(A, phi.jacobian(detail::probe_point(phi.k, 0)));
        s.coefficients_at = [fixed](const Vecd&) { return fixed; };
    } else {
        s.coefficients_at = [A, phi](const Vecd& u) { return detail::cre_coefficients(A, phi.jacobian(u)); };
    }
    return s;
}

// k_w * (first CRE) + l_w * (second CRE) for a two-dimensional algebra and k = 2.
inline CRESystem emit_weighted_cre(const RealAlgebra& A, const PhiMap& phi, double k_w, double l_w) {
    if (A.dim() != 2 || phi.k != 2) throw Error(ErrorKind::DimensionMismatch, "weighted form needs n = k = 2");
    CRESystem base = emit_cre(A, phi);
    CRESystem s;
    s.n = 2;
    s.k = 2;
    s.labels = {{0, 1, -1}};
    s.constant = base.constant;
    s.coefficients_at = [base, k_w, l_w](const Vecd& u) {
        auto c = base.coefficients(u);
        return std::vector<Matd>{k_w * c[0] + l_w * c[1]};
    };
    return s;
}

inline std::string dependent_name(int m, int n) {
    static const char* uvw[] = {"u", "v", "w"};
    return n <= 3 ? uvw[m] : "f" + std::to_string(m + 1);
}
inline std::string independent_name(int i, int k) {
    static const char* xyz[] = {"x", "y", "z"};
    return k <= 3 ? xyz[i] : "u" + std::to_string(i + 1);
}

inline std::string format_coeff(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

inline std::string cre_to_latex(const CRESystem& s, const Vecd& u = Vecd()) {
    std::ostringstream os;
    auto coeffs = s.coefficients(u);
    for (std::size_t e = 0; e < coeffs.size(); ++e) {
        bool first = true;
        for (int m = 0; m < s.n; ++m)
            for (int i = 0; i < s.k; ++i) {
                const double a = coeffs[e](m, i);
                if (std::abs(a) < 1e-15) continue;
                const std::string var = dependent_name(m, s.n) + "_{" + independent_name(i, s.k) + "}";
                if (first)
                    os << (a < 0 ? "-" : "");
                else
                    os << (a < 0 ? " - " : " + ");
                if (std::abs(std::abs(a) - 1.0) > 1e-15) os << format_coeff(std::abs(a)) << " ";
                os << var;
                first = false;
            }
        if (first) os << "0";
        os << " = 0";
        if (e + 1 < coeffs.size()) os << " \\\\\n";
    }
    return os.str();
}

inline nlohmann::json cre_to_json(const CRESystem& s, const Vecd& u = Vecd()) {
    nlohmann::json eqs = nlohmann::json::array();
    auto coeffs = s.coefficients(u);
    for (std::size_t e = 0; e < coeffs.size(); ++e) {
        nlohmann::json rows = nlohmann::json::array();
        for (int m = 0; m < s.n; ++m) {
            nlohmann::json row = nlohmann::json::array();
            for (int i = 0; i < s.k; ++i) row.push_back(coeffs[e](m, i));
            rows.push_back(row);
        }
        const auto& l = s.labels[e];
        eqs.push_back({{"pair", {l.i, l.j}}, {"component", l.q}, {"coefficients", rows}});
    }
    return {{"n", s.n}, {"k", s.k}, {"constant", s.constant}, {"equations", eqs}, {"latex", cre_to_latex(s, u)}};
}

// ---------------------------------------------------------------------------
// Systems of two PDEs in (u, v) over (x, y) with coefficients of degree <= 1.

struct Poly1 {
    double c = 0.0, x = 0.0, y = 0.0;
    double operator()(double px, double py) const { return c + x * px + y * py; }
    Poly1 operator+(const Poly1& o) const { return {c + o.c, x + o.x, y + o.y}; }
    Poly1 operator-(const Poly1& o) const { return {c - o.c, x - o.x, y - o.y}; }
    Poly1 operator*(double s) const { return {c * s, x * s, y * s}; }
    double magnitude() const { return std::max({std::abs(c), std::abs(x), std::abs(y)}); }
};

// c + x X + y Y + xx X^2 + xy XY + yy Y^2
struct Poly2 {
    double c = 0.0, x = 0.0, y = 0.0, xx = 0.0, xy = 0.0, yy = 0.0;
    double operator()(double px, double py) const {
        return c + x * px + y * py + xx * px * px + xy * px * py + yy * py * py;
    }
    std::array<double, 2> gradient(double px, double py) const {
        return {x + 2 * xx * px + xy * py, y + xy * px + 2 * yy * py};
    }
};

// Columns ordered (u_x, u_y, v_x, v_y).
struct TwoPDESystem {
    std::array<std::array<Poly1, 4>, 2> a{};
    std::array<Poly1, 2> F{};

    Matd matrix(double x, double y) const {
        Matd m(2, 4);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 4; ++c) m(r, c) = a[r][c](x, y);
        return m;
    }
    Vecd rhs(double x, double y) const {
        Vecd f(2);
        f << F[0](x, y), F[1](x, y);
        return f;
    }
    // Residual of <A : dw> = F for a solution with Jacobian J = [[u_x,u_y],[v_x,v_y]].
    double residual(const Matd& J, double x, double y) const {
        Vecd dw(4);
        dw << J(0, 0), J(0, 1), J(1, 0), J(1, 1);
        return (matrix(x, y) * dw - rhs(x, y)).cwiseAbs().maxCoeff();
    }
};

// Two-equation system from a two-equation CRE system with constant coefficients.
inline TwoPDESystem to_two_pde(const CRESystem& s) {
    if (s.n != 2 || s.k != 2 || s.num_equations() != 2 || !s.constant)
        throw Error(ErrorKind::DimensionMismatch, "need a constant two-equation system with n = k = 2");
    TwoPDESystem t;
    auto c = s.coefficients();
    for (int r = 0; r < 2; ++r) {
        t.a[r][0].c = c[r](0, 0);
        t.a[r][1].c = c[r](0, 1);
        t.a[r][2].c = c[r](1, 0);
        t.a[r][3].c = c[r](1, 1);
    }
    return t;
}

inline Poly1 poly1_from_json(const nlohmann::json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0, 0.0};
    Poly1 p;
    p.c = j.value("const", 0.0);
    p.x = j.value("x", 0.0);
    p.y = j.value("y", 0.0);
    return p;
}

inline nlohmann::json poly1_to_json(const Poly1& p) { return {{"const", p.c}, {"x", p.x}, {"y", p.y}}; }

inline TwoPDESystem two_pde_from_json(const nlohmann::json& j) {
    try {
        TwoPDESystem t;
        const auto& A = j.at("A");
        if (!A.is_array() || A.size() != 2) throw Error(ErrorKind::ParseError, "A must be a 2 x 4 array");
        for (int r = 0; r < 2; ++r) {
            if (!A[r].is_array() || A[r].size() != 4) throw Error(ErrorKind::ParseError, "A must be a 2 x 4 array");
            for (int c = 0; c < 4; ++c) t.a[r][c] = poly1_from_json(A[r][c]);
        }
        if (j.contains("F"))
            for (int r = 0; r < 2; ++r) t.F[r] = poly1_from_json(j.at("F")[r]);
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

inline nlohmann::json two_pde_to_json(const TwoPDESystem& t) {
    nlohmann::json A = nlohmann::json::array();
    for (int r = 0; r < 2; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < 4; ++c) row.push_back(poly1_to_json(t.a[r][c]));
        A.push_back(row);
    }
    return {{"A", A}, {"F", {poly1_to_json(t.F[0]), poly1_to_json(t.F[1])}}};
}

enum class PlanarCase { A2_1, A2_2, A2_12 };

inline const char* to_string(PlanarCase c) {
    switch (c) {
        case PlanarCase::A2_1: return "A2_1";
        case PlanarCase::A2_2: return "A2_2";
        case PlanarCase::A2_12: return "A2_12";
    }
    return "?";
}

inline RealAlgebra build_planar(PlanarCase c, const std::vector<double>& params) {
    switch (c) {
        case PlanarCase::A2_1: return build_A2_1(params.at(0), params.at(1));
        case PlanarCase::A2_2: return build_A2_2(params.at(0), params.at(1));
        case PlanarCase::A2_12: return build_A2_12();
    }
    throw Error(ErrorKind::DimensionMismatch, "unknown planar case");
}

struct Recovery {
    PlanarCase planar_case = PlanarCase::A2_1;
    std::vector<double> params;  // (alpha,beta), (gamma,delta) or empty
    std::array<Poly2, 2> potentials{};
    PhiMap phi;
    RealAlgebra algebra = build_A2_12();
};

inline PhiMap phi_from_potentials(const std::array<Poly2, 2>& p) {
    return PhiMap(
        2, 2,
        [p](const Vecd& u) -> Vecd {
            Vecd r(2);
            r << p[0](u(0), u(1)), p[1](u(0), u(1));
            return r;
        },
        [p](const Vecd& u) -> Matd {
            Matd J(2, 2);
            auto g0 = p[0].gradient(u(0), u(1));
            auto g1 = p[1].gradient(u(0), u(1));
            J << g0[0], g0[1], g1[0], g1[1];
            return J;
        });
}

// 2x2 matrix map M with A2 = M A1 and F2 = M F1 at each sample point.
inline std::vector<Matd> find_equivalence_matrix(const TwoPDESystem& s1, const TwoPDESystem& s2,
                                                 const std::vector<std::array<double, 2>>& points) {
    std::vector<Matd> out;
    for (const auto& p : points) {
        const Matd A1 = s1.matrix(p[0], p[1]);
        const Matd A2 = s2.matrix(p[0], p[1]);
        Matd B1(2, 5), B2(2, 5);
        B1 << A1, s1.rhs(p[0], p[1]);
        B2 << A2, s2.rhs(p[0], p[1]);
        // M B1 = B2  <=>  B1^T M^T = B2^T
        const Matd Mt = lstsq(Matd(B1.transpose()), Matd(B2.transpose()));
        const Matd M = Mt.transpose();
        const double res = (M * B1 - B2).norm() / std::max(1.0, B2.norm());
        if (res > 1e-8)
            throw Error(ErrorKind::NotEquivalent, "pointwise residual " + format_coeff(res) + " at (" +
                                                      format_coeff(p[0]) + "," + format_coeff(p[1]) + ")");
        if (std::abs(M.determinant()) < 1e-12)
            throw Error(ErrorKind::NotEquivalent, "equivalence matrix is singular at (" + format_coeff(p[0]) + "," +
                                                      format_coeff(p[1]) + ")");
        out.push_back(M);
    }
    return out;
}

inline std::vector<std::array<double, 2>> default_sample_points() {
    return {{0.31, 0.72}, {-0.64, 0.23}, {1.13, -0.41}, {-0.83, -0.94}, {0.52, -1.27}, {1.71, 0.88}, {-1.18, 1.42}};
}

namespace detail {

// Potential of a conservative field (P, Q) with degree <= 1 components.
inline Poly2 potential(const Poly1& P, const Poly1& Q) {
    Poly2 r;
    r.x = P.c;
    r.xx = P.x / 2.0;
    r.xy = P.y;
    r.y = Q.c;
    r.yy = Q.y / 2.0;
    return r;
}

inline double curl(const Poly1& P, const Poly1& Q) { return Q.x - P.y; }

inline double system_scale(const TwoPDESystem& s) {
    double m = 0.0;
    for (const auto& row : s.a)
        for (const auto& p : row) m = std::max(m, p.magnitude());
    return std::max(m, 1e-300);
}

inline std::array<Poly1, 2> part(const TwoPDESystem& s, int row, bool v_part) {
    const int off = v_part ? 2 : 0;
    return {s.a[row][off], s.a[row][off + 1]};
}

inline std::array<Poly1, 2> combine(const std::array<Poly1, 2>& a, const std::array<Poly1, 2>& b, double ma, double mb) {
    return {a[0] * ma + b[0] * mb, a[1] * ma + b[1] * mb};
}

// Candidate row weights: preferred unit vector first, then the other, then mixes.
inline std::vector<std::array<double, 2>> weight_candidates(int preferred) {
    std::vector<std::array<double, 2>> w;
    if (preferred == 0)
        w = {{1, 0}, {0, 1}};
    else
        w = {{0, 1}, {1, 0}};
    w.push_back({1, 1});
    w.push_back({1, -1});
    return w;
}

// Shared trace/determinant extraction: N = P^{-1} Q at the sample points.
inline std::optional<std::pair<double, double>> trace_det(const TwoPDESystem& s, bool invert_u_part) {
    const double scale = system_scale(s);
    std::optional<double> tr, dt;
    int used = 0;
    for (const auto& p : default_sample_points()) {
        const Matd A = s.matrix(p[0], p[1]);
        Matd U = A.leftCols(2), V = A.rightCols(2);
        Matd P = invert_u_part ? U : V;
        Matd Q = invert_u_part ? V : U;
        if (std::abs(P.determinant()) < 1e-9 * scale * scale) continue;
        Matd N = P.inverse() * Q;
        const double t = N.trace(), d = N.determinant();
        const double nscale = std::max(1.0, N.norm());
        // Scalar N would make both rows multiples of one combination.
        if ((N - 0.5 * t * Matd::Identity(2, 2)).norm() < 1e-9 * nscale) return std::nullopt;
        if (tr) {
            if (std::abs(t - *tr) > 1e-8 * nscale || std::abs(d - *dt) > 1e-8 * nscale * nscale) return std::nullopt;
        } else {
            tr = t;
            dt = d;
        }
        ++used;
    }
    if (used == 0) return std::nullopt;
    return std::make_pair(*tr, *dt);
}

inline bool phi_regular_somewhere(const std::array<Poly2, 2>& pot) {
    PhiMap phi = phi_from_potentials(pot);
    for (const auto& p : default_sample_points()) {
        Vecd u(2);
        u << p[0], p[1];
        if (std::abs(phi.jacobian(u).determinant()) > 1e-9) return true;
    }
    return false;
}

inline bool verify_recovery(const TwoPDESystem& sys, const Recovery& r) {
    TwoPDESystem emitted;
    CRESystem cre = emit_cre(r.algebra, r.phi);
    // The emitted coefficients are degree <= 1 in (x, y); sample them exactly.
    auto at = [&](double x, double y) {
        Vecd u(2);
        u << x, y;
        return cre.coefficients(u);
    };
    auto c0 = at(0, 0), cx = at(1, 0), cy = at(0, 1);
    for (int r2 = 0; r2 < 2; ++r2) {
        const int ms[4] = {0, 0, 1, 1}, is[4] = {0, 1, 0, 1};
        for (int c = 0; c < 4; ++c) {
            const double v0 = c0[r2](ms[c], is[c]);
            emitted.a[r2][c] = {v0, cx[r2](ms[c], is[c]) - v0, cy[r2](ms[c], is[c]) - v0};
        }
    }
    try {
        find_equivalence_matrix(sys, emitted, default_sample_points());
        return true;
    } catch (const Error&) {
        return false;
    }
}

inline std::optional<Recovery> try_case_a(const TwoPDESystem& s) {
    auto td = trace_det(s, true);
    if (!td) return std::nullopt;
    const double beta = td->first, alpha = -td->second;
    const double scale = system_scale(s);
    for (auto m : weight_candidates(1)) {
        // Second canonical row (B2, B1 + beta B2).
        auto u = combine(part(s, 0, false), part(s, 1, false), m[0], m[1]);
        auto v = combine(part(s, 0, true), part(s, 1, true), m[0], m[1]);
        std::array<Poly1, 2> q = u;
        std::array<Poly1, 2> p = {v[0] - u[0] * beta, v[1] - u[1] * beta};
        // F1 = (-b12, b11), F2 = (-b22, b21)
        const Poly1 F1x = p[1] * -1.0, F1y = p[0], F2x = q[1] * -1.0, F2y = q[0];
        if (std::abs(curl(F1x, F1y)) > 1e-10 * scale || std::abs(curl(F2x, F2y)) > 1e-10 * scale) continue;
        Recovery r;
        r.planar_case = PlanarCase::A2_1;
        r.params = {alpha, beta};
        r.potentials = {potential(F1x, F1y), potential(F2x, F2y)};
        if (!phi_regular_somewhere(r.potentials)) continue;
        r.phi = phi_from_potentials(r.potentials);
        r.algebra = build_A2_1(alpha, beta);
        if (verify_recovery(s, r)) return r;
    }
    return std::nullopt;
}

inline std::optional<Recovery> try_case_b(const TwoPDESystem& s) {
    auto td = trace_det(s, false);
    if (!td) return std::nullopt;
    const double gamma = td->first, delta = -td->second;
    const double scale = system_scale(s);
    for (auto m : weight_candidates(0)) {
        // First canonical row (gamma B1 + B2, B1).
        auto u = combine(part(s, 0, false), part(s, 1, false), m[0], m[1]);
        auto v = combine(part(s, 0, true), part(s, 1, true), m[0], m[1]);
        std::array<Poly1, 2> b1 = v;
        std::array<Poly1, 2> b2 = {u[0] - v[0] * gamma, u[1] - v[1] * gamma};
        // F1 = (-b14, b13), F2 = (-b24, b23)
        const Poly1 F1x = b1[1] * -1.0, F1y = b1[0], F2x = b2[1] * -1.0, F2y = b2[0];
        if (std::abs(curl(F1x, F1y)) > 1e-10 * scale || std::abs(curl(F2x, F2y)) > 1e-10 * scale) continue;
        Recovery r;
        r.planar_case = PlanarCase::A2_2;
        r.params = {gamma, delta};
        r.potentials = {potential(F1x, F1y), potential(F2x, F2y)};
        if (!phi_regular_somewhere(r.potentials)) continue;
        r.phi = phi_from_potentials(r.potentials);
        r.algebra = build_A2_2(gamma, delta);
        if (verify_recovery(s, r)) return r;
    }
    return std::nullopt;
}

// Constant weights m with (m_0 row_0 + m_1 row_1) vanishing on the given part.
inline std::optional<std::array<double, 2>> annihilating_weights(const TwoPDESystem& s, bool v_part) {
    const int off = v_part ? 2 : 0;
    Matd C(6, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            const Poly1& p = s.a[r][off + c];
            C(c * 3 + 0, r) = p.c;
            C(c * 3 + 1, r) = p.x;
            C(c * 3 + 2, r) = p.y;
        }
    const double scale = system_scale(s);
    for (int r = 0; r < 2; ++r) {
        Vecd e = Vecd::Unit(2, r);
        if ((C * e).cwiseAbs().maxCoeff() <= 1e-12 * scale) return r == 0 ? std::array<double, 2>{1, 0}
                                                                             : std::array<double, 2>{0, 1};
    }
    const Matd N = null_space(C, 1e-10);
    if (N.cols() != 1) return std::nullopt;
    Vecd m = N.col(0);
    Eigen::Index big;
    m.cwiseAbs().maxCoeff(&big);
    m /= m(big);
    return std::array<double, 2>{m(0), m(1)};
}

inline std::optional<Recovery> try_case_c(const TwoPDESystem& s) {
    auto mu = annihilating_weights(s, true);   // row with no v terms
    auto mv = annihilating_weights(s, false);  // row with no u terms
    if (!mu || !mv) return std::nullopt;
    const double scale = system_scale(s);
    auto b12 = combine(part(s, 0, false), part(s, 1, false), (*mu)[0], (*mu)[1]);
    auto b34 = combine(part(s, 0, true), part(s, 1, true), (*mv)[0], (*mv)[1]);
    const Poly1 F1x = b12[1] * -1.0, F1y = b12[0], F2x = b34[1] * -1.0, F2y = b34[0];
    if (std::abs(curl(F1x, F1y)) > 1e-10 * scale || std::abs(curl(F2x, F2y)) > 1e-10 * scale) return std::nullopt;
    Recovery r;
    r.planar_case = PlanarCase::A2_12;
    r.potentials = {potential(F1x, F1y), potential(F2x, F2y)};
    if (!phi_regular_somewhere(r.potentials)) return std::nullopt;
    r.phi = phi_from_potentials(r.potentials);
    r.algebra = build_A2_12();
    if (!verify_recovery(s, r)) return std::nullopt;
    return r;
}

}  // namespace detail

// Recovers (phi, A) such that the phiA-CREs are equivalent to the system.
// phi is determined up to an additive constant and a constant regular factor.
inline Recovery recover_phi_algebra(const TwoPDESystem& sys, std::optional<PlanarCase> hint = std::nullopt) {
    for (const auto& row : sys.F)
        if (row.magnitude() != 0.0)
            throw Error(ErrorKind::NoMatch, "stage=pattern: system is not homogeneous; supply a particular solution");
    std::vector<PlanarCase> order = {PlanarCase::A2_1, PlanarCase::A2_2, PlanarCase::A2_12};
    if (hint) order = {*hint};
    for (PlanarCase c : order) {
        std::optional<Recovery> r;
        if (c == PlanarCase::A2_1) r = detail::try_case_a(sys);
        if (c == PlanarCase::A2_2) r = detail::try_case_b(sys);
        if (c == PlanarCase::A2_12) r = detail::try_case_c(sys);
        if (r) return *r;
    }
    throw Error(ErrorKind::NoMatch, "stage=pattern/conservativeness: no planar family matches the system");
}

}  // namespace phia
