#pragma once

#include "phia/algebra.hpp"
#include "phia/diff_map.hpp"

#include <random>
#include <vector>

namespace phia {

struct DiffReport {
    Vecd derivative;
    double residual = 0.0;  // |df - R(g) dphi|_F / max(1, |df|_F)
    bool unique = true;
};

// Relative residual at or below which a function counts as phiA-differentiable.
inline constexpr double kDifferentiableTol = 1e-6;

namespace detail {
inline void check_pair(const DiffMap& f, const DiffMap& phi, const RealAlgebra& A) {
    if (f.n != A.dim() || phi.n != A.dim())
        throw Error(ErrorKind::DimensionMismatch, "codomain dimension must equal algebra dimension");
    if (f.k != phi.k) throw Error(ErrorKind::DimensionMismatch, "f and phi must share the domain dimension");
}

// Column i is vec(R_i * Jphi); S g = vec(R(g) Jphi).
inline Matd stacked_operator(const RealAlgebra& A, const Matd& Jphi) {
    const int n = A.dim();
    const auto k = Jphi.cols();
    Matd S(n * k, n);
    for (int i = 0; i < n; ++i) {
        Matd P = A.basis_representation(i) * Jphi;
        S.col(i) = Eigen::Map<const Vecd>(P.data(), P.size());
    }
    return S;
}
}  // namespace detail

// Least-squares f'_phi(u) from Jf = R(g) Jphi; minimum-norm when rank deficient.
inline DiffReport derivative_from_jacobians(const RealAlgebra& A, const Matd& Jf, const Matd& Jphi) {
    const Matd S = detail::stacked_operator(A, Jphi);
    const Vecd rhs = Eigen::Map<const Vecd>(Jf.data(), Jf.size());
    DiffReport rep;
    rep.derivative = lstsq(S, rhs);
    const Matd R = A.representation(rep.derivative) * Jphi;
    rep.residual = (Jf - R).norm() / std::max(1.0, Jf.norm());
    rep.unique = numerical_rank(S, 1e-10) == A.dim();
    return rep;
}

inline DiffReport phi_derivative(const VectorFunction& f, const PhiMap& phi, const RealAlgebra& A, const Vecd& u) {
    detail::check_pair(f, phi, A);
    return derivative_from_jacobians(A, f.jacobian(u), phi.jacobian(u));
}

// max over i<j, q of |sum_{m,l} (f_{m,i} phi_{l,j} - f_{m,j} phi_{l,i}) c_{lmq}|,
// divided by max(1, |Jf|_F |Jphi|_F scale).
inline double cre_residual_from_jacobians(const RealAlgebra& A, const Matd& Jf, const Matd& Jphi) {
    const int n = A.dim();
    const auto k = Jf.cols();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i + 1; j < k; ++j)
            for (int q = 0; q < n; ++q) {
                double s = 0.0;
                for (int m = 0; m < n; ++m)
                    for (int l = 0; l < n; ++l)
                        s += (Jf(m, i) * Jphi(l, j) - Jf(m, j) * Jphi(l, i)) * A.c(l, m, q);
                worst = std::max(worst, std::abs(s));
            }
    return worst / std::max(1.0, Jf.norm() * Jphi.norm() * A.scale());
}

inline double cre_residual(const VectorFunction& f, const PhiMap& phi, const RealAlgebra& A, const Vecd& u) {
    detail::check_pair(f, phi, A);
    return cre_residual_from_jacobians(A, f.jacobian(u), phi.jacobian(u));
}

// Unit xi with dphi_u(xi) regular: basis directions, then 64 seeded random ones.
inline Vecd find_regular_direction(const PhiMap& phi, const RealAlgebra& A, const Vecd& u) {
    if (phi.n != A.dim()) throw Error(ErrorKind::DimensionMismatch, "phi codomain must equal algebra dim");
    const Matd J = phi.jacobian(u);
    for (int i = 0; i < phi.k; ++i) {
        Vecd xi = Vecd::Unit(phi.k, i);
        if (A.is_regular(J * xi)) return xi;
    }
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 64; ++t) {
        Vecd xi(phi.k);
        for (int i = 0; i < phi.k; ++i) xi(i) = nd(rng);
        xi.normalize();
        if (A.is_regular(J * xi)) return xi;
    }
    throw Error(ErrorKind::NotFound, "no regular direction after basis and 64 random directions");
}

// c0 + c1 phi + ... + cm phi^m with Jacobian R(sum j c_j phi^{j-1}) Jphi.
inline VectorFunction phi_polynomial(const std::vector<Vecd>& coeffs, const PhiMap& phi, const RealAlgebra& A) {
    if (phi.n != A.dim()) throw Error(ErrorKind::DimensionMismatch, "phi codomain must equal algebra dim");
    for (const auto& c : coeffs)
        if (c.size() != A.dim()) throw Error(ErrorKind::DimensionMismatch, "coefficient length must equal algebra dim");
    auto eval = [coeffs, phi, A](const Vecd& u) -> Vecd {
        const Vecd w = phi(u);
        Vecd acc = A.zero();
        // Horner
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = A.product(acc, w) + *it;
        return acc;
    };
    auto jac = [coeffs, phi, A](const Vecd& u) -> Matd {
        const Vecd w = phi(u);
        Vecd d = A.zero();
        for (std::size_t m = coeffs.size(); m-- > 1;) d = A.product(d, w) + static_cast<double>(m) * coeffs[m];
        return A.representation(d) * phi.jacobian(u);
    };
    return VectorFunction(phi.k, A.dim(), eval, jac);
}

// Pointwise algebra product f g with Jacobian R(g) Jf + R(f) Jg.
inline VectorFunction algebra_product(const VectorFunction& f, const VectorFunction& g, const RealAlgebra& A) {
    auto eval = [f, g, A](const Vecd& u) -> Vecd { return A.product(f(u), g(u)); };
    auto jac = [f, g, A](const Vecd& u) -> Matd {
        return A.representation(g(u)) * f.jacobian(u) + A.representation(f(u)) * g.jacobian(u);
    };
    return VectorFunction(f.k, A.dim(), eval, jac);
}

// c1 f + c2 g for constants c1, c2 in A.
inline VectorFunction algebra_combination(const Vecd& c1, const VectorFunction& f, const Vecd& c2,
                                          const VectorFunction& g, const RealAlgebra& A) {
    auto eval = [=](const Vecd& u) -> Vecd { return A.product(c1, f(u)) + A.product(c2, g(u)); };
    auto jac = [=](const Vecd& u) -> Matd {
        return A.representation(c1) * f.jacobian(u) + A.representation(c2) * g.jacobian(u);
    };
    return VectorFunction(f.k, A.dim(), eval, jac);
}

// p / q; SingularElement where q(u) is singular.
inline VectorFunction phi_rational(const VectorFunction& p, const VectorFunction& q, const RealAlgebra& A) {
    auto eval = [p, q, A](const Vecd& u) -> Vecd { return A.product(p(u), A.inverse(q(u))); };
    auto jac = [p, q, A](const Vecd& u) -> Matd {
        const Vecd qi = A.inverse(q(u));
        const Vecd pq2 = A.product(p(u), A.product(qi, qi));
        return A.representation(qi) * p.jacobian(u) - A.representation(pq2) * q.jacobian(u);
    };
    return VectorFunction(p.k, A.dim(), eval, jac);
}

// g o f, Jacobian Jg(f(u)) Jf(u).
inline VectorFunction compose_outer(const VectorFunction& g, const VectorFunction& f) {
    if (g.k != f.n) throw Error(ErrorKind::DimensionMismatch, "g domain must equal f codomain");
    auto eval = [g, f](const Vecd& u) -> Vecd { return g(f(u)); };
    auto jac = [g, f](const Vecd& u) -> Matd { return g.jacobian(f(u)) * f.jacobian(u); };
    return VectorFunction(f.k, g.n, eval, jac);
}

// f o g for an inner reparametrisation g.
inline VectorFunction compose_inner(const VectorFunction& f, const VectorFunction& g) { return compose_outer(f, g); }

// Relative distance of M from span{R(e_1), ..., R(e_n)}.
inline double representation_distance(const RealAlgebra& A, const Matd& M) {
    const int n = A.dim();
    Matd S(n * n, n);
    for (int i = 0; i < n; ++i) S.col(i) = Eigen::Map<const Vecd>(A.basis_representation(i).data(), n * n);
    const Vecd m = Eigen::Map<const Vecd>(M.data(), M.size());
    const Vecd coef = lstsq(S, m);
    return (S * coef - m).norm() / std::max(1.0, m.norm());
}

struct Factorization {
    VectorFunction g;                  // f o phi^{-1}
    double membership_distance = 0.0;  // max over samples of dist(Jf Jphi^{-1}, R(A))
};

namespace detail {
inline Vecd newton_invert(const PhiMap& phi, const Vecd& w, Vecd u) {
    for (int it = 0; it < 50; ++it) {
        const Vecd r = phi(u) - w;
        if (r.norm() <= 1e-13 * (1.0 + w.norm())) return u;
        const Matd J = phi.jacobian(u);
        auto lu = J.fullPivLu();
        if (!lu.isInvertible()) break;
        u -= lu.solve(r);
    }
    const Vecd r = phi(u) - w;
    if (r.norm() <= 1e-10 * (1.0 + w.norm())) return u;
    throw Error(ErrorKind::PhiNotInvertible, "Newton inversion of phi did not converge in 50 iterations");
}
}  // namespace detail

// g = f o phi^{-1} (phi inverted by Newton started from the sample whose image
// is nearest), plus the Jf Jphi^{-1} in R(A) membership test over the samples.
inline Factorization factor_through_phi(const VectorFunction& f, const PhiMap& phi, const RealAlgebra& A,
                                        const std::vector<Vecd>& samples) {
    detail::check_pair(f, phi, A);
    if (phi.k != phi.n) throw Error(ErrorKind::DimensionMismatch, "phi must map R^n to R^n");
    if (samples.empty()) throw Error(ErrorKind::DimensionMismatch, "at least one sample point required");
    std::vector<Vecd> images;
    images.reserve(samples.size());
    for (const auto& s : samples) images.push_back(phi(s));
    auto seed = [samples, images](const Vecd& w) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < images.size(); ++i)
            if ((images[i] - w).norm() < (images[best] - w).norm()) best = i;
        return samples[best];
    };
    auto eval = [f, phi, seed](const Vecd& w) -> Vecd { return f(detail::newton_invert(phi, w, seed(w))); };
    auto jac = [f, phi, seed](const Vecd& w) -> Matd {
        const Vecd u = detail::newton_invert(phi, w, seed(w));
        return f.jacobian(u) * phi.jacobian(u).inverse();
    };
    Factorization out{VectorFunction(phi.n, f.n, eval, jac), 0.0};
    for (const auto& s : samples) {
        const Matd M = f.jacobian(s) * phi.jacobian(s).inverse();
        out.membership_distance = std::max(out.membership_distance, representation_distance(A, M));
    }
    return out;
}

}  // namespace phia
