#pragma once

#include "phia/error.hpp"
#include "phia/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace phia {

enum class ScalarField { real, complex };

inline const char* to_string(ScalarField s) { return s == ScalarField::real ? "real" : "complex"; }

// Finite-dimensional commutative associative unital algebra over T
// (double or std::complex<double>), given by structure constants
// e_i e_j = sum_k c(i,j,k) e_k. Immutable after construction.
template <class T>
class Algebra {
public:
    using Scalar = T;
    using Element = Vec<T>;
    using Matrix = Mat<T>;

    static constexpr ScalarField field = is_complex_v<T> ? ScalarField::complex : ScalarField::real;

    // Validates commutativity, unit and associativity; throws on the first
    // violated axiom with the offending index triple.
    static Algebra from_constants(int dim, std::vector<T> constants, Element unit) {
        if (dim <= 0) throw Error(ErrorKind::DimensionMismatch, "dim must be positive");
        const auto n = static_cast<std::size_t>(dim);
        if (constants.size() != n * n * n)
            throw Error(ErrorKind::DimensionMismatch, "constants tensor must have dim^3 entries");
        if (unit.size() != dim) throw Error(ErrorKind::DimensionMismatch, "unit length must equal dim");
        Algebra a(dim, std::move(constants), std::move(unit));
        a.validate();
        return a;
    }

    int dim() const { return n_; }
    ScalarField scalars() const { return field; }
    T c(int i, int j, int k) const { return c_[idx(i, j, k)]; }
    const std::vector<T>& constants() const { return c_; }
    const Element& unit() const { return e_; }
    // max(1, max |c_ijk|), used to scale tolerances.
    double scale() const { return scale_; }

    Element zero() const { return Element::Zero(n_); }
    Element basis(int i) const {
        Element b = Element::Zero(n_);
        b(i) = T(1);
        return b;
    }

    // [R_i]_{jk} = c_{ikj}
    const Matrix& basis_representation(int i) const { return reps_[static_cast<std::size_t>(i)]; }

    Matrix representation(const Element& a) const {
        check_len(a);
        Matrix r = Matrix::Zero(n_, n_);
        for (int i = 0; i < n_; ++i)
            if (a(i) != T(0)) r += a(i) * reps_[static_cast<std::size_t>(i)];
        return r;
    }

    Element product(const Element& a, const Element& b) const {
        check_len(a);
        check_len(b);
        Element out = Element::Zero(n_);
        for (int i = 0; i < n_; ++i) {
            if (a(i) == T(0)) continue;
            for (int j = 0; j < n_; ++j) {
                const T ab = a(i) * b(j);
                if (ab == T(0)) continue;
                for (int k = 0; k < n_; ++k) out(k) += ab * c(i, j, k);
            }
        }
        return out;
    }

    bool is_regular(const Element& a) const {
        auto s = singular_values(representation(a));
        return s(0) > 0.0 && s(s.size() - 1) >= 1e-12 * s(0);
    }

    Element inverse(const Element& a) const {
        const Matrix r = representation(a);
        auto s = singular_values(r);
        if (!(s(0) > 0.0) || s(s.size() - 1) < 1e-12 * s(0))
            throw Error(ErrorKind::SingularElement, "element is not invertible");
        return r.fullPivLu().solve(e_);
    }

    Element divide(const Element& num, const Element& den) const { return product(num, inverse(den)); }

    Element power(const Element& a, int m) const {
        if (m < 0) return power(inverse(a), -m);
        Element out = e_;
        for (int i = 0; i < m; ++i) out = product(out, a);
        return out;
    }

    // exp(R(a)) e; R is an injective homomorphism so this is exp(a).
    Element exp(const Element& a) const {
        const Matrix r = representation(a);
        const Matrix er = r.exp();
        return er * e_;
    }

    template <class URNG>
    Element random_element(URNG& rng, double radius = 1.0) const {
        std::uniform_real_distribution<double> d(-radius, radius);
        Element a(n_);
        for (int i = 0; i < n_; ++i) {
            if constexpr (is_complex_v<T>)
                a(i) = T(d(rng), d(rng));
            else
                a(i) = d(rng);
        }
        return a;
    }

    template <class URNG>
    Element random_regular(URNG& rng, double radius = 1.0) const {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Element a = random_element(rng, radius);
            auto s = singular_values(representation(a));
            // Stay well clear of the singular set so inverses are well conditioned.
            if (s(s.size() - 1) > 1e-3 * s(0)) return a;
        }
        throw Error(ErrorKind::NotFound, "no regular element drawn in 1000 attempts");
    }

    // Max |(e_i e_j) e_k - e_i (e_j e_k)| over all basis triples.
    double associativity_defect() const {
        double worst = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) {
                    Element lhs = product(product(basis(i), basis(j)), basis(k));
                    Element rhs = product(basis(i), product(basis(j), basis(k)));
                    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
                }
        return worst;
    }

private:
    Algebra(int n, std::vector<T> cs, Element e) : n_(n), c_(std::move(cs)), e_(std::move(e)) {
        scale_ = 1.0;
        for (const T& v : c_) scale_ = std::max(scale_, std::abs(v));
        reps_.reserve(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) {
            Matrix r(n_, n_);
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) r(j, k) = c(i, k, j);
            reps_.push_back(std::move(r));
        }
    }

    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)) *
                   static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(k);
    }

    void check_len(const Element& a) const {
        if (a.size() != n_) throw Error(ErrorKind::DimensionMismatch, "element length differs from algebra dim");
    }

    static std::string triple(int i, int j, int k) {
        std::ostringstream os;
        os << "(" << i << "," << j << "," << k << ")";
        return os.str();
    }

    void validate() const {
        const double tol = 1e-12 * scale_;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    if (std::abs(c(i, j, k) - c(j, i, k)) > tol)
                        throw Error(ErrorKind::NotCommutative, "c" + triple(i, j, k) + " != c" + triple(j, i, k));
        const double etol = tol * std::max(1.0, static_cast<double>(e_.cwiseAbs().maxCoeff()));
        for (int i = 0; i < n_; ++i) {
            Element d = product(e_, basis(i)) - basis(i);
            for (int k = 0; k < n_; ++k)
                if (std::abs(d(k)) > etol)
                    throw Error(ErrorKind::NoUnit, "e*e_" + std::to_string(i) + " differs from e_" +
                                                       std::to_string(i) + " in component " + std::to_string(k));
        }
        const double atol = 1e-12 * scale_ * scale_;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) {
                    Element d = product(product(basis(i), basis(j)), basis(k)) -
                                product(basis(i), product(basis(j), basis(k)));
                    if (d.cwiseAbs().maxCoeff() > atol)
                        throw Error(ErrorKind::NotAssociative, "basis triple " + triple(i, j, k));
                }
    }

    int n_;
    std::vector<T> c_;
    Element e_;
    double scale_ = 1.0;
    std::vector<Matrix> reps_;
};

using RealAlgebra = Algebra<double>;
using ComplexAlgebra = Algebra<cd>;

namespace detail {
template <class T>
std::vector<T> zeros3(int n) {
    return std::vector<T>(static_cast<std::size_t>(n * n * n), T(0));
}
template <class T>
void set_sym(std::vector<T>& c, int n, int i, int j, std::initializer_list<T> vals) {
    int k = 0;
    for (const T& v : vals) {
        c[static_cast<std::size_t>((i * n + j) * n + k)] = v;
        c[static_cast<std::size_t>((j * n + i) * n + k)] = v;
        ++k;
    }
}
}  // namespace detail

// A^2_1(alpha,beta): unit e1, e2^2 = alpha e1 + beta e2.
template <class T = double>
Algebra<T> build_A2_1(T alpha, T beta) {
    auto c = detail::zeros3<T>(2);
    detail::set_sym<T>(c, 2, 0, 0, {T(1), T(0)});
    detail::set_sym<T>(c, 2, 0, 1, {T(0), T(1)});
    detail::set_sym<T>(c, 2, 1, 1, {alpha, beta});
    Vec<T> e(2);
    e << T(1), T(0);
    return Algebra<T>::from_constants(2, std::move(c), e);
}

// A^2_2(gamma,delta): unit e2, e1^2 = gamma e1 + delta e2.
template <class T = double>
Algebra<T> build_A2_2(T gamma, T delta) {
    auto c = detail::zeros3<T>(2);
    detail::set_sym<T>(c, 2, 0, 0, {gamma, delta});
    detail::set_sym<T>(c, 2, 0, 1, {T(1), T(0)});
    detail::set_sym<T>(c, 2, 1, 1, {T(0), T(1)});
    Vec<T> e(2);
    e << T(0), T(1);
    return Algebra<T>::from_constants(2, std::move(c), e);
}

// A^2_{1,2}: componentwise product, unit (1,1).
template <class T = double>
Algebra<T> build_A2_12() {
    auto c = detail::zeros3<T>(2);
    detail::set_sym<T>(c, 2, 0, 0, {T(1), T(0)});
    detail::set_sym<T>(c, 2, 1, 1, {T(0), T(1)});
    Vec<T> e(2);
    e << T(1), T(1);
    return Algebra<T>::from_constants(2, std::move(c), e);
}

// The complex numbers as A^2_1(-1,0).
template <class T = double>
Algebra<T> build_complex() {
    return build_A2_1<T>(T(-1), T(0));
}

// (p7, p8, p9) of the three-dimensional family, with the signs that make the
// product associative for every (p1..p6).
template <class T>
std::array<T, 3> a31_dependent_params(const std::array<T, 6>& p) {
    const T &p1 = p[0], &p2 = p[1], &p3 = p[2], &p4 = p[3], &p5 = p[4], &p6 = p[5];
    return {p4 * p4 + p2 * p3 - p1 * p4 - p2 * p6, p2 * p5 - p3 * p4, p3 * p3 + p4 * p5 - p1 * p5 - p3 * p6};
}

// The same three expressions with the opposite overall sign. Kept for
// diagnostics only: the resulting table is not associative in general.
template <class T>
std::array<T, 3> a31_dependent_params_flipped(const std::array<T, 6>& p) {
    auto q = a31_dependent_params(p);
    return {-q[0], -q[1], -q[2]};
}

// A^3_1(p1..p6) with unit e1.
template <class T = double>
Algebra<T> build_A3_1(const std::array<T, 6>& p) {
    const auto [p7, p8, p9] = a31_dependent_params(p);
    auto c = detail::zeros3<T>(3);
    detail::set_sym<T>(c, 3, 0, 0, {T(1), T(0), T(0)});
    detail::set_sym<T>(c, 3, 0, 1, {T(0), T(1), T(0)});
    detail::set_sym<T>(c, 3, 0, 2, {T(0), T(0), T(1)});
    detail::set_sym<T>(c, 3, 1, 1, {p7, p[0], p[1]});
    detail::set_sym<T>(c, 3, 1, 2, {p8, p[2], p[3]});
    detail::set_sym<T>(c, 3, 2, 2, {p9, p[4], p[5]});
    Vec<T> e = Vec<T>::Zero(3);
    e(0) = T(1);
    try {
        return Algebra<T>::from_constants(3, std::move(c), e);
    } catch (const Error& err) {
        if (err.kind() == ErrorKind::NotAssociative)
            throw Error(ErrorKind::AssociativityViolation, err.what());
        throw;
    }
}

}  // namespace phia
