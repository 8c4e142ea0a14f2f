#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <type_traits>

namespace phia {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Matd = Mat<double>;
using Vecd = Vec<double>;
using cd = std::complex<double>;
using Matc = Mat<cd>;
using Vecc = Vec<cd>;

template <class T>
struct is_complex : std::false_type {};
template <class R>
struct is_complex<std::complex<R>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class Derived>
Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, 1> singular_values(
    const Eigen::MatrixBase<Derived>& m) {
    using S = typename Derived::Scalar;
    Eigen::JacobiSVD<Mat<S>> svd(m.eval());
    return svd.singularValues();
}

// Number of singular values above rel * sigma_max.
template <class Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& m, double rel = 1e-10) {
    if (m.size() == 0) return 0;
    auto s = singular_values(m);
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel * s(0)) ++r;
    return r;
}

// Orthonormal basis (columns) of the right null space, using a relative
// singular-value cut. Columns of a zero matrix span everything.
template <class Derived>
Mat<typename Derived::Scalar> null_space(const Eigen::MatrixBase<Derived>& m, double rel = 1e-10) {
    using S = typename Derived::Scalar;
    const Eigen::Index cols = m.cols();
    Mat<S> a = m.eval();
    if (a.rows() < cols) {
        Mat<S> pad = Mat<S>::Zero(cols, cols);
        pad.topRows(a.rows()) = a;
        a = pad;
    }
    Eigen::JacobiSVD<Mat<S>> svd(a, Eigen::ComputeFullV);
    auto s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (smax > 0 && s(i) > rel * smax) ++r;
    return svd.matrixV().rightCols(cols - r);
}

// Minimum-norm least-squares solution.
template <class DA, class DB>
Mat<typename DA::Scalar> lstsq(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    using S = typename DA::Scalar;
    Eigen::CompleteOrthogonalDecomposition<Mat<S>> cod(a.eval());
    cod.setThreshold(1e-13);
    return cod.solve(b.eval());
}

inline double sq(double x) { return x * x; }

}  // namespace phia
