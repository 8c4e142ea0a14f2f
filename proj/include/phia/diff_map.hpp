#pragma once

#include "phia/error.hpp"
#include "phia/linalg.hpp"

#include <functional>
#include <utility>

namespace phia {

// A differentiable map R^k -> R^n. The Jacobian is analytic when supplied,
// otherwise central differences with h = 1e-6 (1 + |u|).
struct DiffMap {
    using Eval = std::function<Vecd(const Vecd&)>;
    using Jac = std::function<Matd(const Vecd&)>;

    int k = 0;
    int n = 0;
    Eval eval;
    Jac jac;

    DiffMap() = default;
    DiffMap(int k_, int n_, Eval e, Jac j = {}) : k(k_), n(n_), eval(std::move(e)), jac(std::move(j)) {}

    Vecd operator()(const Vecd& u) const {
        if (u.size() != k) throw Error(ErrorKind::DimensionMismatch, "point has wrong dimension");
        return eval(u);
    }

    bool has_analytic_jacobian() const { return static_cast<bool>(jac); }

    Matd jacobian(const Vecd& u) const {
        if (u.size() != k) throw Error(ErrorKind::DimensionMismatch, "point has wrong dimension");
        return jac ? jac(u) : fd_jacobian(u);
    }

    Matd fd_jacobian(const Vecd& u, double base = 1e-6) const {
        const double h = base * (1.0 + u.norm());
        Matd J(n, k);
        Vecd p = u;
        for (int i = 0; i < k; ++i) {
            p(i) = u(i) + h;
            Vecd fp = eval(p);
            p(i) = u(i) - h;
            Vecd fm = eval(p);
            p(i) = u(i);
            J.col(i) = (fp - fm) / (2.0 * h);
        }
        return J;
    }

    // Directional derivative d(map)_u(xi).
    Vecd differential(const Vecd& u, const Vecd& xi) const { return jacobian(u) * xi; }

    // Same map with the analytic Jacobian dropped (forces finite differences).
    DiffMap without_jacobian() const { return DiffMap(k, n, eval); }
};

using PhiMap = DiffMap;
using VectorFunction = DiffMap;

// u -> M u + b
inline DiffMap linear_map(const Matd& M, const Vecd& b = Vecd()) {
    const Vecd off = b.size() ? b : Vecd::Zero(M.rows());
    return DiffMap(
        static_cast<int>(M.cols()), static_cast<int>(M.rows()), [M, off](const Vecd& u) -> Vecd { return M * u + off; },
        [M](const Vecd&) -> Matd { return M; });
}

inline DiffMap constant_map(int k, const Vecd& c) {
    return DiffMap(
        k, static_cast<int>(c.size()), [c](const Vecd&) -> Vecd { return c; },
        [k, c](const Vecd&) -> Matd { return Matd::Zero(c.size(), k); });
}

inline DiffMap identity_map(int k) { return linear_map(Matd::Identity(k, k)); }

}  // namespace phia
