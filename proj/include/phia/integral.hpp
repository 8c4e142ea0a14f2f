#pragma once

#include "phia/algebra.hpp"
#include "phia/diff_map.hpp"
#include "phia/phi_calculus.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace phia {

// One smooth piece gamma: [t0, t1] -> R^k. The derivative falls back to
// central differences.
struct PathPiece {
    double t0 = 0.0, t1 = 1.0;
    std::function<Vecd(double)> gamma;
    std::function<Vecd(double)> dgamma;

    Vecd derivative(double t) const {
        if (dgamma) return dgamma(t);
        const double h = 1e-6 * (1.0 + std::abs(t));
        return (gamma(t + h) - gamma(t - h)) / (2.0 * h);
    }
};

// Piecewise smooth path on [0, end()]; quadrature never straddles a corner.
struct Path {
    int k = 0;
    int segments = 512;
    bool closed = false;
    std::vector<PathPiece> pieces;

    double end() const { return pieces.back().t1; }
    const PathPiece& piece_at(double t) const {
        for (const auto& p : pieces)
            if (t < p.t1) return p;
        return pieces.back();
    }
    Vecd at(double t) const { return piece_at(t).gamma(t); }
    Vecd derivative(double t) const { return piece_at(t).derivative(t); }
    double closure_gap() const { return (pieces.front().gamma(0.0) - pieces.back().gamma(end())).norm(); }
};

inline Path segment_path(const Vecd& u0, const Vecd& u1, int segments = 512) {
    if (u0.size() != u1.size()) throw Error(ErrorKind::DimensionMismatch, "segment endpoints differ in dimension");
    Path p;
    p.k = static_cast<int>(u0.size());
    p.segments = segments;
    const Vecd d = u1 - u0;
    p.pieces.push_back({0.0, 1.0, [u0, d](double t) -> Vecd { return u0 + t * d; }, [d](double) -> Vecd { return d; }});
    return p;
}

// Circle of radius r about `center`, in the plane of coordinates (i, j).
inline Path circle_path(const Vecd& center, double r, int segments = 512, int i = 0, int j = 1) {
    Path p;
    p.k = static_cast<int>(center.size());
    p.segments = segments;
    p.closed = true;
    auto g = [center, r, i, j](double t) -> Vecd {
        Vecd u = center;
        u(i) += r * std::cos(t);
        u(j) += r * std::sin(t);
        return u;
    };
    auto dg = [k = p.k, r, i, j](double t) -> Vecd {
        Vecd d = Vecd::Zero(k);
        d(i) = -r * std::sin(t);
        d(j) = r * std::cos(t);
        return d;
    };
    p.pieces.push_back({0.0, 2.0 * std::numbers::pi, g, dg});
    return p;
}

// Vertices joined by straight pieces, piece m on [m, m+1]. Closed when the
// last vertex repeats the first.
inline Path polygon_path(const std::vector<Vecd>& vertices, int segments = 512) {
    if (vertices.size() < 2) throw Error(ErrorKind::DimensionMismatch, "a polygon needs two vertices");
    Path p;
    p.k = static_cast<int>(vertices.front().size());
    p.segments = segments;
    for (std::size_t m = 0; m + 1 < vertices.size(); ++m) {
        const Vecd a = vertices[m], d = vertices[m + 1] - vertices[m];
        const auto t0 = static_cast<double>(m);
        p.pieces.push_back({t0, t0 + 1.0, [a, d, t0](double t) -> Vecd { return a + (t - t0) * d; },
                            [d](double) -> Vecd { return d; }});
    }
    p.closed = (vertices.front() - vertices.back()).norm() <= 1e-12;
    return p;
}

// f(gamma(s)) . dphi_{gamma(s)}(gamma'(s))
inline Vecd line_integrand(const VectorFunction& f, const PhiMap& phi, const RealAlgebra& A, const PathPiece& piece,
                           double s) {
    const Vecd u = piece.gamma(s);
    return A.product(f(u), phi.jacobian(u) * piece.derivative(s));
}

// Composite Simpson with path.segments subintervals (positive, even),
// shared among the pieces in proportion to their length and rounded up to
// an even count per piece.
inline Vecd line_integral(const VectorFunction& f, const PhiMap& phi, const RealAlgebra& A, const Path& path) {
    detail::check_pair(f, phi, A);
    if (path.k != f.k) throw Error(ErrorKind::DimensionMismatch, "path and f differ in domain dimension");
    const int N = path.segments;
    if (N <= 0 || N % 2) throw Error(ErrorKind::DegenerateParameters, "Simpson needs a positive even N");
    Vecd total = Vecd::Zero(A.dim());
    for (const auto& pc : path.pieces) {
        int m = static_cast<int>(std::ceil(N * (pc.t1 - pc.t0) / path.end()));
        m = std::max(2, m + m % 2);
        const double h = (pc.t1 - pc.t0) / m;
        Vecd sum = line_integrand(f, phi, A, pc, pc.t0) + line_integrand(f, phi, A, pc, pc.t1);
        for (int i = 1; i < m; ++i) sum += (i % 2 ? 4.0 : 2.0) * line_integrand(f, phi, A, pc, pc.t0 + i * h);
        total += sum * (h / 3.0);
    }
    return total;
}

struct LoopReport {
    std::vector<int> ns;
    std::vector<double> magnitudes;
    double final_magnitude = 0.0;
    double floor = 0.0;  // round-off level below which magnitudes carry no rate information
    double order = std::numeric_limits<double>::infinity();
};

// Integral magnitudes over the N ladder. The observed order is the smallest
// rate over consecutive rungs that are both above the round-off floor;
// +inf when no such pair exists (converged to round-off inside the ladder).
inline LoopReport closed_loop_check(const VectorFunction& f, const PhiMap& phi, const RealAlgebra& A, Path path,
                                    std::vector<int> ladder = {64, 128, 256, 512}) {
    if (!path.closed || path.closure_gap() > 1e-12) throw Error(ErrorKind::DegenerateParameters, "path is not closed");
    LoopReport rep;
    rep.ns = ladder;
    double scale = 0.0;
    for (const auto& pc : path.pieces)
        for (int i = 0; i <= 16; ++i) {
            const double s = pc.t0 + (pc.t1 - pc.t0) * i / 16.0;
            scale = std::max(scale, line_integrand(f, phi, A, pc, s).norm());
        }
    rep.floor = 1e-13 * std::max(1.0, scale * path.end());
    for (int N : ladder) {
        path.segments = N;
        rep.magnitudes.push_back(line_integral(f, phi, A, path).norm());
    }
    rep.final_magnitude = rep.magnitudes.back();
    for (std::size_t i = 0; i + 1 < rep.magnitudes.size(); ++i) {
        if (rep.magnitudes[i] <= rep.floor || rep.magnitudes[i + 1] <= rep.floor) continue;
        const double ratio = rep.magnitudes[i] / rep.magnitudes[i + 1];
        const double steps = std::log2(static_cast<double>(ladder[i + 1]) / ladder[i]);
        rep.order = std::min(rep.order, std::log2(ratio) / steps);
    }
    return rep;
}

// G_q(u)_j = sum_{m,l} f_m(u) phi_{l,u_j}(u) c_{lmq}, q = 0..n-1.
inline std::vector<VectorFunction> conservative_fields(const VectorFunction& f, const PhiMap& phi,
                                                       const RealAlgebra& A) {
    detail::check_pair(f, phi, A);
    std::vector<VectorFunction> out;
    const int n = A.dim(), k = f.k;
    for (int q = 0; q < n; ++q) {
        out.emplace_back(k, k, [f, phi, A, q, n, k](const Vecd& u) -> Vecd {
            const Vecd fu = f(u);
            const Matd J = phi.jacobian(u);
            Vecd g = Vecd::Zero(k);
            for (int j = 0; j < k; ++j)
                for (int m = 0; m < n; ++m)
                    for (int l = 0; l < n; ++l) g(j) += fu(m) * J(l, j) * A.c(l, m, q);
            return g;
        });
    }
    return out;
}

// F(u) = integral of f dphi along the straight segment u0 -> u. No analytic
// Jacobian is attached, so derivatives of F are genuine finite differences.
inline VectorFunction antiderivative(const VectorFunction& f, const PhiMap& phi, const RealAlgebra& A,
                                     const Vecd& u0, int segments = 512) {
    detail::check_pair(f, phi, A);
    return VectorFunction(f.k, A.dim(), [f, phi, A, u0, segments](const Vecd& u) -> Vecd {
        return line_integral(f, phi, A, segment_path(u0, u, segments));
    });
}

}  // namespace phia
