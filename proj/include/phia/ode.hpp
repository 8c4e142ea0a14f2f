#pragma once

#include "phia/algebra.hpp"
#include "phia/diff_map.hpp"
#include "phia/integral.hpp"
#include "phia/phi_calculus.hpp"

#include <functional>
#include <random>
#include <vector>

namespace phia {

// F(tau, w) on the right of w'_phi = F(tau, w).
using ODERhs = std::function<Vecd(const Vecd& tau, const Vecd& w)>;

// w'_phi = rhs(tau, w), w(tau0) = w0.
struct PhiODE {
    ODERhs rhs;
    PhiMap phi;
    RealAlgebra algebra = build_A2_12();
    Vecd tau0, w0;
};

struct SolutionSamples {
    std::vector<Vecd> taus;
    std::vector<Vecd> ws;
    double max_residual = 0.0;
};

struct ODESolution {
    VectorFunction w;
    SolutionSamples samples;
};

// max over points of |dw - R(F(tau, w)) dphi|_F / (1 + |dphi|_F), dw by
// central differences with step h (1 + |tau|).
inline double ode_residual(const VectorFunction& w, const ODERhs& F, const PhiMap& phi, const RealAlgebra& A,
                           const std::vector<Vecd>& points, double h = 1e-6) {
    double worst = 0.0;
    for (const Vecd& tau : points) {
        const Matd dw = w.fd_jacobian(tau, h);
        const Matd dphi = phi.jacobian(tau);
        const Matd rhs = A.representation(F(tau, w(tau))) * dphi;
        worst = std::max(worst, (dw - rhs).norm() / (1.0 + dphi.norm()));
    }
    return worst;
}

inline SolutionSamples sample_solution(const VectorFunction& w, const ODERhs& F, const PhiMap& phi,
                                       const RealAlgebra& A, const std::vector<Vecd>& grid) {
    SolutionSamples s;
    s.taus = grid;
    for (const Vecd& t : grid) s.ws.push_back(w(t));
    s.max_residual = ode_residual(w, F, phi, A, grid);
    return s;
}

// `count` points drawn uniformly from the box, fixed by `seed`.
inline std::vector<Vecd> sample_grid(const Vecd& lo, const Vecd& hi, int count, std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::vector<Vecd> g;
    for (int i = 0; i < count; ++i) {
        Vecd u(lo.size());
        for (Eigen::Index j = 0; j < lo.size(); ++j) u(j) = lo(j) + (hi(j) - lo(j)) * ud(rng);
        g.push_back(u);
    }
    return g;
}

// w'_phi = K w^2 with H'_phi = K: w = -e / (H + C).
inline ODESolution solve_square_rhs(const VectorFunction& K, const VectorFunction& H, const Vecd& C,
                                    const PhiMap& phi, const RealAlgebra& A, const std::vector<Vecd>& grid) {
    detail::check_pair(K, phi, A);
    detail::check_pair(H, phi, A);
    VectorFunction w(phi.k, A.dim(), [H, C, A](const Vecd& tau) -> Vecd { return -A.inverse(H(tau) + C); });
    ODERhs F = [K, A](const Vecd& tau, const Vecd& wv) -> Vecd { return A.product(K(tau), A.product(wv, wv)); };
    return {w, sample_solution(w, F, phi, A, grid)};
}

// w'_phi = K with phi = K: w = K^2 / 2 + C.
inline ODESolution solve_phi_rhs(const PhiMap& K, const Vecd& C, const RealAlgebra& A,
                                 const std::vector<Vecd>& grid) {
    if (K.n != A.dim()) throw Error(ErrorKind::DimensionMismatch, "K must take values in the algebra");
    VectorFunction w(K.k, A.dim(), [K, C, A](const Vecd& tau) -> Vecd {
        const Vecd k = K(tau);
        return A.product(k, k) / 2.0 + C;
    });
    ODERhs F = [K](const Vecd& tau, const Vecd&) -> Vecd { return K(tau); };
    return {w, sample_solution(w, F, K, A, grid)};
}

// w'_phi = w: w = C exp(phi).
inline ODESolution solve_exponential(const PhiMap& phi, const RealAlgebra& A, const Vecd& C,
                                     const std::vector<Vecd>& grid) {
    if (phi.n != A.dim()) throw Error(ErrorKind::DimensionMismatch, "phi must take values in the algebra");
    VectorFunction w(phi.k, A.dim(), [phi, C, A](const Vecd& tau) -> Vecd { return A.product(C, A.exp(phi(tau))); });
    ODERhs F = [](const Vecd&, const Vecd& wv) -> Vecd { return wv; };
    return {w, sample_solution(w, F, phi, A, grid)};
}

struct SeparableOptions {
    int steps = 32;        // march from tau0 to tau in this many pieces
    int quad_segments = 16;  // Simpson subintervals per increment
    int max_newton = 50;
};

// w'_phi = K(tau) L(w). Marches along the segment tau0 -> tau, solving
//   int_{w_{j-1}}^{w_j} dv / L(v) = int_{tau_{j-1}}^{tau_j} K dphi
// by Newton (Jacobian R(e / L(w))) warm-started at w_{j-1}. Short increments
// keep the left side on the branch reached by continuity.
inline VectorFunction separable_solve(const VectorFunction& K, const VectorFunction& L, const PhiMap& phi,
                                      const RealAlgebra& A, const Vecd& w0, const Vecd& tau0,
                                      SeparableOptions opt = {}) {
    detail::check_pair(K, phi, A);
    if (L.k != A.dim() || L.n != A.dim()) throw Error(ErrorKind::DimensionMismatch, "L must map the algebra to itself");
    const int n = A.dim();
    const VectorFunction inv_L(n, n, [L, A](const Vecd& v) -> Vecd { return A.inverse(L(v)); });
    const PhiMap id = identity_map(n);
    return VectorFunction(phi.k, n, [=](const Vecd& tau) -> Vecd {
        Vecd w = w0;
        Vecd t_prev = tau0;
        for (int j = 1; j <= opt.steps; ++j) {
            const Vecd t = tau0 + (tau - tau0) * (static_cast<double>(j) / opt.steps);
            const Vecd target = line_integral(K, phi, A, segment_path(t_prev, t, opt.quad_segments));
            const Vecd w_prev = w;
            bool done = false;
            for (int it = 0; it < opt.max_newton; ++it) {
                const Vecd g = line_integral(inv_L, id, A, segment_path(w_prev, w, opt.quad_segments)) - target;
                if (!g.allFinite()) break;
                if (g.norm() <= 1e-14 * (1.0 + target.norm())) {
                    done = true;
                    break;
                }
                const Vecd step = A.representation(inv_L(w)).fullPivLu().solve(g);
                w -= step;
                if (step.norm() <= 1e-15 * (1.0 + w.norm())) {
                    done = true;
                    break;
                }
            }
            if (!done || !w.allFinite())
                throw Error(ErrorKind::NewtonDivergence, "no convergence in " + std::to_string(opt.max_newton) +
                                                             " Newton iterations");
            t_prev = t;
        }
        return w;
    });
}

struct PicardResult {
    SolutionSamples samples;  // along the path nodes
    std::vector<double> history;  // sup |w_{m+1} - w_m| per iteration
    int iterations = 0;
};

namespace detail {
// Cumulative integrals of samples y_0..y_N on a uniform grid of step h.
// Even nodes use composite Simpson; odd nodes add the first half of the
// following (or preceding) Simpson panel via its interpolating parabola.
inline std::vector<Vecd> cumulative_simpson(const std::vector<Vecd>& y, double h) {
    const std::size_t N = y.size() - 1;
    std::vector<Vecd> I(y.size(), Vecd::Zero(y[0].size()));
    for (std::size_t j = 2; j <= N; j += 2) I[j] = I[j - 2] + (h / 3.0) * (y[j - 2] + 4.0 * y[j - 1] + y[j]);
    for (std::size_t j = 1; j <= N; j += 2) {
        if (j + 1 <= N)
            I[j] = I[j - 1] + (h / 12.0) * (5.0 * y[j - 1] + 8.0 * y[j] - y[j + 1]);
        else
            I[j] = I[j - 1] + (h / 12.0) * (-y[j - 2] + 8.0 * y[j - 1] + 5.0 * y[j]);
    }
    return I;
}
}  // namespace detail

// w_{m+1}(tau) = w0 + int_{tau0}^{tau} F(w_m) dphi along `path` (which starts
// at tau0), iterated until the sup difference is <= tol.
inline PicardResult picard(const VectorFunction& F, const PhiMap& phi, const RealAlgebra& A, const Vecd& w0,
                           const Path& path, int max_iterations = 100, double tol = 1e-10) {
    const int n = A.dim();
    if (F.k != n || F.n != n) throw Error(ErrorKind::DimensionMismatch, "F must map the algebra to itself");
    if (phi.n != n || phi.k != path.k) throw Error(ErrorKind::DimensionMismatch, "phi does not match path/algebra");
    const int N = path.segments;
    if (N <= 0 || N % 2) throw Error(ErrorKind::DegenerateParameters, "Simpson needs a positive even N");

    // nodes per piece, with dphi(gamma') at each
    struct Node {
        Vecd tau, dphi;
    };
    std::vector<std::vector<Node>> pieces;
    std::vector<double> hs;
    for (const auto& pc : path.pieces) {
        int m = static_cast<int>(std::ceil(N * (pc.t1 - pc.t0) / path.end()));
        m = std::max(2, m + m % 2);
        const double h = (pc.t1 - pc.t0) / m;
        std::vector<Node> nodes;
        for (int i = 0; i <= m; ++i) {
            const double s = pc.t0 + i * h;
            const Vecd u = pc.gamma(s);
            nodes.push_back({u, phi.jacobian(u) * pc.derivative(s)});
        }
        pieces.push_back(std::move(nodes));
        hs.push_back(h);
    }

    PicardResult res;
    std::vector<std::vector<Vecd>> w(pieces.size());
    for (std::size_t p = 0; p < pieces.size(); ++p) w[p].assign(pieces[p].size(), w0);

    for (int it = 1; it <= max_iterations; ++it) {
        double diff = 0.0;
        Vecd start = w0;
        std::vector<std::vector<Vecd>> next(pieces.size());
        for (std::size_t p = 0; p < pieces.size(); ++p) {
            std::vector<Vecd> y;
            for (std::size_t i = 0; i < pieces[p].size(); ++i) y.push_back(A.product(F(w[p][i]), pieces[p][i].dphi));
            const auto I = detail::cumulative_simpson(y, hs[p]);
            for (std::size_t i = 0; i < I.size(); ++i) {
                next[p].push_back(start + I[i]);
                diff = std::max(diff, (next[p][i] - w[p][i]).norm());
            }
            start = next[p].back();
        }
        w = std::move(next);
        res.history.push_back(diff);
        res.iterations = it;
        if (!std::isfinite(diff)) break;
        if (diff <= tol) {
            // residual along the path by fourth-order differences at interior nodes
            double worst = 0.0;
            for (std::size_t p = 0; p < pieces.size(); ++p) {
                const auto& nd = pieces[p];
                const double h = hs[p];
                for (std::size_t i = 2; i + 2 < nd.size(); ++i) {
                    const Vecd dw = (w[p][i - 2] - 8.0 * w[p][i - 1] + 8.0 * w[p][i + 1] - w[p][i + 2]) / (12.0 * h);
                    const Vecd rhs = A.product(F(w[p][i]), nd[i].dphi);
                    worst = std::max(worst, (dw - rhs).norm() / (1.0 + nd[i].dphi.norm()));
                }
                for (std::size_t i = 0; i < nd.size(); ++i) {
                    if (p > 0 && i == 0) continue;  // shared corner node
                    res.samples.taus.push_back(nd[i].tau);
                    res.samples.ws.push_back(w[p][i]);
                }
            }
            res.samples.max_residual = worst;
            return res;
        }
    }
    throw Error(ErrorKind::NoConvergence,
                "Picard iteration did not reach " + std::to_string(tol) + " in " + std::to_string(res.iterations) +
                    " iterations",
                res.history);
}

// max over points of |dR_u(F(u)) - (1, 0, ..., 0)|, dR by central differences.
inline double verify_canonical(const VectorFunction& Rmap, const VectorFunction& F, const std::vector<Vecd>& points) {
    if (Rmap.k != F.k || F.n != F.k) throw Error(ErrorKind::DimensionMismatch, "R and F dimensions disagree");
    double worst = 0.0;
    for (const Vecd& u : points) {
        Vecd target = Vecd::Zero(Rmap.n);
        target(0) = 1.0;
        worst = std::max(worst, (Rmap.fd_jacobian(u) * F(u) - target).norm());
    }
    return worst;
}

}  // namespace phia
