#pragma once

#include "phia/algebra.hpp"
#include "phia/diff_map.hpp"
#include "phia/phi_calculus.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace phia {

struct CatalogPhi {
    std::string id;
    std::string formula;
    PhiMap phi;
    Vecd lo, hi;  // sampling box avoiding singularities of phi
};

namespace detail {
inline Vecd vec(std::initializer_list<double> v) {
    Vecd r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) r(i++) = x;
    return r;
}

inline Matd mat(int rows, int cols, std::initializer_list<double> v) {
    Matd m(rows, cols);
    auto it = v.begin();
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = *it++;
    return m;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw Error(ErrorKind::ParseError, "not a number: '" + tok + "'");
        }
    }
    return out;
}
}  // namespace detail

inline std::vector<CatalogPhi> phi_catalog() {
    using detail::mat;
    using detail::vec;
    std::vector<CatalogPhi> c;
    const Vecd lo2 = vec({-2, -2}), hi2 = vec({2, 2});
    c.push_back({"id2", "(x, y)", identity_map(2), lo2, hi2});
    c.push_back({"swap", "(y, x)", linear_map(mat(2, 2, {0, 1, 1, 0})), lo2, hi2});
    c.push_back({"y0", "(y, 0)", linear_map(mat(2, 2, {0, 1, 0, 0})), lo2, hi2});
    c.push_back({"y_xy", "(y, x + y)", linear_map(mat(2, 2, {0, 1, 1, 1})), lo2, hi2});
    c.push_back({"xz_y", "(x + z, y)", linear_map(mat(2, 3, {1, 0, 1, 0, 1, 0})), vec({-2, -2, -2}),
                 vec({2, 2, 2})});
    c.push_back({"nonlin3", "(x^2 + z, 1/y)",
                 PhiMap(
                     3, 2, [](const Vecd& u) -> Vecd { return vec({u(0) * u(0) + u(2), 1.0 / u(1)}); },
                     [](const Vecd& u) -> Matd {
                         return mat(2, 3, {2 * u(0), 0, 1, 0, -1.0 / (u(1) * u(1)), 0});
                     }),
                 vec({-1.5, 0.5, -1.5}), vec({1.5, 2.0, 1.5})});
    c.push_back({"xy0", "(x, y, 0)", linear_map(mat(3, 2, {1, 0, 0, 1, 0, 0})), lo2, hi2});
    c.push_back({"x0y", "(x, 0, y)", linear_map(mat(3, 2, {1, 0, 0, 0, 0, 1})), lo2, hi2});
    c.push_back({"0xy", "(0, x, y)", linear_map(mat(3, 2, {0, 0, 1, 0, 0, 1})), lo2, hi2});
    c.push_back({"sq", "(x^2 - y^2, 2xy)",
                 PhiMap(
                     2, 2, [](const Vecd& u) -> Vecd { return vec({u(0) * u(0) - u(1) * u(1), 2 * u(0) * u(1)}); },
                     [](const Vecd& u) -> Matd { return mat(2, 2, {2 * u(0), -2 * u(1), 2 * u(1), 2 * u(0)}); }),
                 lo2, hi2});
    c.push_back({"half_sq", "(x^2/2 - y^2/2, xy)",
                 PhiMap(
                     2, 2, [](const Vecd& u) -> Vecd { return vec({(u(0) * u(0) - u(1) * u(1)) / 2, u(0) * u(1)}); },
                     [](const Vecd& u) -> Matd { return mat(2, 2, {u(0), -u(1), u(1), u(0)}); }),
                 lo2, hi2});
    return c;
}

inline CatalogPhi catalog_phi(const std::string& id) {
    for (auto& e : phi_catalog())
        if (e.id == id) return e;
    throw Error(ErrorKind::NotFound, "unknown phi id '" + id + "'");
}

// "C", "A2_1:a,b", "A2_2:g,d", "A2_12", "A3_1:p1,...,p6"
inline RealAlgebra catalog_algebra(const std::string& id) {
    const auto colon = id.find(':');
    const std::string head = id.substr(0, colon);
    const std::vector<double> p =
        colon == std::string::npos ? std::vector<double>{} : detail::parse_list(id.substr(colon + 1));
    auto need = [&](std::size_t n) {
        if (p.size() != n)
            throw Error(ErrorKind::ParseError, "algebra '" + head + "' needs " + std::to_string(n) + " parameters");
    };
    if (head == "C") {
        need(0);
        return build_complex<double>();
    }
    if (head == "A2_1") {
        need(2);
        return build_A2_1(p[0], p[1]);
    }
    if (head == "A2_2") {
        need(2);
        return build_A2_2(p[0], p[1]);
    }
    if (head == "A2_12") {
        need(0);
        return build_A2_12();
    }
    if (head == "A3_1") {
        need(6);
        return build_A3_1<double>({p[0], p[1], p[2], p[3], p[4], p[5]});
    }
    throw Error(ErrorKind::NotFound, "unknown algebra id '" + id + "'");
}

// "e", "phi", "phi^2", "phi^3", "e/phi"
inline VectorFunction catalog_function(const std::string& id, const PhiMap& phi, const RealAlgebra& A) {
    const Vecd e = A.unit(), z = A.zero();
    if (id == "e") return constant_map(phi.k, e);
    if (id == "phi") return phi_polynomial({z, e}, phi, A);
    if (id == "phi^2") return phi_polynomial({z, z, e}, phi, A);
    if (id == "phi^3") return phi_polynomial({z, z, z, e}, phi, A);
    if (id == "e/phi") return phi_rational(constant_map(phi.k, e), phi, A);
    throw Error(ErrorKind::NotFound, "unknown function id '" + id + "'");
}

inline const std::vector<std::string>& function_ids() {
    static const std::vector<std::string> ids = {"e", "phi", "phi^2", "phi^3", "e/phi"};
    return ids;
}

struct CatalogPair {
    std::string phi_id;
    std::string algebra_id;
};

// Every worked (phi, A) combination, with fixed parameters for the families.
inline std::vector<CatalogPair> catalog_pairs() {
    return {{"id2", "C"},
            {"swap", "C"},
            {"y0", "C"},
            {"y_xy", "C"},
            {"xz_y", "C"},
            {"nonlin3", "C"},
            {"xy0", "A3_1:-1,-1,-1,-1,-1,-1"},
            {"x0y", "A3_1:-1,-1,-1,-1,-1,-1"},
            {"0xy", "A3_1:-1,-1,-1,-1,-1,-1"},
            {"xy0", "A3_1:0.3,-0.7,1.1,0.4,-0.2,0.9"},
            {"0xy", "A3_1:0,0,0,0,0,0"},
            {"sq", "A2_1:-0.5,1.5"},
            {"half_sq", "A2_12"},
            {"id2", "A2_2:0.7,-1.3"},
            {"id2", "A2_12"}};
}

inline Vecd sample_in_box(std::mt19937_64& rng, const Vecd& lo, const Vecd& hi) {
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    Vecd u(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) u(i) = lo(i) + (hi(i) - lo(i)) * ud(rng);
    return u;
}

}  // namespace phia
