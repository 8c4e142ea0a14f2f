#pragma once

#include "phia/algebra.hpp"

#include <json.hpp>

#include <variant>

namespace phia {

using json = nlohmann::json;

namespace detail {
inline json scalar_to_json(double v) { return v; }
inline json scalar_to_json(cd v) { return json::array({v.real(), v.imag()}); }

template <class T>
T scalar_from_json(const json& j) {
    if constexpr (is_complex_v<T>) {
        if (j.is_number()) return T(j.get<double>(), 0.0);
        if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::ParseError, "complex scalar must be [re, im]");
        return T(j[0].get<double>(), j[1].get<double>());
    } else {
        if (!j.is_number()) throw Error(ErrorKind::ParseError, "real scalar must be a number");
        return j.get<double>();
    }
}
}  // namespace detail

template <class T>
json algebra_to_json(const Algebra<T>& a) {
    const int n = a.dim();
    json c = json::array();
    for (int i = 0; i < n; ++i) {
        json ci = json::array();
        for (int j = 0; j < n; ++j) {
            json cij = json::array();
            for (int k = 0; k < n; ++k) cij.push_back(detail::scalar_to_json(a.c(i, j, k)));
            ci.push_back(cij);
        }
        c.push_back(ci);
    }
    json e = json::array();
    for (int i = 0; i < n; ++i) e.push_back(detail::scalar_to_json(a.unit()(i)));
    return json{{"dim", n}, {"scalars", to_string(a.scalars())}, {"constants", c}, {"unit", e}};
}

template <class T>
Algebra<T> algebra_from_json(const json& j) {
    try {
        const int n = j.at("dim").get<int>();
        if (n <= 0) throw Error(ErrorKind::ParseError, "dim must be positive");
        const json& c = j.at("constants");
        if (!c.is_array() || static_cast<int>(c.size()) != n)
            throw Error(ErrorKind::DimensionMismatch, "constants must be an n x n x n nested array");
        std::vector<T> flat;
        flat.reserve(static_cast<std::size_t>(n * n * n));
        for (int i = 0; i < n; ++i) {
            if (!c[i].is_array() || static_cast<int>(c[i].size()) != n)
                throw Error(ErrorKind::DimensionMismatch, "constants must be an n x n x n nested array");
            for (int jj = 0; jj < n; ++jj) {
                if (!c[i][jj].is_array() || static_cast<int>(c[i][jj].size()) != n)
                    throw Error(ErrorKind::DimensionMismatch, "constants must be an n x n x n nested array");
                for (int k = 0; k < n; ++k) flat.push_back(detail::scalar_from_json<T>(c[i][jj][k]));
            }
        }
        const json& u = j.at("unit");
        if (!u.is_array() || static_cast<int>(u.size()) != n)
            throw Error(ErrorKind::DimensionMismatch, "unit must have dim entries");
        Vec<T> e(n);
        for (int i = 0; i < n; ++i) e(i) = detail::scalar_from_json<T>(u[i]);
        return Algebra<T>::from_constants(n, std::move(flat), e);
    } catch (const json::exception& ex) {
        throw Error(ErrorKind::ParseError, ex.what());
    }
}

// Reads the "scalars" tag ("real" when absent).
inline ScalarField scalars_of(const json& j) {
    if (!j.contains("scalars")) return ScalarField::real;
    const auto s = j.at("scalars").get<std::string>();
    if (s == "real") return ScalarField::real;
    if (s == "complex") return ScalarField::complex;
    throw Error(ErrorKind::ParseError, "scalars must be \"real\" or \"complex\"");
}

using AnyAlgebra = std::variant<RealAlgebra, ComplexAlgebra>;

inline AnyAlgebra any_algebra_from_json(const json& j) {
    if (scalars_of(j) == ScalarField::complex) return algebra_from_json<cd>(j);
    return algebra_from_json<double>(j);
}

}  // namespace phia
