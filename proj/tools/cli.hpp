#pragma once

#include "phia/algebra_json.hpp"
#include "phia/catalog.hpp"
#include "phia/cre.hpp"
#include "phia/integral.hpp"
#include "phia/ode.hpp"
#include "phia/pde.hpp"
#include "phia/quadratic.hpp"
#include "worked_examples.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace phia::cli {

using json = nlohmann::json;

// Bad flag values; always names the flag.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Report {
    json body = json::object();
    bool pass = true;
};

namespace util {

inline std::vector<double> numbers(const std::string& flag, const std::string& text, std::size_t count = 0) {
    std::vector<double> v;
    try {
        v = detail::parse_list(text);
    } catch (const Error& e) {
        throw UsageError(flag + ": " + e.what());
    }
    if (count && v.size() != count)
        throw UsageError(flag + ": expected " + std::to_string(count) + " comma-separated values, got " +
                         std::to_string(v.size()));
    if (v.empty()) throw UsageError(flag + ": expected at least one value");
    return v;
}

inline Vecd to_vec(const std::vector<double>& v) { return Eigen::Map<const Vecd>(v.data(), static_cast<Eigen::Index>(v.size())); }

inline json to_json(const Vecd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline json to_json(const Matd& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

inline json read_file(const std::string& flag, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError(flag + ": cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError(flag + ": '" + path + "' is not valid JSON (" + e.what() + ")");
    }
}

// A catalog id ("C", "A3_1:p1,...,p6", ...) or a path to a JSON constants file.
inline RealAlgebra algebra(const std::string& flag, const std::string& spec) {
    const bool is_file = spec.size() > 5 && spec.substr(spec.size() - 5) == ".json";
    try {
        if (is_file) return algebra_from_json<double>(read_file(flag, spec));
        return catalog_algebra(spec);
    } catch (const Error& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

inline CatalogPhi phi(const std::string& flag, const std::string& id) {
    try {
        return catalog_phi(id);
    } catch (const Error& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

inline VectorFunction function(const std::string& flag, const std::string& id, const PhiMap& p, const RealAlgebra& A) {
    try {
        return catalog_function(id, p, A);
    } catch (const Error& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

// circle:r=R[@c1,c2,...] | polygon:x,y;x,y;... | segment:x,y;x,y
inline Path path(const std::string& flag, const std::string& spec, int k, int N, bool close) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError(flag + ": expected <kind>:<data>");
    const std::string kind = spec.substr(0, colon), data = spec.substr(colon + 1);
    auto point = [&](const std::string& s) {
        const Vecd p = to_vec(numbers(flag, s));
        if (p.size() != k) throw UsageError(flag + ": points need " + std::to_string(k) + " coordinates");
        return p;
    };
    if (kind == "circle") {
        const auto at = data.find('@');
        std::string rs = data.substr(0, at);
        if (rs.rfind("r=", 0) == 0) rs = rs.substr(2);
        const double r = numbers(flag, rs, 1)[0];
        if (!(r > 0)) throw UsageError(flag + ": radius must be positive");
        const Vecd c = at == std::string::npos ? Vecd::Zero(k) : point(data.substr(at + 1));
        if (k < 2) throw UsageError(flag + ": circles need at least two coordinates");
        return circle_path(c, r, N);
    }
    if (kind == "polygon" || kind == "segment") {
        std::vector<Vecd> pts;
        for (const auto& s : split(data, ';')) pts.push_back(point(s));
        if (pts.size() < 2) throw UsageError(flag + ": need at least two points");
        if (kind == "segment") {
            if (pts.size() != 2) throw UsageError(flag + ": a segment has exactly two points");
            return segment_path(pts[0], pts[1], N);
        }
        if (close && (pts.front() - pts.back()).norm() != 0.0) pts.push_back(pts.front());
        return polygon_path(pts, N);
    }
    throw UsageError(flag + ": unknown path kind '" + kind + "'");
}

inline int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::ParseError:
        case ErrorKind::NotFound:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::DegenerateParameters:
        case ErrorKind::ConditionViolated:
        case ErrorKind::DeltaZeroInconsistent:
        case ErrorKind::B1Zero: return 2;
        default: return 1;
    }
}

inline void print_human(std::ostream& out, const json& j) {
    for (const auto& [key, value] : j.items()) {
        out << key << ": ";
        if (value.is_string())
            out << value.get<std::string>();
        else
            out << value.dump();
        out << "\n";
    }
}

}  // namespace util

// ---------------------------------------------------------------------------

inline Report algebra_verify(const std::string& file, const std::string& id, int samples, std::uint64_t seed) {
    Report rep;
    json j;
    if (!file.empty()) {
        j = util::read_file("--file", file);
    } else {
        try {
            j = algebra_to_json(catalog_algebra(id));
        } catch (const Error& e) {
            throw UsageError(std::string("--id: ") + e.what());
        }
    }
    std::optional<AnyAlgebra> any;
    try {
        any.emplace(any_algebra_from_json(j));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotCommutative || e.kind() == ErrorKind::NotAssociative ||
            e.kind() == ErrorKind::NoUnit) {
            rep.pass = false;
            rep.body["outputs"] = {{"valid", false}, {"violation", to_string(e.kind())}, {"detail", e.what()}};
            return rep;
        }
        throw UsageError(std::string(file.empty() ? "--id" : "--file") + ": " + e.what());
    }
    std::visit(
        [&](const auto& A) {
            std::mt19937_64 rng(seed);
            double hom = 0.0, comm = 0.0, unit = 0.0;
            for (int t = 0; t < samples; ++t) {
                const auto u = A.random_element(rng), v = A.random_element(rng);
                const auto uv = A.product(u, v);
                hom = std::max(hom, (A.representation(uv) - A.representation(u) * A.representation(v))
                                        .cwiseAbs()
                                        .maxCoeff());
                comm = std::max(comm, (uv - A.product(v, u)).cwiseAbs().maxCoeff());
                unit = std::max(unit, (A.product(A.unit(), u) - u).cwiseAbs().maxCoeff());
            }
            const double tol = 1e-12 * A.scale() * A.scale();
            rep.body["outputs"] = {{"valid", true}, {"dim", A.dim()}, {"scalars", to_string(A.scalars())}};
            rep.body["residuals"] = {{"associativity", A.associativity_defect()},
                                     {"commutativity", comm},
                                     {"unit", unit},
                                     {"representation_homomorphism", hom}};
            rep.body["tolerance"] = tol;
            rep.pass = A.associativity_defect() <= tol && comm <= tol && unit <= tol && hom <= tol;
        },
        *any);
    return rep;
}

inline Report cre_emit(const std::string& alg, const std::string& phi_id, const std::string& at, std::uint64_t seed) {
    const RealAlgebra A = util::algebra("--algebra", alg);
    const CatalogPhi entry = util::phi("--phi", phi_id);
    if (entry.phi.n != A.dim())
        throw UsageError("--phi: '" + phi_id + "' maps into R^" + std::to_string(entry.phi.n) + ", algebra has dim " +
                         std::to_string(A.dim()));
    Vecd u;
    if (!at.empty()) {
        u = util::to_vec(util::numbers("--at", at));
        if (u.size() != entry.phi.k) throw UsageError("--at: needs " + std::to_string(entry.phi.k) + " coordinates");
    }
    const CRESystem s = emit_cre(A, entry.phi);
    if (!s.constant && u.size() == 0) u = 0.5 * (entry.lo + entry.hi);
    Report rep;
    rep.body["outputs"] = cre_to_json(s, u);
    // every polynomial in phi must satisfy the emitted system
    std::mt19937_64 rng(seed);
    const auto f = catalog_function("phi^2", entry.phi, A);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) worst = std::max(worst, s.residual(f, sample_in_box(rng, entry.lo, entry.hi)));
    rep.body["residuals"] = {{"phi_squared", worst}};
    rep.body["tolerance"] = 1e-8;
    rep.pass = worst <= 1e-8;
    return rep;
}

inline Report cre_recover(const std::string& file, const std::string& hint) {
    TwoPDESystem sys;
    try {
        sys = two_pde_from_json(util::read_file("--file", file));
    } catch (const Error& e) {
        throw UsageError(std::string("--file: ") + e.what());
    }
    std::optional<PlanarCase> h;
    if (hint == "A2_1") h = PlanarCase::A2_1;
    else if (hint == "A2_2") h = PlanarCase::A2_2;
    else if (hint == "A2_12") h = PlanarCase::A2_12;
    else if (!hint.empty()) throw UsageError("--case: expected A2_1, A2_2 or A2_12");
    Report rep;
    const Recovery r = recover_phi_algebra(sys, h);
    auto pot = [](const Poly2& p) {
        return json{{"const", p.c}, {"x", p.x}, {"y", p.y}, {"xx", p.xx}, {"xy", p.xy}, {"yy", p.yy}};
    };
    rep.pass = detail::verify_recovery(sys, r);
    rep.body["outputs"] = {{"case", to_string(r.planar_case)},
                           {"params", r.params},
                           {"potentials", {pot(r.potentials[0]), pot(r.potentials[1])}},
                           {"algebra", algebra_to_json(r.algebra)},
                           {"re_emission_equivalent", rep.pass}};
    return rep;
}

inline Report algebrize_cmd(const std::string& vf, int which, const std::string& box, double step, double tol) {
    const auto c = util::numbers("--vf", vf, 12);
    QuadraticVF f;
    for (int i = 0; i < 6; ++i) {
        f.a[i] = c[i];
        f.b[i] = c[6 + i];
    }
    AlgebrizeOptions o;
    if (which) o.cases = {static_cast<QuadCase>(which)};
    if (!box.empty()) {
        const auto b = util::numbers("--box", box, 2);
        if (!(b[0] < b[1])) throw UsageError("--box: need lo < hi");
        o.lo = b[0];
        o.hi = b[1];
    }
    if (!(step > 0)) throw UsageError("--step: must be positive");
    o.step = step;
    o.tol = tol;
    const auto ws = algebrize(f, o);
    Report rep;
    json out = json::array();
    for (const auto& w : ws)
        out.push_back({{"case", static_cast<int>(w.kind)},
                       {"algebra", to_string(w.kind)},
                       {"params", w.params},
                       {"algebra_params", w.algebra_params},
                       {"v", w.v},
                       {"cre_residual", w.residual},
                       {"det_M4", w.det_M4},
                       {"orthogonality", w.orthogonality}});
    rep.body["outputs"] = {{"algebrizable", !ws.empty()}, {"witnesses", out}};
    rep.body["tolerance"] = tol;
    rep.pass = !ws.empty();
    return rep;
}

inline Report billiards_cmd(const std::string& params, double tol) {
    const auto p = util::numbers("--params", params, 3);
    Report rep;
    const auto r = verify_billiards_algebrization(p[0], p[1], p[2]);
    rep.body["outputs"] = {{"alpha", r.alpha}, {"beta", r.beta}, {"v", r.v}, {"det_M4", r.det_M4}};
    rep.body["residuals"] = {{"field_minus_b_phi_squared", r.residual}, {"orthogonality", r.orthogonality}};
    rep.body["tolerance"] = tol;
    rep.pass = r.residual <= tol;
    return rep;
}

inline Report integrate_cmd(const std::string& loop, const std::string& open, const std::string& f_id,
                            const std::string& phi_id, const std::string& alg, int N, double tol) {
    if (loop.empty() == open.empty()) throw UsageError("--loop/--path: give exactly one");
    if (N <= 0 || N % 2) throw UsageError("--N: must be a positive even number");
    const RealAlgebra A = util::algebra("--algebra", alg);
    const CatalogPhi entry = util::phi("--phi", phi_id);
    if (entry.phi.n != A.dim()) throw UsageError("--phi: codomain does not match the algebra dimension");
    const VectorFunction f = util::function("--f", f_id, entry.phi, A);
    Report rep;
    if (!open.empty()) {
        const Path p = util::path("--path", open, entry.phi.k, N, false);
        rep.body["outputs"] = {{"integral", util::to_json(line_integral(f, entry.phi, A, p))}, {"N", N}};
        return rep;
    }
    if (N % 16) throw UsageError("--N: loops use the ladder N/8..N, so N must be a multiple of 16");
    const Path p = util::path("--loop", loop, entry.phi.k, N, true);
    const LoopReport lr = closed_loop_check(f, entry.phi, A, p, {N / 8, N / 4, N / 2, N});
    rep.body["outputs"] = {{"integral", util::to_json(line_integral(f, entry.phi, A, p))},
                           {"N", N},
                           {"ladder", lr.ns},
                           {"magnitudes", lr.magnitudes},
                           {"observed_order", std::isfinite(lr.order) ? json(lr.order) : json("inf")},
                           {"roundoff_floor", lr.floor}};
    rep.body["residuals"] = {{"loop_magnitude", lr.final_magnitude}};
    rep.body["tolerance"] = tol;
    rep.pass = lr.final_magnitude <= tol;
    return rep;
}

inline Report ode_cmd(const std::string& family, const std::string& alg, const std::string& phi_id,
                      const std::string& Cs, const std::string& grid, int N, std::uint64_t seed) {
    const RealAlgebra A = util::algebra("--algebra", alg);
    const CatalogPhi entry = util::phi("--phi", phi_id);
    const PhiMap& phi = entry.phi;
    if (phi.n != A.dim()) throw UsageError("--phi: codomain does not match the algebra dimension");
    const int n = A.dim(), k = phi.k;
    Vecd C = family == "exp" || family == "picard" ? A.unit() : A.zero();
    if (family == "square") C = 3.0 * A.unit();
    if (!Cs.empty()) C = util::to_vec(util::numbers("--C", Cs, static_cast<std::size_t>(n)));
    const auto g = util::numbers("--grid", grid, 3);
    if (!(g[0] < g[1]) || g[2] < 1) throw UsageError("--grid: expected lo,hi,count with lo < hi, count >= 1");
    const Vecd lo = Vecd::Constant(k, g[0]), hi = Vecd::Constant(k, g[1]);
    const auto pts = sample_grid(lo, hi, static_cast<int>(g[2]), seed);

    Report rep;
    auto samples_json = [](const SolutionSamples& s) {
        json taus = json::array(), ws = json::array();
        for (std::size_t i = 0; i < s.taus.size(); ++i) {
            taus.push_back(util::to_json(s.taus[i]));
            ws.push_back(util::to_json(s.ws[i]));
        }
        return json{{"tau", taus}, {"w", ws}};
    };
    rep.body["inputs_resolved"] = {{"C", util::to_json(C)}};
    if (family == "picard") {
        // w' = w from w(lo) = C along the diagonal to hi
        const VectorFunction F = identity_map(n);
        if (N <= 0 || N % 2) throw UsageError("--N: must be a positive even number");
        Path p = segment_path(lo, hi, N);
        const PicardResult r = picard(F, phi, A, C, p);
        double err = 0.0;
        const Vecd phi0 = phi(lo);
        for (std::size_t i = 0; i < r.samples.taus.size(); ++i)
            err = std::max(err, (r.samples.ws[i] - A.product(C, A.exp(phi(r.samples.taus[i]) - phi0))).norm());
        rep.body["outputs"] = {{"samples", samples_json(r.samples)}, {"iterations", r.iterations}};
        rep.body["residuals"] = {{"ode", r.samples.max_residual}, {"closed_form_gap", err}};
        rep.body["tolerance"] = 1e-8;
        rep.pass = err <= 1e-8;
        return rep;
    }
    ODESolution sol;
    if (family == "square") {
        // w' = K w^2 with K = phi, so H = phi^2 / 2
        const VectorFunction H(k, n, [phi, A](const Vecd& t) -> Vecd {
            const Vecd v = phi(t);
            return A.product(v, v) / 2.0;
        });
        sol = solve_square_rhs(phi, H, C, phi, A, pts);
    } else if (family == "phi-rhs") {
        sol = solve_phi_rhs(phi, C, A, pts);
    } else if (family == "exp") {
        sol = solve_exponential(phi, A, C, pts);
    } else {
        throw UsageError("--family: expected square, phi-rhs, exp or picard");
    }
    rep.body["outputs"] = {{"samples", samples_json(sol.samples)}};
    rep.body["residuals"] = {{"ode", sol.samples.max_residual}};
    rep.body["tolerance"] = 1e-6;
    rep.pass = sol.samples.max_residual <= 1e-6;
    return rep;
}

inline json residual_json(const ResidualReport& r) {
    return {{"absolute", r.absolute}, {"relative", r.relative}, {"points", r.points}};
}

inline Report pde_first_order(const std::string& coeffs, double alpha, double beta, const std::string& f_id) {
    const auto c = util::numbers("--coeffs", coeffs, 4);
    const FirstOrderPDE q{c[0], c[1], c[2], c[3]};
    const PhiMap phi = first_order_phi(q, alpha, beta);
    const RealAlgebra A = build_A2_1(alpha, beta);
    const VectorFunction f = util::function("--f", f_id, phi, A);
    const auto op = first_order_operator(q.a, q.b, q.c, q.d);
    const auto pts = residual_points(Vecd::Constant(2, -1.0), Vecd::Constant(2, 1.0));
    Report rep;
    const auto r = pde_residual(f, op, pts);
    rep.body["solution_params"] = {{"phi", util::to_json(phi.jacobian(Vecd::Zero(2)))},
                                   {"algebra", "A2_1"},
                                   {"alpha", alpha},
                                   {"beta", beta},
                                   {"function", f_id}};
    rep.body["residual"] = residual_json(r);
    rep.body["oracle_checks"] = {
        {"printed_phi_residual", pde_residual(first_order_phi_printed(q, alpha, beta), op, pts).relative},
        {"phi_residual", pde_residual(phi, op, pts).relative}};
    rep.body["tolerance"] = 1e-6;
    rep.pass = r.relative <= 1e-6;
    return rep;
}

inline Report pde_system451(const std::string& as, const std::string& bs, const std::string& fam,
                            const std::string& cs) {
    const auto a = util::numbers("--a", as, 2), b = util::numbers("--b", bs, 2), c = util::numbers("--c", cs, 2);
    Family451 f;
    if (fam == "trig") f = Family451::trig;
    else if (fam == "hyperbolic") f = Family451::hyperbolic;
    else throw UsageError("--family: expected trig or hyperbolic");
    const auto r = system_451_solutions(a[0], a[1], b[0], b[1], f, c[0], c[1]);
    Report rep;
    rep.body["solution_params"] = {{"a", a}, {"b", b}, {"c", c}, {"family", fam}};
    rep.body["residual"] = residual_json(r.residual);
    rep.body["oracle_checks"] = json::object();
    rep.body["tolerance"] = 1e-6;
    rep.pass = r.residual.relative <= 1e-6;
    return rep;
}

inline Report pde_second_order(const std::string& coeffs, const std::string& ps, double alpha, double beta) {
    const auto c = util::numbers("--coeffs", coeffs, 5), p = util::numbers("--p", ps, 2);
    const SecondOrderPDE q{c[0], c[1], c[2], c[3], c[4], p[0], p[1]};
    const auto r = second_order_solution(q, alpha, beta);
    Report rep;
    const double chi = q.A * r.a * r.a + 2 * q.B * r.a * r.b + q.C * r.b * r.b + q.D * r.a + q.E * r.b;
    rep.body["solution_params"] = {
        {"branch", r.branch}, {"Delta", r.Delta}, {"a", r.a}, {"b", r.b}, {"amplitude", r.amplitude}};
    rep.body["residual"] = residual_json(r.residual);
    rep.body["oracle_checks"] = {{"characteristic_polynomial", chi}};
    rep.body["tolerance"] = 1e-4;
    rep.body["flagged"] = r.residual.relative > 1e-4;
    rep.pass = r.residual.relative <= 1e-4;
    return rep;
}

inline Report pde_heat(double alpha, const std::string& ps, double amplitude) {
    const auto pv = util::numbers("--p", ps, 6);
    std::array<double, 6> p;
    std::copy(pv.begin(), pv.end(), p.begin());
    const auto r = heat_solution({alpha, p, amplitude});
    Report rep;
    rep.body["solution_params"] = {
        {"b", r.b}, {"Delta", r.Delta}, {"closed_form", r.closed_form}, {"amplitude", amplitude}};
    rep.body["residual"] = residual_json(r.residual);
    json checks = {{"linear_conditions", r.bij_residual}, {"diagnostic", r.diagnostic}};
    if (r.closed_form) checks["printed_b_linear_conditions"] = heat_bij_residual(alpha, p, heat_b_printed(alpha, p));
    rep.body["oracle_checks"] = checks;
    rep.body["tolerance"] = 1e-4;
    rep.body["flagged"] = r.residual.relative > 1e-4;
    rep.pass = r.residual.relative <= 1e-4 && r.bij_residual <= 1e-10;
    return rep;
}

inline Report paper_examples_cmd() {
    Report rep;
    json rows = json::array();
    for (const auto& r : run_worked_examples()) {
        json row = {{"name", r.name}, {"value", r.value}, {"tol", r.tol}, {"pass", r.pass}};
        if (!r.error.empty()) row["error"] = r.error;
        rows.push_back(row);
        rep.pass = rep.pass && r.pass;
    }
    rep.body["outputs"] = {{"examples", rows}};
    return rep;
}

inline void print_examples_table(std::ostream& out, const json& rows) {
    for (const auto& r : rows) {
        out << (r["pass"].get<bool>() ? "PASS  " : "FAIL  ") << std::left << std::setw(68)
            << r["name"].get<std::string>() << std::right << std::setw(12) << std::setprecision(3)
            << std::scientific << r["value"].get<double>() << "  tol " << r["tol"].get<double>()
            << std::defaultfloat;
        if (r.contains("error")) out << "  (" << r["error"].get<std::string>() << ")";
        out << "\n";
    }
}

// ---------------------------------------------------------------------------

inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"phiA-calculus: algebras, phiA-derivatives, CRE systems, line integrals, ODEs and PDE solutions"};
    app.name("phia");
    app.require_subcommand(1);
    app.fallthrough();
    bool as_json = false;
    std::uint64_t seed = 0;
    app.add_flag("--json", as_json, "Emit a JSON report");
    app.add_option("--seed", seed, "RNG seed for sampled checks")->default_val(0);

    std::function<Report()> action;
    std::string command;

    auto* alg = app.add_subcommand("algebra", "Algebra utilities");
    alg->require_subcommand(1);
    auto* verify = alg->add_subcommand("verify", "Check the algebra axioms of a constants file or catalog id");
    std::string file, id;
    int samples = 100;
    auto* fo = verify->add_option("--file", file, "JSON constants file");
    verify->add_option("--id", id, "Catalog algebra id, e.g. A3_1:-1,-1,-1,-1,-1,-1")->excludes(fo);
    verify->add_option("--samples", samples, "Random pairs for R(uv) = R(u)R(v)")->default_val(100);
    verify->callback([&] {
        if (file.empty() && id.empty()) throw UsageError("--file/--id: give one");
        if (samples < 1) throw UsageError("--samples: must be positive");
        command = "algebra verify";
        action = [&] { return algebra_verify(file, id, samples, seed); };
    });

    auto* cre = app.add_subcommand("cre", "Generalized Cauchy-Riemann systems");
    cre->require_subcommand(1);
    auto* emit = cre->add_subcommand("emit", "Emit the CRE system of (phi, A)");
    std::string alg_id = "C", phi_id = "id2", at;
    emit->add_option("--algebra", alg_id, "Catalog id or JSON file")->default_val("C");
    emit->add_option("--phi", phi_id, "Catalog phi id")->default_val("id2");
    emit->add_option("--at", at, "Point for position-dependent coefficients");
    emit->callback([&] {
        command = "cre emit";
        action = [&] { return cre_emit(alg_id, phi_id, at, seed); };
    });
    auto* recover = cre->add_subcommand("recover", "Recover (phi, A) from a two-equation system");
    std::string sys_file, hint;
    recover->add_option("--file", sys_file, "JSON system {\"A\": 2x4 linear polynomials}")->required();
    recover->add_option("--case", hint, "A2_1, A2_2 or A2_12");
    recover->callback([&] {
        command = "cre recover";
        action = [&] { return cre_recover(sys_file, hint); };
    });

    auto* alz = app.add_subcommand("algebrize", "Algebrize a quadratic planar vector field");
    std::string vf, box;
    int which = 0;
    double step = 0.25, atol = 1e-8;
    alz->add_option("--vf", vf, "a0,...,a5,b0,...,b5")->required();
    alz->add_option("--case", which, "1, 2 or 3 (default: all)")->check(CLI::Range(1, 3));
    alz->add_option("--box", box, "Parameter search box lo,hi");
    alz->add_option("--step", step, "Parameter grid step")->default_val(0.25);
    alz->add_option("--tol", atol, "CRE residual tolerance")->default_val(1e-8);
    alz->callback([&] {
        command = "algebrize";
        action = [&] { return algebrize_cmd(vf, which, box, step, atol); };
    });

    auto* bil = app.add_subcommand("billiards", "Verify the triangular-billiards algebrization");
    std::string bparams;
    double btol = 1e-10;
    bil->add_option("--params", bparams, "a,b,c")->required();
    bil->add_option("--tol", btol, "Residual tolerance")->default_val(1e-10);
    bil->callback([&] {
        command = "billiards";
        action = [&] { return billiards_cmd(bparams, btol); };
    });

    auto* integ = app.add_subcommand("integrate", "phiA-line integrals");
    std::string loop, open, f_id = "phi^2", iphi = "id2", ialg = "C";
    int N = 512;
    double itol = 1e-8;
    integ->add_option("--loop", loop, "circle:r=R[@center] or polygon:x,y;x,y;...");
    integ->add_option("--path", open, "segment:x,y;x,y or polygon:... (open)");
    integ->add_option("--f", f_id, "Catalog function id")->default_val("phi^2");
    integ->add_option("--phi", iphi, "Catalog phi id")->default_val("id2");
    integ->add_option("--algebra", ialg, "Catalog id or JSON file")->default_val("C");
    integ->add_option("--N", N, "Simpson subintervals")->default_val(512);
    integ->add_option("--tol", itol, "Loop tolerance")->default_val(1e-8);
    integ->callback([&] {
        command = "integrate";
        action = [&] { return integrate_cmd(loop, open, f_id, iphi, ialg, N, itol); };
    });

    auto* ode = app.add_subcommand("ode", "phiA-differential equations");
    ode->require_subcommand(1);
    auto* solve = ode->add_subcommand("solve", "Closed-form families and Picard iteration");
    std::string family, oalg = "C", ophi = "id2", Cs, grid = "-1,1,20";
    solve->add_option("--family", family, "square, phi-rhs, exp or picard")->required();
    solve->add_option("--algebra", oalg, "Catalog id or JSON file")->default_val("C");
    solve->add_option("--phi", ophi, "Catalog phi id")->default_val("id2");
    solve->add_option("--C", Cs, "Constant in the algebra");
    solve->add_option("--grid", grid, "lo,hi,count (picard: path from (lo,..) to (hi,..))")->default_val("-1,1,20");
    int oN = 512;
    solve->add_option("--N", oN, "Simpson subintervals for picard")->default_val(512);
    solve->callback([&] {
        command = "ode solve";
        action = [&] { return ode_cmd(family, oalg, ophi, Cs, grid, oN, seed); };
    });

    auto* pde = app.add_subcommand("pde", "Exact PDE solutions");
    pde->require_subcommand(1);
    auto* fo1 = pde->add_subcommand("first-order", "a u_x + b v_x - c u_y - d v_y = 0");
    std::string coeffs, pf = "phi^2";
    double alpha = 0, beta = 0;
    fo1->add_option("--coeffs", coeffs, "a,b,c,d")->required();
    fo1->add_option("--alpha", alpha)->default_val(0);
    fo1->add_option("--beta", beta)->default_val(0);
    fo1->add_option("--f", pf, "Catalog function id")->default_val("phi^2");
    fo1->callback([&] {
        command = "pde first-order";
        action = [&] { return pde_first_order(coeffs, alpha, beta, pf); };
    });
    auto* s451 = pde->add_subcommand("system451", "Two-equation system in (x, t)");
    std::string sa = "1,1", sb = "1,1", sfam = "trig", sc = "1,0";
    s451->add_option("--a", sa, "a1,a2")->default_val("1,1");
    s451->add_option("--b", sb, "b1,b2")->default_val("1,1");
    s451->add_option("--family", sfam, "trig or hyperbolic")->default_val("trig");
    s451->add_option("--c", sc, "c1,c2")->default_val("1,0");
    s451->callback([&] {
        command = "pde system451";
        action = [&] { return pde_system451(sa, sb, sfam, sc); };
    });
    auto* so = pde->add_subcommand("second-order", "A u_xx + 2B u_xy + C u_yy + D u_x + E u_y = 0");
    std::string so_coeffs, so_p = "0,0";
    double so_alpha = 1, so_beta = 1;
    so->add_option("--coeffs", so_coeffs, "A,B,C,D,E")->required();
    so->add_option("--p", so_p, "p1,p2")->default_val("0,0");
    so->add_option("--alpha", so_alpha)->default_val(1);
    so->add_option("--beta", so_beta)->default_val(1);
    so->callback([&] {
        command = "pde second-order";
        action = [&] { return pde_second_order(so_coeffs, so_p, so_alpha, so_beta); };
    });
    auto* heat = pde->add_subcommand("heat", "alpha (u_xx + u_yy + u_zz) = u_t");
    std::string hp;
    double halpha = 1, hamp = 1;
    heat->add_option("--alpha", halpha)->default_val(1);
    heat->add_option("--p", hp, "p1,...,p6")->required();
    heat->add_option("--amplitude", hamp)->default_val(1);
    heat->callback([&] {
        command = "pde heat";
        action = [&] { return pde_heat(halpha, hp, hamp); };
    });

    auto* pex = app.add_subcommand("paper-examples", "Run every worked example and print a pass/fail table");
    pex->callback([&] {
        command = "paper-examples";
        action = [] { return paper_examples_cmd(); };
    });

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    std::string echo;
    for (int i = 1; i < argc; ++i) echo += (i > 1 ? " " : "") + std::string(argv[i]);

    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    auto fail = [&](const std::string& kind, const std::string& msg, int code) {
        if (as_json)
            out << json{{"command", echo}, {"error", kind}, {"message", msg}, {"pass", false}}.dump(2) << "\n";
        err << "error: " << msg << "\n";
        return code;
    };
    Report rep;
    try {
        rep = action();
    } catch (const UsageError& e) {
        return fail("UsageError", e.what(), 2);
    } catch (const Error& e) {
        return fail(to_string(e.kind()), e.what(), util::exit_code(e.kind()));
    }

    json j = {{"command", echo}, {"seed", seed}};
    j.update(rep.body);
    j["pass"] = rep.pass;
    if (as_json) {
        out << j.dump(2) << "\n";
    } else if (command == "paper-examples") {
        print_examples_table(out, j["outputs"]["examples"]);
        out << (rep.pass ? "all examples pass" : "some examples FAIL") << "\n";
    } else {
        util::print_human(out, j);
    }
    return rep.pass ? 0 : 1;
}

}  // namespace phia::cli
