// arithdyn: experiment runner. Each subcommand writes one table (CSV or JSON).
// Exit codes: 0 ok, 2 bad input, 3 non-convergence, 4 undecided p-adic branch.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "arithdyn/arithdyn.hpp"
#include "report.hpp"

using namespace arithdyn;
using report::Cell;
using report::Table;

namespace {

struct Common {
    std::string phi;
    std::string set;
    std::vector<std::string> places;
    int n_lo = 1, n_hi = 1;
    double tol = 1e-10;
    std::string format = "csv";
    std::string out;
};

std::vector<Place> places_of(const Common& c) {
    if (c.places.empty()) throw DomainError("at least one --place is required");
    std::vector<Place> v;
    for (auto& s : c.places) v.push_back(parse_place(s));
    return v;
}

DynSystem system_of(const Common& c) {
    if (c.phi.empty()) throw DomainError("--phi is required");
    return DynSystem(parse_poly(c.phi));
}

GaloisSet set_of(const Common& c) {
    if (c.set.empty()) throw DomainError("--set is required");
    return GaloisSet::from_poly(parse_poly(c.set));
}

/// "1/2 + 3/2 i", "-i", "2": read as a polynomial in i of degree <= 1.
GaussianRational parse_gauss(std::string text) {
    for (char& ch : text)
        if (ch == 'i') ch = 'z';
    const RatPoly p = parse_poly(text);
    if (p.degree() > 1) throw ParseError("not a Gaussian rational: " + text, 0);
    return {p.coeff(0), p.coeff(1)};
}

std::string exact_str(const LogAbs& x) { return x.to_string(); }

void emit(const Table& t, const Common& c) {
    if (c.out.empty()) {
        c.format == "json" ? t.write_json(std::cout) : t.write_csv(std::cout);
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw DomainError("cannot open " + c.out);
    c.format == "json" ? t.write_json(f) : t.write_csv(f);
}

int cmd_height(const Common& c) {
    auto sys = system_of(c);
    auto S = set_of(c);
    auto h = canonical_height(sys, S, c.tol);
    Table t({"phi", "set", "cardinality", "hhat", "error_bound", "exact_part", "arch_part", "oracle_checked"});
    t.add({c.phi, to_string(S.poly()), S.cardinality(), h.value, h.error_bound, exact_str(h.exact_part), h.arch_part,
           h.oracle_checked});
    emit(t, c);
    return 0;
}

int cmd_local_height(const Common& c) {
    auto sys = system_of(c);
    auto S = set_of(c);
    Table t({"place", "value", "error_bound", "exact"});
    for (auto& v : places_of(c)) {
        if (v.is_archimedean()) {
            double sum = 0, err = 0;
            auto roots = complex_roots(S.poly());
            for (auto& r : roots) {
                auto l = local_height_arch(sys, r, c.tol);
                sum += l.value;
                err += l.error_bound;
            }
            const double n = double(roots.size());
            t.add({v.to_string(), sum / n, err / n, Cell{}});
        } else {
            // an enclosure-only value has no exact form
            auto e = local_height_padic_enclosure(sys, S, v.prime());
            Cell exact = e.slack == 0 ? Cell{exact_str(e.value)} : Cell{};
            t.add({v.to_string(), e.value.to_double(), e.width(v.prime()), exact});
        }
    }
    emit(t, c);
    return 0;
}

int cmd_capacity(const Common& c, bool chain, const std::string& bracket, const std::string& r0, int n) {
    if (!bracket.empty()) {
        std::vector<ComplexApprox> samples;
        DynSystem sys(parse_poly(bracket == "circle" ? "z^2" : "z^2 - 2"));
        if (bracket == "circle") samples = circle_samples(4096);
        else if (bracket == "segment") samples = segment_samples(4097);
        else throw DomainError("--bracket must be circle or segment");
        Table t({"set", "n_points", "cheb_degree", "lower", "upper"});
        for (unsigned k = 1; (1L << k) <= std::max(n, 2); ++k) {
            auto e = capacity_bracket(samples, std::size_t(1) << k, monic_iterate(sys, k));
            t.add({bracket, e.n_points, long(1) << k, e.lower, e.upper});
        }
        emit(t, c);
        return 0;
    }
    auto sys = system_of(c);
    auto places = places_of(c);
    if (chain) {
        Table t({"place", "k", "capacity", "log_capacity_exact"});
        for (auto& v : places) {
            const LogAbs R = r0.empty() ? detail::escape_radius_log(sys, v)
                                        : (v.is_archimedean() ? LogAbs::log_of(parse_rational(r0))
                                                              : log_abs(parse_rational(r0), v));
            auto ch = lemniscate_chain(sys, v, R, n);
            for (std::size_t k = 0; k < ch.size(); ++k)
                t.add({v.to_string(), long(k), ch[k].lower, exact_str(*ch[k].exact)});
        }
        emit(t, c);
        return 0;
    }
    // capacity of the filled Julia set at each place, plus the adelic sum
    Table t({"place", "capacity", "log_capacity_exact"});
    LogAbs sum;
    for (auto& v : places) {
        auto l = c_v(sys, v);
        sum += l;
        t.add({v.to_string(), std::exp(l.to_double()), exact_str(l)});
    }
    t.add({"sum", std::exp(sum.to_double()), exact_str(sum)});
    emit(t, c);
    return 0;
}

int cmd_equidist(const Common& c, const std::string& family, const std::string& p, const std::string& a,
                 const std::string& stats) {
    auto sys = system_of(c);
    auto places = places_of(c);
    std::optional<SetSequence> seq;
    if (family == "roots-of-unity") seq = SetSequence::roots_of_unity(Integer(p), c.n_lo, c.n_hi);
    else if (family == "periodic") seq = SetSequence::periodic(sys, c.n_lo, c.n_hi);
    else if (family == "preimage") seq = SetSequence::preimage(sys, parse_rational(a), c.n_lo, c.n_hi);
    else throw DomainError("--family must be roots-of-unity, periodic or preimage");
    EquidistOptions opt;
    opt.tol = c.tol;
    if (stats == "uniform") opt.stats = Reference::uniform_circle;
    else if (stats == "arcsine") opt.stats = Reference::arcsine_segment;
    else if (!stats.empty()) throw DomainError("--stats must be uniform or arcsine");
    auto rep = run_equidistribution(*seq, sys, places, opt);
    Table t({"n", "cardinality", "place", "dv", "dv_exact", "log_cv", "log_cv_exact", "gap", "gap_exact", "hhat",
             "hhat_error", "ks", "energy_gap", "far_warning", "gap_monotone", "error"});
    int code = 0;
    for (auto& r : rep.rows) {
        if (!r.error.empty()) {
            t.add({long(r.n), r.cardinality, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{},
                   Cell{}, Cell{}, Cell{}, Cell{}, r.error});
            code = std::max(code, r.error_code);
            continue;
        }
        for (auto& e : r.places) {
            std::vector<Cell> row{long(r.n),
                                  r.cardinality,
                                  e.place.to_string(),
                                  e.dv.to_double(),
                                  exact_str(e.dv),
                                  e.log_cv.to_double(),
                                  exact_str(e.log_cv),
                                  e.gap.to_double(),
                                  exact_str(e.gap)};
            row.push_back(r.hhat ? Cell{r.hhat->value} : Cell{});
            row.push_back(r.hhat ? Cell{r.hhat->error_bound} : Cell{});
            row.push_back(r.stats ? Cell{r.stats->ks} : Cell{});
            row.push_back(r.stats ? Cell{r.stats->energy_gap} : Cell{});
            row.push_back(r.stats ? Cell{r.stats->warning} : Cell{});
            row.push_back(bool(rep.gap_monotone.at(e.place)));
            row.push_back(std::string());
            t.add(std::move(row));
        }
    }
    emit(t, c);
    return code;
}

int cmd_pern(const Common& c) {
    auto sys = system_of(c);
    auto places = places_of(c);
    Table t({"n", "place", "lhs", "rhs", "lhs_exact", "rhs_exact", "difference"});
    for (int n = c.n_lo; n <= c.n_hi; ++n)
        for (auto& v : places) {
            auto id = pern_identity(sys, unsigned(n), v);
            t.add({long(n), v.to_string(), id.lhs.to_double(), id.rhs.to_double(), exact_str(id.lhs),
                   exact_str(id.rhs), id.lhs.to_double() - id.rhs.to_double()});
        }
    emit(t, c);
    return 0;
}

int cmd_symmetry(const Common& c, const std::string& sigma_a, const std::string& sigma_b) {
    auto sys = system_of(c);
    auto o = rotation_symmetry_order(sys);
    Table t({"phi", "centroid", "rotation_order", "infinite", "sigma", "is_symmetry"});
    Cell sig, is;
    if (!sigma_a.empty()) {
        AffineMap s(parse_gauss(sigma_a), sigma_b.empty() ? GaussianRational(0) : parse_gauss(sigma_b));
        sig = s.a.to_string() + "*z + " + s.b.to_string();
        is = is_symmetry(sys, s);
    }
    t.add({c.phi, to_string(centroid(sys)), o.n, o.infinite, sig, is});
    emit(t, c);
    return 0;
}

int cmd_mandelbrot(const Common& c, bool capacity, int n, const std::vector<std::string>& params) {
    if (capacity) {
        Table t({"n", "capacity", "log_capacity_exact"});
        for (int k = 1; k <= n; ++k)
            t.add({long(k), mandelbrot_capacity_partial(k), exact_str(mandelbrot_capacity_partial_log(k))});
        emit(t, c);
        return 0;
    }
    if (!c.set.empty()) {
        auto S = set_of(c);
        auto h = mandelbrot_height(S, c.tol);
        Table t({"set", "cardinality", "h_M", "error_bound", "exact_part", "arch_part"});
        t.add({to_string(S.poly()), S.cardinality(), h.value, h.error_bound, exact_str(h.exact_part), h.arch_part});
        emit(t, c);
        return 0;
    }
    if (params.empty()) throw DomainError("mandelbrot needs --capacity, --set or --c");
    Table t({"c", "lambda_inf", "error_bound"});
    for (auto& s : params) {
        const GaussianRational g = parse_gauss(s);
        auto l = mandelbrot_lambda_detail(ComplexApprox::point({g.re.get_d(), g.im.get_d()}), c.tol);
        t.add({s, l.value, l.error_bound});
    }
    emit(t, c);
    return 0;
}

int cmd_preperiodic(const Common& c, const std::vector<std::string>& xs) {
    auto sys = system_of(c);
    if (xs.empty()) throw DomainError("--x is required");
    Table t({"x", "preperiodic", "hhat"});
    for (auto& s : xs) {
        const Rational x = parse_rational(s);
        const bool pre = is_preperiodic_rational(sys, x);
        const double h = canonical_height(sys, GaloisSet::from_points({x}), c.tol).value;
        t.add({to_string(x), pre, h});
    }
    emit(t, c);
    return 0;
}

void add_common(CLI::App* sc, Common& c, bool set, bool place, bool range) {
    sc->add_option("--phi", c.phi, "polynomial in z");
    if (set) sc->add_option("--set", c.set, "polynomial whose roots form the set");
    if (place) sc->add_option("--place", c.places, "inf or a prime; repeatable");
    if (range) {
        sc->add_option("--n-lo", c.n_lo)->check(CLI::PositiveNumber);
        sc->add_option("--n-hi", c.n_hi)->check(CLI::PositiveNumber);
    }
    sc->add_option("--tol", c.tol)->check(CLI::PositiveNumber);
    sc->add_option("--format", c.format)->check(CLI::IsMember({"csv", "json"}));
    sc->add_option("--out", c.out);
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* cap = std::getenv("ARITHDYN_DEGREE_CAP")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(cap, &end, 10);
        if (end == cap || *end != '\0' || v == 0) {
            std::cerr << "error: ARITHDYN_DEGREE_CAP must be a positive integer\n";
            return 2;
        }
        set_degree_cap(v);
    }

    CLI::App app{"heights, capacities and equidistribution for polynomial dynamics over Q"};
    app.require_subcommand(1);
    Common c;

    auto* height = app.add_subcommand("height", "global canonical height of a Galois-stable set");
    add_common(height, c, true, false, false);
    auto* local = app.add_subcommand("local-height", "local canonical heights at the given places");
    add_common(local, c, true, true, false);

    bool chain = false;
    std::string bracket, r0;
    int n = 10;
    auto* capacity = app.add_subcommand("capacity", "capacities of filled Julia sets and lemniscate chains");
    add_common(capacity, c, false, true, false);
    capacity->add_flag("--chain", chain, "capacities of the chain phi^-k({|z| <= R0})");
    capacity->add_option("--r0", r0, "chain radius (rational; default: escape radius)");
    capacity->add_option("--n", n, "chain length or largest Leja count")->check(CLI::NonNegativeNumber);
    capacity->add_option("--bracket", bracket, "circle or segment: Leja/Chebyshev brackets");

    std::string family = "periodic", prime = "2", a = "0", stats;
    auto* equidist = app.add_subcommand("equidist", "discriminant diameters of a set sequence against log c_v");
    add_common(equidist, c, false, true, true);
    equidist->add_option("--family", family, "roots-of-unity, periodic or preimage");
    equidist->add_option("--p", prime, "base of the roots-of-unity family");
    equidist->add_option("--a", a, "target of the preimage family");
    equidist->add_option("--stats", stats, "uniform or arcsine distribution statistics at infinity");

    auto* pern = app.add_subcommand("pern-identity", "periodic-point discriminant identity");
    add_common(pern, c, false, true, true);

    std::string sigma_a, sigma_b;
    auto* symmetry = app.add_subcommand("symmetry", "centroid, rotation order and functional-equation test");
    add_common(symmetry, c, false, false, false);
    symmetry->add_option("--sigma-a", sigma_a, "Gaussian rational a in sigma(z) = a z + b");
    symmetry->add_option("--sigma-b", sigma_b, "Gaussian rational b");

    bool mcap = false;
    std::vector<std::string> params;
    int mn = 13;
    auto* mandel = app.add_subcommand("mandelbrot", "Mandelbrot heights and lemniscate capacities");
    add_common(mandel, c, true, false, false);
    mandel->add_flag("--capacity", mcap);
    mandel->add_option("--n", mn)->check(CLI::PositiveNumber);
    mandel->add_option("--c", params, "parameter (Gaussian rational); repeatable");

    std::vector<std::string> xs;
    auto* preper = app.add_subcommand("preperiodic", "preperiodicity of rational points");
    add_common(preper, c, false, false, false);
    preper->add_option("--x", xs, "rational point; repeatable");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int r = app.exit(e);
        return r == 0 ? 0 : 2;
    }

    try {
        if (c.n_hi < c.n_lo) throw DomainError("--n-hi is below --n-lo");
        if (*height) return cmd_height(c);
        if (*local) return cmd_local_height(c);
        if (*capacity) return cmd_capacity(c, chain, bracket, r0, n);
        if (*equidist) return cmd_equidist(c, family, prime, a, stats);
        if (*pern) return cmd_pern(c);
        if (*symmetry) return cmd_symmetry(c, sigma_a, sigma_b);
        if (*mandel) return cmd_mandelbrot(c, mcap, mn, params);
        if (*preper) return cmd_preperiodic(c, xs);
    } catch (const UndecidedBranchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
