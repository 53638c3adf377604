#pragma once

// Experiments on sequences of small Galois-stable sets: per-place
// discriminant diameters against log c_v(phi), the periodic-point
// discriminant identity, full-subsystem filtering and archimedean
// distribution statistics.

#include <algorithm>
#include <future>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "arithdyn/capacity.hpp"

namespace arithdyn {

class SetSequence {
public:
    enum class Kind { roots_of_unity, periodic, preimage, custom };

    /// mu_{p^n}: the roots of z^(p^n) - 1.
    static SetSequence roots_of_unity(const Integer& p, int n_lo, int n_hi) {
        SetSequence s(Kind::roots_of_unity, n_lo, n_hi);
        s.p_ = p;
        return s;
    }
    static SetSequence periodic(const DynSystem& sys, int n_lo, int n_hi) {
        SetSequence s(Kind::periodic, n_lo, n_hi);
        s.sys_ = sys;
        return s;
    }
    static SetSequence preimage(const DynSystem& sys, const Rational& a, int n_lo, int n_hi) {
        SetSequence s(Kind::preimage, n_lo, n_hi);
        s.sys_ = sys;
        s.a_ = a;
        return s;
    }
    /// Indexed 1..sets.size().
    static SetSequence custom(std::vector<GaloisSet> sets) {
        if (sets.empty()) throw DomainError("empty custom sequence");
        SetSequence s(Kind::custom, 1, static_cast<int>(sets.size()));
        s.custom_ = std::move(sets);
        return s;
    }

    Kind kind() const { return kind_; }
    int n_lo() const { return lo_; }
    int n_hi() const { return hi_; }

    GaloisSet generate(int n) const {
        if (n < lo_ || n > hi_) throw DomainError("index outside the sequence range");
        switch (kind_) {
            case Kind::roots_of_unity: {
                Integer m = ipow(p_, static_cast<unsigned long>(n));
                if (m > Integer(static_cast<unsigned long>(degree_cap())))
                    throw DegreeCapError("roots of unity degree cap: " + m.get_str());
                return GaloisSet::from_poly(IntPoly::monomial(Integer(1), m.get_ui()) - IntPoly::constant(Integer(1)));
            }
            case Kind::periodic: {
                auto per = periodic_set(sys_->phi(), static_cast<unsigned>(n));
                if (!per.separable) throw DomainError("multiplicity at period " + std::to_string(n));
                return per.set;
            }
            case Kind::preimage: return preimage_set(sys_->phi(), static_cast<unsigned>(n), a_);
            case Kind::custom: return custom_[static_cast<std::size_t>(n - 1)];
        }
        throw DomainError("unknown sequence kind");
    }

private:
    SetSequence(Kind k, int lo, int hi) : kind_(k), lo_(lo), hi_(hi) {
        if (lo < 1 || hi < lo) throw DomainError("empty index range");
    }
    Kind kind_;
    int lo_, hi_;
    Integer p_;
    std::optional<DynSystem> sys_;
    Rational a_;
    std::vector<GaloisSet> custom_;
};

enum class Reference { uniform_circle, arcsine_segment };

struct DistributionStats {
    double ks = 0.0;
    /// discrete energy minus -log c(F) (= 0 for both references).
    double energy_gap = 0.0;
    /// More than 10% of the points lie over 0.5 away from the support.
    bool warning = false;
};

/// KS statistic of root angles against the uniform law (circle) or of real
/// parts against the arcsine law on [-2, 2].
inline DistributionStats arch_distribution_stats(const std::vector<ComplexApprox>& roots, Reference ref) {
    if (roots.size() < 2) throw DomainError("distribution statistics need at least two points");
    std::vector<double> u;
    long far = 0;
    for (auto& r : roots) {
        const auto z = r.value();
        if (ref == Reference::uniform_circle) {
            double t = std::atan2(z.imag(), z.real());
            if (t < 0) t += 2 * std::numbers::pi;
            u.push_back(t / (2 * std::numbers::pi));
            if (std::fabs(std::abs(z) - 1.0) > 0.5) ++far;
        } else {
            const double x = std::clamp(z.real(), -2.0, 2.0);
            u.push_back(0.5 + std::asin(x / 2.0) / std::numbers::pi);
            const double off = std::fabs(z.real()) <= 2.0 ? std::fabs(z.imag())
                                                          : std::hypot(std::fabs(z.real()) - 2.0, z.imag());
            if (off > 0.5) ++far;
        }
    }
    std::sort(u.begin(), u.end());
    const double n = double(u.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        ks = std::max({ks, u[i] - double(i) / n, double(i + 1) / n - u[i]});
    DistributionStats st;
    st.ks = ks;
    auto pm = pairwise_geomean_arch(roots);
    st.energy_gap = pm.coincident ? std::numeric_limits<double>::infinity() : -pm.log_mean;
    st.warning = double(far) > 0.1 * n;
    return st;
}

struct PlaceEntry {
    Place place;
    LogAbs dv;
    LogAbs log_cv;
    /// dv - log c_v, from the same exact terms.
    LogAbs gap;
};

struct EquidistRow {
    int n = 0;
    long cardinality = 0;
    std::optional<HeightValue> hhat;
    std::vector<PlaceEntry> places;
    std::optional<DistributionStats> stats;
    /// Empty when the row completed; otherwise the reason and exit class
    /// (2 parse/domain, 3 non-convergence, 4 undecided branch).
    std::string error;
    int error_code = 0;
};

struct EquidistReport {
    std::vector<EquidistRow> rows;
    /// |gap| nonincreasing in n at this place over the completed rows.
    std::map<Place, bool> gap_monotone;
    bool cardinality_increasing = true;
};

struct EquidistOptions {
    double tol = 1e-10;
    bool compute_height = true;
    std::optional<Reference> stats;
    HeightOptions height;
};

inline EquidistRow equidistribution_row(const SetSequence& seq, const DynSystem& sys, const std::vector<Place>& places, int n,
                                const EquidistOptions& opt) {
    EquidistRow row;
    row.n = n;
    try {
        GaloisSet S = seq.generate(n);
        row.cardinality = S.cardinality();
        for (auto& v : places) {
            PlaceEntry e{v, dv_of_galois_set(S, v), c_v(sys, v), LogAbs()};
            e.gap = e.dv;
            e.gap += -e.log_cv;
            row.places.push_back(std::move(e));
        }
        if (opt.compute_height || opt.stats) {
            auto roots = complex_roots(S.poly());
            if (opt.stats) row.stats = arch_distribution_stats(roots, *opt.stats);
            if (opt.compute_height) row.hhat = canonical_height(sys, S, roots, opt.tol, opt.height);
        }
    } catch (const UndecidedBranchError& e) {
        row.error = e.what();
        row.error_code = 4;
    } catch (const NonConvergenceError& e) {
        row.error = e.what();
        row.error_code = 3;
    } catch (const Error& e) {
        row.error = e.what();
        row.error_code = 2;
    }
    return row;
}

/// Rows are computed concurrently and assembled in order of n.
inline EquidistReport run_equidistribution(const SetSequence& seq, const DynSystem& sys, const std::vector<Place>& places,
                                   const EquidistOptions& opt = {}) {
    if (places.empty()) throw DomainError("no places given");
    std::vector<std::future<EquidistRow>> jobs;
    for (int n = seq.n_lo(); n <= seq.n_hi(); ++n)
        jobs.push_back(std::async(std::launch::async, [&, n] { return equidistribution_row(seq, sys, places, n, opt); }));
    EquidistReport rep;
    for (auto& j : jobs) rep.rows.push_back(j.get());
    for (auto& v : places) rep.gap_monotone[v] = true;
    const EquidistRow* prev = nullptr;
    for (auto& r : rep.rows) {
        if (!r.error.empty()) continue;
        if (prev) {
            if (r.cardinality <= prev->cardinality) rep.cardinality_increasing = false;
            for (std::size_t i = 0; i < r.places.size(); ++i) {
                const double a = std::fabs(prev->places[i].gap.to_double()), b = std::fabs(r.places[i].gap.to_double());
                if (b > a * (1 + 1e-12) + 1e-300) rep.gap_monotone[r.places[i].place] = false;
            }
        }
        prev = &r;
    }
    return rep;
}

struct PernIdentity {
    LogAbs lhs;
    LogAbs rhs;
};

/// With g = phi^n(z) - z of degree N and leading coefficient A, the points
/// of Per_n satisfy prod_{i != j}(P_i - P_j) = A^-N prod g'(P_i) and
/// log|A|/(N-1) = log|a_d|/(d-1), so
/// log 𝔡_v(Per_n) = log c_v + (1/(N(N-1))) log|prod((phi^n)'(P) - 1)|_v.
/// The product is Res(g, g')/A^(N-1), an exact rational.
inline PernIdentity pern_identity(const DynSystem& sys, unsigned n, const Place& v) {
    if (n < 1) throw DomainError("period must be positive");
    auto per = periodic_set(sys.phi(), n);
    if (!per.separable) throw DomainError("multiplicity at period " + std::to_string(n));
    PernIdentity out;
    out.lhs = dv_of_galois_set(per.set, v);
    const RatPoly g = iterate(sys.phi(), n) - RatPoly::z();
    const long N = g.degree();
    const Rational prod = resultant(g, g.derivative()) / rpow(g.leading(), N - 1);
    out.rhs = c_v(sys, v);
    if (v.is_archimedean())
        out.rhs += LogAbs::approx(log_abs(prod) / double(N * (N - 1)));
    else
        out.rhs += log_abs(prod, v).scaled(make_rational(1, N * (N - 1)));
    return out;
}

struct FilterResult {
    long kept = 0;
    long dropped = 0;
    long undecided = 0;
    /// log of the pairwise geometric mean of the kept roots (archimedean only).
    std::optional<double> kept_log_dv;
};

/// Keeps the points of S whose local canonical height at v is at most beta/2.
/// Archimedean: per root. Finite: per Newton-polygon valuation class of S,
/// following each class's valuation path; classes whose path meets a tie
/// are counted as undecided.
inline FilterResult filter_full_subsystem(const GaloisSet& S, const DynSystem& sys, const Place& v, double beta,
                                          double tol = 1e-10) {
    if (!(beta > 0)) throw DomainError("beta must be positive");
    FilterResult r;
    if (v.is_archimedean()) {
        std::vector<ComplexApprox> keep;
        for (auto& z : complex_roots(S.poly())) {
            if (local_height_arch(sys, z, tol).value <= beta / 2) {
                keep.push_back(z);
                ++r.kept;
            } else {
                ++r.dropped;
            }
        }
        if (keep.size() >= 2) r.kept_log_dv = pairwise_geomean_arch(keep).log_mean;
        return r;
    }
    const Integer& p = v.prime();
    const double lp = std::log(p.get_d());
    const detail::PadicData pd(sys, p);
    const bool good = has_good_reduction(sys, p);
    auto classify = [&](detail::Branch b, const Rational& c, long m) {
        if (b == detail::Branch::undecided) r.undecided += m;
        else if (b == detail::Branch::bounded || c.get_d() * lp <= beta / 2) r.kept += m;
        else r.dropped += m;
    };
    const NewtonPolygon np = newton_polygon(S.poly(), p);
    if (np.zero_roots > 0) {
        Rational c = 0;
        classify(good ? detail::Branch::bounded : detail::rational_point_padic(sys, pd, Rational(0), c), c,
                 np.zero_roots);
    }
    for (auto& [s, m] : np.root_valuations()) {
        Rational c = 0;
        if (good) {
            c = s < 0 ? Rational(-s) : Rational(0);
            classify(c == 0 ? detail::Branch::bounded : detail::Branch::escaped, c, m);
        } else {
            classify(detail::follow_valuation(pd, s, c), c, m);
        }
    }
    return r;
}

/// z in U_{m,beta} = {z : d^-m log|phi^m(z)| <= beta}.
inline bool umbeta_membership(const DynSystem& sys, const ComplexApprox& z, int m, double beta) {
    if (m < 1 || !(beta > 0)) throw DomainError("need m >= 1 and beta > 0");
    const long d = sys.degree();
    std::vector<double> a;
    for (auto& c : sys.phi().coeffs()) a.push_back(c.get_d());
    const double log_ad = std::log(std::fabs(a.back()));
    std::complex<double> w = z.value();
    double logw = z.log_modulus;
    bool huge = logw > 300.0;
    for (int k = 0; k < m; ++k) {
        if (!huge) {
            std::complex<double> nw = a.back();
            for (long i = d - 1; i >= 0; --i) nw = nw * w + a[std::size_t(i)];
            w = nw;
            logw = std::log(std::abs(w));
            huge = logw > 300.0;
        } else {
            // the leading term dominates to double precision
            logw = log_ad + double(d) * logw;
        }
    }
    return logw / std::pow(double(d), m) <= beta;
}

/// c(U_{m,beta}) = e^beta c_v(phi)^(1 - d^-m).
inline LogAbs umbeta_capacity(const DynSystem& sys, int m, double beta, const Place& v = Place::infinity()) {
    if (m < 1 || !(beta > 0)) throw DomainError("need m >= 1 and beta > 0");
    LogAbs r = LogAbs::approx(beta);
    r += c_v(sys, v).scaled(1 - rpow(Rational(sys.degree()), -m));
    return r;
}

}  // namespace arithdyn
