#pragma once

// Naive and canonical heights of Galois-stable sets, and local canonical
// heights at the archimedean place and at primes.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "arithdyn/galois_set.hpp"
#include "arithdyn/roots.hpp"

namespace arithdyn {

/// A polynomial map of degree d >= 2 together with per-place data derived
/// from its coefficients.
class DynSystem {
public:
    explicit DynSystem(RatPoly phi) : phi_(std::move(phi)) {
        if (phi_.degree() < 2) throw DomainError("dynamical system needs degree >= 2");
    }

    const RatPoly& phi() const { return phi_; }
    long degree() const { return phi_.degree(); }
    const Rational& leading() const { return phi_.leading(); }

    /// Primes where the map can have bad reduction: those dividing a
    /// coefficient denominator or the numerator of the leading coefficient.
    std::set<Integer> bad_primes() const {
        std::set<Integer> out;
        for (auto& a : phi_.coeffs()) {
            if (a == 0) continue;
            for (auto& [p, e] : factor(Integer(a.get_den()))) out.insert(p);
        }
        for (auto& [p, e] : factor(Integer(leading().get_num()))) out.insert(p);
        return out;
    }

private:
    RatPoly phi_;
};

struct HeightValue {
    double value = 0.0;
    double error_bound = 0.0;
    /// Contributions of the finite places, kept exact.
    LogAbs exact_part;
    /// Archimedean contribution (value = exact_part + arch_part).
    double arch_part = 0.0;
    /// Whether the independent pushforward-limit computation was run and agreed.
    bool oracle_checked = false;
};

/// min{ v(a_i/a_d)/(d-i) for i < d, v(1/a_d)/(d-1) }, with v(0) = +infinity.
/// The last term is always finite, so the minimum is a rational number.
inline Rational alpha_v(const DynSystem& sys, const Integer& p) {
    const long d = sys.degree();
    const long vd = valuation(sys.leading(), p);
    Rational best = make_rational(-vd, d - 1);
    for (long i = 0; i < d; ++i) {
        const Rational& a = sys.phi().coeffs()[static_cast<std::size_t>(i)];
        if (a == 0) continue;
        Rational t = make_rational(valuation(a, p) - vd, d - i);
        if (t < best) best = t;
    }
    return best;
}

/// log c_v(phi) = -(1/(d-1)) log|a_d|_v. Exact at every place: at infinity
/// log|a_d| is expanded over the factorization of a_d.
inline LogAbs c_v(const DynSystem& sys, const Place& v) {
    const Rational s = make_rational(-1, sys.degree() - 1);
    if (v.is_archimedean()) return LogAbs::log_of(abs(sys.leading())).scaled(s);
    return log_abs(sys.leading(), v).scaled(s);
}

inline bool has_good_reduction(const DynSystem& sys, const Integer& p) {
    for (auto& a : sys.phi().coeffs())
        if (a != 0 && valuation(a, p) < 0) return false;
    return valuation(sys.leading(), p) == 0;
}

/// Per-place constant C_v with |log+|phi(z)|_v - d log+|z|_v| <= C_v for all z.
///
/// Upper side: |phi(z)| <= S max(1,|z|)^d, S = sum|a_i| (archimedean) or
/// max|a_i| (ultrametric), so U_v = log+ S.
/// Lower side, archimedean: for |z| >= R = max(1, 2 sum_{i<d}|a_i|/|a_d|) one
/// has |phi(z)| >= |a_d||z|^d / 2, and below R, d log+|z| <= d log R; hence
/// B_v = max(d log R, log+(2/|a_d|)). Ultrametric: for |z| > R_v =
/// max(1, max_i (|a_i|/|a_d|)^(1/(d-i))) the leading term dominates exactly,
/// so B_v = max(d log R_v, log+(1/|a_d|)). C_v = max(U_v, B_v); it vanishes
/// at primes of good reduction.
inline double place_constant(const DynSystem& sys, const Place& v) {
    const long d = sys.degree();
    const auto& c = sys.phi().coeffs();
    if (v.is_archimedean()) {
        double sum_all = 0.0, sum_low = 0.0;
        for (long i = 0; i <= d; ++i) {
            const double a = std::fabs(c[static_cast<std::size_t>(i)].get_d());
            sum_all += a;
            if (i < d) sum_low += a;
        }
        const double ad = std::fabs(sys.leading().get_d());
        const double U = std::max(0.0, std::log(sum_all));
        const double R = std::max(1.0, 2.0 * sum_low / ad);
        const double B = std::max(double(d) * std::log(R), std::max(0.0, std::log(2.0 / ad)));
        return std::max(U, B);
    }
    const Integer& p = v.prime();
    const double lp = std::log(p.get_d());
    long min_v = 0;
    const long vd = valuation(sys.leading(), p);
    Rational log_r = 0;  // in units of log p
    for (long i = 0; i <= d; ++i) {
        const Rational& a = c[static_cast<std::size_t>(i)];
        if (a == 0) continue;
        const long va = valuation(a, p);
        min_v = std::min(min_v, va);
        if (i < d) log_r = std::max(log_r, make_rational(vd - va, d - i));
    }
    const double U = double(-min_v) * lp;
    const double B = std::max(double(d) * log_r.get_d(), double(std::max(0L, vd))) * lp;
    return std::max(U, B);
}

/// C_phi = sum over places of C_v; then |hhat(T) - h(T)| <= C_phi / (d - 1).
inline double height_constant(const DynSystem& sys) {
    double total = place_constant(sys, Place::infinity());
    for (auto& p : sys.bad_primes()) total += place_constant(sys, Place::finite(p));
    return total;
}

/// h(S) = (1/N) sum_v sum over roots of log+|x|_v. Only infinity and the
/// primes dividing the leading coefficient contribute (Gauss's lemma).
inline HeightValue naive_height(const GaloisSet& S) {
    const IntPoly& f = S.poly();
    const Rational inv_n = make_rational(1, S.cardinality());
    HeightValue h;
    for (auto& [p, e] : factor(f.leading())) h.exact_part += sum_log_plus(f, Place::finite(p)).scaled(inv_n);
    double arch = 0.0, err = 0.0;
    for (auto& r : complex_roots(f)) {
        arch += std::max(0.0, r.log_modulus);
        err += r.residual_bound / std::max(1.0, r.modulus() - r.residual_bound);
    }
    h.arch_part = arch / double(S.cardinality());
    h.error_bound = err / double(S.cardinality()) + 1e-15 * std::fabs(h.arch_part);
    h.value = h.exact_part.to_double() + h.arch_part;
    return h;
}

/// (1/N)(log|a_N| + sum log+|x_i|) for a primitive integer polynomial; the
/// multiset version (repeated roots allowed) is what the pushforward limit uses.
inline HeightValue mahler_height(const IntPoly& f_in) {
    const IntPoly f = primitive_part(f_in);
    if (f.degree() < 1) throw DomainError("Mahler height needs a nonconstant polynomial");
    double s = log_abs(f.leading()), err = 0.0;
    for (auto& r : complex_roots(f)) {
        s += std::max(0.0, r.log_modulus);
        err += r.residual_bound / std::max(1.0, r.modulus() - r.residual_bound);
    }
    HeightValue h;
    h.value = h.arch_part = s / double(f.degree());
    h.error_bound = err / double(f.degree()) + 1e-15 * std::fabs(h.value);
    return h;
}

inline HeightValue mahler_height(const GaloisSet& S) { return mahler_height(S.poly()); }

// ---------------------------------------------------------------------------
// Archimedean local height

/// Escape-rate evaluation of the archimedean local canonical height.
///
/// With G(w) = log|w| - log c, for |w| >= R_esc one has G(phi(w)) = d G(w) +
/// log|1 + e(w)| where |e(w)| <= eta(w) = sum_{i<d} |a_i||w|^(i-d)/|a_d| <= 1/2
/// and |phi(w)| >= 2|w|, so hhat(w) = G(w) +/- delta(w)/(d-1) with
/// delta = -log(1 - eta). Independently hhat(z) = d^-k hhat(w_k) lies in
/// [0, d^-k (log+|w_k| + C_inf/(d-1))], which settles bounded orbits.
inline HeightValue local_height_arch(const DynSystem& sys, const ComplexApprox& z, double tol, int k_max = 1000) {
    if (!(tol > 0)) throw DomainError("tol must be positive");
    const long d = sys.degree();
    const auto& c = sys.phi().coeffs();
    std::vector<double> a;
    for (auto& x : c) a.push_back(x.get_d());
    const double ad = std::fabs(a.back());
    double sum_low = 0.0;
    for (long i = 0; i < d; ++i) sum_low += std::fabs(a[static_cast<std::size_t>(i)]);
    const double r_esc =
        std::max({1.0, 2.0 * sum_low / ad, std::pow(4.0 / ad, 1.0 / double(d - 1))});
    const double log_c = -std::log(ad) / double(d - 1);
    const double c_inf = place_constant(sys, Place::infinity());
    auto delta_at = [&](double L) {
        double eta = 0.0;
        for (long i = 0; i < d; ++i)
            if (a[static_cast<std::size_t>(i)] != 0.0)
                eta += std::fabs(a[static_cast<std::size_t>(i)]) * std::exp(double(i - d) * L) / ad;
        return -std::log1p(-eta);
    };

    HeightValue out;
    if (z.log_modulus > 200.0) {
        // far outside double comfort: already in the escape region
        out.value = out.arch_part = z.log_modulus - log_c;
        out.error_bound = delta_at(z.log_modulus) / double(d - 1);
        return out;
    }
    std::complex<double> w = z.value();
    double scale = 1.0;  // d^-k
    for (int k = 0; k <= k_max; ++k) {
        const double m = std::abs(w);
        const double L = std::log(m);
        if (m >= r_esc) {
            const double err = scale * delta_at(L) / double(d - 1);
            if (err <= tol || m > 1e100) {
                out.value = out.arch_part = scale * (L - log_c);
                out.error_bound = err + 1e-15 * std::fabs(out.value);
                return out;
            }
        }
        const double trap = scale * (std::max(0.0, L) + c_inf / double(d - 1));
        if (trap <= tol) {
            out.error_bound = trap;
            return out;
        }
        if (k == k_max) break;
        std::complex<double> nw = a.back();
        for (long i = d - 1; i >= 0; --i) nw = nw * w + a[static_cast<std::size_t>(i)];
        w = nw;
        scale /= double(d);
    }
    // Not settled within k_max: report the trap bound, which is all we know.
    out.error_bound = scale * (std::max(0.0, std::log(std::abs(w))) + c_inf / double(d - 1));
    return out;
}

// ---------------------------------------------------------------------------
// Non-archimedean local height

namespace detail {

/// Valuation data of phi at p used by the branch classification.
struct PadicData {
    Integer p;
    long d;
    Rational alpha;
    long vd;
    /// (i, v(a_i)) for the nonzero coefficients.
    std::vector<std::pair<long, long>> vals;
    /// The disc {v >= t_min} is forward invariant when invariant_disc is set.
    bool invariant_disc = false;
    Rational t_min;

    explicit PadicData(const DynSystem& sys, const Integer& prime) : p(prime), d(sys.degree()) {
        alpha = alpha_v(sys, p);
        vd = valuation(sys.leading(), p);
        bool have_a0 = false, have_a1 = false;
        long v0 = 0, v1 = 0;
        t_min = Rational(-1000000000);
        bool any_high = false;
        for (long i = 0; i <= d; ++i) {
            const Rational& a = sys.phi().coeffs()[static_cast<std::size_t>(i)];
            if (a == 0) continue;
            const long va = valuation(a, p);
            vals.emplace_back(i, va);
            if (i == 0) {
                have_a0 = true;
                v0 = va;
            } else if (i == 1) {
                have_a1 = true;
                v1 = va;
            } else {
                Rational t = make_rational(-va, i - 1);
                if (!any_high || t > t_min) t_min = t;
                any_high = true;
            }
        }
        // {v >= t} maps into itself iff v(a_0) >= t, v(a_1) >= 0, v(a_i) >= -(i-1)t.
        invariant_disc = (!have_a1 || v1 >= 0) && (!have_a0 || Rational(v0) >= t_min);
    }

    /// log c_v in units of log p.
    Rational log_c() const { return make_rational(vd, d - 1); }

    /// v(phi(z)) from v(z) = s when one term of phi strictly dominates.
    bool image_valuation(const Rational& s, Rational& out) const {
        bool first = true, tie = false;
        for (auto& [i, va] : vals) {
            Rational t = Rational(va) + Rational(i) * s;
            if (first || t < out) {
                out = t;
                tie = false;
                first = false;
            } else if (t == out) {
                tie = true;
            }
        }
        return !tie;
    }

    bool in_invariant_disc(const Rational& s) const { return invariant_disc && s >= t_min; }
};

enum class Branch { escaped, bounded, undecided };

/// Follows the valuation of a point with v(z) = s while a single term of phi
/// dominates. On escape, `contribution` is hhat(z) in units of log p.
inline Branch follow_valuation(const PadicData& pd, Rational s, Rational& contribution, int max_steps = 4096) {
    std::set<Rational> seen;
    Rational scale = 1;
    for (int step = 0; step < max_steps; ++step) {
        if (s < pd.alpha) {
            contribution = scale * (-s - pd.log_c());
            return Branch::escaped;
        }
        if (pd.in_invariant_disc(s)) return Branch::bounded;
        if (!seen.insert(s).second) return Branch::bounded;  // valuation cycle
        Rational next;
        if (!pd.image_valuation(s, next)) return Branch::undecided;
        s = next;
        scale /= Rational(pd.d);
    }
    return Branch::undecided;
}

/// hhat_p at a rational point, by exact forward orbit.
inline Branch rational_point_padic(const DynSystem& sys, const PadicData& pd, Rational x, Rational& contribution,
                                   int max_steps = 64) {
    std::set<Rational> seen;
    Rational scale = 1;
    for (int step = 0; step < max_steps; ++step) {
        if (x != 0) {
            Rational s(valuation(x, pd.p));
            if (s < pd.alpha) {
                contribution = scale * (-s - pd.log_c());
                return Branch::escaped;
            }
            if (pd.in_invariant_disc(s)) return Branch::bounded;
        } else if (pd.invariant_disc) {
            return Branch::bounded;
        }
        if (!seen.insert(x).second) return Branch::bounded;
        x = sys.phi()(x);
        scale /= Rational(pd.d);
        if (mpz_sizeinbase(x.get_num_mpz_t(), 2) + mpz_sizeinbase(x.get_den_mpz_t(), 2) > 1u << 16) break;
    }
    return Branch::undecided;
}

}  // namespace detail

struct PadicOptions {
    int max_levels = 32;
    /// Largest coefficient size (bits) of an image polynomial before giving up.
    std::size_t max_bits = 1u << 15;
    /// Disc fallback: refinement depth below the coarsest root disc, orbit
    /// steps per disc, and p-adic digits kept on disc centres.
    int disc_depth = 128;
    int disc_steps = 4096;
    long disc_precision = 256;
    bool disc_fallback = true;
    /// Levels and starting p-adic digits of the pushforward kept modulo p^M.
    int capped_levels = 64;
    long capped_digits = 2048;
};

namespace detail {

inline Rational pow_rational(const Integer& p, long e) {
    const Integer q = ipow(p, static_cast<unsigned long>(e < 0 ? -e : e));
    return e < 0 ? make_rational(Integer(1), q) : Rational(q);
}

// p-adic discs D(c, t) = {z : v(z - c) >= t} with rational centre c.

/// A rational y with v(y - x) >= ceil(t) and small numerator and denominator.
inline Rational padic_truncate(const Rational& x, const Rational& t, const Integer& p) {
    if (x == 0) return 0;
    Integer T = t.get_num();
    mpz_cdiv_q(T.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
    const long v = valuation(x, p);
    if (Rational(v) >= Rational(T)) return 0;
    const Integer m = ipow(p, static_cast<unsigned long>(T.get_si() - v));
    const Rational u = x / pow_rational(p, v);
    Integer inv, r;
    mpz_invert(inv.get_mpz_t(), Integer(u.get_den()).get_mpz_t(), m.get_mpz_t());
    r = Integer(u.get_num()) * inv;
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
    return Rational(r) * pow_rational(p, v);
}

/// Roots of f (with multiplicity) at distance >= t from c.
inline long roots_in_disc(const RatPoly& f, const Rational& c, const Rational& t, const Integer& p) {
    const NewtonPolygon np = newton_polygon(compose(f, RatPoly({c, Rational(1)})), p);
    long n = np.zero_roots;
    for (auto& [s, m] : np.root_valuations())
        if (s >= t) n += m;
    return n;
}

/// sup of hhat_p (units of log p) over {v >= alpha}. One step maps this set
/// into {v >= m1}, m1 = min v(a_i) + i alpha, where escaped points have
/// hhat = -s - log c; so M <= max(0, (-m1 - log c) / d).
inline Rational bounded_region_sup(const PadicData& pd) {
    bool first = true;
    Rational m1;
    for (auto& [i, va] : pd.vals) {
        Rational r = Rational(va) + Rational(i) * pd.alpha;
        if (first || r < m1) m1 = r;
        first = false;
    }
    const Rational m = (-m1 - pd.log_c()) / Rational(pd.d);
    return m > 0 ? m : Rational(0);
}

/// Fate of every point of D(c, t): escaped with a common height, bounded
/// (the disc orbit stays out of the escape region and returns into a disc it
/// visited, or enters the invariant disc), or undecided. When undecided after
/// k >= 1 discs that avoid the escape region, `bound` = d^-(k-1) M encloses
/// hhat in [0, bound] and has_bound is set.
inline Branch disc_fate(const DynSystem& sys, const PadicData& pd, Rational c, Rational t, Rational& contribution,
                        const PadicOptions& opt, Rational* bound = nullptr) {
    std::map<Rational, std::set<Rational>> seen;
    Rational scale = 1;
    c = padic_truncate(c, t, pd.p);
    auto open = [&](int step) {
        if (bound) *bound = step == 0 ? Rational(-1) : scale * Rational(pd.d) * bounded_region_sup(pd);
        return Branch::undecided;
    };
    for (int step = 0; step < opt.disc_steps; ++step) {
        const bool annulus = c != 0 && t > Rational(valuation(c, pd.p));
        if (annulus) {
            const Rational s(valuation(c, pd.p));
            if (s < pd.alpha) {
                contribution = scale * (-s - pd.log_c());
                return Branch::escaped;
            }
            if (pd.in_invariant_disc(s)) return Branch::bounded;
        } else {
            // D(c, t) = D(0, t) holds every valuation >= t
            if (t < pd.alpha) return open(step);
            if (pd.in_invariant_disc(t)) return Branch::bounded;
        }
        for (auto& [tj, centres] : seen)
            if (tj <= t && centres.count(padic_truncate(c, tj, pd.p))) return Branch::bounded;
        seen[t].insert(c);

        const RatPoly taylor = compose(sys.phi(), RatPoly({c, Rational(1)}));
        bool first = true;
        Rational tau;
        for (long i = 1; i <= taylor.degree(); ++i) {
            const Rational& b = taylor.coeffs()[static_cast<std::size_t>(i)];
            if (b == 0) continue;
            Rational r = Rational(valuation(b, pd.p)) + Rational(i) * t;
            if (first || r < tau) tau = r;
            first = false;
        }
        const Rational img = taylor.coeffs()[0];
        // enlarging a disc is always sound; it keeps the centres short
        const Rational cap = Rational((img == 0 ? 0 : valuation(img, pd.p)) + opt.disc_precision);
        if (tau > cap) tau = cap;
        t = tau;
        c = padic_truncate(img, t, pd.p);
        scale /= Rational(pd.d);
    }
    return open(opt.disc_steps);
}

/// A polynomial with p-integral coefficients known modulo p^prec.
struct CappedPoly {
    RatPoly f;
    long prec = 0;
};

inline RatPoly truncate_poly(const RatPoly& f, long prec, const Integer& p) {
    std::vector<Rational> c;
    c.reserve(f.coeffs().size());
    for (auto& a : f.coeffs()) c.push_back(padic_truncate(a, Rational(prec), p));
    return RatPoly(std::move(c));
}

/// Divides out the p-content; false if no coefficient is known to be nonzero.
inline bool normalize_capped(CappedPoly& g, const Integer& p) {
    long c = g.prec;
    for (auto& a : g.f.coeffs())
        if (a != 0) c = std::min(c, valuation(a, p));
    if (c >= g.prec) return false;
    g.f = truncate_poly(g.f * pow_rational(p, -c), g.prec - c, p);
    g.prec -= c;
    return true;
}

/// z -> p^t z on coefficients: a_i -> a_i p^(t i).
inline CappedPoly scale_variable(const CappedPoly& g, long t, const Integer& p) {
    std::vector<Rational> c;
    long prec = g.prec;
    for (long i = 0; i <= g.f.degree(); ++i) {
        c.push_back(g.f.coeffs()[static_cast<std::size_t>(i)] * pow_rational(p, t * i));
        prec = std::min(prec, g.prec + t * i);
    }
    return {RatPoly(std::move(c)), prec};
}

/// Splits g (of formal degree n) into the roots with v >= t and those with
/// v < t. After z = p^t y the first factor reduces to a polynomial of full
/// degree mod p and the second to a unit, so quadratic Hensel lifting applies.
/// Returns false when the precision does not determine the split.
inline bool slope_split(const CappedPoly& g, long n, long t, const Integer& p, CappedPoly& high, CappedPoly& low) {
    CappedPoly h = scale_variable(g, t, p);
    if (!normalize_capped(h, p)) return false;
    long m = -1;
    for (long i = 0; i <= h.f.degree(); ++i) {
        const Rational& a = h.f.coeffs()[static_cast<std::size_t>(i)];
        if (a != 0 && valuation(a, p) == 0) m = i;
    }
    if (m < 0 || h.f.degree() != n) return false;
    const Rational hm = h.f.coeffs()[static_cast<std::size_t>(m)];
    std::vector<Rational> lowpart(h.f.coeffs().begin(), h.f.coeffs().begin() + m + 1);
    RatPoly A = RatPoly(std::move(lowpart)) * (Rational(1) / hm);  // monic lift mod p
    RatPoly B = RatPoly::constant(hm);
    RatPoly S = RatPoly::constant(Rational(1) / hm), T;  // S B + T A = 1 mod p
    const RatPoly one = RatPoly::constant(Rational(1));
    for (long j = 1; j < h.prec;) {
        j = std::min(2 * j, h.prec);
        const RatPoly e = truncate_poly(h.f - B * A, j, p);
        auto [q, r] = divmod(S * e, A);
        RatPoly Bn = truncate_poly(B + T * e + q * B, j, p);
        RatPoly An = truncate_poly(A + r, j, p);
        const RatPoly bb = truncate_poly(S * Bn + T * An - one, j, p);
        auto [c, d] = divmod(S * bb, An);
        S = truncate_poly(S - d, j, p);
        T = truncate_poly(T - T * bb - c * Bn, j, p);
        A = std::move(An);
        B = std::move(Bn);
    }
    // back to z = p^t y; a factor of degree k loses up to t k digits
    high = scale_variable({A, h.prec}, -t, p);
    low = scale_variable({B, h.prec}, -t, p);
    return normalize_capped(high, p) && normalize_capped(low, p) && high.f.degree() == m;
}

/// The level classification run on images known only modulo p^M. With
/// p^e phi p-integral, Res_z(G, w - phi) is p^-(e n) times an integer
/// polynomial in the coefficients, so a representative good to M digits gives
/// the next image to M - e n - c digits after removing its p-content p^c.
/// A Newton segment is trusted only when both end points have known
/// valuation. Decided roots are split off p-adically and only the factor
/// holding the tied roots is pushed on. Tied roots at level k have hhat in
/// [0, d^-k sup], reported as slack; sums are in units of log p.
inline bool capped_level_sum(const DynSystem& sys, const PadicData& pd, const IntPoly& g0, const PadicOptions& opt,
                             Rational& total, Rational& slack) {
    long e = 0;
    for (auto& [i, va] : pd.vals) e = std::max(e, -va);
    const Rational sup = bounded_region_sup(pd);
    CappedPoly G{to_rat_poly(g0), opt.capped_digits};
    Rational scale = 1, dropped = 0;
    bool have = false;
    for (int level = 0; level <= opt.capped_levels; ++level) {
        const long n = G.f.degree();
        // Newton polygon with unknown coefficients placed at height prec
        struct Pt {
            long i;
            Rational v;
            bool known;
        };
        std::vector<Pt> hull;
        for (long i = 0; i <= n; ++i) {
            const Rational& a = G.f.coeffs()[static_cast<std::size_t>(i)];
            const bool known = a != 0 && valuation(a, pd.p) < G.prec;
            Pt q{i, Rational(known ? valuation(a, pd.p) : G.prec), known};
            while (hull.size() >= 2) {
                const Pt& a1 = hull[hull.size() - 2];
                const Pt& a2 = hull.back();
                if ((a2.v - a1.v) * Rational(q.i - a1.i) >= (q.v - a1.v) * Rational(a2.i - a1.i))
                    hull.pop_back();
                else
                    break;
            }
            hull.push_back(q);
        }
        if (!hull.back().known) return have;
        struct Seg {
            Rational s;
            long m;
            Branch b;
            Rational c;
        };
        std::vector<Seg> segs;
        Rational escaped = 0;
        long tied = 0;
        bool uncertain = false;
        for (std::size_t k = 1; k < hull.size(); ++k) {
            const long m = hull[k].i - hull[k - 1].i;
            if (!hull[k - 1].known || !hull[k].known) {
                tied += m;
                uncertain = true;
                continue;
            }
            Seg sg{-(hull[k].v - hull[k - 1].v) / Rational(m), m, Branch::undecided, 0};
            sg.b = follow_valuation(pd, sg.s, sg.c);
            if (sg.b == Branch::undecided) tied += m;
            if (sg.b == Branch::escaped) escaped += sg.c * Rational(m);
            segs.push_back(sg);
        }
        const Rational lvl_slack = scale * Rational(tied) * sup;
        if (!have || lvl_slack < slack) {
            have = true;
            total = dropped + scale * escaped;
            slack = lvl_slack;
        }
        if (tied == 0 || uncertain || level == opt.capped_levels) return have;

        // keep the roots with valuation in [t1, t2), which holds every tie
        bool first = true;
        Rational lo, hi;
        for (auto& sg : segs) {
            if (sg.b != Branch::undecided) continue;
            if (first || sg.s < lo) lo = sg.s;
            if (first || sg.s > hi) hi = sg.s;
            first = false;
        }
        Integer t1 = lo.get_num(), t2 = hi.get_num();
        mpz_fdiv_q(t1.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
        mpz_fdiv_q(t2.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
        t2 += 1;
        long below = 0, above = 0;
        for (auto& sg : segs) {
            if (sg.s < Rational(t1)) {
                below += sg.m;
                if (sg.b == Branch::escaped) dropped += scale * sg.c * Rational(sg.m);
            } else if (sg.s >= Rational(t2)) {
                above += sg.m;
                if (sg.b == Branch::escaped) dropped += scale * sg.c * Rational(sg.m);
            }
        }
        CappedPoly hiF, loF;
        if (below > 0) {
            if (!slope_split(G, n, t1.get_si(), pd.p, hiF, loF)) return have;
            G = hiF;
        }
        if (above > 0) {
            if (!slope_split(G, G.f.degree(), t2.get_si(), pd.p, hiF, loF)) return have;
            G = loF;
        }

        const long k = G.f.degree();
        std::vector<Rational> values;
        values.reserve(static_cast<std::size_t>(k + 1));
        for (long w = 0; w <= k; ++w) values.push_back(resultant(G.f, RatPoly::constant(Rational(w)) - sys.phi()));
        CappedPoly R{interpolate_at_integers(values), G.prec - e * k};
        if (R.prec <= 0 || R.f.degree() != k || !normalize_capped(R, pd.p)) return have;
        G = std::move(R);
        scale /= Rational(pd.d);
    }
    return have;
}

/// Sum of hhat_p (units of log p) over the roots of g, by isolating them in
/// rational-centred discs whose fate is decided. Roots whose disc stays
/// undecided add their enclosure width to `slack`; false if some root has no
/// enclosure at all.
inline bool disc_height_sum(const DynSystem& sys, const PadicData& pd, const IntPoly& g, const PadicOptions& opt,
                            Rational& total, Rational& slack) {
    const RatPoly f = to_rat_poly(g);
    const NewtonPolygon np0 = newton_polygon(f, pd.p);
    Rational lo = 0;
    bool any = false;
    for (auto& [s, m] : np0.root_valuations())
        if (!any || s < lo) lo = s, any = true;
    Integer t0 = lo.get_num();
    mpz_fdiv_q(t0.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    const long t_max = t0.get_si() + opt.disc_depth;
    total = 0;
    slack = 0;

    // settles m roots lying in a disc; false if they get no enclosure
    auto settle = [&](const Rational& c, const Rational& t, long m, bool final) {
        Rational contrib, bound;
        const Branch b = disc_fate(sys, pd, c, t, contrib, opt, &bound);
        if (b == Branch::escaped) total += contrib * Rational(m);
        if (b != Branch::undecided) return 1;
        if (!final) return 0;
        if (bound < 0) return -1;
        slack += bound * Rational(m);
        return 1;
    };

    std::function<bool(const Rational&, long, long)> node = [&](const Rational& c, long t, long m) {
        const int r0 = settle(c, Rational(t), m, t >= t_max);
        if (r0 != 0) return r0 > 0;
        long in_children = 0, at_t_children = 0;
        std::vector<std::pair<Rational, long>> kids;
        for (Integer r = 0; r < pd.p; ++r) {
            const Rational ci = c + Rational(r) * pow_rational(pd.p, t);
            const long mi = roots_in_disc(f, ci, Rational(t + 1), pd.p);
            if (mi == 0) continue;
            kids.emplace_back(ci, mi);
            in_children += mi;
            if (r != 0) at_t_children += mi;
        }
        for (auto& [ci, mi] : kids)
            if (!node(ci, t + 1, mi)) return false;
        if (in_children == m) return true;
        // roots at distance in [t, t + 1) from c that no child holds: use the
        // smallest disc about c containing them
        const NewtonPolygon np = newton_polygon(compose(f, RatPoly({c, Rational(1)})), pd.p);
        for (auto& [s, ms] : np.root_valuations()) {
            if (s < Rational(t) || s >= Rational(t + 1)) continue;
            const long left = s == Rational(t) ? ms - at_t_children : ms;
            if (left > 0 && settle(c, s, left, true) < 0) return false;
        }
        return true;
    };
    return node(Rational(0), t0.get_si(), g.degree());
}
}  // namespace detail

/// (1/N) sum over x in S of hhat_{phi,p}(x), exactly.
///
/// Good reduction: hhat_p = log+|.|_p. Otherwise the multiset images
/// g_k = phi^k(S) are formed by resultants and the root valuations of g_k
/// are classified from its Newton polygon: below alpha a root has escaped and
/// its height is exact; inside the invariant disc, or on a valuation path that
/// cycles, it is bounded. If some class is decided by neither (a tie in the
/// dominant term), the next level is tried. When the levels run out the roots
/// are isolated in p-adic discs with rational centres and each disc is pushed
/// forward until it escapes or lands inside a disc it visited before.
/// The local height with an enclosure: the true value lies in
/// [value, value + slack log p], and slack is 0 whenever value is exact.
/// Points that neither escape nor provably stay bounded (typically points of
/// an expanding p-adic Julia set) only get an enclosure.
struct PadicEnclosure {
    LogAbs value;
    Rational slack;
    double width(const Integer& p) const { return slack.get_d() * std::log(p.get_d()); }
};

inline PadicEnclosure local_height_padic_enclosure(const DynSystem& sys, const GaloisSet& S, const Integer& p,
                                                   const PadicOptions& opt = {}) {
    const Rational inv_n = make_rational(1, S.cardinality());
    if (has_good_reduction(sys, p)) return {sum_log_plus(S.poly(), Place::finite(p)).scaled(inv_n), 0};
    const detail::PadicData pd(sys, p);
    IntPoly g = S.poly();
    Rational scale = 1;  // d^-k
    std::vector<IntPoly> images;
    for (int level = 0; level <= opt.max_levels; ++level) {
        // a repeated image set means S has a finite orbit, so every point is preperiodic
        IntPoly img = squarefree_part(g);
        if (img.leading() < 0) img = -img;
        if (std::find(images.begin(), images.end(), img) != images.end()) return {LogAbs::zero(), 0};
        images.push_back(std::move(img));
        const NewtonPolygon np = newton_polygon(g, p);
        Rational total = 0;
        bool tied = false;
        if (np.zero_roots > 0) {
            Rational c;
            auto b = detail::rational_point_padic(sys, pd, Rational(0), c);
            if (b == detail::Branch::undecided) tied = true;
            if (b == detail::Branch::escaped) total += c * Rational(np.zero_roots);
        }
        for (auto& [s, m] : np.root_valuations()) {
            Rational c;
            auto b = detail::follow_valuation(pd, s, c);
            if (b == detail::Branch::undecided) tied = true;
            if (b == detail::Branch::escaped) total += c * Rational(m);
        }
        if (!tied) return {LogAbs::exact(total * scale * inv_n, p), 0};
        if (level == opt.max_levels) break;
        g = pushforward_multiset(g, sys.phi());
        if (detail::max_coeff_bits(g) > opt.max_bits) break;
        scale /= Rational(sys.degree());
    }
    if (opt.disc_fallback) {
        // two independent enclosures; keep the narrower
        Rational total, slack, t2, s2;
        const bool discs = detail::disc_height_sum(sys, pd, S.poly(), opt, total, slack);
        if (!discs || slack != 0) {
            const bool levels = detail::capped_level_sum(sys, pd, S.poly(), opt, t2, s2);
            if (levels && (!discs || s2 < slack)) total = t2, slack = s2;
            if (!levels && !discs)
                throw UndecidedBranchError("no enclosure at p = " + p.get_str() + " for " + to_string(S.poly()));
        }
        return {LogAbs::exact(total * inv_n, p), slack * inv_n};
    }
    throw UndecidedBranchError("undecided branch at p = " + p.get_str() + " for " + to_string(S.poly()));
}

/// Exact local height; UndecidedBranchError when only an enclosure is known.
inline LogAbs local_height_padic(const DynSystem& sys, const GaloisSet& S, const Integer& p,
                                 const PadicOptions& opt = {}) {
    PadicEnclosure e = local_height_padic_enclosure(sys, S, p, opt);
    if (e.slack != 0)
        throw UndecidedBranchError("p = " + p.get_str() + " height of " + to_string(S.poly()) +
                                   " only enclosed, width " + std::to_string(e.width(p)));
    return e.value;
}

// ---------------------------------------------------------------------------
// Global canonical height

struct HeightOptions {
    /// Pushforward steps of the independent limit computation.
    int oracle_steps = 6;
    /// Skip the cross-check for sets larger than this (cost grows with N).
    long oracle_max_degree = 12;
    bool cross_check = true;
    PadicOptions padic;
};

/// Primes whose local height can be nonzero for S under phi.
inline std::set<Integer> height_primes(const DynSystem& sys, const GaloisSet& S) {
    std::set<Integer> ps = sys.bad_primes();
    for (auto& [p, e] : factor(S.poly().leading())) ps.insert(p);
    return ps;
}

/// d^-n h(phi^n(S)) over the multiset image, with the tail bound
/// C_phi / ((d-1) d^n) added to the error.
inline HeightValue pushforward_limit_height(const DynSystem& sys, const GaloisSet& S, int n) {
    IntPoly g = S.poly();
    for (int k = 0; k < n; ++k) g = pushforward_multiset(g, sys.phi());
    HeightValue m = mahler_height(g);
    const double dn = std::pow(double(sys.degree()), n);
    HeightValue out;
    out.value = out.arch_part = m.value / dn;
    out.error_bound = m.error_bound / dn + height_constant(sys) / (double(sys.degree() - 1) * dn);
    return out;
}

/// hhat_phi(S) as the average of local canonical heights over all places.
/// The result is cross-checked against the pushforward limit; disagreement
/// beyond the combined error bounds throws.
/// `roots` must be the complex roots of S (as from complex_roots).
inline HeightValue canonical_height(const DynSystem& sys, const GaloisSet& S, const std::vector<ComplexApprox>& roots,
                                    double tol, const HeightOptions& opt = {}) {
    if (!(tol > 0)) throw DomainError("tol must be positive");
    if (roots.size() != std::size_t(S.cardinality())) throw DomainError("root count does not match the set");
    HeightValue h;
    double err = 0.0;
    for (auto& p : height_primes(sys, S)) {
        PadicEnclosure e = local_height_padic_enclosure(sys, S, p, opt.padic);
        if (e.width(p) > tol)
            throw UndecidedBranchError("p = " + p.get_str() + " height of " + to_string(S.poly()) +
                                       " enclosed only to width " + std::to_string(e.width(p)));
        h.exact_part += e.value;
        err += e.width(p);
    }
    const double padic_err = err;
    double arch = 0.0;
    err = 0.0;
    for (auto& r : roots) {
        HeightValue l = local_height_arch(sys, r, tol);
        arch += l.value;
        err += l.error_bound;
    }
    h.arch_part = arch / double(S.cardinality());
    h.error_bound = err / double(S.cardinality()) + padic_err;
    h.value = h.exact_part.to_double() + h.arch_part;

    if (opt.cross_check && S.cardinality() <= opt.oracle_max_degree) {
        HeightValue o = pushforward_limit_height(sys, S, opt.oracle_steps);
        const double slack = 1e-12 * std::max(1.0, std::fabs(h.value));
        if (std::fabs(o.value - h.value) > o.error_bound + h.error_bound + slack)
            throw Error("canonical height cross-check failed: local sum " + std::to_string(h.value) +
                        " vs pushforward limit " + std::to_string(o.value) + " (bound " +
                        std::to_string(o.error_bound + h.error_bound) + ")");
        h.oracle_checked = true;
    }
    return h;
}

inline HeightValue canonical_height(const DynSystem& sys, const GaloisSet& S, double tol,
                                    const HeightOptions& opt = {}) {
    return canonical_height(sys, S, complex_roots(S.poly()), tol, opt);
}

/// Exact forward orbit of a rational point. Preperiodic points have
/// canonical height 0, hence naive height at most C_phi/(d-1); an iterate
/// above that (plus a margin of 1) proves the orbit infinite.
inline bool is_preperiodic_rational(const DynSystem& sys, const Rational& x, long max_steps = 100000) {
    const double bound = height_constant(sys) / double(sys.degree() - 1) + 1.0;
    std::set<Rational> seen;
    Rational y = x;
    for (long k = 0; k < max_steps; ++k) {
        if (!seen.insert(y).second) return true;
        const double h = y == 0 ? 0.0
                                : std::max(log_abs(Integer(y.get_num())), log_abs(Integer(y.get_den())));
        if (h > bound) return false;
        y = sys.phi()(y);
    }
    throw NonConvergenceError("preperiodicity undecided after " + std::to_string(max_steps) + " steps");
}

}  // namespace arithdyn
