#pragma once

// Roots two ways: complex approximations by Aberth-Ehrlich iteration, and
// p-adic root valuations read off the Newton polygon.

#include <mpfr.h>

#include <cfloat>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "arithdyn/places.hpp"
#include "arithdyn/poly.hpp"

namespace arithdyn {

struct ComplexApprox {
    double re = 0.0;
    double im = 0.0;
    /// N |f(z)/f'(z)| at the returned point, evaluated in high precision.
    double residual_bound = 0.0;
    /// ln|z|, kept separately so roots outside double range keep their size.
    double log_modulus = -std::numeric_limits<double>::infinity();

    static ComplexApprox point(std::complex<double> z) {
        ComplexApprox c;
        c.re = z.real();
        c.im = z.imag();
        c.log_modulus = std::abs(z) == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(z));
        return c;
    }
    std::complex<double> value() const { return {re, im}; }
    double modulus() const { return std::hypot(re, im); }
};

struct NewtonSegment {
    Rational slope;
    long length;
};

/// Lower convex hull of (i, v_p(a_i)). Roots at 0 are split off and counted
/// in zero_roots (valuation +infinity); every other root on a segment of
/// slope s has valuation -s.
struct NewtonPolygon {
    long zero_roots = 0;
    std::vector<NewtonSegment> segments;

    long degree() const {
        long n = zero_roots;
        for (auto& s : segments) n += s.length;
        return n;
    }
    /// (valuation, multiplicity) pairs for the nonzero roots, valuations decreasing.
    std::vector<std::pair<Rational, long>> root_valuations() const {
        std::vector<std::pair<Rational, long>> out;
        for (auto& s : segments) out.emplace_back(-s.slope, s.length);
        return out;
    }
};

template <class Coeff>
NewtonPolygon newton_polygon(const Poly<Coeff>& f, const Integer& p) {
    if (f.is_zero()) throw DomainError("Newton polygon of the zero polynomial");
    NewtonPolygon np;
    struct Pt {
        long i;
        Rational v;
    };
    std::vector<Pt> hull;
    for (long i = 0; i <= f.degree(); ++i) {
        const Coeff& a = f.coeffs()[static_cast<std::size_t>(i)];
        if (a == 0) {
            if (hull.empty()) ++np.zero_roots;
            continue;
        }
        Pt q{i, Rational(valuation(a, p))};
        // pop while the last point is on or above the chord to q
        while (hull.size() >= 2) {
            const Pt& a1 = hull[hull.size() - 2];
            const Pt& a2 = hull.back();
            Rational lhs = (a2.v - a1.v) * Rational(q.i - a1.i);
            Rational rhs = (q.v - a1.v) * Rational(a2.i - a1.i);
            if (lhs >= rhs)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(q);
    }
    for (std::size_t k = 1; k < hull.size(); ++k) {
        const long len = hull[k].i - hull[k - 1].i;
        np.segments.push_back({(hull[k].v - hull[k - 1].v) / Rational(len), len});
    }
    return np;
}

namespace detail {

using cd = std::complex<double>;

class Mpf {
public:
    explicit Mpf(mpfr_prec_t prec) { mpfr_init2(v, prec); mpfr_set_zero(v, 1); }
    Mpf(const Mpf& o) {
        mpfr_init2(v, mpfr_get_prec(o.v));
        mpfr_set(v, o.v, MPFR_RNDN);
    }
    Mpf(Mpf&& o) noexcept {
        mpfr_init2(v, mpfr_get_prec(o.v));
        mpfr_swap(v, o.v);
    }
    Mpf& operator=(const Mpf& o) {
        if (this != &o) {
            mpfr_set_prec(v, mpfr_get_prec(o.v));
            mpfr_set(v, o.v, MPFR_RNDN);
        }
        return *this;
    }
    ~Mpf() { mpfr_clear(v); }
    mpfr_t v;
};

struct Mpc {
    explicit Mpc(mpfr_prec_t prec) : re(prec), im(prec) {}
    Mpf re, im;
};

/// Scratch registers for complex MPFR arithmetic.
struct MpWork {
    explicit MpWork(mpfr_prec_t prec) : t1(prec), t2(prec), t3(prec), p(prec), dp(prec), s(prec), u(prec) {}
    Mpf t1, t2, t3;
    Mpc p, dp, s, u;
};

inline void cmul(Mpc& r, const Mpc& x, const Mpc& y, MpWork& w) {
    mpfr_fmms(w.t1.v, x.re.v, y.re.v, x.im.v, y.im.v, MPFR_RNDN);
    mpfr_fmma(w.t2.v, x.re.v, y.im.v, x.im.v, y.re.v, MPFR_RNDN);
    mpfr_swap(r.re.v, w.t1.v);
    mpfr_swap(r.im.v, w.t2.v);
}

inline void cdiv(Mpc& r, const Mpc& x, const Mpc& y, MpWork& w) {
    mpfr_fmma(w.t3.v, y.re.v, y.re.v, y.im.v, y.im.v, MPFR_RNDN);
    mpfr_fmma(w.t1.v, x.re.v, y.re.v, x.im.v, y.im.v, MPFR_RNDN);
    mpfr_fmms(w.t2.v, x.im.v, y.re.v, x.re.v, y.im.v, MPFR_RNDN);
    mpfr_div(r.re.v, w.t1.v, w.t3.v, MPFR_RNDN);
    mpfr_div(r.im.v, w.t2.v, w.t3.v, MPFR_RNDN);
}

inline void cabs(Mpf& r, const Mpc& x) { mpfr_hypot(r.v, x.re.v, x.im.v, MPFR_RNDN); }

/// f(z) into w.p and f'(z) into w.dp.
inline void horner(const std::vector<Mpf>& a, const Mpc& z, MpWork& w) {
    const std::size_t n = a.size() - 1;
    mpfr_set(w.p.re.v, a[n].v, MPFR_RNDN);
    mpfr_set_zero(w.p.im.v, 1);
    mpfr_set_zero(w.dp.re.v, 1);
    mpfr_set_zero(w.dp.im.v, 1);
    for (std::size_t i = n; i-- > 0;) {
        cmul(w.dp, w.dp, z, w);
        mpfr_add(w.dp.re.v, w.dp.re.v, w.p.re.v, MPFR_RNDN);
        mpfr_add(w.dp.im.v, w.dp.im.v, w.p.im.v, MPFR_RNDN);
        cmul(w.p, w.p, z, w);
        mpfr_add(w.p.re.v, w.p.re.v, a[i].v, MPFR_RNDN);
    }
}

/// Residual N|f/f'| at z and the relative form N|f/f'| / (1 + |z|).
/// Returns false when f'(z) = 0.
inline bool residual_at(const std::vector<Mpf>& a, const Mpc& z, MpWork& w, double& abs_res, double& rel_res,
                        bool& exact_root) {
    horner(a, z, w);
    exact_root = mpfr_zero_p(w.p.re.v) && mpfr_zero_p(w.p.im.v);
    if (exact_root) {
        abs_res = rel_res = 0.0;
        return true;
    }
    if (mpfr_zero_p(w.dp.re.v) && mpfr_zero_p(w.dp.im.v)) return false;
    cdiv(w.s, w.p, w.dp, w);
    cabs(w.t1, w.s);
    mpfr_mul_ui(w.t1.v, w.t1.v, a.size() - 1, MPFR_RNDU);
    abs_res = std::min(mpfr_get_d(w.t1.v, MPFR_RNDU), DBL_MAX);
    cabs(w.t2, z);
    mpfr_add_ui(w.t2.v, w.t2.v, 1, MPFR_RNDD);
    mpfr_div(w.t1.v, w.t1.v, w.t2.v, MPFR_RNDU);
    rel_res = mpfr_get_d(w.t1.v, MPFR_RNDU);
    return true;
}

/// Initial radii from the upper convex hull of (i, log|a_i|): an edge from i
/// to j carries j - i roots of modulus about (|a_i|/|a_j|)^(1/(j-i)).
inline std::vector<std::pair<double, long>> hull_radii(const IntPoly& f) {
    std::vector<std::pair<long, double>> pts;
    for (long i = 0; i <= f.degree(); ++i)
        if (f.coeff(static_cast<std::size_t>(i)) != 0) pts.emplace_back(i, log_abs(f.coeff(static_cast<std::size_t>(i))));
    std::vector<std::pair<long, double>> hull;
    for (auto& q : pts) {
        while (hull.size() >= 2) {
            auto& a1 = hull[hull.size() - 2];
            auto& a2 = hull.back();
            double cross = (a2.second - a1.second) * double(q.first - a1.first) -
                           (q.second - a1.second) * double(a2.first - a1.first);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(q);
    }
    std::vector<std::pair<double, long>> out;
    for (std::size_t k = 1; k < hull.size(); ++k) {
        const long len = hull[k].first - hull[k - 1].first;
        out.emplace_back((hull[k - 1].second - hull[k].second) / double(len), len);
    }
    return out;
}

/// Starting points: per hull edge, a circle of the edge's radius with
/// golden-angle offsets so no two circles line up.
inline std::vector<std::pair<double, double>> initial_log_polar(const IntPoly& f) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<std::pair<double, double>> out;
    long edge = 0;
    for (auto& [logr, k] : hull_radii(f)) {
        const double offset = 0.4 + golden * double(edge++);
        for (long m = 0; m < k; ++m) out.emplace_back(logr, 2.0 * std::numbers::pi * double(m) / double(k) + offset);
    }
    return out;
}

/// f(z)/f'(z) in double; for |z| > 1 through the reversed polynomial so
/// large z does not overflow.
inline cd newton_ratio(const std::vector<double>& a, cd z) {
    const std::size_t n = a.size() - 1;
    if (std::abs(z) <= 1.0) {
        cd p = a[n], dp = 0.0;
        for (std::size_t i = n; i-- > 0;) {
            dp = dp * z + p;
            p = p * z + a[i];
        }
        return p / dp;
    }
    const cd w = 1.0 / z;
    cd r = a[0], dr = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        dr = dr * w + r;
        r = r * w + a[i];
    }
    return z / (double(n) - w * dr / r);
}

/// Double-precision Aberth sweeps. Returns true when every root met the
/// (uncertified) relative target.
inline bool aberth_double(const std::vector<double>& a, std::vector<cd>& z, double target, int max_sweeps) {
    const std::size_t n = z.size();
    std::vector<char> done(n, 0);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool all = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            cd ratio = newton_ratio(a, z[i]);
            if (!std::isfinite(ratio.real()) || !std::isfinite(ratio.imag())) {
                z[i] *= cd(1.0 + 1e-7, 1e-7);
                all = false;
                continue;
            }
            if (double(n) * std::abs(ratio) < target * (1.0 + std::abs(z[i]))) {
                done[i] = 1;
                continue;
            }
            all = false;
            cd s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) s += 1.0 / (z[i] - z[j]);
            z[i] -= ratio / (1.0 - ratio * s);
        }
        if (all) return true;
    }
    return false;
}

struct MpAberthResult {
    bool converged;
    double worst_rel;
};

inline MpAberthResult aberth_mp(const std::vector<Mpf>& a, std::vector<Mpc>& z, double target, int max_sweeps,
                                mpfr_prec_t prec, std::vector<ComplexApprox>& out) {
    const std::size_t n = z.size();
    MpWork w(prec);
    std::vector<char> done(n, 0);
    out.assign(n, ComplexApprox{});
    Mpc ratio(prec), acc(prec), diff(prec);
    double worst = 0.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool all = true;
        worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            double abs_res = 0, rel_res = 0;
            bool exact = false;
            if (!residual_at(a, z[i], w, abs_res, rel_res, exact)) {
                mpfr_mul_d(z[i].re.v, z[i].re.v, 1.0 + 1e-9, MPFR_RNDN);
                mpfr_add_d(z[i].im.v, z[i].im.v, 1e-9, MPFR_RNDN);
                all = false;
                worst = std::numeric_limits<double>::infinity();
                continue;
            }
            if (exact || rel_res < target) {
                done[i] = 1;
                out[i].residual_bound = abs_res;
                continue;
            }
            all = false;
            worst = std::max(worst, rel_res);
            // w.s holds f/f'; accumulate sum 1/(z_i - z_j) = conj(d)/|d|^2 in acc
            mpfr_set(ratio.re.v, w.s.re.v, MPFR_RNDN);
            mpfr_set(ratio.im.v, w.s.im.v, MPFR_RNDN);
            mpfr_set_zero(acc.re.v, 1);
            mpfr_set_zero(acc.im.v, 1);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                mpfr_sub(diff.re.v, z[i].re.v, z[j].re.v, MPFR_RNDN);
                mpfr_sub(diff.im.v, z[i].im.v, z[j].im.v, MPFR_RNDN);
                mpfr_fmma(w.t3.v, diff.re.v, diff.re.v, diff.im.v, diff.im.v, MPFR_RNDN);
                mpfr_ui_div(w.t3.v, 1, w.t3.v, MPFR_RNDN);
                mpfr_fma(acc.re.v, diff.re.v, w.t3.v, acc.re.v, MPFR_RNDN);
                mpfr_neg(w.t3.v, w.t3.v, MPFR_RNDN);
                mpfr_fma(acc.im.v, diff.im.v, w.t3.v, acc.im.v, MPFR_RNDN);
            }
            cmul(acc, ratio, acc, w);
            mpfr_ui_sub(acc.re.v, 1, acc.re.v, MPFR_RNDN);
            mpfr_neg(acc.im.v, acc.im.v, MPFR_RNDN);
            cdiv(w.u, ratio, acc, w);
            mpfr_sub(z[i].re.v, z[i].re.v, w.u.re.v, MPFR_RNDN);
            mpfr_sub(z[i].im.v, z[i].im.v, w.u.im.v, MPFR_RNDN);
        }
        if (all) return {true, 0.0};
    }
    return {false, worst};
}

inline void fill_point(ComplexApprox& c, const Mpc& z, mpfr_prec_t prec) {
    c.re = mpfr_get_d(z.re.v, MPFR_RNDN);
    c.im = mpfr_get_d(z.im.v, MPFR_RNDN);
    Mpf m(prec);
    cabs(m, z);
    if (mpfr_zero_p(m.v)) {
        c.log_modulus = -std::numeric_limits<double>::infinity();
    } else {
        mpfr_log(m.v, m.v, MPFR_RNDN);
        c.log_modulus = mpfr_get_d(m.v, MPFR_RNDN);
    }
}

inline std::size_t max_coeff_bits(const IntPoly& f) {
    std::size_t bits = 1;
    for (auto& c : f.coeffs()) bits = std::max(bits, mpz_sizeinbase(c.get_mpz_t(), 2));
    return bits;
}

}  // namespace detail

/// Relative residual target N|f/f'| < target (1 + |z|) for complex_roots.
inline constexpr double kRootTarget = 1e-12;
inline constexpr int kMaxSweeps = 200;

/// All deg f complex roots (with multiplicity). Double-precision Aberth
/// first, residuals re-evaluated in MPFR; if they miss the target the
/// iteration is redone in MPFR, doubling precision up to three times.
inline std::vector<ComplexApprox> complex_roots(const IntPoly& input) {
    if (input.degree() < 1) throw DomainError("complex_roots needs deg f >= 1");
    long zeros = 0;
    while (input.coeff(static_cast<std::size_t>(zeros)) == 0) ++zeros;
    std::vector<ComplexApprox> out(static_cast<std::size_t>(zeros), ComplexApprox{});
    for (auto& c : out) c.residual_bound = 0.0;
    std::vector<Integer> rest(input.coeffs().begin() + zeros, input.coeffs().end());
    const IntPoly f = primitive_part(IntPoly(std::move(rest)));
    const long n = f.degree();
    if (n == 0) return out;
    if (n == 1) {
        Rational r = make_rational(-f.coeff(0), f.coeff(1));
        ComplexApprox c = ComplexApprox::point(r.get_d());
        if (r != 0) c.log_modulus = log_abs(r);
        out.push_back(c);
        return out;
    }

    const std::size_t bits = detail::max_coeff_bits(f);
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(std::max<std::size_t>(128, 2 * bits + 64));
    auto mp_coeffs = [&](mpfr_prec_t pr) {
        std::vector<detail::Mpf> a;
        a.reserve(static_cast<std::size_t>(n + 1));
        for (auto& c : f.coeffs()) {
            a.emplace_back(pr);
            mpfr_set_z(a.back().v, c.get_mpz_t(), MPFR_RNDN);
        }
        return a;
    };
    const auto start = detail::initial_log_polar(f);

    // double attempt, usable when the coefficients and radii fit comfortably
    bool radii_ok = bits < 900;
    for (auto& s : start) radii_ok = radii_ok && std::fabs(s.first) < 600.0;
    if (radii_ok) {
        std::vector<double> a;
        for (auto& c : f.coeffs()) a.push_back(c.get_d());
        std::vector<detail::cd> z;
        for (auto& [logr, th] : start) z.push_back(std::polar(std::exp(logr), th));
        if (detail::aberth_double(a, z, kRootTarget / 4, kMaxSweeps)) {
            auto A = mp_coeffs(prec);
            detail::MpWork w(prec);
            std::vector<ComplexApprox> got(static_cast<std::size_t>(n));
            bool ok = true;
            for (long i = 0; i < n && ok; ++i) {
                detail::Mpc zi(prec);
                mpfr_set_d(zi.re.v, z[static_cast<std::size_t>(i)].real(), MPFR_RNDN);
                mpfr_set_d(zi.im.v, z[static_cast<std::size_t>(i)].imag(), MPFR_RNDN);
                double ar, rr;
                bool exact;
                ok = detail::residual_at(A, zi, w, ar, rr, exact) && rr < kRootTarget;
                detail::fill_point(got[static_cast<std::size_t>(i)], zi, prec);
                got[static_cast<std::size_t>(i)].residual_bound = ar;
            }
            if (ok) {
                out.insert(out.end(), got.begin(), got.end());
                return out;
            }
        }
    }

    std::vector<detail::Mpc> z;
    for (auto& [logr, th] : start) {
        z.emplace_back(prec);
        detail::Mpf r(prec);
        mpfr_set_d(r.v, logr, MPFR_RNDN);
        mpfr_exp(r.v, r.v, MPFR_RNDN);
        mpfr_mul_d(z.back().re.v, r.v, std::cos(th), MPFR_RNDN);
        mpfr_mul_d(z.back().im.v, r.v, std::sin(th), MPFR_RNDN);
    }
    double worst = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        auto A = mp_coeffs(prec);
        std::vector<ComplexApprox> got;
        auto res = detail::aberth_mp(A, z, kRootTarget, kMaxSweeps, prec, got);
        if (res.converged) {
            for (std::size_t i = 0; i < z.size(); ++i) detail::fill_point(got[i], z[i], prec);
            out.insert(out.end(), got.begin(), got.end());
            return out;
        }
        worst = res.worst_rel;
        prec *= 2;
        for (auto& zi : z) {
            mpfr_prec_round(zi.re.v, prec, MPFR_RNDN);
            mpfr_prec_round(zi.im.v, prec, MPFR_RNDN);
        }
    }
    throw NonConvergenceError("Aberth iteration did not converge after " + std::to_string(kMaxSweeps) +
                              " sweeps; worst relative residual " + std::to_string(worst));
}

inline std::vector<ComplexApprox> complex_roots(const RatPoly& f) {
    if (f.is_zero() || f.degree() < 1) throw DomainError("complex_roots needs deg f >= 1");
    return complex_roots(primitive_integer(f));
}

/// Sum over the roots of f of log+|root|_v. Exact at a prime (from the
/// Newton polygon), floating at infinity.
inline LogAbs sum_log_plus(const IntPoly& f, const Place& v) {
    if (f.degree() < 1) throw DomainError("sum_log_plus needs deg f >= 1");
    if (v.is_finite()) {
        Rational total = 0;
        for (auto& s : newton_polygon(f, v.prime()).segments)
            if (s.slope > 0) total += s.slope * Rational(s.length);
        return LogAbs::exact(total, v.prime());
    }
    double total = 0.0;
    for (auto& r : complex_roots(f)) total += std::max(0.0, r.log_modulus);
    return LogAbs::approx(total);
}

inline LogAbs sum_log_plus(const RatPoly& f, const Place& v) { return sum_log_plus(primitive_integer(f), v); }

}  // namespace arithdyn
