#pragma once

// Resultants over Z and Q by the subresultant PRS, and the ordered-pair
// discriminant derived from them.

#include <utility>

#include "arithdyn/poly.hpp"

namespace arithdyn {

/// Res(A, B) for integer polynomials (Sylvester determinant sign convention).
/// Subresultant pseudo-remainder sequence after removing contents.
inline Integer resultant(IntPoly A, IntPoly B) {
    if (A.is_zero() && B.is_zero()) throw DomainError("resultant of two zero polynomials");
    if (A.is_zero() || B.is_zero()) return 0;
    if (A.degree() == 0 && B.degree() == 0) return 1;
    if (B.degree() == 0) return ipow(B.leading(), static_cast<unsigned long>(A.degree()));
    if (A.degree() == 0) return ipow(A.leading(), static_cast<unsigned long>(B.degree()));

    int s = 1;
    if (A.degree() < B.degree()) {
        if ((A.degree() & 1) && (B.degree() & 1)) s = -1;
        std::swap(A, B);
    }
    Integer a = content(A), b = content(B);
    Integer t = ipow(a, static_cast<unsigned long>(B.degree())) * ipow(b, static_cast<unsigned long>(A.degree()));
    {
        std::vector<Integer> ca(A.coeffs()), cb(B.coeffs());
        for (auto& x : ca) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), a.get_mpz_t());
        for (auto& x : cb) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), b.get_mpz_t());
        A = IntPoly(std::move(ca));
        B = IntPoly(std::move(cb));
    }
    Integer g = 1, h = 1;
    while (true) {
        const long delta = A.degree() - B.degree();
        if ((A.degree() & 1) && (B.degree() & 1)) s = -s;
        IntPoly R = pseudo_remainder(A, B);
        A = std::move(B);
        if (R.is_zero()) return 0;
        Integer div = g * ipow(h, static_cast<unsigned long>(delta));
        std::vector<Integer> cr(R.coeffs());
        for (auto& x : cr) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), div.get_mpz_t());
        B = IntPoly(std::move(cr));
        g = A.leading();
        if (delta == 0) {
            // h unchanged
        } else {
            Integer num = ipow(g, static_cast<unsigned long>(delta));
            Integer den = ipow(h, static_cast<unsigned long>(delta - 1));
            mpz_divexact(h.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        }
        if (B.degree() <= 0) break;
    }
    const long da = A.degree();
    Integer num = ipow(B.leading(), static_cast<unsigned long>(da));
    Integer den = ipow(h, static_cast<unsigned long>(da - 1));
    Integer res;
    mpz_divexact(res.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return s * t * res;
}

namespace detail {
/// f = F / den with F integral; den > 0.
inline IntPoly clear_denominators(const RatPoly& f, Integer& den) {
    den = 1;
    for (auto& x : f.coeffs()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
    std::vector<Integer> c;
    c.reserve(f.coeffs().size());
    for (auto& x : f.coeffs()) c.emplace_back(Integer(x.get_num() * (den / x.get_den())));
    return IntPoly(std::move(c));
}
}  // namespace detail

/// Res(f, g) over Q; Res(c f, g) = c^(deg g) Res(f, g) removes denominators.
inline Rational resultant(const RatPoly& f, const RatPoly& g) {
    if (f.is_zero() && g.is_zero()) throw DomainError("resultant of two zero polynomials");
    Integer df, dg;
    IntPoly F = detail::clear_denominators(f, df), G = detail::clear_denominators(g, dg);
    Integer r = resultant(F, G);
    if (r == 0) return 0;
    const long m = std::max(f.degree(), 0L), n = std::max(g.degree(), 0L);
    Integer den = ipow(df, static_cast<unsigned long>(n)) * ipow(dg, static_cast<unsigned long>(m));
    return make_rational(r, den);
}

/// f / gcd(f, f'), as a primitive integer polynomial with positive leading coefficient.
inline IntPoly squarefree_part(const IntPoly& f) {
    if (f.is_zero()) throw DomainError("squarefree part of the zero polynomial");
    IntPoly p = primitive_part(f);
    if (p.degree() <= 0) return IntPoly::constant(Integer(1));
    IntPoly dp = primitive_part(p.derivative());
    IntPoly g = gcd(p, dp);
    if (g.degree() == 0) return p;
    return primitive_part(divide_exact(p, g));
}

inline IntPoly squarefree_part(const RatPoly& f) {
    if (f.is_zero()) throw DomainError("squarefree part of the zero polynomial");
    return squarefree_part(primitive_integer(f));
}

inline bool is_squarefree(const IntPoly& f) {
    if (f.degree() <= 1) return !f.is_zero();
    return gcd(f, f.derivative()).degree() == 0;
}

/// prod_{i != j} (x_i - x_j) over ordered pairs of roots of f.
/// Res(f, f') = lc^(N-1) prod f'(x_i) = lc^(2N-1) prod_{i != j}(x_i - x_j).
inline Rational discriminant_pairproduct(const IntPoly& f) {
    const long n = f.degree();
    if (n < 2) throw DomainError("need two points");
    Integer r = resultant(f, f.derivative());
    return make_rational(r, ipow(f.leading(), static_cast<unsigned long>(2 * n - 1)));
}

}  // namespace arithdyn
