#pragma once

// Finite Galois-stable sets of algebraic numbers, stored as the squarefree
// primitive integer polynomial whose roots they are.

#include <span>
#include <vector>

#include "arithdyn/resultant.hpp"

namespace arithdyn {

class GaloisSet {
public:
    /// Takes the squarefree part of f, so any nonconstant polynomial is accepted.
    static GaloisSet from_poly(const RatPoly& f) { return GaloisSet(squarefree_part(f), 0); }
    static GaloisSet from_poly(const IntPoly& f) { return GaloisSet(squarefree_part(f), 0); }

    /// The set of the given rationals (duplicates collapse).
    static GaloisSet from_points(std::span<const Rational> xs) {
        if (xs.empty()) throw DomainError("empty point list");
        IntPoly f = IntPoly::constant(Integer(1));
        for (auto& x : xs) f = f * IntPoly{Integer(-x.get_num()), Integer(x.get_den())};
        return from_poly(f);
    }
    static GaloisSet from_points(std::initializer_list<Rational> xs) {
        std::vector<Rational> v(xs);
        return from_points(std::span<const Rational>(v));
    }

    const IntPoly& poly() const { return f_; }
    RatPoly defining_poly() const { return to_rat_poly(f_); }
    long cardinality() const { return f_.degree(); }

    friend bool operator==(const GaloisSet& a, const GaloisSet& b) { return a.f_ == b.f_; }

private:
    GaloisSet(IntPoly f, int) : f_(std::move(f)) {
        if (f_.degree() < 1) throw DomainError("a Galois set needs a nonconstant defining polynomial");
    }
    IntPoly f_;
};

namespace detail {

/// Newton interpolation through (x_k, y_k), x_k = 0..n, returned in the monomial basis.
inline RatPoly interpolate_at_integers(const std::vector<Rational>& y) {
    const std::size_t n = y.size();
    std::vector<Rational> dd(y);
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t k = n - 1; k >= level; --k) {
            dd[k] = (dd[k] - dd[k - 1]) / Rational(static_cast<long>(level));
            if (k == level) break;
        }
    RatPoly acc = RatPoly::constant(dd[n - 1]);
    for (std::size_t k = n - 1; k-- > 0;) {
        acc = acc * RatPoly{Rational(-static_cast<long>(k)), Rational(1)};
        acc += RatPoly::constant(dd[k]);
    }
    return acc;
}

}  // namespace detail

/// Res_z(f(z), w - phi(z)) = lc(f)^d prod_i (w - phi(x_i)), primitive in w:
/// the image of the roots of f counted with multiplicity.
inline IntPoly pushforward_multiset(const IntPoly& f, const RatPoly& phi) {
    if (phi.degree() < 1) throw DomainError("pushforward needs deg phi >= 1");
    if (f.degree() < 1) throw DomainError("pushforward of an empty set");
    const long n = f.degree();
    check_degree_cap(static_cast<std::size_t>(n), "pushforward");
    const RatPoly F = to_rat_poly(f);
    std::vector<Rational> values;
    values.reserve(static_cast<std::size_t>(n + 1));
    for (long w = 0; w <= n; ++w) values.push_back(resultant(F, RatPoly::constant(Rational(w)) - phi));
    return primitive_integer(detail::interpolate_at_integers(values));
}

/// The set phi(S); coincident images collapse.
inline GaloisSet pushforward(const GaloisSet& S, const RatPoly& phi) {
    return GaloisSet::from_poly(pushforward_multiset(S.poly(), phi));
}

struct PeriodicSet {
    GaloisSet set;
    /// phi^n(z) - z had no repeated roots, so the set has d^n elements.
    bool separable;
};

inline PeriodicSet periodic_set(const RatPoly& phi, unsigned n) {
    if (phi.degree() < 2) throw DomainError("periodic_set needs deg phi >= 2");
    RatPoly g = iterate(phi, n) - RatPoly::z();
    IntPoly gi = primitive_integer(g);
    GaloisSet s = GaloisSet::from_poly(gi);
    const bool sep = s.cardinality() == gi.degree();
    return {std::move(s), sep};
}

inline GaloisSet preimage_set(const RatPoly& phi, unsigned n, const Rational& a) {
    if (phi.degree() < 2) throw DomainError("preimage_set needs deg phi >= 2");
    return GaloisSet::from_poly(iterate(phi, n) - RatPoly::constant(a));
}

inline Rational discriminant_pairproduct(const GaloisSet& S) { return discriminant_pairproduct(S.poly()); }

}  // namespace arithdyn
