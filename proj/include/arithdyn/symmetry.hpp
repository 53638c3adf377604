#pragma once

// Rotational symmetries of polynomial Julia sets: the centroid, the exact
// functional-equation test phi(sigma(z)) = sigma^d(phi(z)) over Q(i), and
// the largest n with phi conjugate to z^r psi(z^n).

#include <numeric>
#include <string>

#include "arithdyn/heights.hpp"

namespace arithdyn {

struct GaussianRational {
    Rational re = 0;
    Rational im = 0;

    GaussianRational() = default;
    GaussianRational(long x) : re(x) {}
    GaussianRational(const Rational& r) : re(r) {}
    GaussianRational(const Rational& r, const Rational& i) : re(r), im(i) {}

    static GaussianRational i() { return {Rational(0), Rational(1)}; }

    bool is_zero() const { return re == 0 && im == 0; }
    GaussianRational operator-() const { return {Rational(-re), Rational(-im)}; }
    GaussianRational& operator+=(const GaussianRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        Rational r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator==(const GaussianRational& a, long b) { return a.im == 0 && a.re == b; }

    std::string to_string() const {
        if (im == 0) return arithdyn::to_string(re);
        return "(" + arithdyn::to_string(re) + (im < 0 ? " - " : " + ") + arithdyn::to_string(Rational(abs(im))) +
               "i)";
    }
};

using GaussPoly = Poly<GaussianRational>;

/// z -> a z + b with a != 0.
struct AffineMap {
    GaussianRational a{1};
    GaussianRational b{0};

    AffineMap(GaussianRational a_, GaussianRational b_ = 0) : a(std::move(a_)), b(std::move(b_)) {
        if (a.is_zero()) throw DomainError("affine map needs a != 0");
    }
    static AffineMap identity() { return AffineMap(1); }
    /// Rotation by zeta about the point c.
    static AffineMap rotation(const GaussianRational& zeta, const GaussianRational& c) {
        return AffineMap(zeta, c - zeta * c);
    }

    GaussianRational operator()(const GaussianRational& z) const { return a * z + b; }
    /// (this o other)(z) = this(other(z)).
    AffineMap after(const AffineMap& other) const { return AffineMap(a * other.a, a * other.b + b); }
    AffineMap power(long k) const {
        AffineMap r = identity();
        for (long j = 0; j < k; ++j) r = after(r);
        return r;
    }
};

inline GaussPoly to_gauss(const RatPoly& f) {
    std::vector<GaussianRational> c;
    for (auto& x : f.coeffs()) c.emplace_back(x);
    return GaussPoly(std::move(c));
}

/// -a_{d-1}/(d a_d).
inline Rational centroid(const DynSystem& sys) {
    return -sys.phi().coeff(std::size_t(sys.degree() - 1)) / (Rational(sys.degree()) * sys.leading());
}

inline bool is_symmetry(const DynSystem& sys, const AffineMap& sigma) {
    const GaussPoly f = to_gauss(sys.phi());
    const GaussPoly s{sigma.b, sigma.a};
    GaussPoly lhs;
    for (auto it = f.coeffs().rbegin(); it != f.coeffs().rend(); ++it) lhs = lhs * s + GaussPoly::constant(*it);
    const AffineMap sd = sigma.power(sys.degree());
    const GaussPoly rhs = f * sd.a + GaussPoly::constant(sd.b);
    return lhs == rhs;
}

/// phi conjugated by z -> z + shift: phi(z + shift) - shift.
inline RatPoly translate_conjugate(const RatPoly& phi, const Rational& shift) {
    return compose(phi, RatPoly{shift, Rational(1)}) - RatPoly::constant(shift);
}

struct RotationOrder {
    long n = 1;
    /// Centered form is a z^d: the Julia set is a circle.
    bool infinite = false;
};

/// Rotations about the centroid by zeta are symmetries iff zeta^(d-i) = 1 for
/// every nonzero coefficient a_i (i < d) of the centered form.
inline RotationOrder rotation_symmetry_order(const DynSystem& sys) {
    const RatPoly g = translate_conjugate(sys.phi(), centroid(sys));
    const long d = sys.degree();
    long n = 0;
    for (long i = 0; i < d; ++i)
        if (g.coeff(std::size_t(i)) != 0) n = std::gcd(n, d - i);
    if (n == 0) return {1, true};
    return {n, false};
}

}  // namespace arithdyn
