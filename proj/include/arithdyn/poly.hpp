#pragma once

// Dense univariate polynomials over an exact coefficient ring.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "arithdyn/rational.hpp"

namespace arithdyn {

namespace detail {
inline std::atomic<std::size_t>& degree_cap_storage() {
    static std::atomic<std::size_t> cap{4096};
    return cap;
}
}  // namespace detail

/// Largest polynomial degree any iterate/pushforward may produce (default 4096).
inline std::size_t degree_cap() { return detail::degree_cap_storage().load(); }
inline void set_degree_cap(std::size_t cap) { detail::degree_cap_storage().store(cap); }

inline void check_degree_cap(std::size_t degree, const char* what) {
    if (degree > degree_cap())
        throw DegreeCapError(std::string(what) + " degree cap: " + std::to_string(degree) + " > " +
                             std::to_string(degree_cap()));
}

/// Coefficients a_0..a_d indexed by degree; the leading coefficient is
/// nonzero unless the polynomial is zero (empty coefficient vector).
template <class T>
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
    Poly(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }

    static Poly constant(const T& a) { return Poly(std::vector<T>{a}); }
    static Poly z() { return Poly(std::vector<T>{T(0), T(1)}); }
    static Poly monomial(const T& a, std::size_t deg) {
        std::vector<T> c(deg + 1, T(0));
        c[deg] = a;
        return Poly(std::move(c));
    }

    /// -1 for the zero polynomial.
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }

    T coeff(std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }
    const T& leading() const { return c_.back(); }
    const std::vector<T>& coeffs() const { return c_; }

    template <class U>
    U eval(const U& x) const {
        U acc(0);
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + U(c_[i]);
        return acc;
    }

    T operator()(const T& x) const { return eval<T>(x); }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<T> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * T(static_cast<long>(i));
        return Poly(std::move(d));
    }

    Poly& operator+=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    Poly operator-() const {
        Poly r = *this;
        for (auto& a : r.c_) a = -a;
        return r;
    }
    Poly& operator*=(const T& s) {
        if (s == 0) {
            c_.clear();
            return *this;
        }
        for (auto& a : c_) a *= s;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const T& s) { return a *= s; }
    friend Poly operator*(const T& s, Poly a) { return a *= s; }
    friend Poly operator*(const Poly& a, const Poly& b) { return multiply(a, b); }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

    /// Multiplies by z^k.
    Poly shifted(std::size_t k) const {
        if (is_zero()) return *this;
        std::vector<T> c(k, T(0));
        c.insert(c.end(), c_.begin(), c_.end());
        return Poly(std::move(c));
    }

private:
    static Poly multiply(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        }
        return Poly(std::move(r));
    }

    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<T> c_;
};

using RatPoly = Poly<Rational>;
using IntPoly = Poly<Integer>;

inline IntPoly to_int_poly_exact(const RatPoly& f) {
    std::vector<Integer> c;
    c.reserve(f.coeffs().size());
    for (auto& a : f.coeffs()) {
        if (a.get_den() != 1) throw DomainError("polynomial has non-integer coefficients");
        c.emplace_back(a.get_num());
    }
    return IntPoly(std::move(c));
}

inline RatPoly to_rat_poly(const IntPoly& f) {
    std::vector<Rational> c;
    c.reserve(f.coeffs().size());
    for (auto& a : f.coeffs()) c.emplace_back(a);
    return RatPoly(std::move(c));
}

/// gcd of the coefficients (nonnegative; zero for the zero polynomial).
inline Integer content(const IntPoly& f) {
    Integer g = 0;
    for (auto& a : f.coeffs()) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

/// f / content(f), sign-normalized to a positive leading coefficient.
inline IntPoly primitive_part(const IntPoly& f) {
    if (f.is_zero()) return f;
    Integer g = content(f);
    if (f.leading() < 0) g = -g;
    std::vector<Integer> c(f.coeffs());
    for (auto& a : c) mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
    return IntPoly(std::move(c));
}

/// Scales a rational polynomial to integer coefficients of content 1 with
/// positive leading coefficient (same roots).
inline IntPoly primitive_integer(const RatPoly& f) {
    if (f.is_zero()) return IntPoly();
    Integer l = 1;
    for (auto& a : f.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a.get_den_mpz_t());
    std::vector<Integer> c;
    c.reserve(f.coeffs().size());
    for (auto& a : f.coeffs()) c.emplace_back(Integer(a.get_num() * (l / a.get_den())));
    return primitive_part(IntPoly(std::move(c)));
}

/// Product of rational polynomials computed over Z after clearing denominators.
inline RatPoly multiply_fast(const RatPoly& a, const RatPoly& b) {
    if (a.is_zero() || b.is_zero()) return RatPoly();
    auto clear = [](const RatPoly& f, Integer& den) {
        den = 1;
        for (auto& x : f.coeffs()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
        std::vector<Integer> c;
        c.reserve(f.coeffs().size());
        for (auto& x : f.coeffs()) c.emplace_back(Integer(x.get_num() * (den / x.get_den())));
        return IntPoly(std::move(c));
    };
    Integer da, db;
    IntPoly ia = clear(a, da), ib = clear(b, db);
    IntPoly p = ia * ib;
    Integer d = da * db;
    std::vector<Rational> out;
    out.reserve(p.coeffs().size());
    for (auto& x : p.coeffs()) out.push_back(make_rational(x, d));
    return RatPoly(std::move(out));
}

/// f(g(z)) by Horner's scheme in g.
inline RatPoly compose(const RatPoly& f, const RatPoly& g) {
    if (f.is_zero()) return f;
    if (f.degree() > 0 && g.degree() > 0)
        check_degree_cap(static_cast<std::size_t>(f.degree() * g.degree()), "compose");
    RatPoly acc = RatPoly::constant(f.leading());
    for (long i = f.degree() - 1; i >= 0; --i) {
        acc = multiply_fast(acc, g);
        acc += RatPoly::constant(f.coeff(static_cast<std::size_t>(i)));
    }
    return acc;
}

/// n-th iterate phi^n, computed as phi(phi^(n-1)).
inline RatPoly iterate(const RatPoly& phi, unsigned n) {
    if (phi.degree() < 1) throw DomainError("iterate needs deg phi >= 1");
    if (n < 1) throw DomainError("iterate needs n >= 1");
    std::size_t deg = static_cast<std::size_t>(phi.degree());
    for (unsigned k = 1; k < n; ++k) {
        deg *= static_cast<std::size_t>(phi.degree());
        check_degree_cap(deg, "iterate");
    }
    RatPoly g = phi;
    for (unsigned k = 1; k < n; ++k) g = compose(phi, g);
    return g;
}

/// Quotient and remainder over Q.
inline std::pair<RatPoly, RatPoly> divmod(const RatPoly& a, const RatPoly& b) {
    if (b.is_zero()) throw DomainError("polynomial division by zero");
    if (a.degree() < b.degree()) return {RatPoly(), a};
    std::vector<Rational> r(a.coeffs());
    const long db = b.degree();
    std::vector<Rational> q(static_cast<std::size_t>(a.degree() - db + 1));
    const Rational inv = Rational(1) / b.leading();
    for (long i = a.degree(); i >= db; --i) {
        Rational t = r[static_cast<std::size_t>(i)] * inv;
        q[static_cast<std::size_t>(i - db)] = t;
        if (t == 0) continue;
        for (long j = 0; j <= db; ++j) r[static_cast<std::size_t>(i - db + j)] -= t * b.coeff(static_cast<std::size_t>(j));
    }
    r.resize(static_cast<std::size_t>(db));
    return {RatPoly(std::move(q)), RatPoly(std::move(r))};
}

/// Exact division of integer polynomials; throws if b does not divide a over Z.
inline IntPoly divide_exact(const IntPoly& a, const IntPoly& b) {
    if (b.is_zero()) throw DomainError("polynomial division by zero");
    if (a.is_zero()) return a;
    if (a.degree() < b.degree()) throw DomainError("inexact polynomial division");
    std::vector<Integer> r(a.coeffs());
    const long db = b.degree();
    std::vector<Integer> q(static_cast<std::size_t>(a.degree() - db + 1));
    for (long i = a.degree(); i >= db; --i) {
        Integer& top = r[static_cast<std::size_t>(i)];
        if (top == 0) continue;
        if (!mpz_divisible_p(top.get_mpz_t(), b.leading().get_mpz_t()))
            throw DomainError("inexact polynomial division");
        Integer t;
        mpz_divexact(t.get_mpz_t(), top.get_mpz_t(), b.leading().get_mpz_t());
        q[static_cast<std::size_t>(i - db)] = t;
        for (long j = 0; j <= db; ++j) r[static_cast<std::size_t>(i - db + j)] -= t * b.coeff(static_cast<std::size_t>(j));
    }
    for (auto& x : r)
        if (x != 0) throw DomainError("inexact polynomial division");
    return IntPoly(std::move(q));
}

/// Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b, over Z.
inline IntPoly pseudo_remainder(const IntPoly& a, const IntPoly& b) {
    if (b.is_zero()) throw DomainError("pseudo-remainder by zero");
    const long da = a.degree(), db = b.degree();
    if (da < db) return a;
    std::vector<Integer> r(a.coeffs());
    const Integer& lb = b.leading();
    long e = da - db + 1;
    for (long i = da; i >= db; --i) {
        Integer t = r[static_cast<std::size_t>(i)];
        for (auto& x : r) x *= lb;
        --e;
        if (t != 0)
            for (long j = 0; j <= db; ++j) r[static_cast<std::size_t>(i - db + j)] -= t * b.coeff(static_cast<std::size_t>(j));
    }
    if (e > 0) {
        Integer s = ipow(lb, static_cast<unsigned long>(e));
        for (auto& x : r) x *= s;
    }
    r.resize(static_cast<std::size_t>(db));
    return IntPoly(std::move(r));
}

namespace detail {

inline std::vector<std::uint64_t> reduce_mod(const IntPoly& f, std::uint64_t p) {
    std::vector<std::uint64_t> c(f.coeffs().size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = mpz_fdiv_ui(f.coeffs()[i].get_mpz_t(), p);
    while (!c.empty() && c.back() == 0) c.pop_back();
    return c;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

/// Degree of gcd(a, b) over F_p (a, b nonzero mod p).
inline long gcd_degree_mod(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b, std::uint64_t p) {
    while (!b.empty()) {
        const std::uint64_t inv = powmod(b.back(), p - 2, p);
        while (a.size() >= b.size() && !a.empty()) {
            const std::uint64_t t = mulmod(a.back(), inv, p);
            const std::size_t shift = a.size() - b.size();
            for (std::size_t j = 0; j < b.size(); ++j) {
                std::uint64_t sub = mulmod(t, b[j], p);
                a[shift + j] = (a[shift + j] + p - sub) % p;
            }
            while (!a.empty() && a.back() == 0) a.pop_back();
        }
        std::swap(a, b);
    }
    return static_cast<long>(a.size()) - 1;
}

}  // namespace detail

/// gcd over Q, returned primitive with positive leading coefficient.
/// Coprimality is first tested modulo a large prime (a certificate when the
/// prime does not divide either leading coefficient); otherwise the
/// primitive PRS is run.
inline IntPoly gcd(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero()) return primitive_part(b);
    if (b.is_zero()) return primitive_part(a);
    if (a.degree() == 0 || b.degree() == 0) return IntPoly::constant(Integer(1));
    for (std::uint64_t p : {4611686018427387847ULL, 4611686018427387817ULL}) {
        if (mpz_fdiv_ui(a.leading().get_mpz_t(), p) == 0 || mpz_fdiv_ui(b.leading().get_mpz_t(), p) == 0) continue;
        if (detail::gcd_degree_mod(detail::reduce_mod(a, p), detail::reduce_mod(b, p), p) == 0)
            return IntPoly::constant(Integer(1));
        break;
    }
    IntPoly x = primitive_part(a), y = primitive_part(b);
    if (x.degree() < y.degree()) std::swap(x, y);
    while (!y.is_zero()) {
        IntPoly r = pseudo_remainder(x, y);
        x = std::move(y);
        y = r.is_zero() ? r : primitive_part(r);
    }
    return primitive_part(x);
}

inline std::string to_string(const RatPoly& f, const std::string& var = "z") {
    if (f.is_zero()) return "0";
    std::string s;
    for (long i = f.degree(); i >= 0; --i) {
        Rational a = f.coeff(static_cast<std::size_t>(i));
        if (a == 0) continue;
        const bool neg = a < 0;
        Rational m = abs(a);
        if (s.empty())
            s += neg ? "-" : "";
        else
            s += neg ? " - " : " + ";
        std::string mono;
        if (i >= 1) mono = var + (i > 1 ? "^" + std::to_string(i) : "");
        if (i == 0)
            s += arithdyn::to_string(m);
        else if (m == 1)
            s += mono;
        else
            s += arithdyn::to_string(m) + "*" + mono;
    }
    return s;
}

inline std::string to_string(const IntPoly& f, const std::string& var = "z") { return to_string(to_rat_poly(f), var); }

}  // namespace arithdyn
