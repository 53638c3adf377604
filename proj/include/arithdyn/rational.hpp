#pragma once

// Exact scalars: arbitrary-precision integers and rationals backed by GMP,
// plus the integer number theory the rest of the library leans on
// (p-adic valuations, primality, factorization).

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arithdyn/error.hpp"

namespace arithdyn {

using Integer = mpz_class;
/// Always canonical: gcd(|num|, den) = 1 and den > 0 (gmpxx canonicalizes on construction).
using Rational = mpq_class;

inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw DomainError("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Integer& n) { return n.get_str(); }

inline std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace detail {

inline bool parse_integer_digits(std::string_view s, Integer& out) {
    if (s.empty()) return false;
    std::size_t start = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (start == s.size()) return false;
    for (std::size_t i = start; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    std::string digits(s[0] == '+' ? s.substr(1) : s);
    return out.set_str(digits, 10) == 0;
}

}  // namespace detail

/// Parses "a/b" or a decimal integer literal, with optional sign.
inline Rational parse_rational(std::string_view text) {
    auto trimmed = text;
    while (!trimmed.empty() && trimmed.front() == ' ') trimmed.remove_prefix(1);
    while (!trimmed.empty() && trimmed.back() == ' ') trimmed.remove_suffix(1);
    const auto slash = trimmed.find('/');
    Integer num, den(1);
    if (slash == std::string_view::npos) {
        if (!detail::parse_integer_digits(trimmed, num))
            throw ParseError("malformed rational '" + std::string(text) + "'", 0);
    } else {
        if (!detail::parse_integer_digits(trimmed.substr(0, slash), num))
            throw ParseError("malformed numerator in '" + std::string(text) + "'", 0);
        auto d = trimmed.substr(slash + 1);
        if (d.empty() || d[0] == '-' || d[0] == '+' || !detail::parse_integer_digits(d, den))
            throw ParseError("malformed denominator in '" + std::string(text) + "'", slash + 1);
        if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'", slash + 1);
    }
    return make_rational(num, den);
}

/// p-adic valuation of a nonzero integer.
inline long valuation(const Integer& n, const Integer& p) {
    if (n == 0) throw DomainError("valuation of zero");
    if (p < 2) throw DomainError("valuation base must be a prime");
    Integer rest;
    return static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

/// p-adic valuation of a nonzero rational.
inline long valuation(const Rational& q, const Integer& p) {
    if (q == 0) throw DomainError("valuation of zero");
    return valuation(Integer(q.get_num()), p) - valuation(Integer(q.get_den()), p);
}

/// Natural log of |n| for n != 0, accurate for integers far beyond double range.
inline double log_abs(const Integer& n) {
    if (n == 0) throw DomainError("log of zero");
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
    return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

inline double log_abs(const Rational& q) {
    return log_abs(Integer(q.get_num())) - log_abs(Integer(q.get_den()));
}

inline double to_double(const Rational& q) { return q.get_d(); }

namespace detail {

inline bool miller_rabin_round(const Integer& n, const Integer& d, unsigned long s, const Integer& a) {
    Integer x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    const Integer n1 = n - 1;
    if (x == 1 || x == n1) return true;
    for (unsigned long r = 1; r < s; ++r) {
        x = (x * x) % n;
        if (x == n1) return true;
        if (x == 1) return false;
    }
    return false;
}

}  // namespace detail

/// Miller-Rabin. Deterministic below 2^64 (first twelve prime bases);
/// 64 rounds with pseudo-random bases above.
inline bool is_prime(const Integer& n) {
    if (n < 2) return false;
    static constexpr std::array<unsigned, 12> small{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (unsigned p : small) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    Integer d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

    const bool below_2_64 = mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
    if (below_2_64) {
        for (unsigned a : small)
            if (!detail::miller_rabin_round(n, d, s, Integer(a))) return false;
        return true;
    }
    // bases from a fixed splitmix64 stream, reduced into [2, n-2]
    std::uint64_t state = 0x5eed;
    const Integer span = n - 3;
    for (int round = 0; round < 64; ++round) {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        Integer a = Integer(static_cast<unsigned long>(z)) % span + 2;
        if (!detail::miller_rabin_round(n, d, s, a)) return false;
    }
    return true;
}

namespace detail {

/// Brent's variant of Pollard rho; returns a nontrivial factor of odd composite n
/// (or n itself when this seed fails).
inline Integer pollard_brent(const Integer& n, unsigned long seed) {
    Integer c = seed % (n - 1) + 1;
    Integer y = (seed * 7 + 3) % n;
    Integer g = 1, q = 1, x, ys, diff;
    mpz_ptr Y = y.get_mpz_t(), Q = q.get_mpz_t(), D = diff.get_mpz_t();
    mpz_srcptr N = n.get_mpz_t(), C = c.get_mpz_t();
    auto step = [&](mpz_ptr v) {
        mpz_mul(v, v, v);
        mpz_add(v, v, C);
        mpz_mod(v, v, N);
    };
    const unsigned long m = 128;
    for (unsigned long r = 1; g == 1; r *= 2) {
        x = y;
        for (unsigned long i = 0; i < r; ++i) step(Y);
        for (unsigned long k = 0; k < r && g == 1; k += m) {
            ys = y;
            const unsigned long lim = std::min(m, r - k);
            for (unsigned long i = 0; i < lim; ++i) {
                step(Y);
                mpz_sub(D, x.get_mpz_t(), Y);
                mpz_mul(Q, Q, D);
                mpz_mod(Q, Q, N);
            }
            mpz_gcd(g.get_mpz_t(), Q, N);
        }
    }
    if (g == n) {
        do {
            step(ys.get_mpz_t());
            mpz_sub(D, x.get_mpz_t(), ys.get_mpz_t());
            mpz_gcd(g.get_mpz_t(), D, N);
        } while (g == 1);
    }
    return g;
}

/// Pollard-Brent in native 64-bit arithmetic for composite n < 2^64.
inline std::uint64_t pollard_brent_u64(std::uint64_t n, std::uint64_t seed) {
    auto mulmod = [n](std::uint64_t a, std::uint64_t b) {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % n);
    };
    const std::uint64_t c = seed % (n - 1) + 1;
    std::uint64_t y = (seed * 7 + 3) % n, g = 1, q = 1, x = 0, ys = 0;
    const std::uint64_t m = 128;
    auto f = [&](std::uint64_t v) { return (mulmod(v, v) + c) % n; };
    for (std::uint64_t r = 1; g == 1; r *= 2) {
        x = y;
        for (std::uint64_t i = 0; i < r; ++i) y = f(y);
        for (std::uint64_t k = 0; k < r && g == 1; k += m) {
            ys = y;
            for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
                y = f(y);
                q = mulmod(q, x > y ? x - y : y - x);
            }
            g = std::gcd(q, n);
        }
    }
    if (g == n) {
        do {
            ys = f(ys);
            g = std::gcd(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g;
}

inline void factor_into(Integer n, std::map<Integer, unsigned>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 63) {
        const std::uint64_t v = mpz_get_ui(n.get_mpz_t());
        for (std::uint64_t seed = 1;; ++seed) {
            const std::uint64_t g = pollard_brent_u64(v, seed);
            if (g != v && g != 1) {
                factor_into(Integer(static_cast<unsigned long>(g)), out);
                factor_into(Integer(static_cast<unsigned long>(v / g)), out);
                return;
            }
        }
    }
    for (unsigned long seed = 1;; ++seed) {
        Integer g = pollard_brent(n, seed);
        if (g != n && g != 1) {
            factor_into(g, out);
            factor_into(Integer(n / g), out);
            return;
        }
    }
}

}  // namespace detail

/// Prime factorization of |n|, n != 0. Trial division to 2^16, then Pollard-Brent.
inline std::map<Integer, unsigned> factor(const Integer& n) {
    if (n == 0) throw DomainError("cannot factor zero");
    Integer m = abs(n);
    std::map<Integer, unsigned> out;
    for (unsigned long p = 2; p < 65536 && m > 1; p += (p == 2 ? 1 : 2)) {
        if (mpz_cmp_ui(m.get_mpz_t(), p * p) < 0) break;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            ++out[Integer(p)];
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        }
    }
    detail::factor_into(m, out);
    return out;
}

inline Integer ipow(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rational rpow(const Rational& base, long e) {
    if (e < 0) {
        if (base == 0) throw DomainError("zero to a negative power");
        return rpow(Rational(1) / base, -e);
    }
    Integer n = ipow(Integer(base.get_num()), static_cast<unsigned long>(e));
    Integer d = ipow(Integer(base.get_den()), static_cast<unsigned long>(e));
    return make_rational(n, d);
}

}  // namespace arithdyn
