#pragma once

// Places of Q and logarithmic absolute values. Finite-place quantities are
// kept as exact formal sums of q*log(p) so global identities can be checked
// without floating point.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "arithdyn/rational.hpp"

namespace arithdyn {

/// A place of Q: the archimedean absolute value or the p-adic one for a prime p.
class Place {
public:
    static Place infinity() { return Place(); }

    static Place finite(const Integer& p) {
        if (!is_prime(p)) throw DomainError(p.get_str() + " is not prime");
        Place v;
        v.prime_ = p;
        return v;
    }

    bool is_archimedean() const { return !prime_.has_value(); }
    bool is_finite() const { return prime_.has_value(); }

    const Integer& prime() const {
        if (!prime_) throw DomainError("archimedean place has no prime");
        return *prime_;
    }

    std::string to_string() const { return prime_ ? prime_->get_str() : std::string("inf"); }

    friend bool operator==(const Place& a, const Place& b) { return a.prime_ == b.prime_; }
    friend bool operator<(const Place& a, const Place& b) {
        if (!a.prime_) return b.prime_.has_value();
        if (!b.prime_) return false;
        return *a.prime_ < *b.prime_;
    }

private:
    Place() = default;
    std::optional<Integer> prime_;
};

/// "inf" (also "infinity", "oo") or a prime in decimal.
inline Place parse_place(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "oo") return Place::infinity();
    Integer p;
    if (!detail::parse_integer_digits(text, p) || p < 2)
        throw ParseError("malformed place '" + text + "'", 0);
    if (!is_prime(p)) throw ParseError("place '" + text + "' is not prime", 0);
    return Place::finite(p);
}

/// A logarithmic magnitude: an exact formal sum  sum_p q_p * log(p)  plus an
/// optional floating-point part. Zero coefficients never appear in the sum.
class LogAbs {
public:
    LogAbs() = default;

    static LogAbs zero() { return LogAbs(); }

    static LogAbs exact(const Rational& coeff, const Integer& prime) {
        LogAbs r;
        r.add_term(coeff, prime);
        return r;
    }

    static LogAbs approx(double value) {
        LogAbs r;
        r.approx_ = value;
        return r;
    }

    /// Exact log of a positive rational, factored over primes.
    static LogAbs log_of(const Rational& positive) {
        if (positive <= 0) throw DomainError("log of a non-positive rational");
        LogAbs r;
        for (auto& [p, e] : factor(Integer(positive.get_num()))) r.add_term(Rational(e), p);
        for (auto& [p, e] : factor(Integer(positive.get_den()))) r.add_term(Rational(-static_cast<long>(e)), p);
        return r;
    }

    const std::map<Integer, Rational>& terms() const { return terms_; }
    std::optional<double> approx_part() const { return approx_; }

    bool is_exact() const { return !approx_.has_value(); }
    bool is_exact_zero() const { return terms_.empty() && !approx_.has_value(); }

    /// Exact coefficient of log(p); zero when p does not occur.
    Rational coeff(const Integer& p) const {
        auto it = terms_.find(p);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    double to_double() const {
        double s = approx_.value_or(0.0);
        for (auto& [p, q] : terms_) s += q.get_d() * std::log(p.get_d());
        return s;
    }

    LogAbs& operator+=(const LogAbs& o) {
        for (auto& [p, q] : o.terms_) add_term(q, p);
        if (o.approx_) approx_ = approx_.value_or(0.0) + *o.approx_;
        return *this;
    }

    LogAbs& operator-=(const LogAbs& o) { return *this += (-o); }

    LogAbs operator-() const {
        LogAbs r;
        for (auto& [p, q] : terms_) r.terms_.emplace(p, -q);
        if (approx_) r.approx_ = -*approx_;
        return r;
    }

    /// Scales both parts; the exact part stays exact.
    LogAbs scaled(const Rational& s) const {
        LogAbs r;
        if (s == 0) return r;
        for (auto& [p, q] : terms_) r.terms_.emplace(p, q * s);
        if (approx_) r.approx_ = *approx_ * s.get_d();
        return r;
    }

    friend LogAbs operator+(LogAbs a, const LogAbs& b) { return a += b; }
    friend LogAbs operator-(LogAbs a, const LogAbs& b) { return a -= b; }

    /// Exact equality: identical formal sums and identical float parts.
    friend bool operator==(const LogAbs& a, const LogAbs& b) {
        return a.terms_ == b.terms_ && a.approx_ == b.approx_;
    }

    /// "q*log(p) + ..." for the exact part, followed by the float part if any.
    friend std::ostream& operator<<(std::ostream& os, const LogAbs& x) { return os << x.to_string(); }

    std::string to_string() const {
        std::string s;
        for (auto& [p, q] : terms_) {
            if (!s.empty()) s += " + ";
            s += arithdyn::to_string(q) + "*log(" + p.get_str() + ")";
        }
        if (approx_) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.15g", *approx_);
            if (!s.empty()) s += " + ";
            s += buf;
        }
        return s.empty() ? "0" : s;
    }

private:
    void add_term(const Rational& q, const Integer& p) {
        if (q == 0) return;
        Rational c(q);
        c.canonicalize();
        auto [it, inserted] = terms_.emplace(p, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    std::map<Integer, Rational> terms_;
    std::optional<double> approx_;
};

/// log|x|_v with n_v = 1: exact -v_p(x) log p at a prime, ln|x| at infinity.
inline LogAbs log_abs(const Rational& x, const Place& v) {
    if (x == 0) throw DomainError("valuation of zero");
    if (v.is_archimedean()) return LogAbs::approx(arithdyn::log_abs(x));
    return LogAbs::exact(Rational(-valuation(x, v.prime())), v.prime());
}

/// Checks sum_v log|x|_v = 0 symbolically: the archimedean term is expanded
/// over the prime factorization of |x| (certified by re-multiplying), the
/// finite terms come from independent valuation computations.
inline bool product_formula_check(const Rational& x) {
    if (x == 0) throw DomainError("product formula needs a nonzero rational");
    const Rational ax = abs(x);
    const auto num_f = factor(Integer(ax.get_num()));
    const auto den_f = factor(Integer(ax.get_den()));

    Rational rebuilt(1);
    LogAbs archimedean;
    for (auto& [p, e] : num_f) {
        rebuilt *= Rational(ipow(p, e));
        archimedean += LogAbs::exact(Rational(e), p);
    }
    for (auto& [p, e] : den_f) {
        rebuilt /= Rational(ipow(p, e));
        archimedean += LogAbs::exact(Rational(-static_cast<long>(e)), p);
    }
    if (rebuilt != ax) return false;

    LogAbs total = archimedean;
    std::set<Integer> primes;
    for (auto& [p, e] : num_f) primes.insert(p);
    for (auto& [p, e] : den_f) primes.insert(p);
    for (auto& p : primes) total += log_abs(x, Place::finite(p));
    return total.is_exact_zero();
}

/// Infinity plus every prime dividing a numerator or denominator of xs.
inline std::vector<Place> relevant_places(std::span<const Rational> xs) {
    std::set<Integer> primes;
    for (auto& x : xs) {
        if (x == 0) throw DomainError("relevant_places: zero entry");
        for (auto& [p, e] : factor(Integer(x.get_num()))) primes.insert(p);
        for (auto& [p, e] : factor(Integer(x.get_den()))) primes.insert(p);
    }
    std::vector<Place> out{Place::infinity()};
    for (auto& p : primes) out.push_back(Place::finite(p));
    return out;
}

inline std::vector<Place> relevant_places(std::initializer_list<Rational> xs) {
    std::vector<Rational> v(xs);
    return relevant_places(std::span<const Rational>(v));
}

}  // namespace arithdyn
