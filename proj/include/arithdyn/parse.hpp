#pragma once

// Text form of polynomials in z: "z^2 - 1/2*z + 3", "(z^3-z^2)/2", "2z(z+1)".

#include <cctype>
#include <string>
#include <string_view>

#include "arithdyn/poly.hpp"

namespace arithdyn {

namespace detail {

class PolyParser {
public:
    explicit PolyParser(std::string_view s) : s_(s) {}

    RatPoly parse() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("empty polynomial", pos_);
        RatPoly r = expr();
        skip();
        if (pos_ < s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return r;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool starts_factor() {
        skip();
        if (pos_ >= s_.size()) return false;
        const char c = s_[pos_];
        return c == 'z' || c == '(' || std::isdigit(static_cast<unsigned char>(c));
    }

    RatPoly expr() {
        RatPoly acc = term();
        while (true) {
            if (peek('+')) {
                ++pos_;
                acc += term();
            } else if (peek('-')) {
                ++pos_;
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    RatPoly term() {
        RatPoly acc = unary();
        while (true) {
            if (peek('*')) {
                ++pos_;
                acc = multiply_fast(acc, unary());
            } else if (peek('/')) {
                const std::size_t at = ++pos_;
                RatPoly d = unary();
                if (d.degree() > 0) throw ParseError("division by a non-constant", at);
                if (d.is_zero()) throw ParseError("division by zero", at);
                acc *= Rational(1) / d.leading();
            } else if (starts_factor()) {
                acc = multiply_fast(acc, power());
            } else {
                return acc;
            }
        }
    }

    RatPoly unary() {
        if (peek('-')) {
            ++pos_;
            return -unary();
        }
        if (peek('+')) {
            ++pos_;
            return unary();
        }
        return power();
    }

    RatPoly power() {
        RatPoly base = primary();
        if (!peek('^')) return base;
        ++pos_;
        skip();
        const std::size_t at = pos_;
        std::size_t e = 0;
        bool any = false;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            e = e * 10 + static_cast<std::size_t>(s_[pos_] - '0');
            if (e > degree_cap()) throw ParseError("exponent exceeds degree cap", at);
            ++pos_;
            any = true;
        }
        if (!any) throw ParseError("expected a nonnegative integer exponent", at);
        if (base.degree() > 0) check_degree_cap(static_cast<std::size_t>(base.degree()) * e, "parse");
        RatPoly r = RatPoly::constant(Rational(1));
        RatPoly b = base;
        while (e) {
            if (e & 1) r = multiply_fast(r, b);
            e >>= 1;
            if (e) b = multiply_fast(b, b);
        }
        return r;
    }

    RatPoly primary() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = s_[pos_];
        if (c == 'z') {
            ++pos_;
            return RatPoly::z();
        }
        if (c == '(') {
            ++pos_;
            RatPoly r = expr();
            if (!peek(')')) throw ParseError("expected ')'", pos_);
            ++pos_;
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return RatPoly::constant(number());
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    /// Decimal literal, optionally with a fractional part; converted exactly.
    Rational number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string digits(s_.substr(start, pos_ - start));
        Integer den = 1;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            const std::size_t fs = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (fs == pos_) throw ParseError("malformed decimal", fs);
            digits += std::string(s_.substr(fs, pos_ - fs));
            den = ipow(Integer(10), pos_ - fs);
        }
        return make_rational(Integer(digits, 10), den);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline RatPoly parse_poly(std::string_view text) { return detail::PolyParser(text).parse(); }

}  // namespace arithdyn
