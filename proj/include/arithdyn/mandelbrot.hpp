#pragma once

// The Mandelbrot set as an adelic set: the classical set at infinity and the
// closed unit disc at every prime. psi_n(c) = f_c^n(0) for f_c = z^2 + c.

#include "arithdyn/capacity.hpp"

namespace arithdyn {

/// psi_1 = z, psi_{k+1} = psi_k^2 + z; monic of degree 2^(n-1).
inline RatPoly psi(int n) {
    if (n < 1) throw DomainError("psi needs n >= 1");
    if (n > 62 || (std::size_t(1) << (n - 1)) > degree_cap())
        throw DegreeCapError("psi_" + std::to_string(n) + " exceeds the degree cap");
    RatPoly p = RatPoly::z();
    for (int k = 1; k < n; ++k) p = multiply_fast(p, p) + RatPoly::z();
    return p;
}

/// g(z) = (1/deg P) log+ |P(z)| - log R. With psi_index = n > 0 the value
/// P(z) = psi_n(z) is taken from the orbit of 0, which avoids the huge
/// cancellations of the expanded polynomial.
struct GreenLemniscate {
    RatPoly poly;
    double log_radius = 0.0;
    int psi_index = 0;
};

inline GreenLemniscate mandelbrot_lemniscate(int n) {
    if (n < 1) throw DomainError("lemniscate index must be positive");
    GreenLemniscate L;
    L.poly = psi(n);
    L.log_radius = std::log(2.0);
    L.psi_index = n;
    return L;
}

namespace detail {
/// log|psi_n(c)| by iterating w -> w^2 + c, in log coordinates once |w| is huge.
inline double log_abs_psi(int n, std::complex<double> c) {
    std::complex<double> w = c;
    for (int k = 1; k < n; ++k) {
        if (std::abs(w) > 1e100) {
            // |c/w^2| is far below double resolution from here on
            return std::ldexp(std::log(std::abs(w)), n - k);
        }
        w = w * w + c;
    }
    return std::log(std::abs(w));
}
}  // namespace detail

inline double green_value(const GreenLemniscate& L, const ComplexApprox& z) {
    double lp;
    double deg;
    if (L.psi_index > 0) {
        lp = detail::log_abs_psi(L.psi_index, z.value());
        deg = std::ldexp(1.0, L.psi_index - 1);
    } else {
        if (L.poly.degree() < 1) throw DomainError("lemniscate needs a nonconstant polynomial");
        lp = detail::log_abs_poly_at(L.poly, z.value());
        deg = double(L.poly.degree());
    }
    return std::max(0.0, lp - L.log_radius) / deg;
}

/// lim 2^-(n-1) log+|psi_n(c)|. After |w_k| > R = max(2, |c|) + 1 the
/// remaining terms 2^-j log|1 + c/w_j^2| sum to at most
/// 2^-(k-1) (-log(1 - |c|/|w_k|^2)).
inline HeightValue mandelbrot_lambda_detail(const ComplexApprox& c, double tol, int k_max = 5000) {
    if (!(tol > 0)) throw DomainError("tol must be positive");
    HeightValue out;
    const std::complex<double> cc = c.value();
    const double ac = std::abs(cc);
    if (!(ac < 1e100)) throw DomainError("parameter outside the supported range");
    const double R = std::max(2.0, ac) + 1.0;
    std::complex<double> w = cc;
    int k = 1;
    for (; k <= k_max && std::abs(w) <= R; ++k) w = w * w + cc;
    if (k > k_max) return out;  // bounded orbit
    // here |w_k| > R
    double lw = std::log(std::abs(w));
    for (;; ++k) {
        const double scale = std::ldexp(1.0, -(k - 1));
        const double q = ac == 0.0 ? 0.0 : std::exp(std::log(ac) - 2 * lw);
        const double err = scale * -std::log1p(-q);
        if (err <= tol || lw > 230.0) {
            out.value = out.arch_part = scale * lw;
            out.error_bound = err;
            return out;
        }
        w = w * w + cc;
        lw = std::log(std::abs(w));
    }
}

inline double mandelbrot_lambda_arch(const ComplexApprox& c, double tol) {
    return mandelbrot_lambda_detail(c, tol).value;
}

/// h_M(S): finite places contribute log+|alpha|_p (the unit disc), the
/// archimedean place the escape rate of 0 under z^2 + alpha.
inline HeightValue mandelbrot_height(const GaloisSet& S, const std::vector<ComplexApprox>& roots, double tol) {
    if (roots.size() != std::size_t(S.cardinality())) throw DomainError("root count does not match the set");
    HeightValue h;
    const Rational inv_n = make_rational(1, S.cardinality());
    for (auto& [p, e] : factor(abs(S.poly().leading())))
        h.exact_part += sum_log_plus(S.poly(), Place::finite(p)).scaled(inv_n);
    double arch = 0.0, err = 0.0;
    for (auto& r : roots) {
        auto l = mandelbrot_lambda_detail(r, tol);
        arch += l.value;
        err += l.error_bound;
    }
    h.arch_part = arch / double(S.cardinality());
    h.error_bound = err / double(S.cardinality());
    h.value = h.exact_part.to_double() + h.arch_part;
    return h;
}

inline HeightValue mandelbrot_height(const GaloisSet& S, double tol) {
    return mandelbrot_height(S, complex_roots(S.poly()), tol);
}

/// log c({|psi_n| <= 2}) = 2^-(n-1) log 2, exact.
inline LogAbs mandelbrot_capacity_partial_log(int n) {
    if (n < 1) throw DomainError("lemniscate index must be positive");
    return LogAbs::exact(make_rational(1, ipow(Integer(2), static_cast<unsigned long>(n - 1))), Integer(2));
}

inline double mandelbrot_capacity_partial(int n) {
    if (n < 1) throw DomainError("lemniscate index must be positive");
    return std::exp2(std::ldexp(1.0, -(n - 1)));
}

/// Zeros of psi_n: the parameters for which 0 is periodic with period dividing n.
inline GaloisSet mandelbrot_center_set(int n) { return GaloisSet::from_poly(psi(n)); }

}  // namespace arithdyn
