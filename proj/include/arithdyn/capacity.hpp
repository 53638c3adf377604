#pragma once

// Transfinite diameters: exact values for discs and lemniscates, sampled
// brackets (Leja-cell lower estimate, Chebyshev upper estimate) and the
// discrete energy of point configurations.

#include <complex>
#include <optional>
#include <vector>

#include "arithdyn/heights.hpp"

namespace arithdyn {

/// {z : |P(z)|_v <= R}. At a finite place log R should be a rational
/// multiple of log p; at infinity it may be any real.
struct Lemniscate {
    RatPoly poly;
    LogAbs radius_log;
    Place place = Place::infinity();
};

struct CapacityEstimate {
    double lower = 0.0;
    double upper = 0.0;
    std::optional<LogAbs> exact;
    long n_points = 0;
};

struct PairwiseMean {
    /// (1/(N(N-1))) sum_{i != j} log|x_i - x_j|; -inf when points coincide.
    double log_mean = 0.0;
    double value = 0.0;
    bool coincident = false;
};

inline PairwiseMean pairwise_geomean_arch(const std::vector<ComplexApprox>& pts) {
    const std::size_t n = pts.size();
    if (n < 2) throw DomainError("pairwise mean needs at least two points");
    double s = 0.0;
    PairwiseMean r;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dist = std::abs(pts[i].value() - pts[j].value());
            if (dist == 0.0) {
                r.coincident = true;
                continue;
            }
            s += std::log(dist);
        }
    if (r.coincident) {
        r.log_mean = -std::numeric_limits<double>::infinity();
        r.value = 0.0;
        return r;
    }
    r.log_mean = 2.0 * s / (double(n) * double(n - 1));
    r.value = std::exp(r.log_mean);
    return r;
}

/// -(1/(N(N-1))) sum_{i != j} log|x_i - x_j|. Throws on coincident points.
inline double discrete_energy(const std::vector<ComplexApprox>& pts) {
    PairwiseMean m = pairwise_geomean_arch(pts);
    if (m.coincident) throw DomainError("coincident points have infinite energy");
    return -m.log_mean;
}

/// log 𝔡_v(S) = (1/(N(N-1))) log|Delta|_v with Delta the product of all
/// differences of distinct roots. Exact at primes, a float at infinity.
inline LogAbs dv_of_galois_set(const GaloisSet& S, const Place& v) {
    const long n = S.cardinality();
    if (n < 2) throw DomainError("dv needs at least two points");
    const Rational delta = discriminant_pairproduct(S);
    const Rational scale = make_rational(1, n * (n - 1));
    if (v.is_archimedean()) return LogAbs::approx(log_abs(delta) / double(n * (n - 1)));
    return log_abs(delta, v).scaled(scale);
}

/// log c = (1/d)(log R - log|a_d|_v).
inline LogAbs lemniscate_capacity(const Lemniscate& L) {
    const long d = L.poly.degree();
    if (d < 1) throw DomainError("lemniscate needs a nonconstant polynomial");
    LogAbs lead = L.place.is_archimedean() ? LogAbs::log_of(Rational(abs(L.poly.leading())))
                                           : log_abs(L.poly.leading(), L.place);
    LogAbs r = L.radius_log;
    r += -lead;
    return r.scaled(make_rational(1, d));
}

namespace detail {

/// Smallest log R with phi^{-1}({|z| <= R}) inside {|z| <= R}. At infinity
/// this is the positive root of |a_d| r^d - sum_{i<d} |a_i| r^i - r (one sign
/// change, so a single positive root), floored at 1.
inline LogAbs escape_radius_log(const DynSystem& sys, const Place& v) {
    if (v.is_finite()) return LogAbs::exact(-alpha_v(sys, v.prime()), v.prime());
    const long d = sys.degree();
    std::vector<double> a;
    for (auto& c : sys.phi().coeffs()) a.push_back(std::fabs(c.get_d()));
    auto q = [&](double r) {
        double low = r;
        for (long i = 0; i < d; ++i) low += a[std::size_t(i)] * std::pow(r, double(i));
        return a.back() * std::pow(r, double(d)) - low;
    };
    double lo = 1.0, hi = 2.0;
    if (q(lo) >= 0) return LogAbs::zero();
    while (q(hi) < 0) lo = hi, hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = (lo + hi) / 2;
        (q(mid) < 0 ? lo : hi) = mid;
    }
    return LogAbs::approx(std::log(hi));
}

}  // namespace detail

/// c(F_k) for F_k = phi^{-k}({|z|_v <= R0}), k = 0..n:
/// log c(F_k) = d^-k log R0 - (1/d + ... + 1/d^k) log|a_d|_v, exact where R0 is.
inline std::vector<CapacityEstimate> lemniscate_chain(const DynSystem& sys, const Place& v, const LogAbs& R0, int n) {
    if (n < 0) throw DomainError("chain length must be nonnegative");
    if (R0.to_double() < detail::escape_radius_log(sys, v).to_double() - 1e-12)
        throw DomainError("R0 is below the escape radius");
    const long d = sys.degree();
    const LogAbs lead = v.is_archimedean() ? LogAbs::log_of(Rational(abs(sys.leading())))
                                           : log_abs(sys.leading(), v);
    std::vector<CapacityEstimate> out;
    Rational inv = 1, partial = 0;  // d^-k and 1/d + ... + 1/d^k
    for (int k = 0; k <= n; ++k) {
        LogAbs c = R0.scaled(inv);
        c += lead.scaled(-partial);
        CapacityEstimate e;
        e.lower = e.upper = std::exp(c.to_double());
        e.exact = c;
        out.push_back(std::move(e));
        inv /= Rational(d);
        partial += inv;
    }
    return out;
}

/// Greedy Leja sequence: start at the sample of largest modulus, then
/// repeatedly take the sample maximizing the product of distances to the
/// points chosen so far (ties to the smallest index).
inline std::vector<ComplexApprox> leja_points(const std::vector<ComplexApprox>& samples, std::size_t n) {
    if (n > samples.size()) throw DomainError("more Leja points requested than samples");
    std::vector<ComplexApprox> out;
    if (n == 0) return out;
    std::vector<double> score(samples.size(), 0.0);
    std::vector<bool> used(samples.size(), false);
    std::size_t pick = 0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].modulus() > samples[pick].modulus()) pick = i;
    while (true) {
        used[pick] = true;
        out.push_back(samples[pick]);
        if (out.size() == n) break;
        const auto x = samples[pick].value();
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (!used[i]) score[i] += std::log(std::abs(samples[i].value() - x));
        std::size_t best = samples.size();
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (!used[i] && (best == samples.size() || score[i] > score[best])) best = i;
        pick = best;
    }
    return out;
}

/// Smallest distance between consecutive samples (sampling quality metric).
inline double min_sample_gap(const std::vector<ComplexApprox>& samples) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < samples.size(); ++i)
        g = std::min(g, std::abs(samples[i].value() - samples[i - 1].value()));
    return g;
}

namespace detail {

/// log|P(z)| with enough MPFR precision to absorb cancellation.
inline double log_abs_poly_at(const RatPoly& P, std::complex<double> z) {
    const IntPoly f = primitive_integer(P);
    const Rational scale = P.leading() / Rational(f.leading());
    const double lz = std::max(0.0, std::log2(std::abs(z)));
    const auto prec = static_cast<mpfr_prec_t>(max_coeff_bits(f) + std::size_t(double(f.degree()) * lz) + 96 +
                                               std::size_t(std::log2(double(f.degree() + 1))));
    std::vector<Mpf> a;
    for (auto& c : f.coeffs()) {
        Mpf m(prec);
        mpfr_set_z(m.v, c.get_mpz_t(), MPFR_RNDN);
        a.push_back(std::move(m));
    }
    MpWork w(prec);
    Mpc x(prec);
    mpfr_set_d(x.re.v, z.real(), MPFR_RNDN);
    mpfr_set_d(x.im.v, z.imag(), MPFR_RNDN);
    horner(a, x, w);
    Mpf m(prec);
    cabs(m, w.p);
    if (mpfr_zero_p(m.v)) return -std::numeric_limits<double>::infinity();
    mpfr_log(m.v, m.v, MPFR_RNDN);
    return mpfr_get_d(m.v, MPFR_RNDN) + log_abs(abs(scale));
}

}  // namespace detail

/// (max over samples of |P|)^(1/deg P) for monic P: the Chebyshev-norm
/// certificate for c of the sampled set, exact up to sampling density.
inline double chebyshev_upper(const std::vector<ComplexApprox>& samples, const RatPoly& monic) {
    if (monic.degree() < 1 || monic.leading() != 1) throw DomainError("chebyshev_upper needs a monic polynomial");
    if (samples.empty()) throw DomainError("no samples");
    double best = -std::numeric_limits<double>::infinity();
    for (auto& s : samples) best = std::max(best, detail::log_abs_poly_at(monic, s.value()));
    return std::exp(best / double(monic.degree()));
}

/// Monic normalization of the k-th iterate of phi, the natural Chebyshev
/// candidate for its filled Julia set.
inline RatPoly monic_iterate(const DynSystem& sys, unsigned k) {
    RatPoly f = iterate(sys.phi(), k);
    return f * (Rational(1) / f.leading());
}

namespace detail {

/// H(u) = u^2 log(u)/2 - 3u^2/4, so that the double integral of log(a + b)
/// over [0,l1] x [0,l2] is H(l1 + l2) - H(l1) - H(l2).
inline double h_antiderivative(double u) { return u > 0 ? u * u * std::log(u) / 2 - 0.75 * u * u : 0.0; }

/// Upper bound on -E log|x - y| for x, y uniform on segments [a0,a1], [b0,b1].
inline double mutual_energy_bound(std::complex<double> a0, std::complex<double> a1, std::complex<double> b0,
                                  std::complex<double> b1) {
    const double la = std::abs(a1 - a0), lb = std::abs(b1 - b0);
    const auto shared = [](auto p, auto q) { return std::abs(p - q) == 0.0; };
    std::complex<double> v, pa, pb;
    bool adjacent = true;
    if (shared(a1, b0)) v = a1, pa = a0, pb = b1;
    else if (shared(a0, b1)) v = a0, pa = a1, pb = b0;
    else if (shared(a0, b0)) v = a0, pa = a1, pb = b1;
    else if (shared(a1, b1)) v = a1, pa = a0, pb = b0;
    else adjacent = false;
    if (adjacent) {
        // |x - y| >= (s + t) sin(theta/2) for s, t measured from the shared vertex
        const auto ra = pa - v, rb = pb - v;
        const double cos_t = std::clamp((ra.real() * rb.real() + ra.imag() * rb.imag()) / (la * lb), -1.0, 1.0);
        const double sin_half = std::sqrt((1.0 - cos_t) / 2.0);
        if (sin_half <= 0.0) return std::numeric_limits<double>::infinity();
        const double mean_log = (h_antiderivative(la + lb) - h_antiderivative(la) - h_antiderivative(lb)) / (la * lb);
        return -mean_log - std::log(sin_half);
    }
    // Taylor bound about the midpoints: |log|1+t| - Re t + Re t^2/2| <= |t|^3/(3(1-|t|))
    const auto D = (b0 + b1) / 2.0 - (a0 + a1) / 2.0;
    const double dist = std::abs(D), rho = (la + lb) / 2.0 / dist;
    if (rho >= 1.0) return std::numeric_limits<double>::infinity();
    return -std::log(dist) + (la * la + lb * lb) / (24.0 * dist * dist) + rho * rho * rho / (3.0 * (1.0 - rho));
}

}  // namespace detail

/// Lower bound for c(K) from n Leja points, assuming the polyline through
/// the boundary samples lies in K. Each Leja point owns the polyline pieces
/// nearest to it and spreads mass 1/n over them by length; c(K) >= exp(-I)
/// for any probability measure on K, and I is bounded above piece by piece
/// (exact self-energy -log l + 3/2, adjacent pieces through the shared vertex,
/// the rest by a Taylor remainder bound).
inline double leja_lower(const std::vector<ComplexApprox>& samples, std::size_t n) {
    const std::size_t m = samples.size();
    if (n < 2 || m < 3) throw DomainError("leja_lower needs n >= 2 and at least three samples");
    auto pts = leja_points(samples, n);
    double longest = 0.0;
    for (std::size_t i = 1; i < m; ++i) longest = std::max(longest, std::abs(samples[i].value() - samples[i - 1].value()));
    const bool closed = std::abs(samples.front().value() - samples.back().value()) <= 2.0 * longest;
    struct Piece {
        std::complex<double> a, b;
        double len;
        std::size_t owner;
    };
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < m + (closed ? 1 : 0); ++i) {
        const auto a = samples[i].value(), b = samples[(i + 1) % m].value();
        const auto mid = (a + b) / 2.0;
        std::size_t k = 0;
        for (std::size_t j = 1; j < n; ++j)
            if (std::abs(mid - pts[j].value()) < std::abs(mid - pts[k].value())) k = j;
        pieces.push_back({a, b, std::abs(b - a), k});
    }
    std::vector<double> owned(n, 0.0);
    for (auto& q : pieces) owned[q.owner] += q.len;
    std::vector<double> mass;
    double total = 0.0;
    for (auto& q : pieces) {
        mass.push_back(owned[q.owner] > 0 ? q.len / owned[q.owner] : 0.0);
        total += mass.back();
    }
    for (auto& x : mass) x /= total;  // owners without pieces lose their share
    double energy = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (mass[i] == 0.0) continue;
        energy += mass[i] * mass[i] * (-std::log(pieces[i].len) + 1.5);
        for (std::size_t j = i + 1; j < pieces.size(); ++j) {
            if (mass[j] == 0.0) continue;
            energy += 2.0 * mass[i] * mass[j] *
                      detail::mutual_energy_bound(pieces[i].a, pieces[i].b, pieces[j].a, pieces[j].b);
        }
    }
    return std::exp(-energy);
}

/// Bracket from n Leja points (lower) and a monic Chebyshev candidate (upper).
inline CapacityEstimate capacity_bracket(const std::vector<ComplexApprox>& samples, std::size_t n,
                                         const RatPoly& monic) {
    CapacityEstimate e;
    e.lower = leja_lower(samples, n);
    e.upper = chebyshev_upper(samples, monic);
    e.n_points = static_cast<long>(n);
    return e;
}

/// Samples on the unit circle and on [-2, 2] for the two standard examples.
inline std::vector<ComplexApprox> circle_samples(std::size_t m, double radius = 1.0) {
    std::vector<ComplexApprox> s;
    for (std::size_t k = 0; k < m; ++k)
        s.push_back(ComplexApprox::point(std::polar(radius, 2.0 * std::numbers::pi * double(k) / double(m))));
    return s;
}

inline std::vector<ComplexApprox> segment_samples(std::size_t m, double a = -2.0, double b = 2.0) {
    std::vector<ComplexApprox> s;
    for (std::size_t k = 0; k < m; ++k)
        s.push_back(ComplexApprox::point({a + (b - a) * double(k) / double(m - 1), 0.0}));
    return s;
}

}  // namespace arithdyn
