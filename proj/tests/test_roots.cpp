#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "arithdyn/galois_set.hpp"
#include "arithdyn/parse.hpp"
#include "arithdyn/roots.hpp"
#include "oracles.hpp"

using namespace arithdyn;

namespace {
RatPoly P(const char* s) { return parse_poly(s); }

std::vector<double> sorted_re(const std::vector<ComplexApprox>& rs) {
    std::vector<double> v;
    for (auto& r : rs) v.push_back(r.re);
    std::sort(v.begin(), v.end());
    return v;
}
}  // namespace

TEST(Roots, Examples) {
    auto a = complex_roots(P("z^2-2"));
    ASSERT_EQ(a.size(), 2u);
    auto re = sorted_re(a);
    EXPECT_NEAR(re[0], -std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(re[1], std::sqrt(2.0), 1e-12);
    for (auto& r : a) EXPECT_LT(r.residual_bound, 1e-12);

    auto b = complex_roots(P("z^4-1"));
    ASSERT_EQ(b.size(), 4u);
    std::vector<double> ang;
    for (auto& r : b) {
        EXPECT_NEAR(r.modulus(), 1.0, 1e-12);
        double t = std::atan2(r.im, r.re) / (std::numbers::pi / 2);
        ang.push_back(t - std::round(t));
    }
    for (double t : ang) EXPECT_NEAR(t, 0.0, 1e-12);

    auto c = sorted_re(complex_roots(P("z^2-z-2")));
    EXPECT_NEAR(c[0], -1.0, 1e-12);
    EXPECT_NEAR(c[1], 2.0, 1e-12);
}

TEST(Roots, ZeroRootsAndLinear) {
    auto r = complex_roots(P("z^3 - 4z"));
    ASSERT_EQ(r.size(), 3u);
    auto re = sorted_re(r);
    EXPECT_NEAR(re[0], -2, 1e-12);
    EXPECT_EQ(re[1], 0.0);
    EXPECT_NEAR(re[2], 2, 1e-12);
    auto l = complex_roots(P("3z + 1"));
    EXPECT_NEAR(l[0].re, -1.0 / 3, 1e-15);
    EXPECT_THROW(complex_roots(P("5")), DomainError);
}

TEST(Roots, AgreesWithCompanionOracle) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 60; ++t) {
        IntPoly f = oracle::random_int_poly(rng, 2 + t % 7, -20, 20);
        if (!is_squarefree(f) || f.coeff(0) == 0) continue;
        auto ours = complex_roots(f);
        auto ref = oracle::companion_roots(f);
        for (auto& r : ours) {
            double best = 1e300;
            for (auto& q : ref) best = std::min(best, std::abs(r.value() - q));
            EXPECT_LT(best, 1e-6) << to_string(f);
            EXPECT_LT(r.residual_bound, 1e-12 * (1 + r.modulus()));
        }
    }
}

TEST(Roots, ExtremeModuliKeepLogSize) {
    // roots 10^300, 1, 10^-300: only the log modulus is meaningful for the first
    Integer big = ipow(Integer(10), 300);
    IntPoly f = IntPoly{-big, Integer(1)} * IntPoly{Integer(-1), Integer(1)} * IntPoly{Integer(-1), big};
    auto r = complex_roots(f);
    std::vector<double> logs;
    for (auto& x : r) logs.push_back(x.log_modulus);
    std::sort(logs.begin(), logs.end());
    EXPECT_NEAR(logs[0], -300 * std::log(10.0), 1e-9);
    EXPECT_NEAR(logs[1], 0.0, 1e-12);
    EXPECT_NEAR(logs[2], 300 * std::log(10.0), 1e-9);
    Integer huge = ipow(Integer(3), 2000);
    auto h = complex_roots(IntPoly{-huge, Integer(0), Integer(1)});
    for (auto& x : h) EXPECT_NEAR(x.log_modulus, 1000 * std::log(3.0), 1e-9);
}

TEST(Roots, IllConditionedPeriodPolynomial) {
    // period-8 points of z^2 - 2 all lie in [-2, 2]
    auto per = periodic_set(P("z^2-2"), 8);
    ASSERT_TRUE(per.separable);
    auto r = complex_roots(per.set.poly());
    ASSERT_EQ(r.size(), 256u);
    for (auto& x : r) {
        EXPECT_LT(std::fabs(x.im), 1e-9);
        EXPECT_LE(std::fabs(x.re), 2.0 + 1e-9);
    }
}

TEST(Roots, PerturbationStability) {
    std::mt19937_64 rng(43);
    int tested = 0;
    while (tested < 20) {
        IntPoly f = oracle::random_int_poly(rng, 3 + tested % 5, -9, 9);
        if (f.coeff(0) == 0 || !is_squarefree(f)) continue;
        auto ref = oracle::companion_roots(f);
        bool sep = true;
        for (std::size_t i = 0; i < ref.size(); ++i)
            for (std::size_t j = i + 1; j < ref.size(); ++j) sep = sep && std::abs(ref[i] - ref[j]) > 1e-3;
        if (!sep) continue;
        RatPoly g = to_rat_poly(f);
        std::vector<Rational> c(g.coeffs());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= Rational(1) + Rational(static_cast<long>(i % 3) - 1, 100000000000000000L);
        auto s = [](const std::vector<ComplexApprox>& rs) {
            double acc = 0;
            for (auto& x : rs) acc += std::log1p(x.modulus());
            return acc;
        };
        EXPECT_NEAR(s(complex_roots(g)), s(complex_roots(RatPoly(c))), 1e-10);
        ++tested;
    }
}

TEST(NewtonPolygon, Examples) {
    for (long p : {2L, 3L, 5L}) {
        auto a = newton_polygon(RatPoly{Rational(-1, p), Rational(0), Rational(1)}, Integer(p)).root_valuations();
        ASSERT_EQ(a.size(), 1u);
        EXPECT_EQ(a[0].first, Rational(-1, 2));
        EXPECT_EQ(a[0].second, 2);
        auto b = newton_polygon(RatPoly{Rational(-p * p), Rational(0), Rational(1)}, Integer(p)).root_valuations();
        ASSERT_EQ(b.size(), 1u);
        EXPECT_EQ(b[0].first, Rational(1));
        EXPECT_EQ(b[0].second, 2);
    }
    auto c = newton_polygon(P("z^2-z-2"), Integer(3));
    EXPECT_EQ(c.segments.size(), 1u);
    EXPECT_EQ(c.segments[0].slope, 0);
    EXPECT_EQ(c.segments[0].length, 2);
    auto d = newton_polygon(P("z^3 - 4z^2"), Integer(2));
    EXPECT_EQ(d.zero_roots, 2);
    EXPECT_EQ(d.segments[0].slope, Rational(-2));
}

TEST(NewtonPolygon, ShapeInvariants) {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 200; ++t) {
        IntPoly f = oracle::random_int_poly(rng, 1 + t % 8, -200, 200);
        for (long p : {2L, 3L, 5L}) {
            auto np = newton_polygon(f, Integer(p));
            EXPECT_EQ(np.degree(), f.degree());
            for (std::size_t k = 1; k < np.segments.size(); ++k) EXPECT_LT(np.segments[k - 1].slope, np.segments[k].slope);
        }
    }
}

TEST(NewtonPolygon, SplitPolynomialsMatchRootValuations) {
    // independent check: build f from rational roots, compare valuations directly
    std::mt19937_64 rng(53);
    std::uniform_int_distribution<long> d(-60, 60);
    for (int t = 0; t < 100; ++t) {
        std::vector<Rational> roots;
        IntPoly f = IntPoly::constant(Integer(1));
        for (int k = 0; k < 1 + t % 3; ++k) {
            long a = d(rng), b = d(rng);
            if (a == 0) a = 1;
            if (b == 0) b = 7;
            Rational r = make_rational(a, b);
            roots.push_back(r);
            f = f * IntPoly{Integer(-r.get_num()), Integer(r.get_den())};
        }
        for (long p : {2L, 3L, 5L}) {
            std::map<Rational, long> want, got;
            for (auto& r : roots) ++want[Rational(valuation(r, Integer(p)))];
            for (auto& [v, m] : newton_polygon(f, Integer(p)).root_valuations()) got[v] += m;
            EXPECT_EQ(want, got);
            Rational direct = 0;
            for (auto& r : roots) direct += std::max<long>(0, -valuation(r, Integer(p)));
            EXPECT_EQ(sum_log_plus(f, Place::finite(p)), LogAbs::exact(direct, p));
        }
    }
}

TEST(NewtonPolygon, GaussLemmaIdentity) {
    // for primitive f: sum over roots of log+|x|_p = v_p(leading) log p
    std::mt19937_64 rng(59);
    for (int t = 0; t < 100; ++t) {
        IntPoly f = primitive_part(oracle::random_int_poly(rng, 1 + t % 8, -500, 500));
        for (long p : {2L, 3L, 5L})
            EXPECT_EQ(sum_log_plus(f, Place::finite(p)), LogAbs::exact(valuation(f.leading(), Integer(p)), p));
    }
}

TEST(SumLogPlus, Examples) {
    EXPECT_TRUE(sum_log_plus(P("z^2-2"), Place::finite(2)).is_exact_zero());
    EXPECT_NEAR(sum_log_plus(P("z^2-2"), Place::infinity()).to_double(), std::log(2.0), 1e-12);
    for (long p : {2L, 3L, 7L})
        EXPECT_EQ(sum_log_plus(RatPoly{Rational(-1), Rational(p)}, Place::finite(p)), LogAbs::exact(1, p));
}
