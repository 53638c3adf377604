#include <gtest/gtest.h>

#include <random>

#include "arithdyn/places.hpp"

using namespace arithdyn;

namespace {

Rational q(const char* s) { return parse_rational(s); }

// Random integer of at most `bits` bits with a factorization Pollard rho can
// finish: a product of primes below 2^30.
Integer smooth_random(gmp_randclass& r, unsigned bits) {
    Integer n = 1;
    while (true) {
        Integer p;
        Integer cand = r.get_z_bits(1 + Integer(r.get_z_range(30)).get_ui());
        mpz_nextprime(p.get_mpz_t(), cand.get_mpz_t());
        if (mpz_sizeinbase(Integer(n * p).get_mpz_t(), 2) > bits) break;
        n *= p;
    }
    return n;
}

}  // namespace

TEST(Places, LogAbsExamples) {
    EXPECT_EQ(log_abs(Rational(6), Place::finite(2)), LogAbs::exact(-1, 2));
    EXPECT_EQ(log_abs(q("9/4"), Place::finite(3)), LogAbs::exact(-2, 3));
    EXPECT_EQ(log_abs(q("9/4"), Place::finite(2)), LogAbs::exact(2, 2));
    EXPECT_DOUBLE_EQ(log_abs(Rational(1), Place::infinity()).to_double(), 0.0);
    EXPECT_FALSE(log_abs(Rational(1), Place::infinity()).is_exact());
    EXPECT_TRUE(log_abs(Rational(7), Place::finite(3)).is_exact_zero());
    EXPECT_THROW(log_abs(Rational(0), Place::finite(3)), DomainError);
}

TEST(Places, ZeroCoefficientsNormalize) {
    LogAbs a = LogAbs::exact(q("1/2"), 5) + LogAbs::exact(q("-1/2"), 5);
    EXPECT_TRUE(a.is_exact_zero());
    EXPECT_EQ(a.to_string(), "0");
    EXPECT_TRUE(LogAbs::exact(0, 7).is_exact_zero());
    LogAbs b = LogAbs::exact(1, 2) + LogAbs::exact(q("2/3"), 3);
    EXPECT_EQ(b.terms().size(), 2u);
    EXPECT_EQ(b.to_string(), "1*log(2) + 2/3*log(3)");
}

TEST(Places, ProductFormulaExamples) {
    EXPECT_TRUE(product_formula_check(Rational(6)));
    EXPECT_TRUE(product_formula_check(q("-35/12")));
    EXPECT_TRUE(product_formula_check(Rational(1)));
    EXPECT_THROW(product_formula_check(Rational(0)), DomainError);
}

TEST(Places, ProductFormulaRandom128Bit) {
    gmp_randclass r(gmp_randinit_mt);
    r.seed(20240611);
    for (int i = 0; i < 1000; ++i) {
        Integer num = smooth_random(r, 128), den = smooth_random(r, 128);
        if (i % 2) num = -num;
        // every tenth numerator is a ~100-bit prime instead
        if (i % 10 == 0) {
            Integer start = r.get_z_bits(100);
            mpz_nextprime(num.get_mpz_t(), start.get_mpz_t());
        }
        ASSERT_TRUE(product_formula_check(make_rational(num, den))) << num << "/" << den;
    }
}

TEST(Places, LogAbsMultiplicative) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> d(-100000, 100000);
    for (int i = 0; i < 300; ++i) {
        long a = d(rng), b = d(rng), c = d(rng), e = d(rng);
        if (!a || !b || !c || !e) continue;
        Rational x = make_rational(a, b), y = make_rational(c, e);
        for (long p : {2L, 3L, 5L, 7L, 101L})
            EXPECT_EQ(log_abs(x * y, Place::finite(p)), log_abs(x, Place::finite(p)) + log_abs(y, Place::finite(p)));
        const double lhs = log_abs(x * y, Place::infinity()).to_double();
        const double rhs = (log_abs(x, Place::infinity()) + log_abs(y, Place::infinity())).to_double();
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::fabs(lhs)));
    }
}

TEST(Places, RelevantPlaces) {
    auto s = [](const std::vector<Place>& v) {
        std::string out;
        for (auto& p : v) out += p.to_string() + ",";
        return out;
    };
    EXPECT_EQ(s(relevant_places({Rational(6)})), "inf,2,3,");
    EXPECT_EQ(s(relevant_places({Rational(1)})), "inf,");
    EXPECT_EQ(s(relevant_places({q("1/2"), Rational(3)})), "inf,2,3,");
    EXPECT_THROW(relevant_places({Rational(0)}), DomainError);
}

TEST(Places, RelevantPlacesMonotone) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> d(1, 5000);
    for (int i = 0; i < 50; ++i) {
        std::vector<Rational> A{make_rational(d(rng), d(rng)), make_rational(d(rng), d(rng))};
        std::vector<Rational> AB = A;
        AB.push_back(make_rational(d(rng), d(rng)));
        auto pa = relevant_places(std::span<const Rational>(A));
        auto pab = relevant_places(std::span<const Rational>(AB));
        for (auto& p : pa) EXPECT_NE(std::find(pab.begin(), pab.end(), p), pab.end());
    }
}

TEST(Places, ParseRational) {
    EXPECT_EQ(parse_rational("-6/4"), q("-3/2"));
    EXPECT_EQ(parse_rational("12"), Rational(12));
    EXPECT_THROW(parse_rational("1/0"), ParseError);
    EXPECT_THROW(parse_rational("1/-2"), ParseError);
    EXPECT_THROW(parse_rational("abc"), ParseError);
}

TEST(Places, ParsePlace) {
    EXPECT_TRUE(parse_place("inf").is_archimedean());
    EXPECT_EQ(parse_place("7").prime(), 7);
    EXPECT_THROW(parse_place("9"), ParseError);
    EXPECT_THROW(parse_place("x"), ParseError);
}

TEST(Places, PrimalityAndFactor) {
    EXPECT_TRUE(is_prime(Integer("18446744073709551557")));  // largest prime below 2^64
    EXPECT_FALSE(is_prime(Integer("3215031751")));            // strong pseudoprime to 2,3,5,7
    EXPECT_TRUE(is_prime(Integer("170141183460469231731687303715884105727")));
    auto f = factor(Integer("600851475143"));
    EXPECT_EQ(f.size(), 4u);
    EXPECT_EQ(f.rbegin()->first, 6857);
}
