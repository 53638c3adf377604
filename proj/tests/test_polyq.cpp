#include <gtest/gtest.h>

#include <random>

#include "arithdyn/galois_set.hpp"
#include "arithdyn/parse.hpp"
#include "oracles.hpp"

using namespace arithdyn;

namespace {
RatPoly P(const char* s) { return parse_poly(s); }
IntPoly I(const char* s) { return to_int_poly_exact(parse_poly(s)); }
}  // namespace

TEST(Parse, Forms) {
    EXPECT_EQ(to_string(P("z^2 - 1/2*z + 3")), "z^2 - 1/2*z + 3");
    EXPECT_EQ(P("(z^3-z^2)/2"), RatPoly({Rational(0), Rational(0), Rational(-1, 2), Rational(1, 2)}));
    EXPECT_EQ(P("2z(z+1)"), P("2*z^2 + 2*z"));
    EXPECT_EQ(P("-z^2"), P("0 - z^2"));
    EXPECT_EQ(P("0.25*z"), P("1/4*z"));
    EXPECT_EQ(P("(z+1)^3"), P("z^3+3z^2+3z+1"));
}

TEST(Parse, ErrorsCarryPositions) {
    try {
        parse_poly("z^2 + * 3");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 6u);
    }
    EXPECT_THROW(parse_poly(""), ParseError);
    EXPECT_THROW(parse_poly("z/(z+1)"), ParseError);
    EXPECT_THROW(parse_poly("z^"), ParseError);
    EXPECT_THROW(parse_poly("(z+1"), ParseError);
    EXPECT_THROW(parse_poly("y^2"), ParseError);
}

TEST(Polyq, Compose) {
    EXPECT_EQ(compose(P("z^2"), P("z+1")), P("z^2+2z+1"));
    EXPECT_EQ(compose(P("z^2-1"), P("z^2-1")), P("z^4-2z^2"));
    RatPoly f = P("3z^5 - 1/7*z^2 + 2");
    EXPECT_EQ(compose(f, P("z")), f);
}

TEST(Polyq, Iterate) {
    EXPECT_EQ(iterate(P("z^2"), 3), P("z^8"));
    EXPECT_EQ(iterate(P("z^2-1"), 2), P("z^4-2z^2"));
    EXPECT_EQ(iterate(P("2z^2"), 2).leading(), Rational(8));
    EXPECT_THROW(iterate(P("z^2"), 13), DegreeCapError);
}

TEST(Polyq, IterateLeadingCoefficient) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        long d = 2 + t % 3;
        RatPoly phi = to_rat_poly(oracle::random_int_poly(rng, d, -5, 5));
        phi *= Rational(1, 1 + t % 4);
        for (unsigned m = 1; m <= 3; ++m) {
            long e = 0, dm = 1;
            for (unsigned k = 0; k < m; ++k) {
                e += dm;
                dm *= d;
            }
            EXPECT_EQ(iterate(phi, m).leading(), rpow(phi.leading(), e));
        }
    }
}

TEST(Polyq, ResultantExamples) {
    EXPECT_EQ(resultant(P("z^2-2"), P("z^2-3")), Rational(1));
    EXPECT_EQ(resultant(P("z^3+z+5"), P("1")), Rational(1));
    RatPoly g = P("z^3 - 4z + 1/3");
    EXPECT_EQ(resultant(P("z - 5/2"), g), g(Rational(5, 2)));
    EXPECT_THROW(resultant(RatPoly(), RatPoly()), DomainError);
}

TEST(Polyq, ResultantMatchesSylvesterOracle) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 200; ++t) {
        IntPoly f = oracle::random_int_poly(rng, 1 + t % 6, -9, 9);
        IntPoly g = oracle::random_int_poly(rng, 1 + (t / 6) % 6, -9, 9);
        ASSERT_EQ(resultant(f, g), oracle::sylvester_resultant(f, g)) << to_string(f) << " | " << to_string(g);
    }
}

TEST(Polyq, ResultantMultiplicative) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        RatPoly f = to_rat_poly(oracle::random_int_poly(rng, 1 + t % 6, -9, 9));
        RatPoly g = to_rat_poly(oracle::random_int_poly(rng, 1 + (t + 2) % 6, -9, 9));
        RatPoly h = to_rat_poly(oracle::random_int_poly(rng, 1 + (t + 4) % 6, -9, 9));
        ASSERT_EQ(resultant(f, g * h), resultant(f, g) * resultant(f, h));
    }
}

TEST(Polyq, DiscriminantExamples) {
    EXPECT_EQ(discriminant_pairproduct(GaloisSet::from_poly(P("z^2-2"))), Rational(-8));
    EXPECT_EQ(abs(discriminant_pairproduct(GaloisSet::from_poly(P("z^4-1")))), Rational(256));
    EXPECT_EQ(discriminant_pairproduct(GaloisSet::from_poly(P("z^2+1"))), Rational(4));
    EXPECT_THROW(discriminant_pairproduct(GaloisSet::from_poly(P("z-3"))), DomainError);
}

TEST(Polyq, DiscriminantMatchesBruteForce) {
    std::mt19937_64 rng(23);
    int checked = 0;
    while (checked < 50) {
        IntPoly f = oracle::random_int_poly(rng, 2 + checked % 5, -9, 9);
        if (!is_squarefree(f)) continue;
        auto roots = oracle::companion_roots(f);
        bool separated = true;
        for (std::size_t i = 0; i < roots.size(); ++i)
            for (std::size_t j = i + 1; j < roots.size(); ++j)
                if (std::abs(roots[i] - roots[j]) < 1e-3) separated = false;
        if (!separated) continue;
        Rational delta = discriminant_pairproduct(GaloisSet::from_poly(f));
        std::complex<double> brute = oracle::pair_product(roots);
        const double exact = delta.get_d();
        EXPECT_NEAR(brute.real(), exact, 1e-8 * std::fabs(exact)) << to_string(f);
        EXPECT_NEAR(brute.imag(), 0.0, 1e-8 * std::fabs(exact));
        ++checked;
    }
}

TEST(Polyq, SquarefreePart) {
    EXPECT_EQ(squarefree_part(P("z^2")), I("z"));
    EXPECT_EQ(squarefree_part(P("(z-1)^2*(z+2)")), I("(z-1)*(z+2)"));
    EXPECT_EQ(squarefree_part(P("z^4-2z^2+1")), I("z^2-1"));
    EXPECT_EQ(squarefree_part(P("-1/2*z^2 + 1/2")), I("z^2-1"));
    EXPECT_THROW(squarefree_part(RatPoly()), DomainError);
}

TEST(Polyq, Pushforward) {
    EXPECT_EQ(pushforward(GaloisSet::from_poly(P("z^2-2")), P("z^2")).poly(), I("z-2"));
    EXPECT_EQ(pushforward(GaloisSet::from_poly(P("z")), P("z^2-1")).poly(), I("z+1"));
    EXPECT_EQ(pushforward(GaloisSet::from_poly(P("z^2+1")), P("z^2")).poly(), I("z+1"));
    EXPECT_EQ(pushforward_multiset(I("z^2-2"), P("z^2")), I("(z-2)^2"));
}

TEST(Polyq, PushforwardComposes) {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 25; ++t) {
        RatPoly phi = to_rat_poly(oracle::random_int_poly(rng, 2 + t % 2, -4, 4));
        phi *= Rational(1, 1 + t % 3);
        GaloisSet S = GaloisSet::from_poly(oracle::random_int_poly(rng, 1 + t % 4, -6, 6));
        ASSERT_EQ(pushforward(pushforward(S, phi), phi), pushforward(S, iterate(phi, 2)));
    }
}

TEST(Polyq, PeriodicSet) {
    auto a = periodic_set(P("z^2"), 2);
    EXPECT_EQ(a.set.cardinality(), 4);
    EXPECT_TRUE(a.separable);
    EXPECT_EQ(periodic_set(P("z^2-2"), 1).set.poly(), I("z^2-z-2"));
    EXPECT_EQ(periodic_set(P("z^2"), 1).set.poly(), I("z^2-z"));
    // z^2 + 1/4 has a parabolic fixed point at 1/2
    auto b = periodic_set(P("z^2+1/4"), 1);
    EXPECT_FALSE(b.separable);
    EXPECT_EQ(b.set.poly(), I("2z-1"));
}

TEST(Polyq, PreimageSet) {
    EXPECT_EQ(preimage_set(P("z^2"), 2, Rational(1)).poly(), I("z^4-1"));
    EXPECT_EQ(preimage_set(P("z^2-1"), 1, Rational(-1)).poly(), I("z"));
    EXPECT_EQ(preimage_set(P("z^2"), 1, Rational(2)).poly(), I("z^2-2"));
}

TEST(Polyq, GcdAgainstKnownFactors) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
        IntPoly c = primitive_part(oracle::random_int_poly(rng, 1 + t % 3, -5, 5));
        IntPoly a = oracle::random_int_poly(rng, 1 + t % 4, -5, 5), b = oracle::random_int_poly(rng, 2, -5, 5);
        IntPoly g = gcd(a * c, b * c);
        EXPECT_EQ(gcd(g, c), c);  // c divides the gcd
    }
}
