#include <gtest/gtest.h>

#include "fgl/ring.hpp"
#include "support.hpp"

using namespace fgl;
using fgl::testing::uniform;

TEST(Ring, RationalAddition)
{
    const auto Q = make_rationals();
    const auto s = RingElement::rational(Q, mpq_class(2, 3)) + RingElement::rational(Q, mpq_class(1, 6));
    EXPECT_EQ(s, RingElement::rational(Q, mpq_class(5, 6)));
    EXPECT_EQ(s.to_string(), "5/6");
}

TEST(Ring, PadicWrapsAtPrecision)
{
    const auto R = make_padic(5, 2);
    const auto s = RingElement::integer(R, 24) + RingElement::integer(R, 1);
    EXPECT_TRUE(s.is_zero());
    EXPECT_EQ(RingElement::integer(R, -1).to_string(), "24");
}

TEST(Ring, EisensteinUniformizerSquares)
{
    const auto K = make_eisenstein(5, 4, {-5, 0, 1});
    const auto pi = uniformizer(K);
    EXPECT_EQ(pi * pi, RingElement::integer(K, 5));
}

TEST(Ring, InvertExamples)
{
    const auto R = make_padic(5, 3);
    EXPECT_EQ(invert(RingElement::integer(R, 2)).to_string(), "63");
    for (const auto &ctx : {make_integers(), make_rationals(), R, make_eisenstein(5, 4, {-5, 0, 1})}) {
        EXPECT_TRUE(invert(RingElement::one(ctx)).is_one()) << ctx->descriptor();
    }
    try {
        invert(RingElement::integer(R, 5));
        FAIL() << "5 is not a unit mod 125";
    } catch (const NotAUnit &e) {
        ASSERT_TRUE(e.valuation());
        EXPECT_EQ(*e.valuation(), 1);
    }
    EXPECT_THROW(invert(RingElement::integer(make_integers(), 2)), NotAUnit);
}

TEST(Ring, ValuationExamples)
{
    EXPECT_EQ(valuation(RingElement::integer(make_padic(5, 4), 50)), 2);
    const auto K = make_eisenstein(5, 6, {-5, 0, 1});
    EXPECT_EQ(valuation(pow(uniformizer(K), 3)), 3);
    EXPECT_EQ(valuation(RingElement::integer(K, 5)), 2);
    EXPECT_FALSE(valuation(RingElement::zero(K)).has_value());
    EXPECT_FALSE(valuation(RingElement::integer(make_padic(5, 3), 125)).has_value());
    EXPECT_THROW(valuation(RingElement::integer(make_integers(), 3)), UnsupportedOperation);
}

TEST(Ring, ContextMismatchIsRejected)
{
    EXPECT_THROW(RingElement::integer(make_padic(5, 2), 1) + RingElement::integer(make_padic(5, 3), 1), ContextMismatch);
    EXPECT_THROW(RingElement::integer(make_padic(5, 2), 1) * RingElement::integer(make_padic(7, 2), 1), ContextMismatch);
}

TEST(Ring, InvalidContextsAreRejected)
{
    EXPECT_THROW(make_padic(6, 2), InvalidInput);
    EXPECT_THROW(make_padic(5, 0), InvalidInput);
    EXPECT_THROW(make_eisenstein(5, 4, {-25, 0, 1}), InvalidInput);
    EXPECT_THROW(make_eisenstein(5, 4, {-5, 1, 1}), InvalidInput);
    EXPECT_THROW(make_eisenstein(5, 4, {-5, 0, 2}), InvalidInput);
}

TEST(Ring, PadicAgreesWithIntegerArithmetic)
{
    const std::uint64_t p = 5;
    const int k = 8;
    const auto R = make_padic(p, k);
    mpz_class mod;
    mpz_ui_pow_ui(mod.get_mpz_t(), p, k);
    auto reduce = [&](const mpz_class &z) {
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), z.get_mpz_t(), mod.get_mpz_t());
        return r;
    };
    for (int i = 0; i < 1000; ++i) {
        const mpz_class a = uniform(-4000000000L, 4000000000L);
        const mpz_class b = uniform(-4000000000L, 4000000000L);
        const auto ea = RingElement::integer(R, a);
        const auto eb = RingElement::integer(R, b);
        ASSERT_EQ((ea + eb).to_string(), reduce(a + b).get_str());
        ASSERT_EQ((ea * eb).to_string(), reduce(a * b).get_str());
        ASSERT_EQ((ea - eb).to_string(), reduce(a - b).get_str());
        ASSERT_EQ((-ea).to_string(), reduce(-a).get_str());
    }
}

TEST(Ring, InverseTimesElementIsOne)
{
    const auto K = make_eisenstein(5, 6, {-10, 0, 1});
    const auto R = make_padic(7, 5);
    const auto Q = make_rationals();
    for (int i = 0; i < 200; ++i) {
        const auto u = RingElement(K, K->from_coordinates({uniform(1, 4) + 5 * uniform(0, 100), uniform(0, 1000)}));
        ASSERT_TRUE((u * invert(u)).is_one());
        const long a = uniform(1, 100000);
        if (a % 7 != 0) {
            const auto e = RingElement::integer(R, a);
            ASSERT_TRUE((e * invert(e)).is_one());
        }
        const auto q = RingElement::rational(Q, mpq_class(uniform(1, 50), uniform(1, 50)));
        ASSERT_TRUE((q * invert(q)).is_one());
    }
}

TEST(Ring, EisensteinValuationIsAdditiveUpToCap)
{
    const int cap = 6;
    const auto K = make_eisenstein(5, cap, {-5, 0, 1});
    const auto pi = uniformizer(K);
    for (int i = 0; i < 300; ++i) {
        const auto u1 = RingElement(K, K->from_coordinates({uniform(1, 4), uniform(0, 124)}));
        const auto u2 = RingElement(K, K->from_coordinates({uniform(1, 4), uniform(0, 124)}));
        const int v1 = static_cast<int>(uniform(0, cap - 1));
        const int v2 = static_cast<int>(uniform(0, cap - 1));
        const auto a = pow(pi, v1) * u1;
        const auto b = pow(pi, v2) * u2;
        ASSERT_EQ(valuation(a), v1);
        ASSERT_EQ(valuation(b), v2);
        const auto vab = valuation(a * b);
        if (v1 + v2 >= cap) {
            ASSERT_FALSE(vab.has_value());
        } else {
            ASSERT_EQ(vab, v1 + v2);
        }
    }
}

TEST(Ring, NormalFormIsIdempotent)
{
    const auto Q = make_rationals();
    const auto K = make_eisenstein(5, 4, {-5, 0, 1});
    const auto nf = make_polynomial_quotient(Q, {"t"}, {PolyTerms{{{0}, mpq_class(-5)}, {{2}, mpq_class(1)}}});
    const auto t = RingElement(nf, nf->variable("t"));
    const auto x = pow(t, 5) + RingElement::rational(nf, mpq_class(1, 3)) * t;
    // Re-normalizing the stored terms must not change them.
    const auto again = RingElement(nf, nf->from_terms(nf->terms_of(x.value())));
    EXPECT_EQ(again, x);
    EXPECT_EQ(again.to_string(), x.to_string());
    EXPECT_EQ(x, RingElement::rational(nf, mpq_class(76, 3)) * t);

    const auto y = RingElement(K, K->from_coordinates({1234, -7}));
    const auto y2 = RingElement(K, K->from_coordinates(K->coordinates(y.value())));
    EXPECT_EQ(y.to_string(), y2.to_string());

    const auto q = RingElement::rational(Q, mpq_class(6, 8));
    EXPECT_EQ(q.to_string(), "3/4");
}

TEST(Ring, PolynomialQuotientArithmetic)
{
    const auto Q = make_rationals();
    const auto nf = make_polynomial_quotient(Q, {"t"}, {PolyTerms{{{0}, mpq_class(-5)}, {{2}, mpq_class(1)}}});
    const auto t = RingElement(nf, nf->variable("t"));
    const auto s = t + RingElement::one(nf);
    EXPECT_TRUE((s * invert(s)).is_one());
    EXPECT_EQ(t * t, RingElement::integer(nf, 5));

    const auto Z = make_integers();
    const auto free = make_polynomial_quotient(Z, {"a", "b"}, {});
    const auto a = RingElement(free, free->variable("a"));
    const auto b = RingElement(free, free->variable("b"));
    EXPECT_EQ((a + b) * (a - b), a * a - b * b);
    EXPECT_THROW(invert(a + RingElement::integer(free, 2)), NotAUnit);
    EXPECT_TRUE(invert(-RingElement::one(free)) == -RingElement::one(free));
}
