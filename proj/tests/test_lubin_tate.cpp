#include <gtest/gtest.h>

#include "fgl/lubin_tate.hpp"
#include "support.hpp"

using namespace fgl;
using namespace fgl::testing;

namespace
{

mpz_class binomial_mod(long a, unsigned k, const mpz_class &mod)
{
    // C(a,k) = a(a-1)...(a-k+1)/k!, exact over Z for any integer a.
    mpz_class num = 1, den = 1;
    for (unsigned i = 0; i < k; ++i) {
        num *= a - static_cast<long>(i);
        den *= i + 1;
    }
    const mpz_class c = num / den;
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), mod.get_mpz_t());
    return r;
}

mpz_class power(unsigned long p, unsigned long k)
{
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, k);
    return r;
}

} // namespace

TEST(LubinTate, MultiplicativePresetGivesMultiplicativeLaw)
{
    const auto out = make_padic(5, 8);
    const auto d = multiplicative_preset(out, 8);
    const auto L = build_fgl(d);
    EXPECT_FALSE(L.defining_identity_defect);
    EXPECT_TRUE(L.law.axioms().passed());
    EXPECT_EQ(L.law.series(), X(out, 8) + Y(out, 8) + X(out, 8) * Y(out, 8));
}

TEST(LubinTate, CubicOverZ3HasNoQuadraticTerm)
{
    const auto d = lubin_tate_datum(make_padic(3, 4), 2, "3*T + T^3");
    const auto L = build_fgl(d);
    EXPECT_EQ(L.law.series(), X(make_padic(3, 4), 2) + Y(make_padic(3, 4), 2));
}

TEST(LubinTate, DefiningIdentityAtDegreeTen)
{
    const auto out = make_padic(5, 6);
    const auto d = standard_preset(out, 10);
    const auto L = build_fgl(d);
    EXPECT_FALSE(L.defining_identity_defect);
    EXPECT_TRUE(L.law.axioms().passed());
    // Independent substitution re-check in the output ring.
    const auto f = d.to_output(d.f);
    const auto fx = f.substitute({{"T", X(out, 10)}});
    const auto fy = f.substitute({{"T", Y(out, 10)}});
    EXPECT_EQ(f.substitute({{"T", L.law.series()}}), L.law(fx, fy));
}

TEST(LubinTate, SolveOrderDoesNotMatter)
{
    for (const auto &out : {make_padic(5, 6), make_eisenstein(5, 6, {-5, 0, 1})}) {
        const auto d = standard_preset(out, 8);
        EXPECT_EQ(build_fgl(d).law.series(), build_fgl(d, SolveOrder::by_monomial_reverse).law.series()) << out->descriptor();
    }
}

TEST(LubinTate, EndomorphismExamples)
{
    const auto out = make_padic(5, 8);
    const auto d = standard_preset(out, 8);
    EXPECT_EQ(build_endomorphism(d, RingElement::one(out)), T(out, 8).renamed({"x"}));
    EXPECT_EQ(build_endomorphism(d, uniformizer(out)), d.to_output(d.f).renamed({"x"}));

    const auto dm = multiplicative_preset(out, 8);
    TruncatedSeries two(out, {"x"}, 8);
    two.set_at(1, out->from_integer(2));
    two.set_at(2, out->one());
    EXPECT_EQ(build_endomorphism(dm, RingElement::integer(out, 2)), two);
}

TEST(LubinTate, BinomialCoefficientsOfMultiplicativePreset)
{
    const int N = 12;
    const auto out = make_padic(5, 8);
    const auto d = multiplicative_preset(out, N);
    const mpz_class mod = power(5, 8);
    // Negative scalars are given as exact lifts: their residues mod 5^8 alone do
    // not determine [a] modulo 5^8.
    for (const long a : {2L, 7L, 5L, 6L, 31L, -1L, -3L}) {
        const auto s = build_endomorphism(d, RingElement::integer(a < 0 ? d.ring : out, a));
        for (unsigned k = 1; k <= static_cast<unsigned>(N); ++k) {
            ASSERT_EQ(RingElement(out, coeff(s, k)).to_string(), binomial_mod(a, k, mod).get_str()) << "a=" << a << " k=" << k;
        }
    }
}

TEST(LubinTate, ActionIsAdditiveAndMultiplicative)
{
    const int N = 6;
    const auto out = make_padic(5, 6);
    const auto d = standard_preset(out, N);
    const auto F = build_fgl(d).law;
    // Scalars live in the working ring so that sums and products do not wrap
    // at the output precision.
    for (int i = 0; i < 25; ++i) {
        const auto a = RingElement::integer(d.ring, uniform(1, 15624));
        const auto b = RingElement::integer(d.ring, uniform(1, 15624));
        const auto ea = build_endomorphism(d, a), eb = build_endomorphism(d, b);
        ASSERT_EQ(F(ea.renamed({"x"}), eb.renamed({"x"})), build_endomorphism(d, a + b)) << a << " " << b;
        ASSERT_EQ(ea.compose(eb), build_endomorphism(d, a * b)) << a << " " << b;
        ASSERT_FALSE(endomorphism_defect(F, ea));
    }
}

TEST(LubinTate, EisensteinActionIsAdditive)
{
    const int N = 5;
    const auto out = make_eisenstein(5, 5, {-10, 0, 1});
    const auto d = standard_preset(out, N);
    const auto L = build_fgl(d);
    ASSERT_FALSE(L.defining_identity_defect);
    for (int i = 0; i < 8; ++i) {
        const auto a = RingElement(d.ring, d.ring->from_coordinates({uniform(0, 124), uniform(0, 124)}));
        const auto b = RingElement(d.ring, d.ring->from_coordinates({uniform(0, 124), uniform(0, 124)}));
        ASSERT_EQ(L.law(build_endomorphism(d, a), build_endomorphism(d, b)), build_endomorphism(d, a + b));
        ASSERT_EQ(build_endomorphism(d, a).compose(build_endomorphism(d, b)), build_endomorphism(d, a * b));
    }
}

TEST(LubinTate, ActionExamples)
{
    const int N = 6;
    const auto out = make_padic(5, 6);
    const auto d = standard_preset(out, N);
    const auto F = build_fgl(d).law;
    const auto A = build_action(d, F, std::vector<RingElement>{RingElement::one(out), uniformizer(out)});
    ASSERT_EQ(A.entries.size(), 2u);
    EXPECT_EQ(A.entries[0].series, T(out, N).renamed({"x"}));
    EXPECT_EQ(A.entries[1].series, d.to_output(d.f).renamed({"x"}));
    EXPECT_TRUE(verify_action(A).passed());

    const auto dm = multiplicative_preset(out, N);
    const auto Fm = build_fgl(dm).law;
    const auto B = build_action(dm, Fm, std::vector<RingElement>{integer(out, 2), integer(out, 3), integer(out, 6)});
    EXPECT_TRUE(verify_action(B).passed());
    EXPECT_EQ(B.entries[0].series.compose(B.entries[1].series), B.entries[2].series);

    const auto M = padic_truncation_of(out, 1, 2);
    const auto C = build_action(d, F, M);
    EXPECT_EQ(C.entries.size(), 8u);
    std::set<std::string> lifts;
    for (const auto &e : C.entries) {
        lifts.insert(e.scalar->to_string());
        EXPECT_TRUE(out->equal(linear_coefficient(e.series), e.scalar->value()));
    }
    EXPECT_EQ(lifts, (std::set<std::string>{"1", "2", "3", "4", "5", "10", "15", "20"}));
    EXPECT_TRUE(verify_action(C).passed());

    EXPECT_THROW(build_action(d, F, std::vector<RingElement>{RingElement::zero(out)}), InvalidInput);
}

TEST(LubinTate, ComparisonOfTwoSeries)
{
    const int N = 7;
    const auto out = make_padic(5, 6);
    const auto d1 = standard_preset(out, N);
    const auto same = compare_lubin_tate(d1, d1);
    ASSERT_TRUE(same.h);
    EXPECT_EQ(*same.h, T(out, N));

    const auto d2 = multiplicative_preset(out, N);
    const auto cmp = compare_lubin_tate(d1, d2);
    EXPECT_TRUE(cmp.integral);
    EXPECT_FALSE(cmp.exact_defect);
    ASSERT_TRUE(cmp.h);
    EXPECT_FALSE(cmp.output_defect);
    // Independent intertwining check h(F1) = F2(h, h) in the output ring.
    const auto F1 = build_fgl(d1).law, F2 = build_fgl(d2).law;
    const auto &h = *cmp.h;
    EXPECT_EQ(h.substitute({{"T", F1.series()}}), F2(h.substitute({{"T", X(out, N)}}), h.substitute({{"T", Y(out, N)}})));
    // h also intertwines the Lubin-Tate series: h(f1) = f2(h).
    EXPECT_EQ(h.compose(d1.to_output(d1.f)), d2.to_output(d2.f).compose(h));
}

TEST(LubinTate, InvalidData)
{
    const auto out = make_padic(5, 6);
    EXPECT_THROW(lubin_tate_datum(out, 4, "T + T^5"), LubinTateError);
    EXPECT_THROW(lubin_tate_datum(out, 4, "pi*T + T^2 + T^5"), LubinTateError);
    EXPECT_THROW(lubin_tate_datum(out, 4, "pi*T + 5*T^5"), LubinTateError);
    EXPECT_THROW(lubin_tate_datum(out, 4, "1 + pi*T + T^5"), LubinTateError);
    EXPECT_NO_THROW(lubin_tate_datum(out, 4, "pi*T + 10*T^3 + T^5"));
    EXPECT_THROW(lubin_tate_datum(out, 0, "pi*T + T^5"), InvalidInput);
    EXPECT_THROW(multiplicative_preset(make_eisenstein(5, 4, {-5, 0, 1}), 4), InvalidInput);
}

TEST(LubinTate, RationalDatumMatchesPadic)
{
    const int N = 6;
    const auto Q = make_rationals();
    const auto dq = multiplicative_preset(Q, N, 5);
    const auto L = build_fgl(dq);
    EXPECT_FALSE(L.defining_identity_defect);
    EXPECT_EQ(L.law.series(), X(Q, N) + Y(Q, N) + X(Q, N) * Y(Q, N));
}
