#include <gtest/gtest.h>

#include "fgl/parse.hpp"
#include "support.hpp"

using namespace fgl;
using namespace fgl::testing;

TEST(Parse, SeriesGrammar)
{
    const auto Q = make_rationals();
    const ParseContext ctx{Q, {"T"}, 5, std::nullopt, {}};
    const auto t = T(Q, 5);
    const auto one = TruncatedSeries::constant(Q, {"T"}, 5, Q->one());
    EXPECT_EQ(parse_series(ctx, "(1+T)^5 - 1"), (one + t).pow(5) - one);
    EXPECT_EQ(parse_series(ctx, "T - T^2/2 + T^3/3"), t - (t * t).scaled(Q->from_rational(mpq_class(1, 2))) + (t * t * t).scaled(Q->from_rational(mpq_class(1, 3))));
    EXPECT_EQ(parse_series(ctx, "-(T)"), -t);
    EXPECT_EQ(parse_series(ctx, " 2 * T ^ 2 "), (t * t).scaled(Q->from_integer(2)));
}

TEST(Parse, UniformizerAndPadicCoefficients)
{
    const auto K = make_eisenstein(5, 6, {-5, 0, 1});
    const auto pi = uniformizer(K);
    const ParseContext ctx{K, {"T"}, 5, pi, {}};
    const auto s = parse_series(ctx, "pi*T + T^5");
    EXPECT_EQ(s.coefficient({1}), pi);
    EXPECT_TRUE(s.coefficient({5}).is_one());
    EXPECT_EQ(parse_element(K, "pi^2", pi), RingElement::integer(K, 5));
}

TEST(Parse, ErrorsCarryPositions)
{
    const auto Q = make_rationals();
    const ParseContext ctx{Q, {"T"}, 3, std::nullopt, {}};
    try {
        parse_series(ctx, "T + (T^2");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.position(), 8u);
    }
    try {
        parse_series(ctx, "T + q");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.position(), 4u);
    }
    EXPECT_THROW(parse_series(ctx, "pi*T"), ParseError);
    EXPECT_THROW(parse_series(ctx, ""), ParseError);
    EXPECT_THROW(parse_series(ctx, "T $"), ParseError);
}

TEST(Parse, IntegerPolynomials)
{
    EXPECT_EQ(parse_integer_polynomial("t^2-5"), (std::vector<std::int64_t>{-5, 0, 1}));
    EXPECT_EQ(parse_integer_polynomial("t^3 + 10*t - 5"), (std::vector<std::int64_t>{-5, 10, 0, 1}));
    EXPECT_THROW(parse_integer_polynomial("t/2"), Error);
}
