#include <gtest/gtest.h>

#include "fgl/parse.hpp"
#include "support.hpp"

using namespace fgl;
using namespace fgl::testing;

namespace
{

using QPoly = std::vector<mpq_class>; // dense, index = exponent

QPoly qmul(const QPoly &a, const QPoly &b, std::size_t n)
{
    QPoly r(n + 1, 0);
    for (std::size_t i = 0; i < a.size() && i <= n; ++i) {
        for (std::size_t j = 0; j < b.size() && i + j <= n; ++j) {
            r[i + j] += a[i] * b[j];
        }
    }
    return r;
}

QPoly qinverse(const QPoly &a, std::size_t n)
{
    QPoly r(n + 1, 0);
    r[0] = 1 / a[0];
    for (std::size_t k = 1; k <= n; ++k) {
        mpq_class acc = 0;
        for (std::size_t j = 1; j <= k && j < a.size(); ++j) {
            acc += a[j] * r[k - j];
        }
        r[k] = -acc / a[0];
    }
    return r;
}

// Lagrange inversion: [T^k] g = (1/k) [T^{k-1}] (T / f(T))^k.
QPoly lagrange_inverse(const QPoly &f, std::size_t N)
{
    QPoly f_over_T(f.begin() + 1, f.end());
    const QPoly h = qinverse(f_over_T, N);
    QPoly g(N + 1, 0);
    QPoly hk{1};
    for (std::size_t k = 1; k <= N; ++k) {
        hk = qmul(hk, h, N);
        g[k] = hk[k - 1] / mpq_class(static_cast<long>(k));
    }
    return g;
}

QPoly to_qpoly(const TruncatedSeries &s)
{
    QPoly out(static_cast<std::size_t>(s.degree()) + 1, 0);
    for (unsigned k = 0; k <= static_cast<unsigned>(s.degree()); ++k) {
        out[k] = std::get<mpq_class>(coeff(s, k).s);
    }
    return out;
}

TruncatedSeries parse(const Ring &r, std::vector<std::string> vars, int N, const std::string &text)
{
    return parse_series(ParseContext{r, std::move(vars), N, std::nullopt, {}}, text);
}

} // namespace

TEST(Series, ProductsAndSums)
{
    const auto Q = make_rationals();
    const auto x = X(Q, 2), y = Y(Q, 2);
    EXPECT_EQ((x + y) * (x + y), parse(Q, {"x", "y"}, 2, "x^2 + 2*x*y + y^2"));

    const auto t = T(Q, 2);
    EXPECT_EQ((t + t * t) * t, t * t);

    const auto x3 = X(Q, 3), y3 = Y(Q, 3);
    EXPECT_EQ((x3 + y3 + x3 * y3) + (-x3 - y3), x3 * y3);
    EXPECT_EQ(((x3 + y3 + x3 * y3) + (-x3 - y3)).to_string(), "x*y");
}

TEST(Series, ShapeMismatchIsRejected)
{
    const auto Q = make_rationals();
    EXPECT_THROW(T(Q, 2) + T(Q, 3), ShapeMismatch);
    EXPECT_THROW(X(Q, 2) * T(Q, 2), ShapeMismatch);
    EXPECT_THROW(T(Q, 2) + T(make_padic(5, 2), 2), ContextMismatch);
}

TEST(Series, SubstituteExamples)
{
    const auto Q = make_rationals();
    const auto x = X(Q, 3), y = Y(Q, 3);
    const auto t = T(Q, 3);
    EXPECT_EQ((x + y).substitute({{"x", t}, {"y", t * t}}), t + t * t);

    const std::vector<std::string> uvw{"u", "v", "w"};
    const auto u = TruncatedSeries::variable(Q, uvw, 2, "u");
    const auto v = TruncatedSeries::variable(Q, uvw, 2, "v");
    const auto w = TruncatedSeries::variable(Q, uvw, 2, "w");
    const auto F = X(Q, 2) + Y(Q, 2) + X(Q, 2) * Y(Q, 2);
    EXPECT_EQ(F.substitute({{"x", u + v}, {"y", w}}), u + v + w + u * w + v * w);

    EXPECT_EQ((t * t).compose(t + t * t), parse(Q, {"T"}, 3, "T^2 + 2*T^3"));
}

TEST(Series, SubstituteErrors)
{
    const auto Q = make_rationals();
    const auto x = X(Q, 3), y = Y(Q, 3);
    const auto one = TruncatedSeries::constant(Q, {"T"}, 3, Q->one());
    EXPECT_THROW((x + y).substitute({{"x", T(Q, 3) + one}, {"y", T(Q, 3)}}), InvalidInput);
    EXPECT_THROW((x + y).substitute({{"x", T(Q, 3)}}), InvalidInput);
    EXPECT_NO_THROW(x.substitute({{"x", T(Q, 3)}}));
}

TEST(Series, CompositionalInverseExamples)
{
    const auto Q = make_rationals();
    const auto t = T(Q, 5);
    EXPECT_EQ(t.compositional_inverse(), t);
    EXPECT_EQ((t + t * t).compositional_inverse(), parse(Q, {"T"}, 5, "T - T^2 + 2*T^3 - 5*T^4 + 14*T^5"));
    const auto two = RingElement::integer(Q, 2);
    EXPECT_EQ(t.scaled(two.value()).compositional_inverse(), parse(Q, {"T"}, 5, "T/2"));
}

TEST(Series, CompositionalInverseMatchesLagrange)
{
    const auto Q = make_rationals();
    const int N = 7;
    const auto t = T(Q, N);
    const auto f = t + t * t;
    const QPoly lagrange = lagrange_inverse(to_qpoly(f), N);
    EXPECT_EQ(to_qpoly(f.compositional_inverse()), lagrange);
    for (int trial = 0; trial < 30; ++trial) {
        const auto r = random_unit_series(Q, N);
        ASSERT_EQ(to_qpoly(r.compositional_inverse()), lagrange_inverse(to_qpoly(r), N)) << r;
    }
}

TEST(Series, CompositionalInverseErrors)
{
    const auto Z5 = make_padic(5, 4);
    const auto t = T(Z5, 4);
    try {
        t.scaled(Z5->from_integer(5)).compositional_inverse();
        FAIL() << "5 is not a unit";
    } catch (const NotAUnit &e) {
        EXPECT_NE(std::string(e.what()).find("5"), std::string::npos);
        EXPECT_EQ(e.valuation(), 1);
    }
    const auto Z = make_integers();
    EXPECT_THROW(T(Z, 4).scaled(Z->from_integer(2)).compositional_inverse(), NotAUnit);
    const auto one = TruncatedSeries::constant(Z5, {"T"}, 4, Z5->one());
    EXPECT_THROW((t + one).compositional_inverse(), InvalidInput);
}

TEST(Series, DerivativeExamples)
{
    const auto Q = make_rationals();
    const auto x = X(Q, 3), y = Y(Q, 3);
    const auto one = TruncatedSeries::constant(Q, {"x", "y"}, 3, Q->one());
    EXPECT_EQ((x + y + x * y).derivative("x"), one + y);
    const auto t = T(Q, 3);
    EXPECT_EQ((t * t * t).derivative("T"), parse(Q, {"T"}, 3, "3*T^2"));
    EXPECT_TRUE((x * x).derivative("y").is_zero());
    EXPECT_THROW(x.derivative("z"), InvalidInput);
}

TEST(Series, IdentitySubstitutionIsNeutral)
{
    const auto Q = make_rationals();
    const auto F = parse(Q, {"x", "y"}, 5, "x + y + 3*x*y - x^2*y/2 + 7*y^4");
    EXPECT_EQ(F.substitute({{"x", X(Q, 5)}, {"y", Y(Q, 5)}}), F);
    const auto f = random_unit_series(Q, 6);
    EXPECT_EQ(f.compose(T(Q, 6)), f);
}

TEST(Series, InverseIsAnInvolution)
{
    const auto Q = make_rationals();
    const auto Z5 = make_padic(5, 6);
    const int N = 6;
    for (int trial = 0; trial < 200; ++trial) {
        const auto &R = trial % 2 == 0 ? Q : Z5;
        auto f = random_unit_series(R, N);
        // Random unit linear coefficient.
        long a1 = uniform(1, 24);
        if (a1 % 5 == 0) {
            a1 += 1;
        }
        f.set_at(1, R->from_integer(a1));
        const auto g = f.compositional_inverse();
        ASSERT_EQ(g.compositional_inverse(), f) << R->descriptor() << ": " << f;
        ASSERT_EQ(f.compose(g), T(R, N));
        ASSERT_EQ(g.compose(f), T(R, N));
    }
}

TEST(Series, SubstitutionIsAssociative)
{
    const auto Q = make_rationals();
    const int N = 7;
    for (int trial = 0; trial < 50; ++trial) {
        auto f = random_unit_series(Q, N), g = random_unit_series(Q, N), h = random_unit_series(Q, N);
        // Allow zero or non-unit linear terms too; only the constant term must vanish.
        g.set_at(1, Q->from_integer(uniform(-2, 2)));
        h.set_at(1, Q->from_integer(uniform(-2, 2)));
        ASSERT_EQ(f.compose(g).compose(h), f.compose(g.compose(h)));
    }
}

TEST(Series, ReciprocalOfOnePlusT)
{
    const auto Q = make_rationals();
    const auto one = TruncatedSeries::constant(Q, {"T"}, 5, Q->one());
    EXPECT_EQ((one + T(Q, 5)).reciprocal(), parse(Q, {"T"}, 5, "1 - T + T^2 - T^3 + T^4 - T^5"));
}

TEST(Series, TextIsGradedAndSigned)
{
    const auto Q = make_rationals();
    const auto s = parse(Q, {"x", "y"}, 3, "y^2 - x/2 + 3*x*y");
    EXPECT_EQ(s.to_string(), "-1/2*x + 3*x*y + y^2");
    EXPECT_EQ(TruncatedSeries(Q, {"T"}, 2).to_string(), "0");
}
