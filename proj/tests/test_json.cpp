#include <gtest/gtest.h>

#include "fgl/json.hpp"
#include "support.hpp"

using namespace fgl;
using namespace fgl::testing;
using fgl::json::Json;

namespace
{

std::vector<Ring> sample_rings()
{
    return {make_integers(), make_rationals(), make_padic(5, 6), make_padic(2, 10), make_eisenstein(5, 4, {-5, 0, 1}),
            make_eisenstein(3, 5, {3, 3, 1})};
}

} // namespace

TEST(Json, RingDescriptorsRoundTrip)
{
    for (const auto &r : sample_rings()) {
        const auto back = json::parse_ring_descriptor(r->descriptor());
        EXPECT_EQ(back->descriptor(), r->descriptor());
    }
    EXPECT_THROW(json::parse_ring_descriptor("Z_5/7^3"), InvalidInput);
    EXPECT_THROW(json::parse_ring_descriptor("R"), InvalidInput);
}

TEST(Json, ElementsRoundTrip)
{
    for (const auto &r : sample_rings()) {
        for (int trial = 0; trial < 30; ++trial) {
            Value v = r->from_integer(uniform(-1000, 1000));
            if (r->kind() == RingKind::rationals) {
                v = r->from_rational(mpq_class(uniform(-50, 50), uniform(1, 9)));
            } else if (r->kind() == RingKind::eisenstein_extension) {
                v = r->add(v, r->mul(r->uniformizer(), r->from_integer(uniform(-30, 30))));
            }
            const RingElement a(r, v);
            const Json j = json::encode(a);
            EXPECT_EQ(json::decode_element(j, r), a);
            EXPECT_EQ(json::decode_element(Json::parse(j.dump()), r), a);
        }
    }
}

TEST(Json, ElementFromForeignRingIsRejected)
{
    const auto a = integer(make_padic(5, 6), 7);
    EXPECT_THROW(json::decode_element(json::encode(a), make_padic(5, 5)), ContextMismatch);
}

TEST(Json, SeriesRoundTrip)
{
    for (const auto &r : sample_rings()) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto f = random_unit_series(r, 6);
            const auto F = X(r, 4) + Y(r, 4) + (X(r, 4) * Y(r, 4)).scaled(r->from_integer(uniform(-3, 3)));
            for (const auto &s : {f, F}) {
                const Json j = json::encode(s);
                const auto back = json::decode_series(Json::parse(j.dump()), json::series_ring(j));
                EXPECT_EQ(back, s);
                EXPECT_EQ(j["text"], s.to_string());
            }
        }
    }
}

TEST(Json, SeriesDecodingValidates)
{
    const auto Q = make_rationals();
    Json j = json::encode(X(Q, 3));
    j["terms"][0]["exp"] = {1};
    EXPECT_THROW(json::decode_series(j, Q), InvalidInput);
    j["terms"][0]["exp"] = {4, 0};
    EXPECT_THROW(json::decode_series(j, Q), InvalidInput);
}

TEST(Json, ActionRoundTrip)
{
    const auto Q = make_rationals();
    const auto f = random_unit_series(Q, 5);
    const auto [law, exp] = from_logarithm(f);
    MonoidAction A{law, nullptr, {}};
    for (long m : {2, -3, 5}) {
        const auto s = integer(Q, m);
        A.entries.push_back({std::to_string(m), action_endomorphism_from_logarithm(f, exp, s), std::nullopt, s, std::nullopt});
    }
    const Json j = json::encode(A);
    const auto B = json::decode_action(Json::parse(j.dump()));
    EXPECT_EQ(B.law.series(), A.law.series());
    ASSERT_EQ(B.entries.size(), A.entries.size());
    for (std::size_t i = 0; i < A.entries.size(); ++i) {
        EXPECT_EQ(B.entries[i].label, A.entries[i].label);
        EXPECT_EQ(B.entries[i].series, A.entries[i].series);
        EXPECT_EQ(B.entries[i].scalar, A.entries[i].scalar);
    }
    EXPECT_TRUE(verify_action(B).passed());
}

TEST(Json, BareLawBundle)
{
    const Json j = {{"F", json::encode(X(make_padic(5, 4), 3) + Y(make_padic(5, 4), 3))}};
    const auto A = json::decode_action(j);
    EXPECT_EQ(A.law.ring()->descriptor(), "Z_5/5^4");
    EXPECT_TRUE(A.entries.empty());
    EXPECT_THROW(json::decode_action(Json::object()), InvalidInput);
}

TEST(Json, MonoidDescriptors)
{
    const auto F = json::decode_monoid(Json::parse(R"({"kind": "free", "generators": ["a", "b"]})"));
    EXPECT_EQ(json::monoid_descriptor(F), "free<a,b>");
    const auto T = json::decode_monoid(Json::parse(R"({"kind": "trivial"})"));
    EXPECT_EQ(T->size(), 1u);
    const auto C = json::decode_monoid(
        Json::parse(R"({"kind": "finite", "elements": ["1", "g"], "table": [["1", "g"], ["g", "1"]], "generators": ["g"]})"));
    EXPECT_EQ(C->size(), 2u);
    EXPECT_TRUE(C->is_identity(C->mul(C->generator(0), C->generator(0))));
    const auto P = json::decode_monoid(Json::parse(R"({"kind": "padic", "p": 5, "n": 2, "V": 3})"));
    EXPECT_EQ(P->size(), 61u);
    EXPECT_EQ(json::monoid_descriptor(P), "trunc(Z_5/5^4, n=2, V=3)");
    EXPECT_THROW(json::decode_monoid(Json::parse(R"({"kind": "finite", "elements": ["1"], "table": [["x"]]})")), InvalidInput);
    EXPECT_THROW(json::decode_monoid(Json::parse(R"({"kind": "lattice"})")), InvalidInput);
}

TEST(Json, PresentationEncodingIsByteStable)
{
    const auto a = json::encode(*generate_presentation(free_monoid({"m", "n"}), 3)).dump(2);
    const auto b = json::encode(*generate_presentation(free_monoid({"m", "n"}), 3)).dump(2);
    EXPECT_EQ(a, b);
    const auto j = Json::parse(a);
    EXPECT_TRUE(j.contains("variables"));
    EXPECT_TRUE(j.contains("ideal"));
    for (const auto &rel : j["ideal"]) {
        EXPECT_TRUE(rel.contains("terms"));
        EXPECT_TRUE(rel.contains("text"));
    }
}

TEST(Json, ElementEncodingShape)
{
    EXPECT_EQ(json::encode(integer(make_padic(5, 3), -1)).dump(), R"({"ring":"Z_5/5^3","value":"124","precision":3})");
    EXPECT_EQ(json::encode(RingElement(make_rationals(), make_rationals()->from_rational(mpq_class(-3, 6)))).dump(),
              R"({"ring":"Q","value":"-1/2"})");
    const auto E = make_eisenstein(5, 4, {-5, 0, 1});
    EXPECT_EQ(json::encode(uniformizer(E)).dump(), R"({"ring":"Z_5[pi]/(pi^2 - 5), m^4","value":["0","1"],"precision":4})");
}
