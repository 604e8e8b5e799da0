#include <gtest/gtest.h>

#include "fgl/monoid.hpp"
#include "support.hpp"

using namespace fgl;
using namespace fgl::testing;

TEST(Monoid, FreeMultiplication)
{
    const auto M = free_monoid({"s", "t"});
    const auto s = M->generator("s"), t = M->generator("t");
    const auto st2 = M->mul(s, M->mul(t, t));
    EXPECT_EQ(M->mul(st2, s), M->from_exponents({2, 2}));
    EXPECT_EQ(M->to_string(M->mul(st2, s)), "s^2*t^2");
    EXPECT_EQ(M->mul(M->identity(), st2), st2);
    EXPECT_THROW(M->mul(s, free_monoid({"s", "t"})->generator("s")), ContextMismatch);
}

TEST(Monoid, TruncationHitsBottom)
{
    const auto M = padic_truncation_of(make_padic(5, 4), 2, 3);
    const auto a = M->element(1, 3), b = M->element(2, 7);
    EXPECT_TRUE(M->is_bottom(M->mul(a, b)));
    EXPECT_EQ(M->mul(M->identity(), a), a);
    EXPECT_TRUE(M->is_bottom(M->mul(M->bottom(), M->identity())));
    EXPECT_EQ(M->to_string(M->bottom()), "bottom");
}

TEST(Monoid, TruncationSizes)
{
    EXPECT_EQ(padic_truncation_of(make_padic(5, 3), 1, 2)->size(), 9u);
    EXPECT_EQ(padic_truncation_of(make_eisenstein(5, 4, {-5, 0, 1}), 2, 2)->size(), 41u);
    EXPECT_EQ(padic_truncation_of(make_padic(5, 3), 1, 1)->size(), 5u);
    // (q-1) q^(n-1) V + 1 over a range of parameters.
    for (int n = 1; n <= 3; ++n) {
        for (int V = 1; V <= 3; ++V) {
            std::size_t units = 4;
            for (int i = 1; i < n; ++i) {
                units *= 5;
            }
            EXPECT_EQ(padic_truncation_of(make_padic(5, 4), n, V)->size(), units * V + 1);
            EXPECT_EQ(padic_truncation_of(make_eisenstein(5, 6, {-5, 0, 1}), n, V)->size(), units * V + 1);
        }
    }
    EXPECT_THROW(padic_truncation_of(make_padic(5, 1), 2, 2), InvalidInput);
    EXPECT_THROW(padic_truncation_of(make_rationals(), 1, 1), InvalidInput);
}

TEST(Monoid, TruncationIsAssociativeAndCommutative)
{
    const auto M = padic_truncation_of(make_eisenstein(5, 4, {-5, 0, 1}), 1, 3);
    const auto els = M->elements();
    for (const auto &a : els) {
        for (const auto &b : els) {
            ASSERT_EQ(M->mul(a, b), M->mul(b, a));
            for (const auto &c : els) {
                ASSERT_EQ(M->mul(M->mul(a, b), c), M->mul(a, M->mul(b, c)));
            }
        }
    }
}

TEST(Monoid, UnitGroupExamples)
{
    const auto z25 = unit_group_structure(*padic_truncation_of(make_padic(5, 3), 2, 1));
    EXPECT_EQ(z25.invariant_factors, (std::vector<std::uint64_t>{20}));
    const auto e2 = unit_group_structure(*padic_truncation_of(make_eisenstein(5, 4, {-5, 0, 1}), 2, 1));
    EXPECT_EQ(e2.invariant_factors, (std::vector<std::uint64_t>{20}));
    const auto z5 = unit_group_structure(*padic_truncation_of(make_padic(5, 3), 1, 1));
    EXPECT_EQ(z5.invariant_factors, (std::vector<std::uint64_t>{4}));

    // Independent check of the generator: multiplicative order of 2 modulo 25.
    unsigned order = 1;
    for (unsigned x = 2; x != 1; x = x * 2 % 25) {
        ++order;
    }
    EXPECT_EQ(order, 20u);
    EXPECT_THROW(unit_group_structure(*free_monoid({"a"})), UnsupportedOperation);
}

TEST(Monoid, UnitGroupFactorsAreConsistent)
{
    const std::vector<Ring> rings{make_padic(5, 4), make_padic(3, 5), make_padic(2, 6), make_eisenstein(5, 6, {-5, 0, 1}),
                                  make_eisenstein(3, 6, {3, 3, 1})};
    for (const auto &R : rings) {
        for (int n = 1; n <= 4 && n <= R->precision(); ++n) {
            const auto M = padic_truncation_of(R, n, 1);
            const auto s = unit_group_structure(*M);
            std::uint64_t product = 1;
            for (std::size_t i = 0; i < s.invariant_factors.size(); ++i) {
                product *= s.invariant_factors[i];
                EXPECT_EQ(M->unit_order(s.generators[i]), s.invariant_factors[i]);
                if (i + 1 < s.invariant_factors.size()) {
                    EXPECT_EQ(s.invariant_factors[i + 1] % s.invariant_factors[i], 0u);
                }
            }
            EXPECT_EQ(product, M->unit_count()) << R->descriptor() << " n=" << n;
            EXPECT_EQ(s.order, M->unit_count());

            // The generators span the whole group.
            std::set<std::size_t> span{M->one_unit()};
            for (const auto g : s.generators) {
                std::set<std::size_t> next;
                for (const auto x : span) {
                    std::size_t y = x;
                    for (std::uint64_t k = 0; k < M->unit_order(g); ++k) {
                        next.insert(y);
                        y = M->unit_mul(y, g);
                    }
                }
                span = std::move(next);
            }
            EXPECT_EQ(span.size(), M->unit_count());
        }
    }
}

TEST(Monoid, ClassificationMatchesRingValuation)
{
    const auto K = make_eisenstein(5, 8, {-10, 0, 1});
    const auto M = padic_truncation_of(K, 3, 4);
    for (int i = 0; i < 300; ++i) {
        const auto a = RingElement(K, K->from_coordinates({uniform(-100000, 100000), uniform(-100000, 100000)}));
        const auto v = valuation(a);
        const auto c = M->classify(a);
        if (!v) {
            EXPECT_FALSE(c.has_value());
            continue;
        }
        ASSERT_TRUE(c.has_value());
        if (*v >= 4) {
            EXPECT_TRUE(M->is_bottom(*c));
            continue;
        }
        EXPECT_EQ(M->valuation_of(*c), *v);
        // Unit part: a / pi^v reduced to O/m^3 matches the unit stored for the class.
        const auto u = *try_divide(a, pow(uniformizer(K), static_cast<unsigned>(*v)));
        EXPECT_EQ(change_precision(u, M->unit_ring()), RingElement(M->unit_ring(), M->unit_value(M->unit_of(*c))));
        // The canonical lift lands in the same class.
        EXPECT_EQ(M->classify(M->lift(*c, K)), c);
    }
    EXPECT_THROW(M->classify(RingElement::integer(make_padic(5, 8), 3)), ContextMismatch);
}

TEST(Monoid, IsomorphismExamples)
{
    const auto R = make_padic(5, 3);
    const auto A = padic_truncation_of(R, 1, 2);
    const auto id = build_monoid_isomorphism(A, A);
    for (const auto &a : A->elements()) {
        EXPECT_EQ(id(a), a);
    }

    const auto M1 = padic_truncation_of(make_eisenstein(5, 4, {-5, 0, 1}), 2, 2);
    const auto M2 = padic_truncation_of(make_eisenstein(5, 4, {-10, 0, 1}), 2, 2);
    const auto iso = build_monoid_isomorphism(M1, M2);
    EXPECT_EQ(M1->size(), 41u);
    EXPECT_TRUE(iso.is_bijective());
    EXPECT_FALSE(iso.verify().has_value());
    EXPECT_EQ(iso(M1->element(1, M1->one_unit())), M2->element(1, M2->one_unit()));
    EXPECT_TRUE(M2->is_bottom(iso(M1->bottom())));

    const auto M3 = padic_truncation_of(make_eisenstein(5, 4, {-10, 0, 1}), 2, 3);
    EXPECT_THROW(build_monoid_isomorphism(M1, M3), StructureMismatch);
    EXPECT_THROW(build_monoid_isomorphism(A, padic_truncation_of(make_padic(5, 3), 2, 2)), StructureMismatch);
    EXPECT_THROW(build_monoid_isomorphism(M1, M2, {4}), StructureMismatch);
}

TEST(Monoid, MorphismsAreMultiplicative)
{
    const auto M1 = padic_truncation_of(make_eisenstein(5, 6, {-5, 0, 1}), 2, 3);
    const auto M2 = padic_truncation_of(make_eisenstein(5, 6, {-10, 0, 1}), 2, 3);
    for (const std::uint64_t twist : {1, 3, 7, 9}) {
        const auto iso = build_monoid_isomorphism(M1, M2, {twist});
        const auto inv = iso.inverse();
        for (const auto &a : M1->elements()) {
            ASSERT_EQ(inv(iso(a)), a);
            for (const auto &b : M1->elements()) {
                ASSERT_EQ(iso(M1->mul(a, b)), M2->mul(iso(a), iso(b)));
            }
        }
    }
    // Free source: generator images determine a multiplicative map.
    const auto F = free_monoid({"u", "v"});
    const auto phi = MonoidMorphism::from_generators(F, M1, {M1->element(1, M1->one_unit()), M1->element(0, 5)});
    for (int i = 0; i < 50; ++i) {
        const auto a = F->from_exponents({static_cast<std::uint32_t>(uniform(0, 4)), static_cast<std::uint32_t>(uniform(0, 4))});
        const auto b = F->from_exponents({static_cast<std::uint32_t>(uniform(0, 4)), static_cast<std::uint32_t>(uniform(0, 4))});
        ASSERT_EQ(phi(F->mul(a, b)), M1->mul(phi(a), phi(b)));
    }
    EXPECT_EQ(phi(F->identity()), M1->identity());
}

TEST(Monoid, FiniteMonoidValidation)
{
    const auto C = cyclic_group_monoid("g", 3);
    EXPECT_EQ(C->size(), 3u);
    const auto g = C->generator("g");
    EXPECT_EQ(C->mul(g, C->mul(g, g)), C->identity());
    const auto tr = truncated_cyclic_monoid("z", 3);
    const auto z = tr->generator("z");
    EXPECT_EQ(tr->mul(tr->mul(z, z), z), tr->mul(z, z));

    // Not associative: a*a = b, a*b = a, b*b = b ... with identity e.
    EXPECT_THROW(finite_monoid({"e", "a", "b"}, {0, 1, 2, 1, 2, 1, 2, 1, 1}, {"a"}), InvalidInput);
    // Not commutative.
    EXPECT_THROW(finite_monoid({"e", "a", "b"}, {0, 1, 2, 1, 1, 1, 2, 2, 2}, {"a", "b"}), InvalidInput);
    // No identity.
    EXPECT_THROW(finite_monoid({"a", "b"}, {0, 0, 0, 0}, {"a"}), InvalidInput);
    EXPECT_THROW(finite_monoid({"e"}, {0, 0}, {}), InvalidInput);
}
