#pragma once

// Lubin-Tate formal groups over Z_p, totally ramified extensions, or their
// exact fraction fields, with the endomorphism action of O_K.
//
// p-adic computations run at a working precision K = k + N + 1 (each
// inductive step divides by the uniformizer once) and are reported in the
// output context of precision k.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fgl.hpp"
#include "parse.hpp"

namespace fgl
{

class LubinTateError : public Error
{
public:
    using Error::Error;
};

// v_pi of a value in Z_p, O_K, Q (pi = p) or Q(pi) = Q[pi]/(E).
inline std::optional<int> pi_valuation(const Ring &r, const Value &v, std::uint64_t p, int e)
{
    switch (r->kind()) {
    case RingKind::padic_integers:
    case RingKind::eisenstein_extension:
        return r->valuation(v);
    case RingKind::integers:
        return std::get<mpz_class>(v.s) == 0 ? std::nullopt
                                             : std::optional<int>(e * detail::mpz_padic_valuation(std::get<mpz_class>(v.s), p));
    case RingKind::rationals: {
        const auto w = padic_valuation(std::get<mpq_class>(v.s), p);
        return w ? std::optional<int>(e * *w) : std::nullopt;
    }
    case RingKind::polynomial_quotient: {
        std::optional<int> best;
        for (const auto &[m, c] : r->terms_of(v)) {
            const auto w = padic_valuation(std::get<mpq_class>(c), p);
            const int val = e * *w + (m.empty() ? 0 : m[0]);
            if (!best || val < *best) {
                best = val;
            }
        }
        return best;
    }
    }
    return std::nullopt;
}

struct LubinTateDatum {
    Ring ring;
    Ring output;
    RingElement pi;
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    int e = 1;
    int N = 1;
    TruncatedSeries f;
    // f up to degree max(N, q), as validated.
    TruncatedSeries f_full;

    std::optional<int> valuation(const Value &v) const { return pi_valuation(ring, v, p, e); }

    RingElement to_output(const RingElement &a) const
    {
        return ring->is_padic() ? change_precision(a, output) : a;
    }
    TruncatedSeries to_output(const TruncatedSeries &s) const
    {
        if (!ring->is_padic()) {
            return s;
        }
        return s.map_coefficients(output, [&](const Value &v) { return change_precision(RingElement{ring, v}, output).value(); });
    }
    // Canonical lift into the working ring.
    RingElement to_working(const RingElement &a) const
    {
        if (same_ring(a.ring(), ring)) {
            return a;
        }
        if (ring->is_padic()) {
            return change_precision(a, ring);
        }
        throw ContextMismatch("element of " + a.ring()->descriptor() + " is not in " + ring->descriptor());
    }
};

using SeriesBuilder = std::function<TruncatedSeries(const ParseContext &)>;

namespace detail
{
inline void validate_lubin_tate(const LubinTateDatum &d, const TruncatedSeries &full)
{
    if (!full.is_zero_at(0)) {
        throw LubinTateError("Lubin-Tate series must have zero constant term");
    }
    if (!d.ring->equal(full.coeff_at(1), d.pi.value())) {
        throw LubinTateError("linear coefficient " + d.ring->to_string(full.coeff_at(1)) + " is not the uniformizer");
    }
    for (std::size_t n = 2; n < full.size(); ++n) {
        const auto v = d.valuation(full.coeff_at(n));
        if (n == d.q) {
            if (!v || *v != 0) {
                throw LubinTateError("coefficient of T^" + std::to_string(n) + " must be a unit (f = T^q mod pi)");
            }
        } else if (v && *v == 0) {
            throw LubinTateError("coefficient of T^" + std::to_string(n) + " must be divisible by the uniformizer");
        }
    }
}

} // namespace detail

// Datum over `out` (Z_p/p^k, O_K/m^k, Q or Q(pi)). For Q the uniformizer is
// p; for Q(pi) it is the generator of the quotient.
inline LubinTateDatum lubin_tate_datum(const Ring &out, int N, const SeriesBuilder &build_f, std::uint64_t p = 0, int e = 1)
{
    if (N < 1) {
        throw InvalidInput("truncation degree must be at least 1");
    }
    LubinTateDatum d;
    d.output = out;
    d.N = N;
    switch (out->kind()) {
    case RingKind::padic_integers:
    case RingKind::eisenstein_extension:
        d.ring = with_precision(out, out->precision() + N + 1);
        d.p = out->p();
        d.e = out->degree();
        d.pi = uniformizer(d.ring);
        break;
    case RingKind::rationals:
        if (!detail::is_prime(p)) {
            throw InvalidInput("Lubin-Tate data over Q need a prime p");
        }
        d.ring = out;
        d.p = p;
        d.e = 1;
        d.pi = RingElement::integer(out, detail::u64_to_mpz(p));
        break;
    case RingKind::polynomial_quotient:
        if (!detail::is_prime(p) || out->variables().size() != 1 || out->base()->kind() != RingKind::rationals) {
            throw InvalidInput("Lubin-Tate data over a number field need Q[pi]/(E) and a prime p");
        }
        d.ring = out;
        d.p = p;
        d.e = e;
        d.pi = RingElement(out, out->variable(out->variables()[0]));
        break;
    default:
        throw InvalidInput("Lubin-Tate data need a p-adic ring or its fraction field");
    }
    d.q = d.p;
    const int full_degree = std::max<int>(N, static_cast<int>(d.q));
    const TruncatedSeries full = build_f(ParseContext{d.ring, {"T"}, full_degree, d.pi, {}});
    detail::validate_lubin_tate(d, full);
    d.f = full.truncated(N);
    d.f_full = full;
    return d;
}

inline LubinTateDatum lubin_tate_datum(const Ring &out, int N, const std::string &series, std::uint64_t p = 0, int e = 1)
{
    return lubin_tate_datum(out, N, [&](const ParseContext &ctx) { return parse_series(ctx, series); }, p, e);
}

// pi*T + T^q.
inline LubinTateDatum standard_preset(const Ring &out, int N, std::uint64_t p = 0, int e = 1)
{
    return lubin_tate_datum(out, N, "pi*T + T^" + std::to_string(out->is_padic() ? out->p() : p), p, e);
}

// (1+T)^p - 1 over Z_p (or Q with pi = p).
inline LubinTateDatum multiplicative_preset(const Ring &out, int N, std::uint64_t p = 0)
{
    if (out->kind() != RingKind::padic_integers && out->kind() != RingKind::rationals) {
        throw InvalidInput("the multiplicative preset needs Z_p or Q");
    }
    const std::uint64_t pp = out->is_padic() ? out->p() : p;
    return lubin_tate_datum(out, N, "(1+T)^" + std::to_string(pp) + " - 1", p);
}

enum class SolveOrder { by_degree, by_monomial_reverse };

namespace detail
{
inline Value divide_by_correction(const LubinTateDatum &d, const Value &num, unsigned n)
{
    const Ring &r = d.ring;
    const Value denom = r->sub(d.pi.value(), r->pow(d.pi.value(), n));
    auto q = r->try_divide(num, denom);
    if (!q) {
        throw LubinTateError("degree-" + std::to_string(n) + " correction " + r->to_string(num) +
                             " is not divisible by pi - pi^" + std::to_string(n) + " (invalid datum or precision)");
    }
    return *q;
}
} // namespace detail

// Unique F = x + y mod degree 2 with f(F(x,y)) = F(f(x), f(y)), solved degree
// by degree in the working ring.
inline FormalGroupLaw build_fgl_working(const LubinTateDatum &d, SolveOrder order = SolveOrder::by_degree)
{
    const Ring &r = d.ring;
    const int N = d.N;
    const auto x = detail::var(r, detail::xy(), N, "x");
    const auto y = detail::var(r, detail::xy(), N, "y");
    TruncatedSeries G = x + y;
    const TruncatedSeries fx = d.f.substitute({{"T", x}});
    const TruncatedSeries fy = d.f.substitute({{"T", y}});
    const auto &layout = G.layout();
    for (int n = 2; n <= N; ++n) {
        const std::size_t lo = layout.degree_start(static_cast<unsigned>(n));
        const std::size_t hi = layout.degree_start(static_cast<unsigned>(n + 1));
        if (order == SolveOrder::by_degree) {
            const TruncatedSeries lhs = apply_law(G, fx, fy);
            const TruncatedSeries rhs = d.f.substitute({{"T", G}});
            for (std::size_t i = lo; i < hi; ++i) {
                G.set_at(i, detail::divide_by_correction(d, r->sub(lhs.coeff_at(i), rhs.coeff_at(i)), static_cast<unsigned>(n)));
            }
        } else {
            for (std::size_t i = hi; i-- > lo;) {
                const TruncatedSeries lhs = apply_law(G, fx, fy);
                const TruncatedSeries rhs = d.f.substitute({{"T", G}});
                G.set_at(i, detail::divide_by_correction(d, r->sub(lhs.coeff_at(i), rhs.coeff_at(i)), static_cast<unsigned>(n)));
            }
        }
    }
    return FormalGroupLaw(G);
}

struct LubinTateLaw {
    FormalGroupLaw working;
    FormalGroupLaw law;
    std::optional<Monomial> defining_identity_defect;
};

// f(F) = F(f, f) compared in the output context.
inline std::optional<Monomial> lubin_tate_defect(const LubinTateDatum &d, const FormalGroupLaw &F)
{
    const Ring &r = F.ring();
    const auto x = detail::var(r, detail::xy(), d.N, "x");
    const auto y = detail::var(r, detail::xy(), d.N, "y");
    const TruncatedSeries f = d.to_output(d.f);
    return f.substitute({{"T", F.series()}}).first_difference(F(f.substitute({{"T", x}}), f.substitute({{"T", y}})));
}

inline LubinTateLaw build_fgl(const LubinTateDatum &d, SolveOrder order = SolveOrder::by_degree)
{
    LubinTateLaw out;
    out.working = build_fgl_working(d, order);
    out.law = FormalGroupLaw(d.to_output(out.working.series()));
    out.defining_identity_defect = lubin_tate_defect(d, out.law);
    return out;
}

// [a]_f in the working ring: a*T mod degree 2 and [a] o f = f o [a].
inline TruncatedSeries build_endomorphism_working(const LubinTateDatum &d, const RingElement &a_in)
{
    const RingElement a = d.to_working(a_in);
    const Ring &r = d.ring;
    const auto x = detail::var(r, detail::xonly(), d.N, "x");
    const TruncatedSeries fx = d.f.renamed({"x"});
    TruncatedSeries B = x.scaled(a.value());
    for (int n = 2; n <= d.N; ++n) {
        const TruncatedSeries lhs = B.compose(fx);
        const TruncatedSeries rhs = fx.compose(B);
        B.set_at(static_cast<std::size_t>(n),
                 detail::divide_by_correction(d, r->sub(lhs.coeff_at(static_cast<std::size_t>(n)), rhs.coeff_at(static_cast<std::size_t>(n))),
                                              static_cast<unsigned>(n)));
    }
    return B;
}

// [a]_f reported in the output context.
inline TruncatedSeries build_endomorphism(const LubinTateDatum &d, const RingElement &a)
{
    return d.to_output(build_endomorphism_working(d, a));
}

// Action of a list of nonzero ring elements.
inline MonoidAction build_action(const LubinTateDatum &d, const FormalGroupLaw &F, const std::vector<RingElement> &elements)
{
    MonoidAction A;
    A.law = F;
    for (const auto &a : elements) {
        const RingElement w = d.to_working(a);
        const auto v = d.valuation(w.value());
        if (!v || (d.ring->is_padic() && *v >= d.output->precision())) {
            throw InvalidInput("element " + a.to_string() + " is zero at the output precision");
        }
        const RingElement o = d.to_output(w);
        A.entries.push_back({o.to_string(), build_endomorphism(d, w), std::nullopt, o, w});
    }
    return A;
}

// Action of a p-adic truncation monoid through canonical lifts of every
// non-absorbing element.
inline MonoidAction build_action(const LubinTateDatum &d, const FormalGroupLaw &F, const Monoid &M)
{
    if (M->kind() != MonoidKind::padic_truncation) {
        throw InvalidInput("Lubin-Tate actions are built for p-adic truncation monoids");
    }
    MonoidAction A;
    A.law = F;
    A.monoid = M;
    for (const auto &m : M->elements()) {
        if (M->is_bottom(m)) {
            continue;
        }
        const RingElement lift = M->lift(m, d.ring);
        A.entries.push_back({M->element_label(m), build_endomorphism(d, lift), m, d.to_output(lift), lift});
    }
    return A;
}

// Action of a free monoid whose generators act by given ring elements.
inline MonoidAction build_free_action(const LubinTateDatum &d, const FormalGroupLaw &F, const Monoid &M,
                                      const std::vector<RingElement> &generator_images)
{
    if (M->kind() != MonoidKind::free_commutative || generator_images.size() != M->generator_names().size()) {
        throw InvalidInput("free action needs one ring element per generator");
    }
    MonoidAction A;
    A.law = F;
    A.monoid = M;
    for (std::size_t i = 0; i < generator_images.size(); ++i) {
        const RingElement w = d.to_working(generator_images[i]);
        A.entries.push_back({M->generator_names()[i], build_endomorphism(d, w), M->generator(i), d.to_output(w), w});
    }
    return A;
}

struct CoefficientIntegrality {
    Monomial monomial;
    std::string value;
    std::optional<int> valuation;
    bool integral = true;
};

struct LubinTateComparison {
    TruncatedSeries h_exact;
    std::vector<CoefficientIntegrality> integrality;
    bool integral = true;
    std::optional<Monomial> exact_defect;
    std::optional<TruncatedSeries> h;
    std::optional<Monomial> output_defect;
};

namespace detail
{
// Exact field holding the canonical lifts of a p-adic datum: Q for Z_p,
// Q[pi]/(E) for extensions.
inline Ring exact_field(const LubinTateDatum &d)
{
    if (!d.ring->is_padic()) {
        return d.ring;
    }
    if (d.ring->kind() == RingKind::padic_integers) {
        return make_rationals();
    }
    PolyTerms E;
    const auto &poly = d.ring->eisenstein_polynomial();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        if (poly[i] != 0) {
            E.emplace(Monomial{static_cast<std::uint16_t>(i)}, mpq_class(poly[i]));
        }
    }
    return make_polynomial_quotient(make_rationals(), {"pi"}, {E});
}

inline Value lift_exact(const Ring &field, const Ring &from, const Value &v)
{
    if (!from->is_padic()) {
        return v;
    }
    const auto coords = from->coordinates(v);
    if (field->kind() == RingKind::rationals) {
        return field->from_integer(coords[0]);
    }
    PolyTerms t;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] != 0) {
            t.emplace(Monomial{static_cast<std::uint16_t>(i)}, mpq_class(coords[i]));
        }
    }
    return field->from_terms(std::move(t));
}

inline LubinTateDatum exact_lift(const LubinTateDatum &d)
{
    const Ring field = exact_field(d);
    const TruncatedSeries f = d.f_full.map_coefficients(field, [&](const Value &v) { return lift_exact(field, d.ring, v); });
    return lubin_tate_datum(
        field, d.N,
        [&](const ParseContext &ctx) {
            if (ctx.degree != f.degree()) {
                return f.truncated(ctx.degree);
            }
            return f;
        },
        d.p, d.e);
}

// Image in O/m^k of a pi-integral element of Q or Q[pi]/(E).
inline Value reduce_to_padic(const Ring &out, const Ring &field, const Value &v)
{
    if (field->kind() == RingKind::rationals) {
        return out->from_rational(std::get<mpq_class>(v.s));
    }
    Value acc = out->zero();
    const Value pi = out->uniformizer();
    for (const auto &[m, c] : field->terms_of(v)) {
        acc = out->add(acc, out->mul(out->from_rational(std::get<mpq_class>(c)), out->pow(pi, m[0])));
    }
    return acc;
}
} // namespace detail

// Isomorphism between two Lubin-Tate laws for the same uniformizer, computed
// as exp_2 o log_1 over the exact fraction field from canonical lifts, with a
// per-coefficient integrality report. When integral, h is reduced to the
// output context and the intertwining identity is re-checked there.
inline LubinTateComparison compare_lubin_tate(const LubinTateDatum &d1, const LubinTateDatum &d2)
{
    if (!same_ring(d1.ring, d2.ring) || d1.N != d2.N) {
        throw ContextMismatch("Lubin-Tate comparison needs the same ring and degree");
    }
    const LubinTateDatum e1 = detail::exact_lift(d1);
    const LubinTateDatum e2 = detail::exact_lift(d2);
    const FormalGroupLaw F1 = build_fgl(e1).law;
    const FormalGroupLaw F2 = build_fgl(e2).law;
    const LogIsomorphism iso = isomorphism_via_logs(F1, F2);
    LubinTateComparison out{iso.h, {}, true, iso.intertwining_defect, std::nullopt, std::nullopt};
    for (std::size_t i = 1; i < iso.h.size(); ++i) {
        const Value &c = iso.h.coeff_at(i);
        const auto v = pi_valuation(e1.ring, c, e1.p, e1.e);
        CoefficientIntegrality ci{iso.h.layout().monomial(i), e1.ring->to_string(c), v, !v || *v >= 0};
        out.integral = out.integral && ci.integral;
        out.integrality.push_back(std::move(ci));
    }
    if (out.integral && d1.ring->is_padic()) {
        const Ring &o = d1.output;
        TruncatedSeries h(o, {"T"}, d1.N);
        for (std::size_t i = 1; i < iso.h.size(); ++i) {
            h.set_at(i, detail::reduce_to_padic(o, e1.ring, iso.h.coeff_at(i)));
        }
        const FormalGroupLaw G1 = build_fgl(d1).law;
        const FormalGroupLaw G2 = build_fgl(d2).law;
        const auto x = detail::var(o, detail::xy(), d1.N, "x");
        const auto y = detail::var(o, detail::xy(), d1.N, "y");
        out.output_defect = h.substitute({{"T", G1.series()}}).first_difference(G2(h.substitute({{"T", x}}), h.substitute({{"T", y}})));
        out.h = h;
    } else if (out.integral) {
        out.h = iso.h;
        out.output_defect = iso.intertwining_defect;
    }
    return out;
}

} // namespace fgl
