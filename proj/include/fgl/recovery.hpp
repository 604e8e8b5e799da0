#pragma once

// Ring structure on M u {0} recovered from a strict M-formal group:
// [m1 + m2](x) = F([m1](x), [m2](x)), and its transport along monoid
// isomorphisms.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lubin_tate.hpp"

namespace fgl
{

class NoMatch : public Error
{
public:
    using Error::Error;
};

// Generic identification: the candidate is the entry whose linear
// coefficient equals that of S = F([a],[b]); its series must equal S.
struct RecoveredSum {
    bool zero = false;
    const ActionEntry *match = nullptr;
    TruncatedSeries series;
};

// `a` or `b` null means the adjoined zero.
inline RecoveredSum recover_sum(const MonoidAction &A, const ActionEntry *a, const ActionEntry *b)
{
    if (!a || !b) {
        const ActionEntry *other = a ? a : b;
        return {other == nullptr, other, other ? other->series : TruncatedSeries(A.law.ring(), detail::xonly(), A.law.degree())};
    }
    RecoveredSum out;
    out.series = A.law(a->series, b->series);
    if (out.series.is_zero()) {
        out.zero = true;
        return out;
    }
    const Ring &r = A.law.ring();
    const Value c = linear_coefficient(out.series);
    for (const auto &e : A.entries) {
        if (r->equal(linear_coefficient(e.series), c)) {
            if (auto bad = e.series.first_difference(out.series)) {
                throw NoMatch("F([" + a->label + "],[" + b->label + "]) agrees with [" + e.label + "] in the linear term but not at " +
                              monomial_string(detail::xonly(), *bad));
            }
            out.match = &e;
            return out;
        }
    }
    throw NoMatch("no assigned endomorphism matches F([" + a->label + "],[" + b->label + "]) (linear coefficient " + r->to_string(c) +
                  ")");
}

inline const ActionEntry &find_entry(const MonoidAction &A, const std::string &label)
{
    for (const auto &e : A.entries) {
        if (e.label == label) {
            return e;
        }
    }
    throw InvalidInput("no action entry labelled " + label);
}

enum SumFlag : std::uint8_t {
    flag_none = 0,
    // The sum has valuation >= V and is recorded as the absorbing element.
    flag_escaped_cap = 1,
    // Equal valuations cancelled; the class of the sum depends on the lifts.
    flag_cancellation = 2,
    // An operand is the absorbing element, whose sum is undefined.
    flag_bottom_operand = 4,
};

// Addition and multiplication tables on M u {0}; index size() of the carrier
// is the adjoined zero.
struct RecoveredRing {
    Monoid carrier;
    std::vector<std::uint32_t> add;
    std::vector<std::uint8_t> flags;

    std::size_t size() const { return carrier->size() + 1; }
    std::size_t zero() const { return carrier->size(); }
    std::size_t sum(std::size_t a, std::size_t b) const { return add[a * size() + b]; }
    std::uint8_t flag(std::size_t a, std::size_t b) const { return flags[a * size() + b]; }
    bool well_defined(std::size_t a, std::size_t b) const { return flag(a, b) == flag_none; }

    std::size_t mul(std::size_t a, std::size_t b) const
    {
        if (a == zero() || b == zero()) {
            return zero();
        }
        return carrier->mul(carrier->element_at(a), carrier->element_at(b)).index;
    }

    std::string label(std::size_t i) const { return i == zero() ? "0" : carrier->element_label(carrier->element_at(i)); }

    std::size_t flagged_count() const
    {
        std::size_t n = 0;
        for (const auto f : flags) {
            n += f != flag_none;
        }
        return n;
    }
};

struct RingAxiomReport {
    std::size_t pairs = 0;
    std::size_t triples = 0;
    std::size_t commutativity_failures = 0;
    std::size_t neutral_failures = 0;
    std::size_t associativity_failures = 0;
    std::size_t distributivity_failures = 0;
    std::string first_failure;

    bool passed() const
    {
        return commutativity_failures + neutral_failures + associativity_failures + distributivity_failures == 0;
    }
};

// Exhaustive axiom check restricted to well-defined (unflagged) entries.
inline RingAxiomReport verify_ring_axioms(const RecoveredRing &R)
{
    RingAxiomReport rep;
    const std::size_t n = R.size();
    const std::size_t z = R.zero();
    auto fail = [&](std::size_t &counter, const std::string &what) {
        if (counter++ == 0 && rep.first_failure.empty()) {
            rep.first_failure = what;
        }
    };
    for (std::size_t a = 0; a < n; ++a) {
        if (R.sum(a, z) != a || R.sum(z, a) != a) {
            fail(rep.neutral_failures, "0 is not neutral for " + R.label(a));
        }
        for (std::size_t b = 0; b < n; ++b) {
            ++rep.pairs;
            if (R.sum(a, b) != R.sum(b, a) || R.flag(a, b) != R.flag(b, a)) {
                fail(rep.commutativity_failures, R.label(a) + " + " + R.label(b));
            }
            if (!R.well_defined(a, b)) {
                continue;
            }
            const std::size_t ab = R.sum(a, b);
            for (std::size_t c = 0; c < n; ++c) {
                const std::size_t bc = R.sum(b, c);
                if (R.well_defined(b, c) && R.well_defined(ab, c) && R.well_defined(a, bc)) {
                    ++rep.triples;
                    if (R.sum(ab, c) != R.sum(a, bc)) {
                        fail(rep.associativity_failures, "(" + R.label(a) + " + " + R.label(b) + ") + " + R.label(c));
                    }
                }
                // c * (a + b) = c*a + c*b where every term stays below the cap.
                const std::size_t ca = R.mul(c, a), cb = R.mul(c, b), cab = R.mul(c, ab);
                if (R.carrier->kind() == MonoidKind::padic_truncation) {
                    auto bot = [&](std::size_t i) { return i != z && R.carrier->is_bottom(R.carrier->element_at(i)); };
                    if (bot(ca) || bot(cb) || bot(cab)) {
                        continue;
                    }
                }
                if (R.well_defined(ca, cb)) {
                    ++rep.triples;
                    if (R.sum(ca, cb) != cab) {
                        fail(rep.distributivity_failures, R.label(c) + " * (" + R.label(a) + " + " + R.label(b) + ")");
                    }
                }
            }
        }
    }
    return rep;
}

struct AdditionTable {
    RecoveredRing ring;
    // Unflagged entries whose recovered class differs from the class of the
    // native sum of the canonical lifts.
    std::size_t native_mismatches = 0;
    // Sums that fail to commute with f (not an endomorphism of the law).
    std::size_t confirmation_failures = 0;
    std::string first_problem;
    std::optional<RingAxiomReport> axioms;

    bool passed() const
    {
        return native_mismatches == 0 && confirmation_failures == 0 && (!axioms || axioms->passed());
    }
};

namespace detail
{
// Evaluates S = F(g_a, g_b) for many pairs with per-element precomputation:
// S = sum_i g_a^i * P_i(g_b), P_i(g) = sum_j c_ij g^j.
class SumEngine
{
public:
    SumEngine(const FormalGroupLaw &F, const std::vector<const TruncatedSeries *> &gs) : N_(F.degree())
    {
        const auto &law = F.series();
        for (const auto *g : gs) {
            std::vector<TruncatedSeries> pw{TruncatedSeries::constant(g->ring(), xonly(), N_, g->ring()->one())};
            for (int i = 1; i <= N_; ++i) {
                pw.push_back(pw.back() * *g);
            }
            std::vector<TruncatedSeries> P;
            for (int i = 0; i <= N_; ++i) {
                TruncatedSeries acc(g->ring(), xonly(), N_);
                for (int j = 0; i + j <= N_; ++j) {
                    Monomial m{static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j)};
                    const Value c = law.coeff(m);
                    if (!g->ring()->is_zero(c)) {
                        acc = acc + pw[j].scaled(c);
                    }
                }
                P.push_back(std::move(acc));
            }
            powers_.push_back(std::move(pw));
            inner_.push_back(std::move(P));
        }
    }

    TruncatedSeries sum(std::size_t a, std::size_t b) const
    {
        TruncatedSeries s = inner_[b][0];
        for (int i = 1; i <= N_; ++i) {
            if (!inner_[b][i].is_zero()) {
                s = s + powers_[a][i].mul_truncated(inner_[b][i], static_cast<unsigned>(N_));
            }
        }
        return s;
    }

private:
    int N_;
    std::vector<std::vector<TruncatedSeries>> powers_;
    std::vector<std::vector<TruncatedSeries>> inner_;
};

inline bool commutes_with(const TruncatedSeries &S, const TruncatedSeries &f, const std::vector<TruncatedSeries> &f_powers)
{
    TruncatedSeries s_of_f(S.ring(), S.variables(), S.degree());
    for (int k = 1; k <= S.degree(); ++k) {
        const Value &c = S.coeff_at(static_cast<std::size_t>(k));
        if (!S.ring()->is_zero(c)) {
            s_of_f = s_of_f + f_powers[k].scaled(c);
        }
    }
    return s_of_f == f.compose(S);
}
} // namespace detail

struct AdditionTableOptions {
    bool verify_axioms = true;
};

// Full addition table of a Lubin-Tate action on a p-adic truncation carrier.
// The class of F([a],[b]) is read from its linear coefficient a + b, and the
// series itself is confirmed to commute with f, which characterizes [a+b].
inline AdditionTable build_addition_table(const LubinTateDatum &d, const MonoidAction &A, AdditionTableOptions opts = {})
{
    const Monoid &M = A.monoid;
    if (!M || M->kind() != MonoidKind::padic_truncation) {
        throw InvalidInput("addition tables need an action of a p-adic truncation monoid");
    }
    if (d.output->precision() < M->unit_level() + M->valuation_cap() - 1) {
        throw InvalidInput("output precision must be at least n + V - 1 to classify sums");
    }
    const std::size_t msize = M->size();
    const std::size_t bottom = M->bottom().index;
    std::vector<const TruncatedSeries *> series(msize, nullptr);
    std::vector<RingElement> lifts(msize);
    for (const auto &e : A.entries) {
        series[e.element->index] = &e.series;
        lifts[e.element->index] = *e.scalar;
    }
    std::vector<const TruncatedSeries *> present;
    std::vector<std::size_t> slot(msize, msize);
    for (std::size_t i = 0; i < msize; ++i) {
        if (i == bottom) {
            continue;
        }
        if (!series[i]) {
            throw InvalidInput("action lacks an endomorphism for " + M->element_label(M->element_at(i)));
        }
        slot[i] = present.size();
        present.push_back(series[i]);
    }
    const detail::SumEngine engine(A.law, present);
    const TruncatedSeries f = d.to_output(d.f).renamed(detail::xonly());
    std::vector<TruncatedSeries> f_powers{TruncatedSeries::constant(f.ring(), detail::xonly(), f.degree(), f.ring()->one())};
    for (int k = 1; k <= f.degree(); ++k) {
        f_powers.push_back(f_powers.back() * f);
    }

    AdditionTable out;
    RecoveredRing &R = out.ring;
    R.carrier = M;
    const std::size_t n = R.size();
    const std::size_t zero = R.zero();
    R.add.assign(n * n, 0);
    R.flags.assign(n * n, flag_none);
    const Ring &o = d.output;
    const int V = M->valuation_cap();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            std::size_t result = 0;
            std::uint8_t fl = flag_none;
            if (a == zero || b == zero) {
                result = a == zero ? b : a;
            } else if (a == bottom || b == bottom) {
                result = bottom;
                fl = flag_bottom_operand;
            } else {
                const TruncatedSeries S = engine.sum(slot[a], slot[b]);
                const RingElement c{o, linear_coefficient(S)};
                const RingElement native = lifts[a] + lifts[b];
                if (c != native || !detail::commutes_with(S, f, f_powers)) {
                    ++out.confirmation_failures;
                    if (out.first_problem.empty()) {
                        out.first_problem = "F([" + R.label(a) + "],[" + R.label(b) + "]) is not an endomorphism commuting with f";
                    }
                }
                const auto vc = o->valuation(c.value());
                const int va = M->valuation_of(M->element_at(a));
                const int vb = M->valuation_of(M->element_at(b));
                if (!vc || *vc > std::min(va, vb)) {
                    fl |= flag_cancellation;
                }
                if (!vc || *vc >= V) {
                    fl |= flag_escaped_cap;
                    result = S.is_zero() ? zero : bottom;
                } else {
                    result = M->classify(c)->index;
                }
                if (fl == flag_none) {
                    const auto nat = M->classify(native);
                    if (!nat || nat->index != result) {
                        ++out.native_mismatches;
                        if (out.first_problem.empty()) {
                            out.first_problem = "recovered " + R.label(a) + " + " + R.label(b) + " differs from native addition";
                        }
                    }
                }
            }
            R.add[a * n + b] = R.add[b * n + a] = static_cast<std::uint32_t>(result);
            R.flags[a * n + b] = R.flags[b * n + a] = fl;
        }
    }
    if (opts.verify_axioms) {
        out.axioms = verify_ring_axioms(R);
    }
    return out;
}

// a +' b = iso^-1(iso(a) + iso(b)) on the source carrier.
inline RecoveredRing transport_structure(const MonoidMorphism &iso, const RecoveredRing &target)
{
    if (!iso.is_bijective() || iso.target() != target.carrier) {
        throw InvalidInput("transport needs a bijective morphism onto the carrier of the given ring");
    }
    if (auto bad = iso.verify()) {
        throw InvalidInput("transport needs a multiplicative bijection: " + *bad);
    }
    const MonoidMorphism inv = iso.inverse();
    RecoveredRing R;
    R.carrier = iso.source();
    const std::size_t n = R.size();
    const std::size_t zero = R.zero();
    auto fwd = [&](std::size_t i) { return i == zero ? target.zero() : iso.table()[i]; };
    auto back = [&](std::size_t i) { return i == target.zero() ? zero : inv.table()[i]; };
    R.add.resize(n * n);
    R.flags.resize(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            R.add[a * n + b] = static_cast<std::uint32_t>(back(target.sum(fwd(a), fwd(b))));
            R.flags[a * n + b] = target.flag(fwd(a), fwd(b));
        }
    }
    return R;
}

struct DifferingPair {
    std::string a, b, native, transported;
};

struct TwistResult {
    std::vector<std::uint64_t> twist;
    bool multiplication_identical = true;
    std::size_t compared = 0;
    std::size_t agreements = 0;
    std::size_t differing = 0;
    std::vector<DifferingPair> examples;
};

struct VariationReport {
    std::string ring1, ring2;
    std::vector<std::uint64_t> invariant_factors;
    std::size_t carrier_size = 0;
    std::size_t native1_flagged = 0, native2_flagged = 0;
    std::size_t native1_problems = 0, native2_problems = 0;
    std::vector<TwistResult> results;

    bool variation_everywhere() const
    {
        for (const auto &r : results) {
            if (r.differing == 0 || !r.multiplication_identical) {
                return false;
            }
        }
        return !results.empty();
    }
};

struct VariationOptions {
    int N = 5;
    std::size_t max_twists = 4;
    std::size_t max_examples = 10;
};

// Candidate twist vectors: identity, then each generator raised to the
// smallest exponent > 1 coprime to its order.
inline std::vector<std::vector<std::uint64_t>> default_twists(const std::vector<std::uint64_t> &factors, std::size_t limit)
{
    std::vector<std::vector<std::uint64_t>> out{std::vector<std::uint64_t>(factors.size(), 1)};
    for (std::size_t i = 0; i < factors.size() && out.size() < limit; ++i) {
        for (std::uint64_t t = 2; t < factors[i]; ++t) {
            if (std::gcd(t, factors[i]) == 1) {
                auto tw = out.front();
                tw[i] = t;
                out.push_back(tw);
                break;
            }
        }
    }
    if (out.size() < limit && factors.size() > 1) {
        std::vector<std::uint64_t> all;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            all.push_back(factors[i] > 2 ? factors[i] - 1 : 1);
        }
        if (std::find(out.begin(), out.end(), all) == out.end()) {
            out.push_back(all);
        }
    }
    return out;
}

// Both rings' own addition on their truncated monoids, a monoid isomorphism
// between them, and the comparison of K1's addition with the one transported
// from K2.
inline VariationReport variation_demo(std::uint64_t p, const std::vector<std::int64_t> &E1, const std::vector<std::int64_t> &E2, int n,
                                      int V, VariationOptions opts = {})
{
    const int k = n + V - 1;
    const Ring K1 = make_eisenstein(p, k, E1);
    const Ring K2 = make_eisenstein(p, k, E2);
    const Monoid M1 = padic_truncation_of(K1, n, V);
    const Monoid M2 = padic_truncation_of(K2, n, V);
    VariationReport rep;
    rep.ring1 = K1->descriptor();
    rep.ring2 = K2->descriptor();
    rep.carrier_size = M1->size() + 1;
    rep.invariant_factors = unit_group_structure(*M1).invariant_factors;
    std::vector<std::vector<std::uint64_t>> twists = default_twists(rep.invariant_factors, opts.max_twists);
    std::vector<MonoidMorphism> isos;
    for (const auto &t : twists) {
        isos.push_back(build_monoid_isomorphism(M1, M2, t));
    }
    auto native = [&](const Ring &K, const Monoid &M) {
        const LubinTateDatum d = standard_preset(K, opts.N);
        const FormalGroupLaw F = build_fgl(d).law;
        return build_addition_table(d, build_action(d, F, M), {false});
    };
    const AdditionTable T1 = native(K1, M1);
    const AdditionTable T2 = native(K2, M2);
    rep.native1_flagged = T1.ring.flagged_count();
    rep.native2_flagged = T2.ring.flagged_count();
    rep.native1_problems = T1.native_mismatches + T1.confirmation_failures;
    rep.native2_problems = T2.native_mismatches + T2.confirmation_failures;
    const std::size_t size = T1.ring.size();
    for (std::size_t t = 0; t < isos.size(); ++t) {
        const RecoveredRing X = transport_structure(isos[t], T2.ring);
        const MonoidMorphism inv = isos[t].inverse();
        TwistResult tr;
        tr.twist = twists[t];
        for (std::size_t a = 0; a < size; ++a) {
            for (std::size_t b = 0; b < size; ++b) {
                // Transported multiplication is iso^-1(iso(a) iso(b)).
                const std::size_t za = a == X.zero() ? T2.ring.zero() : isos[t].table()[a];
                const std::size_t zb = b == X.zero() ? T2.ring.zero() : isos[t].table()[b];
                const std::size_t prod2 = T2.ring.mul(za, zb);
                const std::size_t back = prod2 == T2.ring.zero() ? X.zero() : inv.table()[prod2];
                if (back != T1.ring.mul(a, b)) {
                    tr.multiplication_identical = false;
                }
                if (!T1.ring.well_defined(a, b) || !X.well_defined(a, b)) {
                    continue;
                }
                ++tr.compared;
                if (X.sum(a, b) == T1.ring.sum(a, b)) {
                    ++tr.agreements;
                } else {
                    ++tr.differing;
                    if (tr.examples.size() < opts.max_examples) {
                        tr.examples.push_back({T1.ring.label(a), T1.ring.label(b), T1.ring.label(T1.ring.sum(a, b)), T1.ring.label(X.sum(a, b))});
                    }
                }
            }
        }
        rep.results.push_back(std::move(tr));
    }
    return rep;
}

} // namespace fgl
