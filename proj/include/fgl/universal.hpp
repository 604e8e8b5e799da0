#pragma once

// Truncated presentations of the universal ring of M-formal groups: the ring
// Z[M][c_{i,j}, d_{m,i}] with its obstruction ideal, specializations into
// concrete rings, classification of given actions, functoriality along
// monoid morphisms, and the logarithm-integrality non-triviality scan.

#include <cctype>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fgl.hpp"

namespace fgl
{

class BudgetExceeded : public InvalidInput
{
public:
    BudgetExceeded(const std::string &what, std::size_t estimate, std::size_t budget)
        : InvalidInput(what), estimate_(estimate), budget_(budget)
    {
    }
    std::size_t estimate() const { return estimate_; }
    std::size_t budget() const { return budget_; }

private:
    std::size_t estimate_;
    std::size_t budget_;
};

class IdealNotKilled : public Error
{
public:
    IdealNotKilled(std::string label, std::string value)
        : Error("relation " + label + " evaluates to " + value + ", not 0"), label_(std::move(label)), value_(std::move(value))
    {
    }
    const std::string &label() const { return label_; }
    const std::string &value() const { return value_; }

private:
    std::string label_;
    std::string value_;
};

class ReductionInconclusive : public Error
{
public:
    explicit ReductionInconclusive(std::vector<std::string> labels)
        : Error("naive reduction could not certify " + std::to_string(labels.size()) + " image relation(s), first " +
                (labels.empty() ? std::string("?") : labels.front())),
          labels_(std::move(labels))
    {
    }
    const std::vector<std::string> &labels() const { return labels_; }

private:
    std::vector<std::string> labels_;
};

// S: symmetry, P: associativity, Q: endomorphism, Z: composition,
// C: commutation, M: monoid multiplication in the base ring.
enum class RelationKind { symmetry, associativity, endomorphism, composition, commutation, monoid };

inline char relation_code(RelationKind k)
{
    switch (k) {
    case RelationKind::symmetry:
        return 'S';
    case RelationKind::associativity:
        return 'P';
    case RelationKind::endomorphism:
        return 'Q';
    case RelationKind::composition:
        return 'Z';
    case RelationKind::commutation:
        return 'C';
    case RelationKind::monoid:
        return 'M';
    }
    return '?';
}

struct Relation {
    RelationKind kind;
    std::string label;
    Value poly;
};

struct PresentationSize {
    std::size_t variables = 0;
    std::size_t relations = 0;
};

inline std::size_t default_budget()
{
    constexpr std::size_t kDefault = 4000;
    if (const char *env = std::getenv("FGL_BUDGET")) {
        try {
            return static_cast<std::size_t>(std::stoull(env));
        } catch (const std::exception &) {
            throw InvalidInput(std::string("FGL_BUDGET is not a number: ") + env);
        }
    }
    return kDefault;
}

struct UniversalPresentation {
    Monoid monoid;
    int N = 0;
    // Z[monoid variables, c_{i,j}, d_{m,i}] modulo the monoid relations.
    Ring ring;
    // Elements carrying their own d-variables: free generators, or every
    // non-identity element of a finite monoid.
    std::vector<MonoidElement> acting;
    std::vector<std::string> monoid_vars;
    std::vector<std::string> acting_names;
    std::vector<std::pair<int, int>> c_indices;
    TruncatedSeries law;
    std::vector<TruncatedSeries> endomorphisms;
    std::vector<Relation> base_relations;
    std::vector<Relation> ideal;
    std::map<char, std::size_t> zero_relations;

    std::size_t variable_count() const { return ring->variables().size(); }

    static std::string c_name(int i, int j) { return "c_" + std::to_string(i) + "_" + std::to_string(j); }
    std::string d_name(std::size_t acting_idx, int i) const { return "d_" + acting_names[acting_idx] + "_" + std::to_string(i); }

    std::optional<std::size_t> acting_index(const MonoidElement &m) const
    {
        for (std::size_t i = 0; i < acting.size(); ++i) {
            if (acting[i] == m) {
                return i;
            }
        }
        return std::nullopt;
    }

    // Image of m in Z[M] inside the presentation ring.
    Value alpha(const MonoidElement &m) const
    {
        if (monoid->is_identity(m)) {
            return ring->one();
        }
        if (const auto i = acting_index(m)) {
            return ring->variable(monoid_vars[*i]);
        }
        if (monoid->kind() == MonoidKind::free_commutative) {
            Value acc = ring->one();
            for (std::size_t g = 0; g < m.exponents.size(); ++g) {
                acc = ring->mul(acc, ring->pow(ring->variable(monoid_vars[g]), m.exponents[g]));
            }
            return acc;
        }
        throw InvalidInput("element " + monoid->to_string(m) + " has no variable");
    }

    // g_m: x for the identity, the tautological series for acting elements,
    // and the canonical-order composite of generators for free words.
    TruncatedSeries endomorphism(const MonoidElement &m) const
    {
        const auto x = TruncatedSeries::variable(ring, detail::xonly(), N, "x");
        if (monoid->is_identity(m)) {
            return x;
        }
        if (const auto i = acting_index(m)) {
            return endomorphisms[*i];
        }
        if (monoid->kind() == MonoidKind::free_commutative) {
            TruncatedSeries s = x;
            for (std::size_t g = 0; g < m.exponents.size(); ++g) {
                for (std::uint32_t k = 0; k < m.exponents[g]; ++k) {
                    s = endomorphisms[g].compose(s);
                }
            }
            return s;
        }
        throw InvalidInput("element " + monoid->to_string(m) + " has no series");
    }

    std::vector<Relation> all_relations() const
    {
        std::vector<Relation> out = base_relations;
        out.insert(out.end(), ideal.begin(), ideal.end());
        return out;
    }

    std::string relation_text(const Relation &r) const { return ring->to_string(r.poly); }

    // Plain comma-separated generator list for external algebra systems.
    std::string ideal_text() const
    {
        std::string out;
        for (const auto &r : all_relations()) {
            out += (out.empty() ? "" : ", ") + relation_text(r);
        }
        return out;
    }
};

using Presentation = std::shared_ptr<const UniversalPresentation>;

namespace detail
{
inline std::string identifier(const std::string &label)
{
    std::string out;
    for (const char ch : label) {
        out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) {
        out = "e" + out;
    }
    return out;
}

inline std::size_t monomials_up_to(std::size_t nvars, int N)
{
    return MonomialLayout::get(nvars, N)->size();
}

inline std::vector<MonoidElement> acting_elements(const Monoid &M)
{
    std::vector<MonoidElement> out;
    if (M->kind() == MonoidKind::free_commutative) {
        for (std::size_t i = 0; i < M->generator_names().size(); ++i) {
            out.push_back(M->generator(i));
        }
        return out;
    }
    for (const auto &m : M->elements()) {
        if (!M->is_identity(m)) {
            out.push_back(m);
        }
    }
    return out;
}

inline std::string short_monomial(const std::vector<std::string> &vars, const Monomial &m)
{
    const std::string s = monomial_string(vars, m);
    return s.empty() ? "1" : s;
}
} // namespace detail

inline PresentationSize presentation_size(const Monoid &M, int N)
{
    if (N < 1) {
        throw InvalidInput("truncation degree must be at least 1");
    }
    const std::size_t a = detail::acting_elements(M).size();
    const std::size_t nc = N >= 2 ? static_cast<std::size_t>((N - 1) * N / 2) : 0;
    PresentationSize s;
    s.variables = a + nc + a * static_cast<std::size_t>(N >= 2 ? N - 1 : 0);
    const std::size_t n = static_cast<std::size_t>(N);
    s.relations = nc + detail::monomials_up_to(3, N) + a * detail::monomials_up_to(2, N) + a * a * n + a * a * n / 2;
    if (M->kind() != MonoidKind::free_commutative) {
        s.relations += a * (a + 1) / 2;
    }
    return s;
}

inline Presentation generate_presentation(const Monoid &M, int N, std::optional<std::size_t> budget = std::nullopt)
{
    if (M->kind() == MonoidKind::free_commutative && (M->generator_names().empty() || M->generator_names().size() > 8)) {
        throw InvalidInput("free monoids need between 1 and 8 generators");
    }
    const PresentationSize size = presentation_size(M, N);
    const std::size_t limit = budget ? *budget : default_budget();
    if (size.relations > limit) {
        throw BudgetExceeded("presentation needs about " + std::to_string(size.relations) + " relations over " +
                                 std::to_string(size.variables) + " variables, above the budget of " + std::to_string(limit) +
                                 " (raise FGL_BUDGET)",
                             size.relations, limit);
    }

    auto P = std::make_shared<UniversalPresentation>();
    P->monoid = M;
    P->N = N;
    P->acting = detail::acting_elements(M);

    std::vector<std::string> vars;
    std::set<std::string> seen;
    auto add_var = [&](const std::string &name) {
        if (!seen.insert(name).second) {
            throw InvalidInput("variable name '" + name + "' is used twice; rename the monoid elements");
        }
        vars.push_back(name);
    };
    for (const auto &m : P->acting) {
        const std::string name = detail::identifier(M->element_label(m));
        P->acting_names.push_back(name);
        P->monoid_vars.push_back(name);
        add_var(name);
    }
    for (int d = 2; d <= N; ++d) {
        for (int i = d - 1; i >= 1; --i) {
            P->c_indices.emplace_back(i, d - i);
            add_var(UniversalPresentation::c_name(i, d - i));
        }
    }
    for (std::size_t a = 0; a < P->acting.size(); ++a) {
        for (int i = 2; i <= N; ++i) {
            add_var(P->d_name(a, i));
        }
    }

    // Z[M]: products of acting elements rewrite to their canonical product.
    const Ring Z = make_integers();
    std::vector<PolyTerms> base_polys;
    auto mono_of = [&](std::initializer_list<std::size_t> idx) {
        Monomial m(vars.size(), 0);
        for (const auto i : idx) {
            ++m[i];
        }
        return m;
    };
    if (M->kind() != MonoidKind::free_commutative) {
        for (std::size_t a = 0; a < P->acting.size(); ++a) {
            for (std::size_t b = a; b < P->acting.size(); ++b) {
                const MonoidElement ab = M->mul(P->acting[a], P->acting[b]);
                PolyTerms t;
                t.emplace(mono_of({a, b}), mpz_class(1));
                if (M->is_identity(ab)) {
                    t.emplace(mono_of({}), mpz_class(-1));
                } else {
                    std::size_t k = 0;
                    while (!(P->acting[k] == ab)) {
                        ++k;
                    }
                    t.emplace(mono_of({k}), mpz_class(-1));
                }
                base_polys.push_back(t);
                P->base_relations.push_back(
                    {RelationKind::monoid, "M_{" + P->acting_names[a] + "," + P->acting_names[b] + "}", Value{}});
            }
        }
    }
    P->ring = make_polynomial_quotient(Z, vars, base_polys);
    const Ring &R = P->ring;
    for (std::size_t i = 0; i < base_polys.size(); ++i) {
        P->base_relations[i].poly = Value{mpz_class(0), std::make_shared<const PolyTerms>(base_polys[i])};
    }

    // Tautological series.
    const auto x = TruncatedSeries::variable(R, detail::xy(), N, "x");
    const auto y = TruncatedSeries::variable(R, detail::xy(), N, "y");
    TruncatedSeries F = x + y;
    for (const auto &[i, j] : P->c_indices) {
        F.set(Monomial{static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j)}, R->variable(UniversalPresentation::c_name(i, j)));
    }
    P->law = F;
    for (std::size_t a = 0; a < P->acting.size(); ++a) {
        TruncatedSeries g(R, detail::xonly(), N);
        g.set(Monomial{1}, R->variable(P->monoid_vars[a]));
        for (int i = 2; i <= N; ++i) {
            g.set(Monomial{static_cast<std::uint16_t>(i)}, R->variable(P->d_name(a, i)));
        }
        P->endomorphisms.push_back(g);
    }

    auto emit = [&](RelationKind kind, const std::string &label, const Value &v) {
        if (R->is_zero(v)) {
            ++P->zero_relations[relation_code(kind)];
            return;
        }
        P->ideal.push_back({kind, label, v});
    };

    for (const auto &[i, j] : P->c_indices) {
        if (i < j) {
            emit(RelationKind::symmetry, "S_{" + std::to_string(i) + "," + std::to_string(j) + "}",
                 R->sub(R->variable(UniversalPresentation::c_name(i, j)), R->variable(UniversalPresentation::c_name(j, i))));
        }
    }

    const auto X = TruncatedSeries::variable(R, detail::xyz(), N, "x");
    const auto Y = TruncatedSeries::variable(R, detail::xyz(), N, "y");
    const auto Zs = TruncatedSeries::variable(R, detail::xyz(), N, "z");
    const TruncatedSeries assoc = apply_law(F, X, apply_law(F, Y, Zs)) - apply_law(F, apply_law(F, X, Y), Zs);
    for (std::size_t k = 0; k < assoc.size(); ++k) {
        const auto &m = assoc.layout().monomial(k);
        emit(RelationKind::associativity,
             "P_{" + std::to_string(m[0]) + "," + std::to_string(m[1]) + "," + std::to_string(m[2]) + "}", assoc.coeff_at(k));
    }

    const TruncatedSeries Fxy = F;
    for (std::size_t a = 0; a < P->acting.size(); ++a) {
        const TruncatedSeries &g = P->endomorphisms[a];
        const TruncatedSeries D = g.compose(Fxy) - apply_law(F, g.substitute({{"x", x}}), g.substitute({{"x", y}}));
        for (std::size_t k = 0; k < D.size(); ++k) {
            const auto &m = D.layout().monomial(k);
            emit(RelationKind::endomorphism,
                 "Q_{" + P->acting_names[a] + "," + std::to_string(total_degree(m)) + "}[" +
                     detail::short_monomial(detail::xy(), m) + "]",
                 D.coeff_at(k));
        }
    }

    for (std::size_t a = 0; a < P->acting.size(); ++a) {
        for (std::size_t b = 0; b < P->acting.size(); ++b) {
            const TruncatedSeries lhs = P->endomorphisms[b].compose(P->endomorphisms[a]);
            const TruncatedSeries D = lhs - P->endomorphism(M->mul(P->acting[a], P->acting[b]));
            for (std::size_t k = 1; k < D.size(); ++k) {
                emit(RelationKind::composition,
                     "Z_{" + P->acting_names[a] + "," + P->acting_names[b] + "," + std::to_string(k) + "}", D.coeff_at(k));
            }
        }
    }

    for (std::size_t a = 0; a < P->acting.size(); ++a) {
        for (std::size_t b = a + 1; b < P->acting.size(); ++b) {
            const TruncatedSeries D = P->endomorphisms[a].compose(P->endomorphisms[b]) - P->endomorphisms[b].compose(P->endomorphisms[a]);
            for (std::size_t k = 1; k < D.size(); ++k) {
                emit(RelationKind::commutation,
                     "C_{" + P->acting_names[a] + "," + P->acting_names[b] + "," + std::to_string(k) + "}", D.coeff_at(k));
            }
        }
    }
    return P;
}

// --- specialization ----------------------------------------------------------

// Ring homomorphism out of a presentation ring, given by the image of every
// variable. Also used between presentation rings (functoriality).
struct SpecializationHom {
    Presentation source;
    Ring target;
    std::vector<RingElement> images;

    const RingElement &image(const std::string &name) const
    {
        const auto idx = source->ring->variable_index(name);
        if (!idx) {
            throw InvalidInput("unknown presentation variable '" + name + "'");
        }
        return images[*idx];
    }

    RingElement operator()(const Value &v) const
    {
        const Ring &R = source->ring;
        Value acc = target->zero();
        for (const auto &[mono, c] : R->terms_of(v)) {
            Value term = target->from_integer(std::get<mpz_class>(c));
            for (std::size_t i = 0; i < mono.size(); ++i) {
                if (mono[i] != 0) {
                    term = target->mul(term, target->pow(images[i].value(), mono[i]));
                }
            }
            acc = target->add(acc, term);
        }
        return {target, acc};
    }

    TruncatedSeries operator()(const TruncatedSeries &s) const
    {
        return s.map_coefficients(target, [&](const Value &v) { return (*this)(v).value(); });
    }
};

inline SpecializationHom make_specialization(const Presentation &P, const Ring &target, const std::map<std::string, RingElement> &images)
{
    SpecializationHom h{P, target, {}};
    std::string missing;
    for (const auto &name : P->ring->variables()) {
        const auto it = images.find(name);
        if (it == images.end()) {
            missing += (missing.empty() ? "" : ", ") + name;
            continue;
        }
        require_same_ring(it->second.ring(), target);
        h.images.push_back(it->second);
    }
    if (!missing.empty()) {
        throw InvalidInput("no image given for " + missing);
    }
    for (const auto &[name, v] : images) {
        if (!P->ring->variable_index(name)) {
            throw InvalidInput("unknown presentation variable '" + name + "'");
        }
    }
    return h;
}

struct RelationValue {
    std::string label;
    std::string value;
};

struct IdealCheck {
    std::size_t checked = 0;
    std::vector<RelationValue> failures;
    bool passed() const { return failures.empty(); }
};

inline IdealCheck check_ideal(const SpecializationHom &h)
{
    IdealCheck out;
    for (const auto &r : h.source->all_relations()) {
        ++out.checked;
        const RingElement v = h(r.poly);
        if (!v.is_zero()) {
            out.failures.push_back({r.label, v.to_string()});
        }
    }
    return out;
}

struct Specialized {
    SpecializationHom hom;
    IdealCheck ideal;
    MonoidAction action;
};

// Specialized law and action. Throws IdealNotKilled naming the first
// relation that does not vanish in the target.
inline Specialized specialize(const SpecializationHom &h)
{
    Specialized out{h, check_ideal(h), {}};
    if (!out.ideal.passed()) {
        throw IdealNotKilled(out.ideal.failures.front().label, out.ideal.failures.front().value);
    }
    const UniversalPresentation &P = *h.source;
    out.action.law = FormalGroupLaw(h(P.law));
    out.action.monoid = P.monoid;
    if (P.monoid->is_finite()) {
        out.action.entries.push_back({P.monoid->element_label(P.monoid->identity()),
                                      TruncatedSeries::variable(h.target, detail::xonly(), P.N, "x"), P.monoid->identity(),
                                      RingElement::one(h.target), std::nullopt});
    }
    for (std::size_t a = 0; a < P.acting.size(); ++a) {
        out.action.entries.push_back({P.monoid->element_label(P.acting[a]), h(P.endomorphisms[a]), P.acting[a],
                                      h(P.alpha(P.acting[a])), std::nullopt});
    }
    return out;
}

inline Specialized specialize(const Presentation &P, const Ring &target, const std::map<std::string, RingElement> &images)
{
    return specialize(make_specialization(P, target, images));
}

struct Classification {
    SpecializationHom hom;
    IdealCheck ideal;
};

// Read the images of all presentation variables off a given action.
inline Classification classify_fgl(const Presentation &P, const MonoidAction &A)
{
    if (A.monoid.get() != P->monoid.get()) {
        throw ContextMismatch("action and presentation use different monoids");
    }
    if (A.law.degree() < P->N) {
        throw InvalidInput("action is truncated at degree " + std::to_string(A.law.degree()) + ", below the presentation degree " +
                           std::to_string(P->N));
    }
    const Ring &T = A.law.ring();
    const TruncatedSeries F = A.law.series().truncated(P->N);
    std::map<std::string, RingElement> images;
    for (const auto &[i, j] : P->c_indices) {
        images.emplace(UniversalPresentation::c_name(i, j),
                       F.coefficient(Monomial{static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j)}));
    }
    for (std::size_t a = 0; a < P->acting.size(); ++a) {
        const TruncatedSeries g = A.endomorphism(P->acting[a]).truncated(P->N);
        images.emplace(P->monoid_vars[a], g.coefficient(Monomial{1}));
        for (int i = 2; i <= P->N; ++i) {
            images.emplace(P->d_name(a, i), g.coefficient(Monomial{static_cast<std::uint16_t>(i)}));
        }
    }
    Classification out{make_specialization(P, T, images), {}};
    out.ideal = check_ideal(out.hom);
    return out;
}

// Composite P' -> P -> target of a functoriality map and a specialization.
inline SpecializationHom compose(const SpecializationHom &inner, const SpecializationHom &outer)
{
    require_same_ring(inner.target, outer.source->ring);
    SpecializationHom h{inner.source, outer.target, {}};
    for (const auto &img : inner.images) {
        h.images.push_back(outer(img.value()));
    }
    return h;
}

// --- ideal membership by naive reduction ----------------------------------------

class IdealCertifier
{
public:
    explicit IdealCertifier(const Presentation &P) : P_(P)
    {
        std::vector<PolyTerms> gens;
        for (const auto &r : P->all_relations()) {
            gens.push_back(P->ring->terms_of(r.poly));
            polys_.push_back(r.poly);
        }
        quotient_ = make_polynomial_quotient(make_integers(), P->ring->variables(), gens);
    }

    // True when v is zero, plus or minus a generator, or reduces to zero.
    bool certify(const Value &v) const
    {
        const Ring &R = P_->ring;
        if (R->is_zero(v)) {
            return true;
        }
        for (const auto &g : polys_) {
            if (R->equal(v, g) || R->is_zero(R->add(v, g))) {
                return true;
            }
        }
        return quotient_->is_zero(quotient_->from_terms(R->terms_of(v)));
    }

    const Ring &quotient() const { return quotient_; }

private:
    Presentation P_;
    std::vector<Value> polys_;
    Ring quotient_;
};

struct FunctorialityMap {
    SpecializationHom hom;
    std::size_t certified = 0;
    std::vector<std::string> inconclusive;
    bool certified_all() const { return inconclusive.empty(); }
};

// L_{M'} -> L_M induced by a monoid morphism M' -> M: c_{i,j} -> c_{i,j},
// d_{m',i} -> the degree-i coefficient of g_{phi(m')}, monoid variables by
// phi. Every relation of P' is mapped and certified against P's ideal.
inline FunctorialityMap functoriality_map(const MonoidMorphism &phi, const Presentation &Psrc, const Presentation &Ptgt)
{
    if (phi.source().get() != Psrc->monoid.get() || phi.target().get() != Ptgt->monoid.get()) {
        throw ContextMismatch("morphism does not connect the presentation monoids");
    }
    if (Psrc->N != Ptgt->N) {
        throw InvalidInput("presentations have different truncation degrees");
    }
    if (const auto bad = phi.verify()) {
        throw InvalidInput("monoid morphism is invalid: " + *bad);
    }
    const Ring &R = Ptgt->ring;
    std::map<std::string, RingElement> images;
    for (const auto &[i, j] : Psrc->c_indices) {
        images.emplace(UniversalPresentation::c_name(i, j), RingElement(R, R->variable(UniversalPresentation::c_name(i, j))));
    }
    for (std::size_t a = 0; a < Psrc->acting.size(); ++a) {
        const MonoidElement im = phi(Psrc->acting[a]);
        images.emplace(Psrc->monoid_vars[a], RingElement(R, Ptgt->alpha(im)));
        const TruncatedSeries g = Ptgt->endomorphism(im);
        for (int i = 2; i <= Psrc->N; ++i) {
            images.emplace(Psrc->d_name(a, i), g.coefficient(Monomial{static_cast<std::uint16_t>(i)}));
        }
    }
    FunctorialityMap out{make_specialization(Psrc, R, images), 0, {}};
    const IdealCertifier cert(Ptgt);
    for (const auto &r : Psrc->all_relations()) {
        if (cert.certify(out.hom(r.poly).value())) {
            ++out.certified;
        } else {
            out.inconclusive.push_back(r.label);
        }
    }
    return out;
}

// --- structure checks ------------------------------------------------------------

// Number of c-variables left independent by the linear parts of the
// relations among the c's alone, computed by rank over Q.
inline std::size_t indecomposable_count(const Presentation &P)
{
    const Ring &R = P->ring;
    std::vector<std::size_t> cols;
    for (const auto &[i, j] : P->c_indices) {
        cols.push_back(*R->variable_index(UniversalPresentation::c_name(i, j)));
    }
    std::vector<std::vector<mpq_class>> rows;
    for (const auto &r : P->ideal) {
        if (r.kind != RelationKind::symmetry && r.kind != RelationKind::associativity) {
            continue;
        }
        std::vector<mpq_class> row(cols.size());
        bool any = false;
        for (const auto &[mono, c] : R->terms_of(r.poly)) {
            if (total_degree(mono) != 1) {
                continue;
            }
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (mono[cols[k]] == 1) {
                    row[k] = mpq_class(std::get<mpz_class>(c));
                    any = true;
                }
            }
        }
        if (any) {
            rows.push_back(std::move(row));
        }
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols.size() && rank < rows.size(); ++col) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][col] == 0) {
            ++piv;
        }
        if (piv == rows.size()) {
            continue;
        }
        std::swap(rows[rank], rows[piv]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && rows[r][col] != 0) {
                const mpq_class f = rows[r][col] / rows[rank][col];
                for (std::size_t k = col; k < cols.size(); ++k) {
                    rows[r][k] -= f * rows[rank][k];
                }
            }
        }
        ++rank;
    }
    return cols.size() - rank;
}

struct TwoVariableCheck {
    std::string pair;
    std::size_t coefficients = 0;
    // Exact identity D(x,y) = sum_i z_i F(x,y)^i with every z_i a composition
    // relation of the presentation (or zero).
    bool cofactor_certified = false;
    // Coefficients that naive reduction also sends to zero.
    std::size_t reduced_to_zero = 0;
};

// The two-variable composition relation g_{m'}(g_m(F(x,y))) - g_{mm'}(F(x,y))
// checked against the emitted one-variable relations, for every ordered pair
// of acting elements.
inline std::vector<TwoVariableCheck> check_two_variable_composition(const Presentation &P)
{
    const Ring &R = P->ring;
    const IdealCertifier cert(P);
    const TruncatedSeries &F = P->law;
    std::vector<TruncatedSeries> Fpow{TruncatedSeries::constant(R, detail::xy(), P->N, R->one())};
    for (int i = 1; i <= P->N; ++i) {
        Fpow.push_back(Fpow.back() * F);
    }
    std::set<std::string> emitted;
    for (const auto &r : P->ideal) {
        emitted.insert(R->to_string(r.poly));
    }
    std::vector<TwoVariableCheck> out;
    for (std::size_t a = 0; a < P->acting.size(); ++a) {
        for (std::size_t b = 0; b < P->acting.size(); ++b) {
            TwoVariableCheck c;
            c.pair = P->acting_names[a] + "," + P->acting_names[b];
            const TruncatedSeries one_var =
                P->endomorphisms[b].compose(P->endomorphisms[a]) - P->endomorphism(P->monoid->mul(P->acting[a], P->acting[b]));
            const TruncatedSeries two_var =
                P->endomorphisms[b].compose(P->endomorphisms[a].compose(F)) -
                P->endomorphism(P->monoid->mul(P->acting[a], P->acting[b])).compose(F);
            TruncatedSeries combo(R, detail::xy(), P->N);
            bool members = true;
            for (std::size_t i = 1; i < one_var.size(); ++i) {
                const Value &z = one_var.coeff_at(i);
                if (R->is_zero(z)) {
                    continue;
                }
                members = members && (emitted.count(R->to_string(z)) > 0);
                combo = combo + Fpow[i].scaled(z);
            }
            c.cofactor_certified = members && combo == two_var;
            for (std::size_t k = 0; k < two_var.size(); ++k) {
                ++c.coefficients;
                if (cert.certify(two_var.coeff_at(k))) {
                    ++c.reduced_to_zero;
                }
            }
            out.push_back(std::move(c));
        }
    }
    return out;
}

// --- non-triviality --------------------------------------------------------------

enum class NontrivialityOutcome { witness, additive, inconclusive };

inline std::string outcome_name(NontrivialityOutcome o)
{
    switch (o) {
    case NontrivialityOutcome::witness:
        return "witness";
    case NontrivialityOutcome::additive:
        return "additive";
    case NontrivialityOutcome::inconclusive:
        return "inconclusive";
    }
    return "?";
}

struct LogScan {
    NontrivialityOutcome outcome = NontrivialityOutcome::inconclusive;
    int N = 0;
    // Degree of the first log coefficient with negative valuation.
    unsigned degree = 0;
    std::string coefficient;
    std::optional<int> valuation;
    mpz_class denominator;
    std::string reason;
};

// Integrality scan of the logarithm l' = 1/F_y(T,0) over the fraction field.
// Over O/m^k the coefficient b_{n-1} of 1/F_y(T,0) is exact; its valuation
// minus that of n is the valuation of the degree-n log coefficient.
inline LogScan scan_logarithm(const FormalGroupLaw &F)
{
    const Ring &r = F.ring();
    LogScan out;
    out.N = F.degree();
    const auto x = detail::var(r, detail::xy(), out.N, "x");
    if (F.series() == x + detail::var(r, detail::xy(), out.N, "y")) {
        if (r->is_padic()) {
            out.reason = "the law agrees with x + y through degree " + std::to_string(out.N);
        } else {
            out.outcome = NontrivialityOutcome::additive;
            out.reason = "the law is x + y";
        }
        return out;
    }
    if (!r->is_padic()) {
        if (r->kind() == RingKind::rationals) {
            out.outcome = NontrivialityOutcome::additive;
            out.reason = "over Q every law is isomorphic to x + y via its logarithm";
        } else {
            out.reason = "integrality scan needs a p-adic target";
        }
        return out;
    }
    const TruncatedSeries T = TruncatedSeries::variable(r, {"T"}, out.N, "T");
    const TruncatedSeries zero(r, {"T"}, out.N);
    const TruncatedSeries b = F.series().derivative("y").substitute({{"x", T}, {"y", zero}}).reciprocal();
    const long p = static_cast<long>(r->p());
    const int e = r->degree();
    for (int n = 2; n <= out.N; ++n) {
        const Value &c = b.coeff_at(static_cast<std::size_t>(n - 1));
        const auto v = r->valuation(c);
        if (!v) {
            continue;
        }
        int vn = 0;
        for (long m = n; m % p == 0; m /= p) {
            ++vn;
        }
        if (*v < e * vn) {
            out.outcome = NontrivialityOutcome::witness;
            out.degree = static_cast<unsigned>(n);
            out.coefficient = "(" + r->to_string(c) + ")/" + std::to_string(n);
            out.valuation = *v - e * vn;
            out.denominator = n;
            out.reason = "the coefficient of T^" + std::to_string(n) + " in the logarithm has valuation " +
                         std::to_string(*out.valuation) + ", so no change of coordinates over " + r->descriptor() +
                         " makes the law additive";
            return out;
        }
    }
    out.reason = "logarithm is integral up to degree " + std::to_string(out.N);
    return out;
}

struct NontrivialityReport {
    LogScan scan;
    std::optional<Classification> classification;
    std::string law;
};

// Classify the action produced at each degree from N up to max_N, specialize,
// and scan the specialized law's logarithm until a witness appears.
inline NontrivialityReport nontriviality_witness(const Monoid &M, const std::function<MonoidAction(int)> &action_at, int N, int max_N)
{
    NontrivialityReport out;
    for (int n = N; n <= std::max(N, max_N); ++n) {
        const Presentation P = generate_presentation(M, n);
        const MonoidAction A = action_at(n);
        Classification cls = classify_fgl(P, A);
        if (!cls.ideal.passed()) {
            throw IdealNotKilled(cls.ideal.failures.front().label, cls.ideal.failures.front().value);
        }
        const Specialized s = specialize(cls.hom);
        out.scan = scan_logarithm(s.action.law);
        out.law = s.action.law.series().to_string();
        out.classification = std::move(cls);
        if (out.scan.outcome != NontrivialityOutcome::inconclusive) {
            break;
        }
    }
    return out;
}

} // namespace fgl
