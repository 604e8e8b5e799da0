#pragma once

// One-dimensional commutative formal group laws, their endomorphisms,
// logarithms, and monoid actions.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "monoid.hpp"
#include "series.hpp"

namespace fgl
{

// Raised when a computation needs to divide by an integer that is not
// invertible in the coefficient ring.
class NonIntegralDivision : public Error
{
public:
    NonIntegralDivision(const std::string &what, unsigned degree, mpz_class denominator)
        : Error(what), degree_(degree), denominator_(std::move(denominator))
    {
    }
    unsigned degree() const { return degree_; }
    const mpz_class &denominator() const { return denominator_; }

private:
    unsigned degree_;
    mpz_class denominator_;
};

inline std::string monomial_string(const std::vector<std::string> &vars, const Monomial &m)
{
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) {
            continue;
        }
        if (!out.empty()) {
            out += "*";
        }
        out += vars[i];
        if (m[i] > 1) {
            out += "^" + std::to_string(m[i]);
        }
    }
    return out.empty() ? "1" : out;
}

struct AxiomCheck {
    std::string axiom;
    bool passed = true;
    std::vector<std::string> vars;
    std::optional<Monomial> first_failure;

    std::string failure_monomial() const { return first_failure ? monomial_string(vars, *first_failure) : ""; }
};

struct AxiomReport {
    std::vector<AxiomCheck> checks;

    bool passed() const
    {
        for (const auto &c : checks) {
            if (!c.passed) {
                return false;
            }
        }
        return true;
    }
    const AxiomCheck &check(const std::string &axiom) const
    {
        for (const auto &c : checks) {
            if (c.axiom == axiom) {
                return c;
            }
        }
        throw InvalidInput("no axiom named " + axiom);
    }
};

namespace detail
{
inline TruncatedSeries var(const Ring &r, const std::vector<std::string> &vars, int N, const std::string &name)
{
    return TruncatedSeries::variable(r, vars, N, name);
}

inline AxiomCheck compare(const std::string &axiom, const TruncatedSeries &lhs, const TruncatedSeries &rhs)
{
    AxiomCheck c;
    c.axiom = axiom;
    c.vars = lhs.variables();
    c.first_failure = lhs.first_difference(rhs);
    c.passed = !c.first_failure;
    return c;
}

inline const std::vector<std::string> &xy() { static const std::vector<std::string> v{"x", "y"}; return v; }
inline const std::vector<std::string> &xyz() { static const std::vector<std::string> v{"x", "y", "z"}; return v; }
inline const std::vector<std::string> &xonly() { static const std::vector<std::string> v{"x"}; return v; }
} // namespace detail

// F(x,y) evaluated at two series in a common variable set.
inline TruncatedSeries apply_law(const TruncatedSeries &F, const TruncatedSeries &a, const TruncatedSeries &b)
{
    return F.substitute({{F.variables()[0], a}, {F.variables()[1], b}});
}

inline AxiomReport check_axioms(const TruncatedSeries &F)
{
    if (F.variables().size() != 2) {
        throw ShapeMismatch("a formal group law is a series in two variables");
    }
    const Ring &r = F.ring();
    const int N = F.degree();
    const TruncatedSeries law = F.renamed(detail::xy());
    const auto x = detail::var(r, detail::xy(), N, "x");
    const auto y = detail::var(r, detail::xy(), N, "y");
    const TruncatedSeries zero(r, detail::xy(), N);
    AxiomReport rep;
    rep.checks.push_back(detail::compare("linear", law.truncated(1).truncated(N), x + y));
    rep.checks.push_back(detail::compare("commutativity", law, apply_law(law, y, x)));
    rep.checks.push_back(detail::compare("unit", apply_law(law, x, zero), x));
    if (rep.checks.back().passed) {
        rep.checks.back() = detail::compare("unit", apply_law(law, zero, y), y);
    }
    const auto X = detail::var(r, detail::xyz(), N, "x");
    const auto Y = detail::var(r, detail::xyz(), N, "y");
    const auto Z = detail::var(r, detail::xyz(), N, "z");
    rep.checks.push_back(
        detail::compare("associativity", apply_law(law, X, apply_law(law, Y, Z)), apply_law(law, apply_law(law, X, Y), Z)));
    return rep;
}

class FormalGroupLaw
{
public:
    FormalGroupLaw() = default;
    explicit FormalGroupLaw(TruncatedSeries F) : F_(F.renamed(detail::xy())), report_(check_axioms(F_)) {}

    const TruncatedSeries &series() const { return F_; }
    const Ring &ring() const { return F_.ring(); }
    int degree() const { return F_.degree(); }
    const AxiomReport &axioms() const { return report_; }

    TruncatedSeries operator()(const TruncatedSeries &a, const TruncatedSeries &b) const { return apply_law(F_, a, b); }

private:
    TruncatedSeries F_;
    AxiomReport report_;
};

// First monomial where g(F(x,y)) and F(g(x),g(y)) differ.
inline std::optional<Monomial> endomorphism_defect(const FormalGroupLaw &F, const TruncatedSeries &g)
{
    const Ring &r = F.ring();
    const int N = F.degree();
    const auto x = detail::var(r, detail::xy(), N, "x");
    const auto y = detail::var(r, detail::xy(), N, "y");
    const TruncatedSeries gx = g.substitute({{g.variables()[0], x}});
    const TruncatedSeries gy = g.substitute({{g.variables()[0], y}});
    return g.substitute({{g.variables()[0], F(x, y)}}).first_difference(F(gx, gy));
}

struct LogarithmConstruction {
    FormalGroupLaw law;
    TruncatedSeries exponential;
};

// F = g(f(x) + f(y)) with g the compositional inverse of f.
inline LogarithmConstruction from_logarithm(const TruncatedSeries &f)
{
    if (f.variables().size() != 1) {
        throw ShapeMismatch("a logarithm is a one-variable series");
    }
    const Ring &r = f.ring();
    const int N = f.degree();
    const TruncatedSeries T = TruncatedSeries::variable(r, f.variables(), N, f.variables()[0]);
    TruncatedSeries low(r, f.variables(), N);
    low.set_at(0, f.coeff_at(0));
    low.set_at(1, f.coeff_at(1));
    if (low != T) {
        throw InvalidInput("logarithm must be congruent to T modulo T^2");
    }
    const TruncatedSeries g = f.compositional_inverse();
    const auto x = detail::var(r, detail::xy(), N, "x");
    const auto y = detail::var(r, detail::xy(), N, "y");
    const TruncatedSeries fx = f.substitute({{f.variables()[0], x}});
    const TruncatedSeries fy = f.substitute({{f.variables()[0], y}});
    return {FormalGroupLaw(g.substitute({{g.variables()[0], fx + fy}})), g.renamed({"T"})};
}

// [m](x) = g(m f(x)).
inline TruncatedSeries action_endomorphism_from_logarithm(const TruncatedSeries &f, const TruncatedSeries &g, const RingElement &m)
{
    require_same_ring(f.ring(), m.ring());
    const auto x = detail::var(f.ring(), detail::xonly(), f.degree(), "x");
    const TruncatedSeries mf = f.substitute({{f.variables()[0], x}}).scaled(m.value());
    return g.substitute({{g.variables()[0], mf}});
}

// Integral of a one-variable series: T^n -> T^(n+1)/(n+1). Division must be
// exact in the coefficient ring; p-adic rings refuse denominators divisible
// by p instead of losing precision.
inline TruncatedSeries integrate(const TruncatedSeries &s)
{
    const Ring &r = s.ring();
    TruncatedSeries out(r, s.variables(), s.degree());
    for (int n = 0; n < s.degree(); ++n) {
        const Value &c = s.coeff_at(static_cast<std::size_t>(n));
        if (r->is_zero(c)) {
            continue;
        }
        const mpz_class denom = n + 1;
        const Value d = r->from_integer(denom);
        std::optional<Value> q;
        if (!r->is_padic() || (n + 1) % static_cast<long>(r->p()) != 0) {
            try {
                q = r->try_divide(c, d);
            } catch (const NotAUnit &) {
                q.reset();
            }
        }
        if (!q) {
            throw NonIntegralDivision("coefficient of T^" + std::to_string(n + 1) + " needs division by " + denom.get_str() +
                                          ", which is not invertible in " + r->descriptor(),
                                      static_cast<unsigned>(n + 1), denom);
        }
        out.set_at(static_cast<std::size_t>(n + 1), *q);
    }
    return out;
}

// Formal logarithm: l' = 1 / (dF/dy)(T, 0), integrated termwise.
inline TruncatedSeries logarithm(const FormalGroupLaw &F)
{
    const Ring &r = F.ring();
    const int N = F.degree();
    const std::vector<std::string> tv{"T"};
    const auto T = TruncatedSeries::variable(r, tv, N, "T");
    const TruncatedSeries zero(r, tv, N);
    const TruncatedSeries dy = F.series().derivative("y");
    const TruncatedSeries at = dy.substitute({{"x", T}, {"y", zero}});
    return integrate(at.reciprocal());
}

// iota with F(x, iota(x)) = 0, solved degree by degree.
inline TruncatedSeries formal_inverse(const FormalGroupLaw &F)
{
    const Ring &r = F.ring();
    const int N = F.degree();
    TruncatedSeries inv(r, detail::xonly(), N);
    inv.set_at(1, r->neg(r->one()));
    const auto x = detail::var(r, detail::xonly(), N, "x");
    for (int n = 2; n <= N; ++n) {
        const TruncatedSeries s = F(x, inv);
        inv.set_at(static_cast<std::size_t>(n), r->neg(s.coeff_at(static_cast<std::size_t>(n))));
    }
    return inv;
}

struct LogIsomorphism {
    TruncatedSeries h;
    std::optional<Monomial> intertwining_defect;
};

// h = exp_2 o log_1, with h(F1(x,y)) = F2(h(x),h(y)) re-checked.
inline LogIsomorphism isomorphism_via_logs(const FormalGroupLaw &F1, const FormalGroupLaw &F2)
{
    F1.series().require_same_shape(F2.series());
    const TruncatedSeries l1 = logarithm(F1);
    const TruncatedSeries e2 = logarithm(F2).compositional_inverse();
    LogIsomorphism out{e2.compose(l1), std::nullopt};
    const Ring &r = F1.ring();
    const int N = F1.degree();
    const auto x = detail::var(r, detail::xy(), N, "x");
    const auto y = detail::var(r, detail::xy(), N, "y");
    const auto hx = out.h.substitute({{"T", x}});
    const auto hy = out.h.substitute({{"T", y}});
    out.intertwining_defect = out.h.substitute({{"T", F1(x, y)}}).first_difference(F2(hx, hy));
    return out;
}

// One assigned endomorphism [m]. Entries of monoid actions carry a monoid
// element; entries coming from ring elements carry the scalar itself and,
// when the series was computed at higher precision, the exact lift used.
struct ActionEntry {
    std::string label;
    TruncatedSeries series;
    std::optional<MonoidElement> element;
    std::optional<RingElement> scalar;
    std::optional<RingElement> lift;
};

struct MonoidAction {
    FormalGroupLaw law;
    Monoid monoid;
    std::vector<ActionEntry> entries;

    const ActionEntry *find(const MonoidElement &m) const
    {
        for (const auto &e : entries) {
            if (e.element && *e.element == m) {
                return &e;
            }
        }
        return nullptr;
    }

    const ActionEntry *find_scalar(const RingElement &a) const
    {
        for (const auto &e : entries) {
            if (e.scalar && *e.scalar == a) {
                return &e;
            }
        }
        return nullptr;
    }

    const ActionEntry *find_lift(const RingElement &a) const
    {
        for (const auto &e : entries) {
            if (e.lift && *e.lift == a) {
                return &e;
            }
        }
        return nullptr;
    }

    // [m] for any element: the assigned series, or for free monoids the
    // composite of generator series in canonical order.
    TruncatedSeries endomorphism(const MonoidElement &m) const
    {
        if (const auto *e = find(m)) {
            return e->series;
        }
        if (monoid && monoid->kind() == MonoidKind::free_commutative) {
            TruncatedSeries s = TruncatedSeries::variable(law.ring(), detail::xonly(), law.degree(), "x");
            for (std::size_t i = 0; i < m.exponents.size(); ++i) {
                const ActionEntry *g = find(monoid->generator(i));
                if (!g && m.exponents[i] > 0) {
                    throw InvalidInput("no series assigned to generator " + monoid->generator_names()[i]);
                }
                for (std::uint32_t k = 0; k < m.exponents[i]; ++k) {
                    s = g->series.compose(s);
                }
            }
            return s;
        }
        throw InvalidInput("no series assigned to " + (monoid ? monoid->to_string(m) : std::string("element")));
    }
};

struct ActionViolation {
    std::string identity;
    std::string elements;
    std::string monomial;
};

struct ActionReport {
    std::vector<ActionViolation> violations;
    std::size_t checks = 0;
    bool passed() const { return violations.empty(); }
};

inline Value linear_coefficient(const TruncatedSeries &s) { return s.coeff_at(1); }

inline ActionReport verify_action(const MonoidAction &A)
{
    ActionReport rep;
    const Ring &r = A.law.ring();
    const int N = A.law.degree();
    const auto x = detail::var(r, detail::xonly(), N, "x");
    auto note = [&](const std::string &id, const std::string &els, const std::vector<std::string> &vars,
                    const std::optional<Monomial> &m) {
        ++rep.checks;
        if (m) {
            rep.violations.push_back({id, els, monomial_string(vars, *m)});
        }
    };
    if (!A.law.axioms().passed()) {
        for (const auto &c : A.law.axioms().checks) {
            if (!c.passed) {
                rep.violations.push_back({c.axiom, "F", c.failure_monomial()});
            }
        }
    }
    for (const auto &e : A.entries) {
        if (!e.series.has_zero_constant_term()) {
            rep.violations.push_back({"zero-constant-term", e.label, "1"});
            continue;
        }
        note("endomorphism", e.label, detail::xy(), endomorphism_defect(A.law, e.series));
        if (e.scalar) {
            ++rep.checks;
            if (!r->equal(linear_coefficient(e.series), e.scalar->value())) {
                rep.violations.push_back({"linear-coefficient", e.label, "x"});
            }
        }
        const bool is_one = (e.element && A.monoid && A.monoid->is_identity(*e.element)) || (e.scalar && e.scalar->is_one());
        if (is_one) {
            note("identity", e.label, detail::xonly(), e.series.first_difference(x));
        }
    }
    const bool all_free = A.monoid && A.monoid->kind() == MonoidKind::free_commutative;
    for (std::size_t i = 0; i < A.entries.size(); ++i) {
        for (std::size_t j = i; j < A.entries.size(); ++j) {
            const auto &a = A.entries[i];
            const auto &b = A.entries[j];
            const std::string pair = a.label + "," + b.label;
            const TruncatedSeries ab = a.series.compose(b.series);
            const TruncatedSeries ba = b.series.compose(a.series);
            note("commutation", pair, detail::xonly(), ab.first_difference(ba));
            const ActionEntry *prod = nullptr;
            if (a.lift && b.lift) {
                prod = A.find_lift(*a.lift * *b.lift);
            } else if (a.scalar && b.scalar) {
                prod = A.find_scalar(*a.scalar * *b.scalar);
            } else if (a.element && b.element && !all_free) {
                prod = A.find(A.monoid->mul(*a.element, *b.element));
            }
            if (prod) {
                note("composition", pair + "->" + prod->label, detail::xonly(), ab.first_difference(prod->series));
                ++rep.checks;
                if (!r->equal(r->mul(linear_coefficient(a.series), linear_coefficient(b.series)), linear_coefficient(prod->series))) {
                    rep.violations.push_back({"alpha1-multiplicative", pair, "x"});
                }
            }
        }
    }
    return rep;
}

} // namespace fgl
