#pragma once

// Commutative monoids: free on named generators, finite ones given by an
// explicit multiplication table, and finite-level truncations of the
// multiplicative monoid of a p-adic ring of integers.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ring.hpp"

namespace fgl
{

class StructureMismatch : public Error
{
public:
    using Error::Error;
};

enum class MonoidKind { free_commutative, finite_presented, padic_truncation };

class MonoidPresentation;
using Monoid = std::shared_ptr<const MonoidPresentation>;

// Free monoids use `exponents`; finite monoids use `index`.
struct MonoidElement {
    Monoid monoid;
    std::vector<std::uint32_t> exponents;
    std::size_t index = 0;

    friend bool operator==(const MonoidElement &a, const MonoidElement &b)
    {
        return a.monoid == b.monoid && a.exponents == b.exponents && a.index == b.index;
    }
    friend bool operator!=(const MonoidElement &a, const MonoidElement &b) { return !(a == b); }
};

// Finite abelian group as invariant factors d_1 | d_2 | ... with a generator
// (a unit index) for each factor.
struct UnitGroupStructure {
    std::vector<std::uint64_t> invariant_factors;
    std::vector<std::size_t> generators;
    std::uint64_t order = 1;
};

class MonoidPresentation : public std::enable_shared_from_this<MonoidPresentation>
{
public:
    MonoidKind kind() const { return kind_; }
    const std::vector<std::string> &generator_names() const { return gens_; }
    bool is_finite() const { return kind_ != MonoidKind::free_commutative; }

    // Number of elements (finite monoids only).
    std::size_t size() const
    {
        if (!is_finite()) {
            throw UnsupportedOperation("free monoids are infinite");
        }
        return kind_ == MonoidKind::finite_presented ? names_.size() : units_.size() * static_cast<std::size_t>(V_) + 1;
    }

    MonoidElement identity() const
    {
        if (kind_ == MonoidKind::free_commutative) {
            return {self(), std::vector<std::uint32_t>(gens_.size(), 0), 0};
        }
        if (kind_ == MonoidKind::finite_presented) {
            return {self(), {}, identity_};
        }
        return element(0, one_unit_);
    }

    MonoidElement element_at(std::size_t i) const
    {
        if (i >= size()) {
            throw InvalidInput("monoid element index out of range");
        }
        return {self(), {}, i};
    }

    std::vector<MonoidElement> elements() const
    {
        std::vector<MonoidElement> out;
        for (std::size_t i = 0; i < size(); ++i) {
            out.push_back(element_at(i));
        }
        return out;
    }

    MonoidElement generator(std::size_t i) const
    {
        if (i >= gens_.size()) {
            throw InvalidInput("monoid generator index out of range");
        }
        if (kind_ == MonoidKind::free_commutative) {
            std::vector<std::uint32_t> e(gens_.size(), 0);
            e[i] = 1;
            return {self(), std::move(e), 0};
        }
        return {self(), {}, gen_index_[i]};
    }

    MonoidElement generator(const std::string &name) const
    {
        const auto it = std::find(gens_.begin(), gens_.end(), name);
        if (it == gens_.end()) {
            throw InvalidInput("unknown monoid generator '" + name + "'");
        }
        return generator(static_cast<std::size_t>(it - gens_.begin()));
    }

    MonoidElement from_exponents(std::vector<std::uint32_t> e) const
    {
        if (kind_ == MonoidKind::free_commutative) {
            if (e.size() != gens_.size()) {
                throw InvalidInput("exponent vector has the wrong length");
            }
            return {self(), std::move(e), 0};
        }
        MonoidElement r = identity();
        for (std::size_t i = 0; i < e.size() && i < gens_.size(); ++i) {
            for (std::uint32_t k = 0; k < e[i]; ++k) {
                r = mul(r, generator(i));
            }
        }
        return r;
    }

    MonoidElement mul(const MonoidElement &a, const MonoidElement &b) const
    {
        if (a.monoid.get() != this || b.monoid.get() != this) {
            throw ContextMismatch("monoid element from a different presentation");
        }
        switch (kind_) {
        case MonoidKind::free_commutative: {
            std::vector<std::uint32_t> e(gens_.size());
            for (std::size_t i = 0; i < e.size(); ++i) {
                e[i] = a.exponents[i] + b.exponents[i];
            }
            return {self(), std::move(e), 0};
        }
        case MonoidKind::finite_presented:
            return {self(), {}, table_[a.index * names_.size() + b.index]};
        case MonoidKind::padic_truncation:
            return {self(), {}, mul_index(a.index, b.index)};
        }
        return {};
    }

    bool is_identity(const MonoidElement &a) const { return a == identity(); }

    std::string to_string(const MonoidElement &a) const
    {
        switch (kind_) {
        case MonoidKind::free_commutative: {
            std::string out;
            for (std::size_t i = 0; i < gens_.size(); ++i) {
                if (a.exponents[i] == 0) {
                    continue;
                }
                if (!out.empty()) {
                    out += "*";
                }
                out += gens_[i];
                if (a.exponents[i] > 1) {
                    out += "^" + std::to_string(a.exponents[i]);
                }
            }
            return out.empty() ? "1" : out;
        }
        case MonoidKind::finite_presented:
            return names_[a.index];
        case MonoidKind::padic_truncation:
            if (is_bottom(a)) {
                return "bottom";
            }
            return "(" + std::to_string(valuation_of(a)) + "," + ring_n_->to_string(units_[unit_of(a)]) + ")";
        }
        return {};
    }

    // Element name as used for variable names and JSON keys.
    std::string element_label(const MonoidElement &a) const
    {
        if (kind_ == MonoidKind::padic_truncation) {
            if (is_bottom(a)) {
                return "bottom";
            }
            std::string u;
            for (const auto &c : ring_n_->coordinates(units_[unit_of(a)])) {
                u += (u.empty() ? "" : ".") + c.get_str();
            }
            return "v" + std::to_string(valuation_of(a)) + "u" + u;
        }
        return to_string(a);
    }

    const std::vector<std::string> &element_names() const { return names_; }
    const std::vector<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>> &relations() const
    {
        return relations_;
    }

    // --- p-adic truncation --------------------------------------------------

    const Ring &lift_ring() const { return ring_; }
    const Ring &unit_ring() const { return ring_n_; }
    int unit_level() const { return n_; }
    int valuation_cap() const { return V_; }
    std::size_t unit_count() const { return units_.size(); }
    const Value &unit_value(std::size_t i) const { return units_[i]; }
    std::size_t one_unit() const { return one_unit_; }

    bool is_bottom(const MonoidElement &a) const
    {
        return kind_ == MonoidKind::padic_truncation && a.index == units_.size() * static_cast<std::size_t>(V_);
    }
    MonoidElement bottom() const
    {
        require_padic();
        return {self(), {}, units_.size() * static_cast<std::size_t>(V_)};
    }
    MonoidElement element(int v, std::size_t unit) const
    {
        require_padic();
        if (v < 0 || v >= V_ || unit >= units_.size()) {
            throw InvalidInput("truncated monoid coordinates out of range");
        }
        return {self(), {}, static_cast<std::size_t>(v) * units_.size() + unit};
    }
    int valuation_of(const MonoidElement &a) const
    {
        require_padic();
        return static_cast<int>(a.index / units_.size());
    }
    std::size_t unit_of(const MonoidElement &a) const
    {
        require_padic();
        return a.index % units_.size();
    }

    std::optional<std::size_t> unit_index(const Value &u_at_level) const
    {
        const auto it = unit_lookup_.find(ring_n_->coordinates(u_at_level));
        if (it == unit_lookup_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    // Class of a nonzero ring element: (valuation, unit part mod m^n), or
    // bottom when the valuation reaches the cap. Zero has no class.
    std::optional<MonoidElement> classify(const RingElement &a) const
    {
        require_padic();
        const Ring &r = a.ring();
        if (r->kind() != ring_->kind() || r->p() != ring_->p() || r->eisenstein_polynomial() != ring_->eisenstein_polynomial()) {
            throw ContextMismatch("cannot classify " + r->descriptor() + " element in a truncation of " + ring_->descriptor());
        }
        const auto v = r->valuation(a.value());
        if (!v) {
            return std::nullopt;
        }
        if (*v >= V_) {
            return bottom();
        }
        if (r->precision() - *v < n_) {
            throw InvalidInput("precision " + std::to_string(r->precision()) + " too small to classify an element of valuation " +
                               std::to_string(*v) + " at unit level " + std::to_string(n_));
        }
        const RingElement unit{r, r->divide_by_uniformizer(a.value(), *v)};
        const RingElement reduced = change_precision(unit, ring_n_);
        return element(*v, *unit_index(reduced.value()));
    }

    // Canonical lift pi^v * u with u the smallest coordinate representative.
    RingElement lift(const MonoidElement &a, const Ring &target) const
    {
        require_padic();
        if (is_bottom(a)) {
            throw InvalidInput("the absorbing element has no canonical lift");
        }
        const RingElement u = change_precision(RingElement{ring_n_, units_[unit_of(a)]}, target);
        return pow(uniformizer(target), static_cast<unsigned>(valuation_of(a))) * u;
    }

    std::size_t unit_mul(std::size_t a, std::size_t b) const
    {
        if (!unit_table_.empty()) {
            return unit_table_[a * units_.size() + b];
        }
        return *unit_index(ring_n_->mul(units_[a], units_[b]));
    }

    std::size_t unit_pow(std::size_t a, std::uint64_t k) const
    {
        std::size_t r = one_unit_;
        std::size_t base = a;
        while (k > 0) {
            if (k & 1u) {
                r = unit_mul(r, base);
            }
            k >>= 1u;
            if (k > 0) {
                base = unit_mul(base, base);
            }
        }
        return r;
    }

    std::uint64_t unit_order(std::size_t a) const
    {
        std::uint64_t k = 1;
        for (std::size_t x = a; x != one_unit_; x = unit_mul(x, a)) {
            ++k;
        }
        return k;
    }

private:
    friend Monoid free_monoid(std::vector<std::string> generators);
    friend Monoid finite_monoid(std::vector<std::string> names, std::vector<std::size_t> table, std::vector<std::string> generators,
                                std::vector<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>> relations);
    friend Monoid padic_truncation_of(const Ring &ring, int n, int V);

    MonoidPresentation() = default;

    Monoid self() const { return shared_from_this(); }

    void require_padic() const
    {
        if (kind_ != MonoidKind::padic_truncation) {
            throw UnsupportedOperation("operation needs a p-adic truncation monoid");
        }
    }

    std::size_t mul_index(std::size_t a, std::size_t b) const
    {
        const std::size_t U = units_.size();
        const std::size_t bot = U * static_cast<std::size_t>(V_);
        if (a == bot || b == bot) {
            return bot;
        }
        const std::size_t v = a / U + b / U;
        if (v >= static_cast<std::size_t>(V_)) {
            return bot;
        }
        return v * U + unit_mul(a % U, b % U);
    }

    MonoidKind kind_ = MonoidKind::free_commutative;
    std::vector<std::string> gens_;
    // finite presented
    std::vector<std::string> names_;
    std::vector<std::size_t> table_;
    std::size_t identity_ = 0;
    std::vector<std::size_t> gen_index_;
    std::vector<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>> relations_;
    // p-adic truncation
    Ring ring_;
    Ring ring_n_;
    int n_ = 0;
    int V_ = 0;
    std::vector<Value> units_;
    std::map<std::vector<mpz_class>, std::size_t> unit_lookup_;
    std::vector<std::uint32_t> unit_table_;
    std::size_t one_unit_ = 0;
};

inline Monoid free_monoid(std::vector<std::string> generators)
{
    for (std::size_t i = 0; i < generators.size(); ++i) {
        for (std::size_t j = i + 1; j < generators.size(); ++j) {
            if (generators[i] == generators[j]) {
                throw InvalidInput("duplicate generator '" + generators[i] + "'");
            }
        }
    }
    auto m = std::shared_ptr<MonoidPresentation>(new MonoidPresentation());
    m->kind_ = MonoidKind::free_commutative;
    m->gens_ = std::move(generators);
    return m;
}

// Finite commutative monoid from its multiplication table (row-major,
// entries are element indices). `generators` name a generating subset.
inline Monoid finite_monoid(std::vector<std::string> names, std::vector<std::size_t> table, std::vector<std::string> generators,
                            std::vector<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>> relations = {})
{
    const std::size_t n = names.size();
    if (n == 0 || table.size() != n * n) {
        throw InvalidInput("multiplication table must be n x n for n named elements");
    }
    if (n > 10000) {
        throw InvalidInput("finite monoids are limited to 10^4 elements");
    }
    for (const auto t : table) {
        if (t >= n) {
            throw InvalidInput("multiplication table entry out of range");
        }
    }
    std::optional<std::size_t> identity;
    for (std::size_t e = 0; e < n && !identity; ++e) {
        bool ok = true;
        for (std::size_t a = 0; a < n && ok; ++a) {
            ok = table[e * n + a] == a && table[a * n + e] == a;
        }
        if (ok) {
            identity = e;
        }
    }
    if (!identity) {
        throw InvalidInput("multiplication table has no identity");
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (table[a * n + b] != table[b * n + a]) {
                throw InvalidInput("multiplication table is not commutative at (" + names[a] + ", " + names[b] + ")");
            }
            for (std::size_t c = 0; c < n; ++c) {
                if (table[table[a * n + b] * n + c] != table[a * n + table[b * n + c]]) {
                    throw InvalidInput("multiplication table is not associative at (" + names[a] + ", " + names[b] + ", " +
                                       names[c] + ")");
                }
            }
        }
    }
    auto m = std::shared_ptr<MonoidPresentation>(new MonoidPresentation());
    m->kind_ = MonoidKind::finite_presented;
    for (const auto &g : generators) {
        const auto it = std::find(names.begin(), names.end(), g);
        if (it == names.end()) {
            throw InvalidInput("generator '" + g + "' is not an element name");
        }
        m->gen_index_.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    // Every element must be a product of generators.
    std::vector<bool> reached(n, false);
    std::vector<std::size_t> frontier{*identity};
    reached[*identity] = true;
    while (!frontier.empty()) {
        const std::size_t x = frontier.back();
        frontier.pop_back();
        for (const auto g : m->gen_index_) {
            const std::size_t y = table[x * n + g];
            if (!reached[y]) {
                reached[y] = true;
                frontier.push_back(y);
            }
        }
    }
    if (std::find(reached.begin(), reached.end(), false) != reached.end()) {
        throw InvalidInput("listed generators do not generate the monoid");
    }
    m->gens_ = std::move(generators);
    m->names_ = std::move(names);
    m->table_ = std::move(table);
    m->identity_ = *identity;
    m->relations_ = std::move(relations);
    return m;
}

// {1, a, ..., a^(k-1)} with a^k = a^(k-1): a cyclic monoid whose top power absorbs.
inline Monoid truncated_cyclic_monoid(const std::string &name, std::size_t k)
{
    if (k < 1) {
        throw InvalidInput("truncated cyclic monoid needs k >= 1");
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < k; ++i) {
        names.push_back(i == 0 ? "1" : (i == 1 ? name : name + "^" + std::to_string(i)));
    }
    std::vector<std::size_t> table(k * k);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            table[a * k + b] = std::min(a + b, k - 1);
        }
    }
    std::vector<std::uint32_t> lhs{static_cast<std::uint32_t>(k)}, rhs{static_cast<std::uint32_t>(k - 1)};
    return finite_monoid(std::move(names), std::move(table), k > 1 ? std::vector<std::string>{name} : std::vector<std::string>{},
                         {{lhs, rhs}});
}

// Cyclic group of order k on one generator.
inline Monoid cyclic_group_monoid(const std::string &name, std::size_t k)
{
    std::vector<std::string> names;
    for (std::size_t i = 0; i < k; ++i) {
        names.push_back(i == 0 ? "1" : (i == 1 ? name : name + "^" + std::to_string(i)));
    }
    std::vector<std::size_t> table(k * k);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            table[a * k + b] = (a + b) % k;
        }
    }
    std::vector<std::uint32_t> lhs{static_cast<std::uint32_t>(k)}, rhs{0};
    return finite_monoid(std::move(names), std::move(table), k > 1 ? std::vector<std::string>{name} : std::vector<std::string>{},
                         {{lhs, rhs}});
}

// Rees quotient of the nonzero elements of O (given as Z_p or an Eisenstein
// extension) at unit level n and valuation cap V.
inline Monoid padic_truncation_of(const Ring &ring, int n, int V)
{
    if (!ring || !ring->is_padic()) {
        throw InvalidInput("p-adic truncation needs a Z_p or Eisenstein context");
    }
    if (n < 1 || V < 1) {
        throw InvalidInput("unit level and valuation cap must be at least 1");
    }
    if (ring->precision() < n) {
        throw InvalidInput("precision " + std::to_string(ring->precision()) + " cannot represent O/m^" + std::to_string(n));
    }
    auto m = std::shared_ptr<MonoidPresentation>(new MonoidPresentation());
    m->kind_ = MonoidKind::padic_truncation;
    m->ring_ = ring;
    m->ring_n_ = with_precision(ring, n);
    m->n_ = n;
    m->V_ = V;
    const Ring &rn = m->ring_n_;
    const int e = rn->degree();
    std::vector<std::uint64_t> radix(e);
    std::uint64_t total = 1;
    for (int i = 0; i < e; ++i) {
        radix[i] = rn->coordinate_modulus(i);
        total *= radix[i];
    }
    if (total > 200000) {
        throw InvalidInput("O/m^" + std::to_string(n) + " is too large to enumerate");
    }
    // Lexicographic enumeration with the constant coordinate most significant.
    std::vector<std::uint64_t> digits(e, 0);
    for (std::uint64_t it = 0; it < total; ++it) {
        std::uint64_t rest = it;
        for (int i = e - 1; i >= 0; --i) {
            digits[i] = rest % radix[i];
            rest /= radix[i];
        }
        if (digits[0] % ring->p() == 0) {
            continue;
        }
        std::vector<mpz_class> coords;
        for (const auto d : digits) {
            coords.push_back(detail::u64_to_mpz(d));
        }
        const Value u = rn->from_coordinates(coords);
        m->unit_lookup_.emplace(rn->coordinates(u), m->units_.size());
        m->units_.push_back(u);
    }
    m->one_unit_ = m->unit_lookup_.at(rn->coordinates(rn->one()));
    const std::size_t U = m->units_.size();
    if (U <= 4096) {
        m->unit_table_.resize(U * U);
        for (std::size_t a = 0; a < U; ++a) {
            for (std::size_t b = a; b < U; ++b) {
                const auto c = static_cast<std::uint32_t>(m->unit_lookup_.at(rn->coordinates(rn->mul(m->units_[a], m->units_[b]))));
                m->unit_table_[a * U + b] = c;
                m->unit_table_[b * U + a] = c;
            }
        }
    }
    m->gens_ = {"pi"};
    return m;
}

namespace detail
{
inline std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n)
{
    std::vector<std::pair<std::uint64_t, int>> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        int k = 0;
        while (n % d == 0) {
            n /= d;
            ++k;
        }
        if (k > 0) {
            out.emplace_back(d, k);
        }
    }
    if (n > 1) {
        out.emplace_back(n, 1);
    }
    return out;
}
} // namespace detail

// Invariant factors of (O/m^n)^* with generators, by exhaustive search: a
// basis of each primary component is built greedily from elements of maximal
// order in successive quotients, then components are merged by CRT.
inline UnitGroupStructure unit_group_structure(const MonoidPresentation &M)
{
    if (M.kind() != MonoidKind::padic_truncation) {
        throw UnsupportedOperation("unit group structure needs a p-adic truncation monoid");
    }
    const std::size_t U = M.unit_count();
    const std::size_t one = M.one_unit();
    UnitGroupStructure out;
    out.order = U;
    // Per prime: cyclic orders (descending) and generators.
    std::vector<std::vector<std::pair<std::uint64_t, std::size_t>>> primary;
    for (const auto &[ell, k] : detail::factorize(U)) {
        std::uint64_t ell_k = 1;
        for (int i = 0; i < k; ++i) {
            ell_k *= ell;
        }
        const std::uint64_t cofactor = U / ell_k;
        std::vector<bool> in_p(U, false);
        std::vector<std::size_t> P;
        for (std::size_t x = 0; x < U; ++x) {
            const std::size_t y = M.unit_pow(x, cofactor);
            if (!in_p[y]) {
                in_p[y] = true;
                P.push_back(y);
            }
        }
        std::sort(P.begin(), P.end());
        std::vector<bool> in_h(U, false);
        in_h[one] = true;
        std::vector<std::size_t> H{one};
        std::vector<std::pair<std::uint64_t, std::size_t>> basis;
        auto quotient_order = [&](std::size_t x) {
            std::uint64_t ord = 1;
            std::size_t y = x;
            while (!in_h[y]) {
                y = M.unit_pow(y, ell);
                ord *= ell;
            }
            return std::pair{ord, y};
        };
        while (H.size() < P.size()) {
            std::size_t best = one;
            std::uint64_t best_ord = 1;
            for (const auto x : P) {
                const auto ord = quotient_order(x).first;
                if (ord > best_ord) {
                    best_ord = ord;
                    best = x;
                }
            }
            // x^ord lies in H; since ord is maximal it is an ord-th power of
            // some h in H, and x * h^-1 has order exactly ord.
            const std::size_t target = quotient_order(best).second;
            std::size_t correction = one;
            for (const auto h : H) {
                if (M.unit_pow(h, best_ord) == target) {
                    correction = h;
                    break;
                }
            }
            const std::size_t g = M.unit_mul(best, M.unit_pow(correction, M.unit_order(correction) - 1));
            basis.emplace_back(best_ord, g);
            std::vector<std::size_t> next;
            std::vector<bool> in_next(U, false);
            for (const auto h : H) {
                std::size_t y = h;
                for (std::uint64_t i = 0; i < best_ord; ++i) {
                    if (!in_next[y]) {
                        in_next[y] = true;
                        next.push_back(y);
                    }
                    y = M.unit_mul(y, g);
                }
            }
            H = std::move(next);
            in_h = std::move(in_next);
        }
        primary.push_back(std::move(basis));
    }
    std::size_t rank = 0;
    for (const auto &b : primary) {
        rank = std::max(rank, b.size());
    }
    // i-th largest factor combines the i-th largest of every prime.
    for (std::size_t i = 0; i < rank; ++i) {
        std::uint64_t d = 1;
        std::size_t g = one;
        for (const auto &b : primary) {
            if (i < b.size()) {
                d *= b[i].first;
                g = M.unit_mul(g, b[i].second);
            }
        }
        out.invariant_factors.push_back(d);
        out.generators.push_back(g);
    }
    if (rank == 1) {
        for (std::size_t x = 0; x < U; ++x) {
            if (M.unit_order(x) == out.invariant_factors[0]) {
                out.generators[0] = x;
                break;
            }
        }
    }
    std::reverse(out.invariant_factors.begin(), out.invariant_factors.end());
    std::reverse(out.generators.begin(), out.generators.end());
    return out;
}

// Morphism of monoids. Finite sources store the full element map; free
// sources store the images of their generators.
class MonoidMorphism
{
public:
    MonoidMorphism() = default;

    static MonoidMorphism from_table(Monoid source, Monoid target, std::vector<std::size_t> images)
    {
        if (!source->is_finite() || images.size() != source->size()) {
            throw InvalidInput("element map must cover the finite source");
        }
        MonoidMorphism m;
        m.source_ = std::move(source);
        m.target_ = std::move(target);
        m.table_ = std::move(images);
        return m;
    }

    static MonoidMorphism from_generators(Monoid source, Monoid target, std::vector<MonoidElement> images)
    {
        if (source->kind() != MonoidKind::free_commutative) {
            throw InvalidInput("generator images determine morphisms only from free monoids");
        }
        if (images.size() != source->generator_names().size()) {
            throw InvalidInput("one image per generator is required");
        }
        MonoidMorphism m;
        m.source_ = std::move(source);
        m.target_ = std::move(target);
        m.gen_images_ = std::move(images);
        return m;
    }

    const Monoid &source() const { return source_; }
    const Monoid &target() const { return target_; }

    MonoidElement operator()(const MonoidElement &a) const
    {
        if (!table_.empty()) {
            if (target_->is_finite()) {
                return target_->element_at(table_[a.index]);
            }
            throw UnsupportedOperation("finite-to-free morphisms are not supported");
        }
        MonoidElement r = target_->identity();
        for (std::size_t i = 0; i < a.exponents.size(); ++i) {
            for (std::uint32_t k = 0; k < a.exponents[i]; ++k) {
                r = target_->mul(r, gen_images_[i]);
            }
        }
        return r;
    }

    // Exhaustive multiplicativity and identity check for finite sources;
    // free sources are multiplicative by construction. Returns the first
    // failing pair description.
    std::optional<std::string> verify() const
    {
        if (!(*this)(source_->identity()).monoid || (*this)(source_->identity()) != target_->identity()) {
            return "identity is not preserved";
        }
        if (!source_->is_finite()) {
            return std::nullopt;
        }
        const std::size_t n = source_->size();
        for (std::size_t a = 0; a < n; ++a) {
            const auto ea = source_->element_at(a);
            const auto fa = (*this)(ea);
            for (std::size_t b = a; b < n; ++b) {
                const auto eb = source_->element_at(b);
                if ((*this)(source_->mul(ea, eb)) != target_->mul(fa, (*this)(eb))) {
                    return "not multiplicative at (" + source_->to_string(ea) + ", " + source_->to_string(eb) + ")";
                }
            }
        }
        return std::nullopt;
    }

    bool is_bijective() const
    {
        if (table_.empty() || !target_->is_finite() || target_->size() != table_.size()) {
            return false;
        }
        std::vector<bool> hit(table_.size(), false);
        for (const auto t : table_) {
            if (hit[t]) {
                return false;
            }
            hit[t] = true;
        }
        return true;
    }

    MonoidMorphism inverse() const
    {
        if (!is_bijective()) {
            throw UnsupportedOperation("only bijective finite morphisms can be inverted");
        }
        std::vector<std::size_t> inv(table_.size());
        for (std::size_t i = 0; i < table_.size(); ++i) {
            inv[table_[i]] = i;
        }
        return from_table(target_, source_, std::move(inv));
    }

    const std::vector<std::size_t> &table() const { return table_; }

private:
    Monoid source_;
    Monoid target_;
    std::vector<std::size_t> table_;
    std::vector<MonoidElement> gen_images_;
};

inline MonoidMorphism identity_morphism(const Monoid &M)
{
    if (M->is_finite()) {
        std::vector<std::size_t> t(M->size());
        std::iota(t.begin(), t.end(), 0);
        return MonoidMorphism::from_table(M, M, std::move(t));
    }
    std::vector<MonoidElement> g;
    for (std::size_t i = 0; i < M->generator_names().size(); ++i) {
        g.push_back(M->generator(i));
    }
    return MonoidMorphism::from_generators(M, M, std::move(g));
}

// Isomorphism of truncated monoids fixing the uniformizer class and sending
// the i-th invariant-factor generator of M1 to the `twist[i]`-th power of the
// i-th generator of M2 (twists must be coprime to the factor).
inline MonoidMorphism build_monoid_isomorphism(const Monoid &M1, const Monoid &M2, std::vector<std::uint64_t> twist = {})
{
    if (M1->kind() != MonoidKind::padic_truncation || M2->kind() != MonoidKind::padic_truncation) {
        throw StructureMismatch("isomorphisms are built between p-adic truncations only");
    }
    if (M1->valuation_cap() != M2->valuation_cap()) {
        throw StructureMismatch("valuation caps differ: " + std::to_string(M1->valuation_cap()) + " vs " +
                                std::to_string(M2->valuation_cap()));
    }
    const auto s1 = unit_group_structure(*M1);
    const auto s2 = unit_group_structure(*M2);
    if (s1.invariant_factors != s2.invariant_factors) {
        throw StructureMismatch("unit groups have different invariant factors");
    }
    twist.resize(s1.generators.size(), 1);
    for (std::size_t i = 0; i < twist.size(); ++i) {
        if (std::gcd(twist[i], s1.invariant_factors[i]) != 1) {
            throw StructureMismatch("twist " + std::to_string(twist[i]) + " is not coprime to " +
                                    std::to_string(s1.invariant_factors[i]));
        }
    }
    const std::size_t U = M1->unit_count();
    std::vector<std::size_t> images2;
    for (std::size_t i = 0; i < s2.generators.size(); ++i) {
        images2.push_back(M2->unit_pow(s2.generators[i], twist[i]));
    }
    // Walk all exponent vectors of M1's basis, pairing products.
    std::vector<std::size_t> unit_map(U, U);
    std::vector<std::uint64_t> exps(s1.generators.size(), 0);
    std::size_t x1 = M1->one_unit(), x2 = M2->one_unit();
    std::function<void(std::size_t, std::size_t, std::size_t)> walk = [&](std::size_t i, std::size_t a, std::size_t b) {
        if (i == s1.generators.size()) {
            unit_map[a] = b;
            return;
        }
        for (std::uint64_t k = 0; k < s1.invariant_factors[i]; ++k) {
            walk(i + 1, a, b);
            a = M1->unit_mul(a, s1.generators[i]);
            b = M2->unit_mul(b, images2[i]);
        }
    };
    walk(0, x1, x2);
    if (std::find(unit_map.begin(), unit_map.end(), U) != unit_map.end()) {
        throw StructureMismatch("generator matching does not cover the unit group");
    }
    std::vector<std::size_t> table(M1->size());
    for (int v = 0; v < M1->valuation_cap(); ++v) {
        for (std::size_t u = 0; u < U; ++u) {
            table[M1->element(v, u).index] = M2->element(v, unit_map[u]).index;
        }
    }
    table[M1->bottom().index] = M2->bottom().index;
    auto iso = MonoidMorphism::from_table(M1, M2, std::move(table));
    if (!iso.is_bijective()) {
        throw StructureMismatch("generator matching is not bijective");
    }
    if (auto bad = iso.verify()) {
        throw StructureMismatch("generator matching fails: " + *bad);
    }
    return iso;
}

} // namespace fgl
