#pragma once

// Exact coefficient rings: Z, Q, Z_p/p^k, O_K/m^k for a totally ramified
// (Eisenstein) extension, and polynomial quotients over one of those.
//
// A RingContext owns all arithmetic. Values are plain payloads that only make
// sense together with the context that produced them; RingElement bundles the
// two for the public API, while series code keeps one context per series and
// operates on bare Values.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace fgl
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ContextMismatch : public Error
{
public:
    using Error::Error;
};

class InvalidInput : public Error
{
public:
    using Error::Error;
};

class UnsupportedOperation : public Error
{
public:
    using Error::Error;
};

class NotAUnit : public Error
{
public:
    explicit NotAUnit(const std::string &what, std::optional<int> valuation = {})
        : Error(what), valuation_(valuation)
    {
    }
    // Valuation of the offending element when the context has one.
    std::optional<int> valuation() const { return valuation_; }

private:
    std::optional<int> valuation_;
};

enum class RingKind { integers, rationals, padic_integers, eisenstein_extension, polynomial_quotient };

inline constexpr int kMaxEisensteinDegree = 8;

struct EisensteinCoords {
    std::array<std::uint64_t, kMaxEisensteinDegree> c{};
    friend bool operator==(const EisensteinCoords &, const EisensteinCoords &) = default;
};

using Scalar = std::variant<mpz_class, mpq_class, std::uint64_t, EisensteinCoords>;

using Monomial = std::vector<std::uint16_t>;

inline unsigned total_degree(const Monomial &m)
{
    return std::accumulate(m.begin(), m.end(), 0u);
}

// Degree first, then lexicographic with the first variable most significant.
struct DegLexLess {
    bool operator()(const Monomial &a, const Monomial &b) const
    {
        const auto da = total_degree(a), db = total_degree(b);
        if (da != db) {
            return da < db;
        }
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

using PolyTerms = std::map<Monomial, Scalar, DegLexLess>;

// Payload of a ring element. Scalar contexts use `s`; polynomial quotients use
// `poly` (nullptr is the zero polynomial).
struct Value {
    Scalar s;
    std::shared_ptr<const PolyTerms> poly;
};

class RingContext;
using Ring = std::shared_ptr<const RingContext>;

namespace detail
{

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    const std::uint64_t s = a + b;
    return s >= m ? s - m : s;
}

inline std::uint64_t submod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return a >= b ? a - b : a + (m - b);
}

inline std::optional<std::uint64_t> invmod(std::uint64_t a, std::uint64_t m)
{
    if (m == 1) {
        return 0;
    }
    __int128 t = 0, new_t = 1;
    __int128 r = m, new_r = a % m;
    while (new_r != 0) {
        const __int128 q = r / new_r;
        t -= q * new_t;
        std::swap(t, new_t);
        r -= q * new_r;
        std::swap(r, new_r);
    }
    if (r != 1) {
        return std::nullopt;
    }
    if (t < 0) {
        t += m;
    }
    return static_cast<std::uint64_t>(t);
}

inline int uvaluation(std::uint64_t x, std::uint64_t p)
{
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

inline bool is_prime(std::uint64_t p)
{
    if (p < 2) {
        return false;
    }
    for (std::uint64_t d = 2; d * d <= p; ++d) {
        if (p % d == 0) {
            return false;
        }
    }
    return true;
}

inline std::uint64_t mpz_mod_u64(const mpz_class &z, std::uint64_t m)
{
    mpz_class r;
    mpz_class mm;
    mpz_import(mm.get_mpz_t(), 1, 1, sizeof(m), 0, 0, &m);
    mpz_fdiv_r(r.get_mpz_t(), z.get_mpz_t(), mm.get_mpz_t());
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, r.get_mpz_t());
    return out;
}

inline mpz_class u64_to_mpz(std::uint64_t x)
{
    mpz_class z;
    mpz_import(z.get_mpz_t(), 1, 1, sizeof(x), 0, 0, &x);
    return z;
}

inline int mpz_padic_valuation(const mpz_class &z, std::uint64_t p)
{
    if (z == 0) {
        return 0;
    }
    mpz_class t = z;
    const mpz_class pp = u64_to_mpz(p);
    int v = 0;
    while (mpz_divisible_p(t.get_mpz_t(), pp.get_mpz_t())) {
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), pp.get_mpz_t());
        ++v;
    }
    return v;
}

} // namespace detail

// p-adic valuation of a nonzero rational; nullopt for zero.
inline std::optional<int> padic_valuation(const mpq_class &q, std::uint64_t p)
{
    if (q == 0) {
        return std::nullopt;
    }
    return detail::mpz_padic_valuation(q.get_num(), p) - detail::mpz_padic_valuation(q.get_den(), p);
}

class RingContext
{
public:
    RingKind kind() const { return kind_; }
    std::uint64_t p() const { return p_; }
    // Absolute precision k: elements live in O/m^k.
    int precision() const { return k_; }
    // Ramification degree e (1 for Z_p).
    int degree() const { return e_; }
    // Monic Eisenstein polynomial, coefficients from constant term upward.
    const std::vector<std::int64_t> &eisenstein_polynomial() const { return eis_; }
    std::uint64_t modulus() const { return modulus_; }
    std::uint64_t coordinate_modulus(int i) const { return coord_mod_[i]; }
    const Ring &base() const { return base_; }
    const std::vector<std::string> &variables() const { return vars_; }
    const std::vector<PolyTerms> &ideal() const { return ideal_; }
    const std::string &descriptor() const { return descriptor_; }

    bool is_padic() const
    {
        return kind_ == RingKind::padic_integers || kind_ == RingKind::eisenstein_extension;
    }
    bool is_polynomial() const { return kind_ == RingKind::polynomial_quotient; }

    std::optional<std::size_t> variable_index(const std::string &name) const
    {
        const auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it == vars_.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - vars_.begin());
    }

    // --- element construction -------------------------------------------

    Value zero() const { return from_integer(0); }
    Value one() const { return from_integer(1); }

    Value from_integer(const mpz_class &z) const
    {
        if (kind_ == RingKind::polynomial_quotient) {
            return poly_value(constant_terms(base_->from_integer(z).s));
        }
        return {scalar_from_integer(z), nullptr};
    }

    Value from_rational(const mpq_class &q) const
    {
        if (kind_ == RingKind::polynomial_quotient) {
            return poly_value(constant_terms(base_->from_rational(q).s));
        }
        return {scalar_from_rational(q), nullptr};
    }

    // Uniformizer of a p-adic context (p for Z_p, the root pi for extensions).
    Value uniformizer() const
    {
        if (kind_ == RingKind::padic_integers) {
            return {std::uint64_t{p_ % modulus_}, nullptr};
        }
        if (kind_ == RingKind::eisenstein_extension) {
            EisensteinCoords c;
            if (e_ > 1) {
                c.c[1] = 1 % coord_mod_[1];
            } else {
                c.c[0] = detail::submod(0, static_cast<std::uint64_t>(eis_[0] % static_cast<std::int64_t>(modulus_) + static_cast<std::int64_t>(modulus_)) % modulus_, modulus_) % coord_mod_[0];
            }
            return {c, nullptr};
        }
        throw UnsupportedOperation("uniformizer requires a p-adic context, got " + descriptor_);
    }

    // Element from coordinates in powers of pi (extensions) or a residue (Z_p).
    Value from_coordinates(const std::vector<mpz_class> &coords) const
    {
        if (kind_ == RingKind::padic_integers) {
            if (coords.size() != 1) {
                throw InvalidInput("Z_p element takes exactly one coordinate");
            }
            return {scalar_from_integer(coords[0]), nullptr};
        }
        if (kind_ != RingKind::eisenstein_extension) {
            throw UnsupportedOperation("coordinates need a p-adic context");
        }
        if (coords.size() > static_cast<std::size_t>(e_)) {
            throw InvalidInput("too many coordinates for extension of degree " + std::to_string(e_));
        }
        EisensteinCoords c;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            c.c[i] = detail::mpz_mod_u64(coords[i], coord_mod_[i]);
        }
        return {c, nullptr};
    }

    std::vector<mpz_class> coordinates(const Value &a) const
    {
        if (kind_ == RingKind::padic_integers) {
            return {detail::u64_to_mpz(std::get<std::uint64_t>(a.s))};
        }
        if (kind_ == RingKind::eisenstein_extension) {
            std::vector<mpz_class> out;
            const auto &c = std::get<EisensteinCoords>(a.s);
            for (int i = 0; i < e_; ++i) {
                out.push_back(detail::u64_to_mpz(c.c[i]));
            }
            return out;
        }
        throw UnsupportedOperation("coordinates need a p-adic context");
    }

    // Polynomial-quotient generator by name.
    Value variable(const std::string &name) const
    {
        if (kind_ != RingKind::polynomial_quotient) {
            throw UnsupportedOperation("variables only exist in polynomial quotients");
        }
        const auto idx = variable_index(name);
        if (!idx) {
            throw InvalidInput("unknown variable '" + name + "' in " + descriptor_);
        }
        Monomial m(vars_.size(), 0);
        m[*idx] = 1;
        PolyTerms t;
        t.emplace(std::move(m), base_->one().s);
        return poly_value(std::move(t));
    }

    Value from_terms(PolyTerms terms) const
    {
        if (kind_ != RingKind::polynomial_quotient) {
            throw UnsupportedOperation("term lists only exist in polynomial quotients");
        }
        return poly_value(std::move(terms));
    }

    // --- arithmetic -------------------------------------------------------

    Value add(const Value &a, const Value &b) const
    {
        if (kind_ == RingKind::polynomial_quotient) {
            return poly_value(poly_add(terms_of(a), terms_of(b)), false);
        }
        return {scalar_add(a.s, b.s), nullptr};
    }

    Value neg(const Value &a) const
    {
        if (kind_ == RingKind::polynomial_quotient) {
            PolyTerms t = terms_of(a);
            for (auto &[m, c] : t) {
                c = base_->scalar_neg(c);
            }
            return poly_value(std::move(t), false);
        }
        return {scalar_neg(a.s), nullptr};
    }

    Value sub(const Value &a, const Value &b) const { return add(a, neg(b)); }

    Value mul(const Value &a, const Value &b) const
    {
        if (kind_ == RingKind::polynomial_quotient) {
            return poly_value(poly_mul(terms_of(a), terms_of(b)));
        }
        return {scalar_mul(a.s, b.s), nullptr};
    }

    Value pow(Value a, unsigned n) const
    {
        Value r = one();
        while (n > 0) {
            if (n & 1u) {
                r = mul(r, a);
            }
            n >>= 1u;
            if (n > 0) {
                a = mul(a, a);
            }
        }
        return r;
    }

    bool is_zero(const Value &a) const
    {
        if (kind_ == RingKind::polynomial_quotient) {
            return !a.poly || a.poly->empty();
        }
        return scalar_is_zero(a.s);
    }

    bool equal(const Value &a, const Value &b) const
    {
        if (kind_ == RingKind::polynomial_quotient) {
            return terms_of(a) == terms_of(b);
        }
        return a.s == b.s;
    }

    // Multiplicative inverse; throws NotAUnit.
    Value invert(const Value &a) const
    {
        if (kind_ == RingKind::polynomial_quotient) {
            return poly_invert(a);
        }
        return {scalar_invert(a.s), nullptr};
    }

    // a / b when the quotient exists in this context. For p-adic contexts this
    // needs v(a) >= v(b); the result is exact for the stored representatives,
    // so its top v(b) digits carry no information.
    std::optional<Value> try_divide(const Value &a, const Value &b) const
    {
        if (kind_ == RingKind::polynomial_quotient) {
            return poly_try_divide(a, b);
        }
        auto s = scalar_try_divide(a.s, b.s);
        if (!s) {
            return std::nullopt;
        }
        return Value{std::move(*s), nullptr};
    }

    // Largest v with a in m^v, normalized so v(pi) = 1; nullopt for zero.
    std::optional<int> valuation(const Value &a) const
    {
        switch (kind_) {
        case RingKind::padic_integers: {
            const auto r = std::get<std::uint64_t>(a.s);
            if (r == 0) {
                return std::nullopt;
            }
            return detail::uvaluation(r, p_);
        }
        case RingKind::eisenstein_extension: {
            const auto &c = std::get<EisensteinCoords>(a.s);
            std::optional<int> v;
            for (int i = 0; i < e_; ++i) {
                if (c.c[i] != 0) {
                    const int vi = e_ * detail::uvaluation(c.c[i], p_) + i;
                    if (!v || vi < *v) {
                        v = vi;
                    }
                }
            }
            return v;
        }
        default:
            throw UnsupportedOperation("valuation requires a p-adic context, got " + descriptor_);
        }
    }

    // a / pi^n for v(a) >= n (p-adic contexts only).
    Value divide_by_uniformizer(Value a, int n) const
    {
        for (int i = 0; i < n; ++i) {
            a = divide_by_uniformizer_once(a);
        }
        return a;
    }

    std::string to_string(const Value &a) const
    {
        switch (kind_) {
        case RingKind::integers:
            return std::get<mpz_class>(a.s).get_str();
        case RingKind::rationals:
            return std::get<mpq_class>(a.s).get_str();
        case RingKind::padic_integers:
            return std::to_string(std::get<std::uint64_t>(a.s));
        case RingKind::eisenstein_extension: {
            const auto &c = std::get<EisensteinCoords>(a.s);
            std::string out;
            for (int i = 0; i < e_; ++i) {
                if (c.c[i] == 0) {
                    continue;
                }
                if (!out.empty()) {
                    out += " + ";
                }
                const std::string power = i == 1 ? "pi" : "pi^" + std::to_string(i);
                if (i == 0) {
                    out += std::to_string(c.c[i]);
                } else if (c.c[i] == 1) {
                    out += power;
                } else {
                    out += std::to_string(c.c[i]) + "*" + power;
                }
            }
            return out.empty() ? "0" : out;
        }
        case RingKind::polynomial_quotient:
            return poly_to_string(terms_of(a));
        }
        return {};
    }

    // --- polynomial-quotient helpers ---------------------------------------

    const PolyTerms &terms_of(const Value &a) const
    {
        static const PolyTerms empty;
        return a.poly ? *a.poly : empty;
    }

    // Reduce a term map against the ideal generators. A term is rewritten when
    // some generator's leading monomial divides it and its leading coefficient
    // divides the term coefficient in the base ring. No completion is done.
    PolyTerms reduce(PolyTerms t) const
    {
        if (leading_.empty()) {
            return t;
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto it = t.rbegin(); it != t.rend(); ++it) {
                const Monomial mono = it->first;
                const Scalar coeff = it->second;
                for (std::size_t g = 0; g < ideal_.size(); ++g) {
                    const auto &[lm, lc] = leading_[g];
                    if (!divides(lm, mono)) {
                        continue;
                    }
                    auto q = base_->scalar_try_divide(coeff, lc);
                    if (!q) {
                        continue;
                    }
                    Monomial shift(mono.size());
                    for (std::size_t i = 0; i < mono.size(); ++i) {
                        shift[i] = static_cast<std::uint16_t>(mono[i] - lm[i]);
                    }
                    PolyTerms sub;
                    for (const auto &[gm, gc] : ideal_[g]) {
                        Monomial prod(gm.size());
                        for (std::size_t i = 0; i < gm.size(); ++i) {
                            prod[i] = static_cast<std::uint16_t>(gm[i] + shift[i]);
                        }
                        sub.emplace(std::move(prod), base_->scalar_neg(base_->scalar_mul(gc, *q)));
                    }
                    t = poly_add(t, sub);
                    changed = true;
                    break;
                }
                if (changed) {
                    break;
                }
            }
        }
        return t;
    }

    PolyTerms poly_add(const PolyTerms &a, const PolyTerms &b) const
    {
        PolyTerms out = a;
        for (const auto &[m, c] : b) {
            auto it = out.find(m);
            if (it == out.end()) {
                out.emplace(m, c);
            } else {
                it->second = base_->scalar_add(it->second, c);
                if (base_->scalar_is_zero(it->second)) {
                    out.erase(it);
                }
            }
        }
        return out;
    }

    PolyTerms poly_mul(const PolyTerms &a, const PolyTerms &b) const
    {
        PolyTerms out;
        for (const auto &[ma, ca] : a) {
            for (const auto &[mb, cb] : b) {
                Monomial m(ma.size());
                for (std::size_t i = 0; i < m.size(); ++i) {
                    m[i] = static_cast<std::uint16_t>(ma[i] + mb[i]);
                }
                Scalar c = base_->scalar_mul(ca, cb);
                auto it = out.find(m);
                if (it == out.end()) {
                    if (!base_->scalar_is_zero(c)) {
                        out.emplace(std::move(m), std::move(c));
                    }
                } else {
                    it->second = base_->scalar_add(it->second, c);
                    if (base_->scalar_is_zero(it->second)) {
                        out.erase(it);
                    }
                }
            }
        }
        return out;
    }

    std::string poly_to_string(const PolyTerms &t) const
    {
        if (t.empty()) {
            return "0";
        }
        std::string out;
        for (auto it = t.rbegin(); it != t.rend(); ++it) {
            std::string c = base_->to_string(Value{it->second, nullptr});
            const bool constant = total_degree(it->first) == 0;
            bool negative = !c.empty() && c[0] == '-';
            if (negative) {
                c.erase(0, 1);
            }
            if (c.find_first_of(" +") != std::string::npos) {
                c = "(" + c + ")";
            }
            std::string mono;
            for (std::size_t i = 0; i < it->first.size(); ++i) {
                if (it->first[i] == 0) {
                    continue;
                }
                if (!mono.empty()) {
                    mono += "*";
                }
                mono += vars_[i];
                if (it->first[i] > 1) {
                    mono += "^" + std::to_string(it->first[i]);
                }
            }
            std::string term = constant ? c : (c == "1" ? mono : c + "*" + mono);
            if (out.empty()) {
                out = negative ? "-" + term : term;
            } else {
                out += negative ? " - " : " + ";
                out += term;
            }
        }
        return out;
    }

    // Scalar-level operations for non-polynomial contexts. Polynomial
    // quotients call these on their base.
    Scalar scalar_add(const Scalar &a, const Scalar &b) const
    {
        switch (kind_) {
        case RingKind::integers:
            return mpz_class(std::get<mpz_class>(a) + std::get<mpz_class>(b));
        case RingKind::rationals:
            return mpq_class(std::get<mpq_class>(a) + std::get<mpq_class>(b));
        case RingKind::padic_integers:
            return detail::addmod(std::get<std::uint64_t>(a), std::get<std::uint64_t>(b), modulus_);
        case RingKind::eisenstein_extension: {
            const auto &x = std::get<EisensteinCoords>(a);
            const auto &y = std::get<EisensteinCoords>(b);
            EisensteinCoords r;
            for (int i = 0; i < e_; ++i) {
                r.c[i] = detail::addmod(x.c[i], y.c[i], coord_mod_[i]);
            }
            return r;
        }
        default:
            throw UnsupportedOperation("scalar arithmetic on polynomial context");
        }
    }

    Scalar scalar_neg(const Scalar &a) const
    {
        switch (kind_) {
        case RingKind::integers:
            return mpz_class(-std::get<mpz_class>(a));
        case RingKind::rationals:
            return mpq_class(-std::get<mpq_class>(a));
        case RingKind::padic_integers:
            return detail::submod(0, std::get<std::uint64_t>(a), modulus_);
        case RingKind::eisenstein_extension: {
            const auto &x = std::get<EisensteinCoords>(a);
            EisensteinCoords r;
            for (int i = 0; i < e_; ++i) {
                r.c[i] = detail::submod(0, x.c[i], coord_mod_[i]);
            }
            return r;
        }
        default:
            throw UnsupportedOperation("scalar arithmetic on polynomial context");
        }
    }

    Scalar scalar_mul(const Scalar &a, const Scalar &b) const
    {
        switch (kind_) {
        case RingKind::integers:
            return mpz_class(std::get<mpz_class>(a) * std::get<mpz_class>(b));
        case RingKind::rationals:
            return mpq_class(std::get<mpq_class>(a) * std::get<mpq_class>(b));
        case RingKind::padic_integers:
            return detail::mulmod(std::get<std::uint64_t>(a), std::get<std::uint64_t>(b), modulus_);
        case RingKind::eisenstein_extension:
            return eis_mul(std::get<EisensteinCoords>(a), std::get<EisensteinCoords>(b));
        default:
            throw UnsupportedOperation("scalar arithmetic on polynomial context");
        }
    }

    bool scalar_is_zero(const Scalar &a) const
    {
        switch (kind_) {
        case RingKind::integers:
            return std::get<mpz_class>(a) == 0;
        case RingKind::rationals:
            return std::get<mpq_class>(a) == 0;
        case RingKind::padic_integers:
            return std::get<std::uint64_t>(a) == 0;
        case RingKind::eisenstein_extension:
            return std::get<EisensteinCoords>(a) == EisensteinCoords{};
        default:
            throw UnsupportedOperation("scalar arithmetic on polynomial context");
        }
    }

    Scalar scalar_invert(const Scalar &a) const
    {
        switch (kind_) {
        case RingKind::integers: {
            const auto &z = std::get<mpz_class>(a);
            if (z == 1 || z == -1) {
                return z;
            }
            throw NotAUnit("integer " + z.get_str() + " is not a unit in Z");
        }
        case RingKind::rationals: {
            const auto &q = std::get<mpq_class>(a);
            if (q == 0) {
                throw NotAUnit("zero is not invertible in Q");
            }
            return mpq_class(1 / q);
        }
        case RingKind::padic_integers: {
            const auto r = std::get<std::uint64_t>(a);
            auto inv = detail::invmod(r, modulus_);
            if (!inv) {
                throw NotAUnit(std::to_string(r) + " is not a unit in " + descriptor_, valuation(Value{a, nullptr}));
            }
            return *inv;
        }
        case RingKind::eisenstein_extension:
            return eis_invert(std::get<EisensteinCoords>(a));
        default:
            throw UnsupportedOperation("scalar arithmetic on polynomial context");
        }
    }

    std::optional<Scalar> scalar_try_divide(const Scalar &a, const Scalar &b) const
    {
        switch (kind_) {
        case RingKind::integers: {
            const auto &x = std::get<mpz_class>(a);
            const auto &y = std::get<mpz_class>(b);
            if (y == 0 || !mpz_divisible_p(x.get_mpz_t(), y.get_mpz_t())) {
                return std::nullopt;
            }
            mpz_class q;
            mpz_divexact(q.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
            return q;
        }
        case RingKind::rationals: {
            const auto &y = std::get<mpq_class>(b);
            if (y == 0) {
                return std::nullopt;
            }
            return mpq_class(std::get<mpq_class>(a) / y);
        }
        case RingKind::padic_integers:
        case RingKind::eisenstein_extension: {
            const Value va{a, nullptr}, vb{b, nullptr};
            const auto nb = valuation(vb);
            if (!nb) {
                return std::nullopt;
            }
            const auto na = valuation(va);
            if (!na) {
                return zero().s;
            }
            if (*na < *nb) {
                return std::nullopt;
            }
            const Value qa = divide_by_uniformizer(va, *nb);
            const Value qb = divide_by_uniformizer(vb, *nb);
            return scalar_mul(qa.s, scalar_invert(qb.s));
        }
        default:
            throw UnsupportedOperation("scalar arithmetic on polynomial context");
        }
    }

    Value reduce_terms_value(PolyTerms t) const { return poly_value(std::move(t)); }

private:
    friend Ring make_integers();
    friend Ring make_rationals();
    friend Ring make_padic(std::uint64_t p, int k);
    friend Ring make_eisenstein(std::uint64_t p, int k, std::vector<std::int64_t> poly);
    friend Ring make_polynomial_quotient(Ring base, std::vector<std::string> vars, std::vector<PolyTerms> ideal);

    RingContext() = default;

    static bool divides(const Monomial &a, const Monomial &b)
    {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] > b[i]) {
                return false;
            }
        }
        return true;
    }

    PolyTerms constant_terms(Scalar s) const
    {
        PolyTerms t;
        if (!base_->scalar_is_zero(s)) {
            t.emplace(Monomial(vars_.size(), 0), std::move(s));
        }
        return t;
    }

    Value poly_value(PolyTerms t, bool reduce_it = true) const
    {
        if (reduce_it) {
            t = reduce(std::move(t));
        }
        if (t.empty()) {
            return Value{Scalar{}, nullptr};
        }
        return Value{Scalar{}, std::make_shared<const PolyTerms>(std::move(t))};
    }

    Scalar scalar_from_integer(const mpz_class &z) const
    {
        switch (kind_) {
        case RingKind::integers:
            return z;
        case RingKind::rationals:
            return mpq_class(z);
        case RingKind::padic_integers:
            return detail::mpz_mod_u64(z, modulus_);
        case RingKind::eisenstein_extension: {
            EisensteinCoords c;
            c.c[0] = detail::mpz_mod_u64(z, coord_mod_[0]);
            return c;
        }
        default:
            throw UnsupportedOperation("scalar arithmetic on polynomial context");
        }
    }

    Scalar scalar_from_rational(mpq_class q) const
    {
        q.canonicalize();
        switch (kind_) {
        case RingKind::integers:
            if (q.get_den() != 1) {
                throw NotAUnit("denominator " + q.get_den().get_str() + " is not invertible in Z");
            }
            return mpz_class(q.get_num());
        case RingKind::rationals:
            return q;
        default: {
            const Scalar num = scalar_from_integer(q.get_num());
            const Scalar den = scalar_from_integer(q.get_den());
            if (detail::mpz_padic_valuation(q.get_den(), p_) > 0) {
                throw NotAUnit("denominator " + q.get_den().get_str() + " is divisible by p in " + descriptor_,
                               -detail::mpz_padic_valuation(q.get_den(), p_));
            }
            return scalar_mul(num, scalar_invert(den));
        }
        }
    }

    EisensteinCoords eis_mul(const EisensteinCoords &a, const EisensteinCoords &b) const
    {
        std::array<std::uint64_t, 2 * kMaxEisensteinDegree> t{};
        for (int i = 0; i < e_; ++i) {
            if (a.c[i] == 0) {
                continue;
            }
            for (int j = 0; j < e_; ++j) {
                t[i + j] = detail::addmod(t[i + j], detail::mulmod(a.c[i], b.c[j], modulus_), modulus_);
            }
        }
        for (int d = 2 * e_ - 2; d >= e_; --d) {
            const std::uint64_t top = t[d];
            if (top == 0) {
                continue;
            }
            t[d] = 0;
            for (int j = 0; j < e_; ++j) {
                t[d - e_ + j] = detail::addmod(t[d - e_ + j], detail::mulmod(top, neg_eis_[j], modulus_), modulus_);
            }
        }
        EisensteinCoords r;
        for (int i = 0; i < e_; ++i) {
            r.c[i] = t[i] % coord_mod_[i];
        }
        return r;
    }

    EisensteinCoords eis_invert(const EisensteinCoords &a) const
    {
        if (a.c[0] % p_ == 0) {
            throw NotAUnit(to_string(Value{a, nullptr}) + " is not a unit in " + descriptor_, valuation(Value{a, nullptr}));
        }
        // Newton iteration x <- x(2 - ax) from the inverse of the constant term.
        EisensteinCoords x;
        x.c[0] = *detail::invmod(a.c[0], coord_mod_[0]);
        EisensteinCoords two;
        two.c[0] = 2 % coord_mod_[0];
        EisensteinCoords unit;
        unit.c[0] = 1 % coord_mod_[0];
        for (int iter = 0; iter < 128; ++iter) {
            const EisensteinCoords ax = eis_mul(a, x);
            if (ax == unit) {
                return x;
            }
            x = eis_mul(x, std::get<EisensteinCoords>(scalar_add(two, scalar_neg(ax))));
        }
        throw Error("Newton inversion did not converge in " + descriptor_);
    }

    Value divide_by_uniformizer_once(const Value &a) const
    {
        if (kind_ == RingKind::padic_integers) {
            const auto r = std::get<std::uint64_t>(a.s);
            if (r % p_ != 0) {
                throw NotAUnit("element " + std::to_string(r) + " is not divisible by the uniformizer", 0);
            }
            return {r / p_, nullptr};
        }
        if (kind_ != RingKind::eisenstein_extension) {
            throw UnsupportedOperation("division by the uniformizer needs a p-adic context");
        }
        const auto &c = std::get<EisensteinCoords>(a.s);
        if (c.c[0] % p_ != 0) {
            throw NotAUnit("element " + to_string(a) + " is not divisible by the uniformizer", 0);
        }
        EisensteinCoords shifted;
        for (int i = 0; i + 1 < e_; ++i) {
            shifted.c[i] = c.c[i + 1] % coord_mod_[i];
        }
        EisensteinCoords a0;
        a0.c[0] = (c.c[0] / p_) % coord_mod_[0];
        return {scalar_add(shifted, eis_mul(a0, p_over_pi_)), nullptr};
    }

    Value poly_invert(const Value &a) const
    {
        const PolyTerms &t = terms_of(a);
        if (t.empty()) {
            throw NotAUnit("zero is not invertible in " + descriptor_);
        }
        const Monomial constant(vars_.size(), 0);
        if (t.size() == 1 && t.begin()->first == constant) {
            return poly_value(constant_terms(base_->scalar_invert(t.begin()->second)));
        }
        if (auto inv = univariate_field_inverse(t)) {
            return *inv;
        }
        // x = c (1 + r) with r nilpotent.
        const auto cit = t.find(constant);
        if (cit == t.end()) {
            throw NotAUnit("polynomial with zero constant term is not a unit in " + descriptor_);
        }
        Scalar cinv;
        try {
            cinv = base_->scalar_invert(cit->second);
        } catch (const NotAUnit &) {
            throw NotAUnit("polynomial constant term " + base_->to_string(Value{cit->second, nullptr}) +
                           " is not a unit in " + descriptor_);
        }
        const Value cinv_v = poly_value(constant_terms(cinv));
        const Value r = sub(mul(a, cinv_v), one());
        const Value minus_r = neg(r);
        Value sum = one();
        Value power = one();
        for (int i = 0; i < 256; ++i) {
            power = mul(power, minus_r);
            if (is_zero(power)) {
                return mul(sum, cinv_v);
            }
            sum = add(sum, power);
        }
        throw NotAUnit("could not certify that " + to_string(a) + " is a unit in " + descriptor_);
    }

    // Inverse in Q[t]/(E) via the extended Euclidean algorithm.
    std::optional<Value> univariate_field_inverse(const PolyTerms &t) const
    {
        if (base_->kind() != RingKind::rationals || vars_.size() != 1 || ideal_.size() != 1) {
            return std::nullopt;
        }
        using QPoly = std::vector<mpq_class>;
        auto to_q = [](const PolyTerms &pt) {
            QPoly out;
            for (const auto &[m, c] : pt) {
                if (out.size() <= m[0]) {
                    out.resize(m[0] + 1);
                }
                out[m[0]] = std::get<mpq_class>(c);
            }
            return out;
        };
        auto trim = [](QPoly &p) {
            while (!p.empty() && p.back() == 0) {
                p.pop_back();
            }
        };
        auto divmod = [&](QPoly a, const QPoly &b) {
            QPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0);
            trim(a);
            while (a.size() >= b.size() && !a.empty()) {
                const std::size_t shift = a.size() - b.size();
                const mpq_class f = a.back() / b.back();
                q[shift] = f;
                for (std::size_t i = 0; i < b.size(); ++i) {
                    a[shift + i] -= f * b[i];
                }
                trim(a);
            }
            trim(q);
            return std::pair{q, a};
        };
        auto mulq = [&](const QPoly &a, const QPoly &b) {
            if (a.empty() || b.empty()) {
                return QPoly{};
            }
            QPoly r(a.size() + b.size() - 1);
            for (std::size_t i = 0; i < a.size(); ++i) {
                for (std::size_t j = 0; j < b.size(); ++j) {
                    r[i + j] += a[i] * b[j];
                }
            }
            trim(r);
            return r;
        };
        auto subq = [&](QPoly a, const QPoly &b) {
            if (a.size() < b.size()) {
                a.resize(b.size());
            }
            for (std::size_t i = 0; i < b.size(); ++i) {
                a[i] -= b[i];
            }
            trim(a);
            return a;
        };
        QPoly r0 = to_q(ideal_[0]), r1 = to_q(t);
        trim(r0);
        trim(r1);
        QPoly s0, s1{mpq_class(1)};
        while (!r1.empty()) {
            auto [q, r] = divmod(r0, r1);
            QPoly s2 = subq(s0, mulq(q, s1));
            r0 = std::move(r1);
            r1 = std::move(r);
            s0 = std::move(s1);
            s1 = std::move(s2);
        }
        if (r0.size() != 1) {
            throw NotAUnit(poly_to_string(t) + " shares a factor with the defining polynomial of " + descriptor_);
        }
        PolyTerms out;
        for (std::size_t i = 0; i < s0.size(); ++i) {
            if (s0[i] != 0) {
                out.emplace(Monomial{static_cast<std::uint16_t>(i)}, mpq_class(s0[i] / r0[0]));
            }
        }
        return poly_value(std::move(out));
    }

    std::optional<Value> poly_try_divide(const Value &a, const Value &b) const
    {
        const PolyTerms &tb = terms_of(b);
        if (tb.empty()) {
            return std::nullopt;
        }
        const Monomial constant(vars_.size(), 0);
        if (tb.size() == 1 && tb.begin()->first == constant) {
            PolyTerms out;
            for (const auto &[m, c] : terms_of(a)) {
                auto q = base_->scalar_try_divide(c, tb.begin()->second);
                if (!q) {
                    return std::nullopt;
                }
                out.emplace(m, std::move(*q));
            }
            return poly_value(std::move(out));
        }
        try {
            return mul(a, poly_invert(b));
        } catch (const NotAUnit &) {
            return std::nullopt;
        }
    }

    RingKind kind_ = RingKind::integers;
    std::uint64_t p_ = 0;
    int k_ = 0;
    int e_ = 1;
    std::vector<std::int64_t> eis_;
    std::uint64_t modulus_ = 0;
    std::array<std::uint64_t, kMaxEisensteinDegree> coord_mod_{};
    std::array<std::uint64_t, kMaxEisensteinDegree> neg_eis_{};
    EisensteinCoords p_over_pi_{};
    Ring base_;
    std::vector<std::string> vars_;
    std::vector<PolyTerms> ideal_;
    std::vector<std::pair<Monomial, Scalar>> leading_;
    std::string descriptor_;
};

inline Ring make_integers()
{
    static const Ring ring = [] {
        auto r = std::shared_ptr<RingContext>(new RingContext());
        r->kind_ = RingKind::integers;
        r->descriptor_ = "Z";
        return Ring(r);
    }();
    return ring;
}

inline Ring make_rationals()
{
    static const Ring ring = [] {
        auto r = std::shared_ptr<RingContext>(new RingContext());
        r->kind_ = RingKind::rationals;
        r->descriptor_ = "Q";
        return Ring(r);
    }();
    return ring;
}

namespace detail
{
inline std::uint64_t checked_power(std::uint64_t p, int k)
{
    std::uint64_t m = 1;
    for (int i = 0; i < k; ++i) {
        if (m > (std::uint64_t{1} << 62) / p) {
            throw InvalidInput("modulus " + std::to_string(p) + "^" + std::to_string(k) + " exceeds 2^62");
        }
        m *= p;
    }
    return m;
}
} // namespace detail

inline Ring make_padic(std::uint64_t p, int k)
{
    if (!detail::is_prime(p)) {
        throw InvalidInput(std::to_string(p) + " is not prime");
    }
    if (k < 1) {
        throw InvalidInput("precision must be at least 1");
    }
    auto r = std::shared_ptr<RingContext>(new RingContext());
    r->kind_ = RingKind::padic_integers;
    r->p_ = p;
    r->k_ = k;
    r->e_ = 1;
    r->modulus_ = detail::checked_power(p, k);
    r->coord_mod_[0] = r->modulus_;
    r->descriptor_ = "Z_" + std::to_string(p) + "/" + std::to_string(p) + "^" + std::to_string(k);
    return r;
}

inline std::string polynomial_string(const std::vector<std::int64_t> &poly, const std::string &var)
{
    std::string out;
    for (std::size_t i = poly.size(); i-- > 0;) {
        const auto c = poly[i];
        if (c == 0) {
            continue;
        }
        const auto mag = c < 0 ? -c : c;
        std::string term;
        if (i == 0) {
            term = std::to_string(mag);
        } else {
            term = (mag == 1 ? "" : std::to_string(mag) + "*") + var + (i > 1 ? "^" + std::to_string(i) : "");
        }
        if (out.empty()) {
            out = (c < 0 ? "-" : "") + term;
        } else {
            out += (c < 0 ? " - " : " + ") + term;
        }
    }
    return out.empty() ? "0" : out;
}

// O_K / m^k for K = Q_p(pi), E(pi) = 0 with E Eisenstein at p.
inline Ring make_eisenstein(std::uint64_t p, int k, std::vector<std::int64_t> poly)
{
    if (!detail::is_prime(p)) {
        throw InvalidInput(std::to_string(p) + " is not prime");
    }
    if (k < 1) {
        throw InvalidInput("precision must be at least 1");
    }
    while (!poly.empty() && poly.back() == 0) {
        poly.pop_back();
    }
    if (poly.size() < 2) {
        throw InvalidInput("Eisenstein polynomial must have degree at least 1");
    }
    const int e = static_cast<int>(poly.size()) - 1;
    if (e > kMaxEisensteinDegree) {
        throw InvalidInput("Eisenstein degree above " + std::to_string(kMaxEisensteinDegree) + " is not supported");
    }
    if (poly.back() != 1) {
        throw InvalidInput("Eisenstein polynomial must be monic");
    }
    const auto ip = static_cast<std::int64_t>(p);
    for (int i = 0; i < e; ++i) {
        if (poly[i] % ip != 0) {
            throw InvalidInput("Eisenstein condition fails: coefficient of t^" + std::to_string(i) +
                               " is not divisible by " + std::to_string(p));
        }
    }
    if (poly[0] % (ip * ip) == 0) {
        throw InvalidInput("Eisenstein condition fails: constant term is divisible by " + std::to_string(p) + "^2");
    }
    auto r = std::shared_ptr<RingContext>(new RingContext());
    r->kind_ = RingKind::eisenstein_extension;
    r->p_ = p;
    r->k_ = k;
    r->e_ = e;
    r->eis_ = poly;
    for (int i = 0; i < e; ++i) {
        const int ki = (k - i + e - 1) / e;
        r->coord_mod_[i] = detail::checked_power(p, std::max(ki, 0));
    }
    r->modulus_ = r->coord_mod_[0];
    const auto M = r->modulus_;
    auto reduce = [M](std::int64_t c) {
        const auto m = static_cast<std::int64_t>(M);
        return static_cast<std::uint64_t>(((c % m) + m) % m);
    };
    for (int j = 0; j < e; ++j) {
        r->neg_eis_[j] = detail::submod(0, reduce(poly[j]), M);
    }
    // p / pi = -(pi^{e-1} + E_{e-1} pi^{e-2} + ... + E_1) / (E_0 / p)
    const auto u0inv = detail::invmod(reduce(poly[0] / ip), M);
    EisensteinCoords w;
    for (int j = 1; j <= e; ++j) {
        w.c[j - 1] = detail::mulmod(detail::submod(0, reduce(poly[j]), M), *u0inv, M) % r->coord_mod_[j - 1];
    }
    r->p_over_pi_ = w;
    r->descriptor_ = "Z_" + std::to_string(p) + "[pi]/(" + polynomial_string(poly, "pi") + "), m^" + std::to_string(k);
    return r;
}

// base[vars] / (ideal). The base must be a scalar context.
inline Ring make_polynomial_quotient(Ring base, std::vector<std::string> vars, std::vector<PolyTerms> ideal)
{
    if (!base || base->is_polynomial()) {
        throw InvalidInput("polynomial quotient base must be a scalar ring");
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t j = i + 1; j < vars.size(); ++j) {
            if (vars[i] == vars[j]) {
                throw InvalidInput("duplicate variable name '" + vars[i] + "'");
            }
        }
    }
    auto r = std::shared_ptr<RingContext>(new RingContext());
    r->kind_ = RingKind::polynomial_quotient;
    r->base_ = base;
    r->vars_ = std::move(vars);
    for (auto &g : ideal) {
        for (auto it = g.begin(); it != g.end();) {
            if (it->first.size() != r->vars_.size()) {
                throw InvalidInput("ideal generator uses a monomial of the wrong arity");
            }
            it = base->scalar_is_zero(it->second) ? g.erase(it) : std::next(it);
        }
        if (!g.empty()) {
            r->leading_.emplace_back(g.rbegin()->first, g.rbegin()->second);
            r->ideal_.push_back(std::move(g));
        }
    }
    std::string d = base->descriptor() + "[";
    for (std::size_t i = 0; i < r->vars_.size(); ++i) {
        d += (i ? "," : "") + r->vars_[i];
    }
    d += "]";
    if (!r->ideal_.empty()) {
        d += "/(";
        for (std::size_t i = 0; i < r->ideal_.size(); ++i) {
            d += (i ? ", " : "") + r->poly_to_string(r->ideal_[i]);
        }
        d += ")";
    }
    r->descriptor_ = d;
    return r;
}

inline bool same_ring(const Ring &a, const Ring &b)
{
    return a == b || (a && b && a->descriptor() == b->descriptor());
}

inline void require_same_ring(const Ring &a, const Ring &b)
{
    if (!same_ring(a, b)) {
        throw ContextMismatch("ring context mismatch: " + (a ? a->descriptor() : "<null>") + " vs " +
                              (b ? b->descriptor() : "<null>"));
    }
}

// Same p-adic ring at another precision. Representatives are reduced (or
// embedded unchanged when the target is finer).
inline Ring with_precision(const Ring &r, int k)
{
    if (r->kind() == RingKind::padic_integers) {
        return make_padic(r->p(), k);
    }
    if (r->kind() == RingKind::eisenstein_extension) {
        return make_eisenstein(r->p(), k, r->eisenstein_polynomial());
    }
    throw UnsupportedOperation("precision change needs a p-adic context");
}

class RingElement
{
public:
    RingElement() = default;
    RingElement(Ring ring, Value value) : ring_(std::move(ring)), value_(std::move(value)) {}

    static RingElement integer(Ring ring, const mpz_class &z)
    {
        auto v = ring->from_integer(z);
        return {std::move(ring), std::move(v)};
    }
    static RingElement rational(Ring ring, const mpq_class &q)
    {
        auto v = ring->from_rational(q);
        return {std::move(ring), std::move(v)};
    }
    static RingElement zero(Ring ring) { return integer(std::move(ring), 0); }
    static RingElement one(Ring ring) { return integer(std::move(ring), 1); }

    const Ring &ring() const { return ring_; }
    const Value &value() const { return value_; }
    bool valid() const { return static_cast<bool>(ring_); }

    bool is_zero() const { return ring_->is_zero(value_); }
    bool is_one() const { return ring_->equal(value_, ring_->one()); }
    std::string to_string() const { return ring_->to_string(value_); }

    friend RingElement operator+(const RingElement &a, const RingElement &b)
    {
        require_same_ring(a.ring_, b.ring_);
        return {a.ring_, a.ring_->add(a.value_, b.value_)};
    }
    friend RingElement operator-(const RingElement &a, const RingElement &b)
    {
        require_same_ring(a.ring_, b.ring_);
        return {a.ring_, a.ring_->sub(a.value_, b.value_)};
    }
    friend RingElement operator*(const RingElement &a, const RingElement &b)
    {
        require_same_ring(a.ring_, b.ring_);
        return {a.ring_, a.ring_->mul(a.value_, b.value_)};
    }
    friend RingElement operator-(const RingElement &a) { return {a.ring_, a.ring_->neg(a.value_)}; }

    friend bool operator==(const RingElement &a, const RingElement &b)
    {
        return same_ring(a.ring_, b.ring_) && a.ring_->equal(a.value_, b.value_);
    }
    friend bool operator!=(const RingElement &a, const RingElement &b) { return !(a == b); }

    friend std::ostream &operator<<(std::ostream &os, const RingElement &a) { return os << a.to_string(); }

private:
    Ring ring_;
    Value value_;
};

inline RingElement invert(const RingElement &a) { return {a.ring(), a.ring()->invert(a.value())}; }

inline std::optional<RingElement> try_divide(const RingElement &a, const RingElement &b)
{
    require_same_ring(a.ring(), b.ring());
    auto q = a.ring()->try_divide(a.value(), b.value());
    if (!q) {
        return std::nullopt;
    }
    return RingElement{a.ring(), std::move(*q)};
}

inline std::optional<int> valuation(const RingElement &a) { return a.ring()->valuation(a.value()); }

inline RingElement pow(const RingElement &a, unsigned n) { return {a.ring(), a.ring()->pow(a.value(), n)}; }

inline RingElement uniformizer(const Ring &r) { return {r, r->uniformizer()}; }

inline RingElement change_precision(const RingElement &a, const Ring &target)
{
    if (a.ring()->kind() != target->kind() || a.ring()->p() != target->p() ||
        a.ring()->eisenstein_polynomial() != target->eisenstein_polynomial()) {
        throw ContextMismatch("cannot move " + a.ring()->descriptor() + " element to " + target->descriptor());
    }
    return {target, target->from_coordinates(a.ring()->coordinates(a.value()))};
}

} // namespace fgl
