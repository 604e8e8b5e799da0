#pragma once

// Truncated power series in one to three variables, truncated by total degree.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ring.hpp"

namespace fgl
{

class ShapeMismatch : public Error
{
public:
    using Error::Error;
};

// Enumeration of all monomials of total degree <= N in a fixed number of
// variables, in graded order: degree ascending, lexicographically descending
// within a degree (x^2, xy, y^2).
class MonomialLayout
{
public:
    static std::shared_ptr<const MonomialLayout> get(std::size_t nvars, int N)
    {
        static std::mutex mutex;
        static std::map<std::pair<std::size_t, int>, std::shared_ptr<const MonomialLayout>> cache;
        std::lock_guard lock(mutex);
        auto &slot = cache[{nvars, N}];
        if (!slot) {
            slot = std::shared_ptr<const MonomialLayout>(new MonomialLayout(nvars, N));
        }
        return slot;
    }

    std::size_t size() const { return monos_.size(); }
    std::size_t nvars() const { return nvars_; }
    int degree_bound() const { return N_; }
    const Monomial &monomial(std::size_t i) const { return monos_[i]; }
    unsigned degree(std::size_t i) const { return degs_[i]; }

    std::optional<std::size_t> index(const Monomial &m) const
    {
        const auto it = index_.find(m);
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    // Index of monomial(i) * monomial(j), or -1 when the degree exceeds N.
    int product(std::size_t i, std::size_t j) const { return mul_[i * monos_.size() + j]; }

    // First index of each degree; degree_start(N+1) == size().
    std::size_t degree_start(unsigned d) const { return starts_[d]; }

private:
    MonomialLayout(std::size_t nvars, int N) : nvars_(nvars), N_(N)
    {
        for (int d = 0; d <= N; ++d) {
            starts_.push_back(monos_.size());
            Monomial m(nvars, 0);
            emit(m, 0, d);
        }
        starts_.push_back(monos_.size());
        for (std::size_t i = 0; i < monos_.size(); ++i) {
            index_.emplace(monos_[i], i);
            degs_.push_back(total_degree(monos_[i]));
        }
        const std::size_t n = monos_.size();
        mul_.assign(n * n, -1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (degs_[i] + degs_[j] > static_cast<unsigned>(N)) {
                    continue;
                }
                Monomial m(nvars);
                for (std::size_t v = 0; v < nvars; ++v) {
                    m[v] = static_cast<std::uint16_t>(monos_[i][v] + monos_[j][v]);
                }
                mul_[i * n + j] = static_cast<int>(index_.at(m));
            }
        }
    }

    void emit(Monomial &m, std::size_t var, int remaining)
    {
        if (var + 1 == nvars_) {
            m[var] = static_cast<std::uint16_t>(remaining);
            monos_.push_back(m);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            m[var] = static_cast<std::uint16_t>(e);
            emit(m, var + 1, remaining - e);
        }
        m[var] = 0;
    }

    std::size_t nvars_;
    int N_;
    std::vector<Monomial> monos_;
    std::vector<unsigned> degs_;
    std::vector<std::size_t> starts_;
    std::map<Monomial, std::size_t> index_;
    std::vector<int> mul_;
};

class TruncatedSeries
{
public:
    TruncatedSeries() = default;

    TruncatedSeries(Ring ring, std::vector<std::string> vars, int N) : ring_(std::move(ring)), vars_(std::move(vars)), N_(N)
    {
        if (vars_.empty() || vars_.size() > 3) {
            throw InvalidInput("series need one to three variables");
        }
        if (N_ < 1) {
            throw InvalidInput("truncation degree must be at least 1");
        }
        layout_ = MonomialLayout::get(vars_.size(), N_);
        coeffs_.assign(layout_->size(), ring_->zero());
    }

    static TruncatedSeries variable(Ring ring, std::vector<std::string> vars, int N, const std::string &name)
    {
        TruncatedSeries s(std::move(ring), std::move(vars), N);
        s.set(s.unit_monomial(s.var_index(name)), s.ring_->one());
        return s;
    }

    static TruncatedSeries constant(Ring ring, std::vector<std::string> vars, int N, const Value &c)
    {
        TruncatedSeries s(std::move(ring), std::move(vars), N);
        s.coeffs_[0] = c;
        return s;
    }

    const Ring &ring() const { return ring_; }
    const std::vector<std::string> &variables() const { return vars_; }
    int degree() const { return N_; }
    const MonomialLayout &layout() const { return *layout_; }
    std::size_t size() const { return coeffs_.size(); }

    std::size_t var_index(const std::string &name) const
    {
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i] == name) {
                return i;
            }
        }
        throw InvalidInput("unknown series variable '" + name + "'");
    }

    Monomial unit_monomial(std::size_t var) const
    {
        Monomial m(vars_.size(), 0);
        m[var] = 1;
        return m;
    }

    const Value &coeff_at(std::size_t idx) const { return coeffs_[idx]; }
    void set_at(std::size_t idx, Value v) { coeffs_[idx] = std::move(v); }

    Value coeff(const Monomial &m) const
    {
        const auto idx = layout_->index(m);
        return idx ? coeffs_[*idx] : ring_->zero();
    }

    RingElement coefficient(const Monomial &m) const { return {ring_, coeff(m)}; }

    void set(const Monomial &m, Value v)
    {
        if (m.size() != vars_.size()) {
            throw ShapeMismatch("monomial arity does not match the series");
        }
        const auto idx = layout_->index(m);
        if (!idx) {
            return;
        }
        coeffs_[*idx] = std::move(v);
    }

    bool is_zero_at(std::size_t idx) const { return ring_->is_zero(coeffs_[idx]); }

    // Stored (nonzero) terms in graded order.
    std::vector<std::pair<Monomial, Value>> terms() const
    {
        std::vector<std::pair<Monomial, Value>> out;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (!is_zero_at(i)) {
                out.emplace_back(layout_->monomial(i), coeffs_[i]);
            }
        }
        return out;
    }

    bool has_zero_constant_term() const { return is_zero_at(0); }

    // Lowest total degree with a nonzero coefficient; nullopt for zero.
    std::optional<unsigned> order() const
    {
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (!is_zero_at(i)) {
                return layout_->degree(i);
            }
        }
        return std::nullopt;
    }

    bool is_zero() const { return !order(); }

    void require_same_shape(const TruncatedSeries &o) const
    {
        require_same_ring(ring_, o.ring_);
        if (vars_ != o.vars_ || N_ != o.N_) {
            throw ShapeMismatch("series shape mismatch");
        }
    }

    friend TruncatedSeries operator+(const TruncatedSeries &a, const TruncatedSeries &b)
    {
        a.require_same_shape(b);
        TruncatedSeries r = a;
        for (std::size_t i = 0; i < r.coeffs_.size(); ++i) {
            r.coeffs_[i] = r.ring_->add(a.coeffs_[i], b.coeffs_[i]);
        }
        return r;
    }

    friend TruncatedSeries operator-(const TruncatedSeries &a, const TruncatedSeries &b)
    {
        a.require_same_shape(b);
        TruncatedSeries r = a;
        for (std::size_t i = 0; i < r.coeffs_.size(); ++i) {
            r.coeffs_[i] = r.ring_->sub(a.coeffs_[i], b.coeffs_[i]);
        }
        return r;
    }

    friend TruncatedSeries operator-(const TruncatedSeries &a)
    {
        TruncatedSeries r = a;
        for (auto &c : r.coeffs_) {
            c = r.ring_->neg(c);
        }
        return r;
    }

    friend TruncatedSeries operator*(const TruncatedSeries &a, const TruncatedSeries &b)
    {
        a.require_same_shape(b);
        return a.mul_truncated(b, static_cast<unsigned>(a.N_));
    }

    TruncatedSeries scaled(const Value &c) const
    {
        TruncatedSeries r = *this;
        for (auto &v : r.coeffs_) {
            v = ring_->mul(c, v);
        }
        return r;
    }

    TruncatedSeries pow(unsigned n) const
    {
        TruncatedSeries r = constant(ring_, vars_, N_, ring_->one());
        for (unsigned i = 0; i < n; ++i) {
            r = r * *this;
        }
        return r;
    }

    friend bool operator==(const TruncatedSeries &a, const TruncatedSeries &b)
    {
        return !a.first_difference(b);
    }

    // First monomial (graded order) where the two series differ.
    std::optional<Monomial> first_difference(const TruncatedSeries &o) const
    {
        require_same_shape(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (!ring_->equal(coeffs_[i], o.coeffs_[i])) {
                return layout_->monomial(i);
            }
        }
        return std::nullopt;
    }

    // Replace variables by series in a common target variable set. Variables
    // without an assignment must not occur in this series.
    TruncatedSeries substitute(const std::map<std::string, TruncatedSeries> &assignments) const
    {
        if (assignments.empty()) {
            throw InvalidInput("substitution needs at least one assignment");
        }
        const TruncatedSeries &proto = assignments.begin()->second;
        std::vector<const TruncatedSeries *> images(vars_.size(), nullptr);
        for (const auto &[name, s] : assignments) {
            proto.require_same_shape(s);
            require_same_ring(ring_, s.ring_);
            if (!s.has_zero_constant_term()) {
                throw InvalidInput("substituted series for '" + name + "' has a nonzero constant term");
            }
            images[var_index(name)] = &s;
        }
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (is_zero_at(i)) {
                continue;
            }
            const auto &m = layout_->monomial(i);
            for (std::size_t v = 0; v < vars_.size(); ++v) {
                if (m[v] > 0 && !images[v]) {
                    throw InvalidInput("missing assignment for variable '" + vars_[v] + "'");
                }
            }
        }
        // Powers of each image up to the degree they are needed.
        const int Nt = proto.N_;
        std::vector<std::vector<TruncatedSeries>> powers(vars_.size());
        for (std::size_t v = 0; v < vars_.size(); ++v) {
            if (!images[v]) {
                continue;
            }
            powers[v].push_back(constant(ring_, proto.vars_, Nt, ring_->one()));
            for (int e = 1; e <= std::min(N_, Nt); ++e) {
                powers[v].push_back(powers[v].back().mul_truncated(*images[v], static_cast<unsigned>(Nt)));
            }
        }
        TruncatedSeries result(ring_, proto.vars_, Nt);
        Monomial prefix;
        substitute_rec(0, prefix, powers, result);
        return result;
    }

    // Convenience for one-variable composition f(g).
    TruncatedSeries compose(const TruncatedSeries &inner) const
    {
        if (vars_.size() != 1) {
            throw ShapeMismatch("compose needs a one-variable outer series");
        }
        return substitute({{vars_[0], inner}});
    }

    TruncatedSeries derivative(const std::string &name) const
    {
        const std::size_t v = var_index(name);
        TruncatedSeries r(ring_, vars_, N_);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            const auto &m = layout_->monomial(i);
            if (m[v] == 0 || is_zero_at(i)) {
                continue;
            }
            Monomial d = m;
            --d[v];
            r.set(d, ring_->mul(ring_->from_integer(m[v]), coeffs_[i]));
        }
        return r;
    }

    // g with f(g(T)) = T = g(f(T)) modulo degree N+1.
    TruncatedSeries compositional_inverse() const
    {
        if (vars_.size() != 1) {
            throw ShapeMismatch("compositional inverse needs a one-variable series");
        }
        if (!has_zero_constant_term()) {
            throw InvalidInput("compositional inverse needs a zero constant term");
        }
        const Value a1 = coeffs_[1];
        Value a1inv;
        try {
            a1inv = ring_->invert(a1);
        } catch (const NotAUnit &e) {
            throw NotAUnit("linear coefficient " + ring_->to_string(a1) + " is not a unit", e.valuation());
        }
        TruncatedSeries g(ring_, vars_, N_);
        g.coeffs_[1] = a1inv;
        for (int n = 2; n <= N_; ++n) {
            const TruncatedSeries fg = compose(g);
            g.coeffs_[n] = ring_->neg(ring_->mul(fg.coeffs_[n], a1inv));
        }
        return g;
    }

    // 1 / s for a one-variable series with unit constant term.
    TruncatedSeries reciprocal() const
    {
        if (vars_.size() != 1) {
            throw ShapeMismatch("reciprocal needs a one-variable series");
        }
        const Value c0inv = ring_->invert(coeffs_[0]);
        TruncatedSeries h(ring_, vars_, N_);
        h.coeffs_[0] = c0inv;
        for (int n = 1; n <= N_; ++n) {
            Value acc = ring_->zero();
            for (int k = 1; k <= n; ++k) {
                acc = ring_->add(acc, ring_->mul(coeffs_[k], h.coeffs_[n - k]));
            }
            h.coeffs_[n] = ring_->neg(ring_->mul(acc, c0inv));
        }
        return h;
    }

    // Same terms over another ring (coefficients mapped by `fn`) or with a
    // different truncation degree / variable names.
    template <class Fn>
    TruncatedSeries map_coefficients(Ring target, Fn &&fn) const
    {
        TruncatedSeries r(std::move(target), vars_, N_);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (!is_zero_at(i)) {
                r.coeffs_[i] = fn(coeffs_[i]);
            }
        }
        return r;
    }

    TruncatedSeries truncated(int N) const
    {
        TruncatedSeries r(ring_, vars_, N);
        for (std::size_t i = 0; i < r.coeffs_.size(); ++i) {
            r.coeffs_[i] = coeff(r.layout_->monomial(i));
        }
        return r;
    }

    TruncatedSeries renamed(std::vector<std::string> vars) const
    {
        if (vars.size() != vars_.size()) {
            throw ShapeMismatch("renaming must keep the number of variables");
        }
        TruncatedSeries r = *this;
        r.vars_ = std::move(vars);
        return r;
    }

    // Embed into a series over a larger variable list; variable i of this
    // series becomes target variable `positions[i]`.
    TruncatedSeries embedded(const std::vector<std::string> &vars, const std::vector<std::size_t> &positions) const
    {
        TruncatedSeries r(ring_, vars, N_);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (is_zero_at(i)) {
                continue;
            }
            Monomial m(vars.size(), 0);
            for (std::size_t v = 0; v < vars_.size(); ++v) {
                m[positions[v]] = layout_->monomial(i)[v];
            }
            r.set(m, coeffs_[i]);
        }
        return r;
    }

    std::string to_string() const
    {
        std::string out;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (is_zero_at(i)) {
                continue;
            }
            std::string c = ring_->to_string(coeffs_[i]);
            bool negative = !c.empty() && c[0] == '-' && c.find_first_of(" ") == std::string::npos;
            if (negative) {
                c.erase(0, 1);
            }
            if (c.find(' ') != std::string::npos) {
                c = "(" + c + ")";
            }
            std::string mono;
            const auto &m = layout_->monomial(i);
            for (std::size_t v = 0; v < vars_.size(); ++v) {
                if (m[v] == 0) {
                    continue;
                }
                if (!mono.empty()) {
                    mono += "*";
                }
                mono += vars_[v];
                if (m[v] > 1) {
                    mono += "^" + std::to_string(m[v]);
                }
            }
            std::string term = mono.empty() ? c : (c == "1" ? mono : c + "*" + mono);
            if (out.empty()) {
                out = negative ? "-" + term : term;
            } else {
                out += negative ? " - " : " + ";
                out += term;
            }
        }
        return out.empty() ? "0" : out;
    }

    TruncatedSeries mul_truncated(const TruncatedSeries &b, unsigned bound) const
    {
        TruncatedSeries r(ring_, vars_, N_);
        const std::size_t n = coeffs_.size();
        std::vector<std::size_t> nzb;
        for (std::size_t j = 0; j < n; ++j) {
            if (!b.is_zero_at(j)) {
                nzb.push_back(j);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (is_zero_at(i)) {
                continue;
            }
            const unsigned di = layout_->degree(i);
            for (const std::size_t j : nzb) {
                if (di + layout_->degree(j) > bound) {
                    break;
                }
                const int k = layout_->product(i, j);
                r.coeffs_[k] = ring_->add(r.coeffs_[k], ring_->mul(coeffs_[i], b.coeffs_[j]));
            }
        }
        return r;
    }

private:
    // Horner-like recursion over the variables: terms are grouped by the
    // exponent of the current variable and combined with its image powers.
    void substitute_rec(std::size_t var, Monomial &prefix, const std::vector<std::vector<TruncatedSeries>> &powers,
                        TruncatedSeries &acc) const
    {
        const std::size_t nv = vars_.size();
        // Collect the exponents present for this variable given the prefix.
        std::map<std::uint16_t, bool> exps;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (is_zero_at(i)) {
                continue;
            }
            const auto &m = layout_->monomial(i);
            if (std::equal(prefix.begin(), prefix.end(), m.begin())) {
                exps[m[var]] = true;
            }
        }
        for (const auto &[e, unused] : exps) {
            (void)unused;
            prefix.push_back(e);
            if (var + 1 == nv) {
                const auto idx = *layout_->index(prefix);
                if (e == 0) {
                    acc.coeffs_[0] = acc.ring_->add(acc.coeffs_[0], coeffs_[idx]);
                } else if (e < powers[var].size()) {
                    acc = acc + powers[var][e].scaled(coeffs_[idx]);
                }
            } else {
                TruncatedSeries inner(acc.ring_, acc.vars_, acc.N_);
                substitute_rec(var + 1, prefix, powers, inner);
                if (e == 0) {
                    acc = acc + inner;
                } else if (e < powers[var].size()) {
                    acc = acc + inner.mul_truncated(powers[var][e], static_cast<unsigned>(acc.N_));
                }
            }
            prefix.pop_back();
        }
    }

    Ring ring_;
    std::vector<std::string> vars_;
    int N_ = 0;
    std::shared_ptr<const MonomialLayout> layout_;
    std::vector<Value> coeffs_;
};

inline std::ostream &operator<<(std::ostream &os, const TruncatedSeries &s) { return os << s.to_string(); }

} // namespace fgl
