#pragma once

// Recursive-descent parser for series expressions:
//   integers, `pi`, series variables, named constants, + - * / ^ and
//   parentheses. Division is only by constants that are units.

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "series.hpp"

namespace fgl
{

class ParseError : public InvalidInput
{
public:
    ParseError(const std::string &what, std::size_t position)
        : InvalidInput(what + " at position " + std::to_string(position)), position_(position)
    {
    }
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

struct ParseContext {
    Ring ring;
    std::vector<std::string> vars;
    int degree = 1;
    std::optional<RingElement> pi;
    std::map<std::string, RingElement> constants;
};

class SeriesParser
{
public:
    SeriesParser(const ParseContext &ctx, std::string text) : ctx_(ctx), s_(std::move(text)) {}

    TruncatedSeries parse()
    {
        skip();
        if (pos_ >= s_.size()) {
            throw ParseError("empty expression", pos_);
        }
        TruncatedSeries r = expr();
        skip();
        if (pos_ != s_.size()) {
            throw ParseError(std::string("unexpected character '") + s_[pos_] + "'", pos_);
        }
        return r;
    }

private:
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    TruncatedSeries constant(const Value &v) const { return TruncatedSeries::constant(ctx_.ring, ctx_.vars, ctx_.degree, v); }

    TruncatedSeries expr()
    {
        TruncatedSeries r = term();
        for (;;) {
            if (accept('+')) {
                r = r + term();
            } else if (accept('-')) {
                r = r - term();
            } else {
                return r;
            }
        }
    }

    TruncatedSeries term()
    {
        TruncatedSeries r = unary();
        for (;;) {
            if (accept('*')) {
                r = r * unary();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                const TruncatedSeries d = unary();
                for (std::size_t i = 1; i < d.size(); ++i) {
                    if (!d.is_zero_at(i)) {
                        throw ParseError("division by a non-constant expression", at);
                    }
                }
                Value inv;
                try {
                    inv = ctx_.ring->invert(d.coeff_at(0));
                } catch (const NotAUnit &) {
                    throw ParseError("division by " + ctx_.ring->to_string(d.coeff_at(0)) + ", which is not a unit in " +
                                         ctx_.ring->descriptor(),
                                     at);
                }
                r = r.scaled(inv);
            } else {
                return r;
            }
        }
    }

    TruncatedSeries unary()
    {
        if (accept('-')) {
            return -unary();
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    TruncatedSeries power()
    {
        TruncatedSeries base = atom();
        if (accept('^')) {
            skip();
            const std::size_t at = pos_;
            std::string digits;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                digits += s_[pos_++];
            }
            if (digits.empty()) {
                throw ParseError("expected a non-negative integer exponent", at);
            }
            if (digits.size() > 4) {
                throw ParseError("exponent too large", at);
            }
            const unsigned n = static_cast<unsigned>(std::stoul(digits));
            // Constant bases are exponentiated in the ring to avoid N-truncation effects.
            bool is_constant = true;
            for (std::size_t i = 1; i < base.size() && is_constant; ++i) {
                is_constant = base.is_zero_at(i);
            }
            if (is_constant) {
                return constant(ctx_.ring->pow(base.coeff_at(0), n));
            }
            return base.pow(n);
        }
        return base;
    }

    TruncatedSeries atom()
    {
        skip();
        if (pos_ >= s_.size()) {
            throw ParseError("unexpected end of expression", pos_);
        }
        const std::size_t at = pos_;
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            TruncatedSeries r = expr();
            if (!accept(')')) {
                throw ParseError("expected ')'", pos_);
            }
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string digits;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                digits += s_[pos_++];
            }
            return constant(ctx_.ring->from_integer(mpz_class(digits)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
                name += s_[pos_++];
            }
            for (const auto &v : ctx_.vars) {
                if (v == name) {
                    return TruncatedSeries::variable(ctx_.ring, ctx_.vars, ctx_.degree, name);
                }
            }
            if (name == "pi") {
                if (!ctx_.pi) {
                    throw ParseError("'pi' is undefined for " + ctx_.ring->descriptor(), at);
                }
                return constant(ctx_.pi->value());
            }
            const auto it = ctx_.constants.find(name);
            if (it != ctx_.constants.end()) {
                return constant(it->second.value());
            }
            throw ParseError("unknown identifier '" + name + "'", at);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", at);
    }

    const ParseContext &ctx_;
    std::string s_;
    std::size_t pos_ = 0;
};

inline TruncatedSeries parse_series(const ParseContext &ctx, const std::string &text) { return SeriesParser(ctx, text).parse(); }

// Constant expression evaluated in a ring (no series variables).
inline RingElement parse_element(const Ring &ring, const std::string &text, std::optional<RingElement> pi = std::nullopt)
{
    ParseContext ctx{ring, {"_"}, 1, std::move(pi), {}};
    const TruncatedSeries s = parse_series(ctx, text);
    if (!s.is_zero_at(1)) {
        throw ParseError("expected a constant expression", 0);
    }
    return {ring, s.coeff_at(0)};
}

// Integer polynomial in one variable, coefficients from the constant term up.
inline std::vector<std::int64_t> parse_integer_polynomial(const std::string &text, const std::string &var = "t")
{
    constexpr int kMaxDegree = 64;
    ParseContext ctx{make_integers(), {var}, kMaxDegree, std::nullopt, {}};
    const TruncatedSeries s = parse_series(ctx, text);
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto &z = std::get<mpz_class>(s.coeff_at(i).s);
        if (!z.fits_slong_p()) {
            throw InvalidInput("polynomial coefficient " + z.get_str() + " is too large");
        }
        out.push_back(z.get_si());
    }
    while (!out.empty() && out.back() == 0) {
        out.pop_back();
    }
    return out;
}

} // namespace fgl
