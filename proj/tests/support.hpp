#pragma once

#include <random>

#include "fgl/fgl.hpp"

namespace fgl::testing
{

inline std::mt19937_64 &rng()
{
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng()); }

inline TruncatedSeries T(const Ring &r, int N) { return TruncatedSeries::variable(r, {"T"}, N, "T"); }
inline TruncatedSeries X(const Ring &r, int N) { return TruncatedSeries::variable(r, {"x", "y"}, N, "x"); }
inline TruncatedSeries Y(const Ring &r, int N) { return TruncatedSeries::variable(r, {"x", "y"}, N, "y"); }

inline RingElement integer(const Ring &r, long v) { return RingElement::integer(r, v); }

// T + random higher terms with small rational (or integer) coefficients.
inline TruncatedSeries random_unit_series(const Ring &r, int N, bool rational = true)
{
    TruncatedSeries s(r, {"T"}, N);
    s.set_at(1, r->one());
    for (int k = 2; k <= N; ++k) {
        const long num = uniform(-4, 4);
        if (rational && r->kind() == RingKind::rationals) {
            s.set_at(static_cast<std::size_t>(k), r->from_rational(mpq_class(num, uniform(1, 5))));
        } else {
            s.set_at(static_cast<std::size_t>(k), r->from_integer(num));
        }
    }
    return s;
}

// Coefficient of T^n in a one-variable series.
inline Value coeff(const TruncatedSeries &s, unsigned n) { return s.coeff(Monomial{static_cast<std::uint16_t>(n)}); }

inline Value coeff2(const TruncatedSeries &s, unsigned i, unsigned j)
{
    return s.coeff(Monomial{static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j)});
}

} // namespace fgl::testing
