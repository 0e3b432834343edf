#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "fracspec/errors.hpp"

namespace fracspec {

/// Exact fraction on int64 with overflow-checked arithmetic.
///
/// Used wherever the scaling formulas must be evaluated without rounding
/// (energy rescaling factors, parameter windows, table entries). Throws
/// Overflow instead of wrapping; the quantities handled here stay tiny
/// because all exponential growth is kept as (mantissa, ratio) pairs.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    static Rational checked(__int128 n, __int128 d);

    /// Exact conversion; fails (nullopt) when the double's binary expansion
    /// does not fit in int64 (e.g. 0.6, which is not 3/5 as a double).
    static std::optional<Rational> from_double(double x);

    /// Parses "p", "-p", or "p/q".
    static std::optional<Rational> parse(const std::string& text);

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

    Rational pow(int e) const;

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string to_string() const;

    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }
    bool is_zero() const { return num_ == 0; }

private:
    void normalize();

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Value p·√s with p, s rational, s ≥ 0. Closed under multiplication,
/// division and integer powers; exact equality and ordering via squares.
/// Covers every length/scale ratio the fractal pipelines produce
/// (Λ = √(r/N), Ε* = √(r/N)·Λ, ℓ₀₀ = √(2/(C₀N₀)), ...).
class SqrtRational {
public:
    SqrtRational() = default;
    SqrtRational(Rational p) : p_(p), s_(1) {}
    SqrtRational(Rational p, Rational s);

    static SqrtRational sqrt(const Rational& s) { return SqrtRational(Rational(1), s); }

    const Rational& mantissa() const { return p_; }
    const Rational& radicand() const { return s_; }

    SqrtRational operator*(const SqrtRational& o) const;
    SqrtRational operator/(const SqrtRational& o) const;
    SqrtRational pow(int e) const;

    /// Exact square (always rational).
    Rational squared() const { return p_ * p_ * s_; }

    bool operator==(const SqrtRational& o) const;
    bool operator!=(const SqrtRational& o) const { return !(*this == o); }
    bool operator<(const SqrtRational& o) const;

    /// True when the value is plainly rational (radicand a perfect square
    /// has already been absorbed, so this just tests s == 1 or p == 0).
    bool is_rational() const { return s_ == Rational(1) || p_.is_zero(); }

    double to_double() const { return p_.to_double() * std::sqrt(s_.to_double()); }
    std::string to_string() const;

private:
    Rational p_{0};
    Rational s_{1};
};

/// A geometric sequence mantissa·ratio^m kept unevaluated, so that rates at
/// m = 50 neither overflow nor lose the exact ratio. value_at() evaluates in
/// doubles; exact_at() evaluates in exact arithmetic (small m only).
struct GeometricRate {
    SqrtRational mantissa{Rational(1)};
    SqrtRational ratio{Rational(1)};

    double value_at(int m) const {
        return mantissa.to_double() * std::pow(ratio.to_double(), m);
    }
    SqrtRational exact_at(int m) const { return mantissa * ratio.pow(m); }
    std::string to_string() const;
};

} // namespace fracspec
