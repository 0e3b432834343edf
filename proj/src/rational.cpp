#include "fracspec/rational.hpp"

#include <cstdlib>

namespace fracspec {

namespace {

constexpr __int128 kMin64 = std::numeric_limits<std::int64_t>::min();
constexpr __int128 kMax64 = std::numeric_limits<std::int64_t>::max();

std::int64_t narrow(__int128 v) {
    if (v < kMin64 || v > kMax64) throw Overflow("rational arithmetic overflowed int64");
    return static_cast<std::int64_t>(v);
}

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace

void Rational::normalize() {
    if (den_ == 0) throw Overflow("rational with zero denominator");
    if (den_ < 0) {
        num_ = narrow(-static_cast<__int128>(num_));
        den_ = narrow(-static_cast<__int128>(den_));
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
    if (num_ == 0) den_ = 1;
}

Rational Rational::checked(__int128 n, __int128 d) {
    if (d == 0) throw Overflow("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    __int128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    Rational r;
    r.num_ = narrow(n);
    r.den_ = narrow(d);
    return r;
}

std::optional<Rational> Rational::from_double(double x) {
    if (!std::isfinite(x)) return std::nullopt;
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double m = std::frexp(x, &exp); // x = m * 2^exp, |m| in [1/2, 1)
    // 53 significant bits
    std::int64_t mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    exp -= 53;
    // strip trailing zero bits so the powers below stay small
    while (mant != 0 && (mant & 1) == 0) {
        mant >>= 1;
        ++exp;
    }
    try {
        if (exp >= 0) {
            if (exp > 62) return std::nullopt;
            return checked(static_cast<__int128>(mant) << exp, 1);
        }
        if (exp < -62) return std::nullopt;
        return checked(mant, static_cast<__int128>(1) << (-exp));
    } catch (const Overflow&) {
        return std::nullopt;
    }
}

std::optional<Rational> Rational::parse(const std::string& text) {
    const char* s = text.c_str();
    char* end = nullptr;
    errno = 0;
    long long n = std::strtoll(s, &end, 10);
    if (end == s || errno == ERANGE) return std::nullopt;
    if (*end == '\0') return Rational(n);
    if (*end != '/') return std::nullopt;
    const char* s2 = end + 1;
    errno = 0;
    long long d = std::strtoll(s2, &end, 10);
    if (end == s2 || *end != '\0' || errno == ERANGE || d == 0) return std::nullopt;
    return Rational(n, d);
}

Rational Rational::operator+(const Rational& o) const {
    return checked(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                   static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
    return checked(static_cast<__int128>(num_) * o.den_ - static_cast<__int128>(o.num_) * den_,
                   static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
    return checked(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw Overflow("rational division by zero");
    return checked(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
}

bool Rational::operator<(const Rational& o) const {
    return static_cast<__int128>(num_) * o.den_ < static_cast<__int128>(o.num_) * den_;
}

Rational Rational::pow(int e) const {
    if (e < 0) return Rational(1) / pow(-e);
    Rational result(1);
    Rational base = *this;
    while (e > 0) {
        if (e & 1) result = result * base;
        base = (e > 1) ? base * base : base;
        e >>= 1;
    }
    return result;
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

SqrtRational::SqrtRational(Rational p, Rational s) : p_(p), s_(s) {
    if (s_.sign() < 0) throw DomainError("negative radicand");
    if (s_.is_zero()) {
        p_ = Rational(0);
        s_ = Rational(1);
        return;
    }
    if (p_.is_zero()) {
        s_ = Rational(1);
        return;
    }
    // absorb perfect-square factors of the radicand into the mantissa;
    // trial division is capped, beyond the cap values stay uncanonicalized
    // (equality and ordering go through squared() and are unaffected)
    auto extract = [](std::int64_t v) {
        std::int64_t sq = 1;
        for (std::int64_t f = 2; f * f <= v && f <= 65536; ++f) {
            while (v % (f * f) == 0) {
                v /= f * f;
                sq *= f;
            }
        }
        return std::pair<std::int64_t, std::int64_t>(sq, v);
    };
    auto [sqn, remn] = extract(s_.num());
    auto [sqd, remd] = extract(s_.den());
    p_ = p_ * Rational(sqn, sqd);
    // rationalize: √(a/b) = √(ab)/b
    Rational rad = Rational(remn) * Rational(remd);
    p_ = p_ / Rational(remd);
    s_ = rad;
}

SqrtRational SqrtRational::operator*(const SqrtRational& o) const {
    return SqrtRational(p_ * o.p_, s_ * o.s_);
}

SqrtRational SqrtRational::operator/(const SqrtRational& o) const {
    if (o.p_.is_zero()) throw Overflow("division by zero");
    return SqrtRational(p_ / (o.p_ * o.s_), s_ * o.s_);
}

SqrtRational SqrtRational::pow(int e) const {
    if (e < 0) return SqrtRational(Rational(1)) / pow(-e);
    Rational rational_part = p_.pow(e) * s_.pow(e / 2);
    if (e % 2 == 0) return SqrtRational(rational_part);
    return SqrtRational(rational_part, s_);
}

bool SqrtRational::operator==(const SqrtRational& o) const {
    if (p_.sign() != o.p_.sign()) return false;
    return squared() == o.squared();
}

bool SqrtRational::operator<(const SqrtRational& o) const {
    int sa = p_.sign(), sb = o.p_.sign();
    if (sa != sb) return sa < sb;
    if (sa >= 0) return squared() < o.squared();
    return o.squared() < squared();
}

std::string SqrtRational::to_string() const {
    if (is_rational()) return p_.to_string();
    if (p_ == Rational(1)) return "sqrt(" + s_.to_string() + ")";
    return p_.to_string() + "*sqrt(" + s_.to_string() + ")";
}

std::string GeometricRate::to_string() const {
    return mantissa.to_string() + " * (" + ratio.to_string() + ")^m";
}

} // namespace fracspec
