#pragma once

#include "errors.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <climits>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vtri {

using Rational = mpq_class;

namespace poly {

/// Dense polynomial in e over Q, coefficient i belongs to e^i. The zero
/// polynomial is the empty vector; nonzero polynomials have no trailing zeros.
using Poly = std::vector<Rational>;

inline void trim(Poly& p)
{
    while (!p.empty() && sgn(p.back()) == 0)
        p.pop_back();
}

inline int ord(const Poly& p)
{
    for (std::size_t i = 0; i < p.size(); ++i)
        if (sgn(p[i]) != 0)
            return static_cast<int>(i);
    return -1;
}

inline int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline bool is_one(const Poly& p) { return p.size() == 1 && p[0] == 1; }

inline Poly add(const Poly& a, const Poly& b)
{
    Poly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        r[i] += b[i];
    trim(r);
    return r;
}

inline Poly sub(const Poly& a, const Poly& b)
{
    Poly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        r[i] -= b[i];
    trim(r);
    return r;
}

inline Poly mul(const Poly& a, const Poly& b)
{
    if (a.empty() || b.empty())
        return {};
    Poly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (sgn(a[i]) == 0)
            continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

inline Poly scale(const Poly& a, const Rational& c)
{
    if (sgn(c) == 0)
        return {};
    Poly r(a);
    for (auto& x : r)
        x *= c;
    return r;
}

/// Quotient and remainder of a by a nonzero b.
inline std::pair<Poly, Poly> divmod(Poly a, const Poly& b)
{
    if (b.empty())
        fail(ErrorKind::DivisionByZero, "polynomial division by zero");
    if (a.size() < b.size())
        return {{}, std::move(a)};
    Poly q(a.size() - b.size() + 1);
    const Rational& lead = b.back();
    for (std::size_t k = q.size(); k-- > 0;) {
        Rational c = a[k + b.size() - 1] / lead;
        q[k] = c;
        if (sgn(c) == 0)
            continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            a[k + j] -= c * b[j];
    }
    a.resize(b.size() - 1);
    trim(a);
    trim(q);
    return {std::move(q), std::move(a)};
}

inline Poly make_monic(Poly p)
{
    if (p.empty())
        return p;
    Rational lead = p.back();
    for (auto& x : p)
        x /= lead;
    return p;
}

inline Poly gcd(Poly a, Poly b)
{
    while (!b.empty()) {
        Poly r = divmod(std::move(a), b).second;
        a = std::move(b);
        b = make_monic(std::move(r));
    }
    return make_monic(std::move(a));
}

inline Rational eval(const Poly& p, const Rational& x)
{
    Rational r = 0;
    for (std::size_t i = p.size(); i-- > 0;)
        r = r * x + p[i];
    return r;
}

} // namespace poly

/// Largest polynomial degree allowed in a numerator or denominator.
inline std::size_t& degree_cap()
{
    static std::size_t cap = 512;
    return cap;
}

constexpr int kInfiniteValuation = INT_MAX;

enum class Magnitude { Infinitesimal, Finite, Infinite };

/// Element of Q(e), e a positive infinitesimal. Stored as num/den with
/// gcd(num, den) = 1 and the lowest nonzero coefficient of den equal to 1,
/// so equal elements have equal representations and the sign is the sign of
/// the lowest coefficient of num.
class FieldElement {
public:
    FieldElement() : den_{Rational(1)} {}
    FieldElement(int v) : FieldElement(Rational(v)) {}
    FieldElement(long v) : FieldElement(Rational(v)) {}
    FieldElement(const Rational& v) : den_{Rational(1)}
    {
        if (sgn(v) != 0) {
            num_.push_back(v);
            num_.back().canonicalize();
        }
    }

    static FieldElement epsilon()
    {
        FieldElement r;
        r.num_ = {Rational(0), Rational(1)};
        return r;
    }

    static FieldElement from_polys(poly::Poly num, poly::Poly den)
    {
        FieldElement r;
        r.num_ = std::move(num);
        r.den_ = std::move(den);
        for (auto& c : r.num_)
            c.canonicalize();
        for (auto& c : r.den_)
            c.canonicalize();
        poly::trim(r.num_);
        poly::trim(r.den_);
        r.canonicalize();
        return r;
    }

    const poly::Poly& numerator() const { return num_; }
    const poly::Poly& denominator() const { return den_; }

    bool is_zero() const { return num_.empty(); }
    bool is_polynomial() const { return poly::is_one(den_); }
    bool is_rational() const { return is_polynomial() && num_.size() <= 1; }

    Rational to_rational() const
    {
        if (!is_rational())
            fail(ErrorKind::PreconditionViolation, "not a rational constant: " + str());
        return num_.empty() ? Rational(0) : num_[0];
    }

    int sign() const
    {
        int o = poly::ord(num_);
        return o < 0 ? 0 : sgn(num_[static_cast<std::size_t>(o)]);
    }

    int valuation() const
    {
        if (num_.empty())
            return kInfiniteValuation;
        return poly::ord(num_) - poly::ord(den_);
    }

    Magnitude magnitude() const
    {
        int v = valuation();
        if (v > 0)
            return Magnitude::Infinitesimal;
        return v == 0 ? Magnitude::Finite : Magnitude::Infinite;
    }

    bool is_finite() const { return valuation() >= 0; }
    bool is_infinitesimal() const { return valuation() > 0; }

    /// Standard part; the element must be finite.
    Rational standard_part() const
    {
        if (num_.empty())
            return 0;
        if (valuation() < 0)
            fail(ErrorKind::NotFinite, "standard part of infinite element " + str());
        // den(0) = 1 whenever the valuation is nonnegative
        return poly::ord(den_) == 0 && sgn(num_[0]) != 0 ? num_[0] : Rational(0);
    }

    FieldElement operator-() const
    {
        FieldElement r(*this);
        for (auto& c : r.num_)
            c = -c;
        return r;
    }

    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }
    FieldElement& operator/=(const FieldElement& o) { return *this = *this / o; }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b)
    {
        if (a.is_zero())
            return b;
        if (b.is_zero())
            return a;
        if (a.is_polynomial() && b.is_polynomial())
            return from_poly(poly::add(a.num_, b.num_));
        if (a.den_ == b.den_)
            return from_polys(poly::add(a.num_, b.num_), a.den_);
        return from_polys(poly::add(poly::mul(a.num_, b.den_), poly::mul(b.num_, a.den_)),
                          poly::mul(a.den_, b.den_));
    }

    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) { return a + (-b); }

    friend FieldElement operator*(const FieldElement& a, const FieldElement& b)
    {
        if (a.is_zero() || b.is_zero())
            return FieldElement();
        if (a.is_polynomial() && b.is_polynomial())
            return from_poly(poly::mul(a.num_, b.num_));
        return from_polys(poly::mul(a.num_, b.num_), poly::mul(a.den_, b.den_));
    }

    friend FieldElement operator/(const FieldElement& a, const FieldElement& b)
    {
        if (b.is_zero())
            fail(ErrorKind::DivisionByZero, "division of " + a.str() + " by zero");
        if (a.is_zero())
            return FieldElement();
        if (b.is_rational())
            return from_polys(poly::scale(a.num_, 1 / b.num_[0]), a.den_);
        return from_polys(poly::mul(a.num_, b.den_), poly::mul(a.den_, b.num_));
    }

    /// Sign of a - b without building the difference when avoidable.
    friend int compare(const FieldElement& a, const FieldElement& b)
    {
        if (a.is_polynomial() && b.is_polynomial()) {
            std::size_t n = std::max(a.num_.size(), b.num_.size());
            for (std::size_t i = 0; i < n; ++i) {
                int c = cmp(i < a.num_.size() ? a.num_[i] : Rational(0),
                            i < b.num_.size() ? b.num_[i] : Rational(0));
                if (c != 0)
                    return c < 0 ? -1 : 1;
            }
            return 0;
        }
        // denominators have a positive lowest coefficient, so the sign of
        // a.num * b.den - b.num * a.den decides; its coefficients are formed
        // from the lowest order up until one is nonzero
        auto coeff = [](const poly::Poly& x, const poly::Poly& y, std::size_t i) {
            Rational c = 0;
            for (std::size_t j = 0; j < x.size() && j <= i; ++j)
                if (i - j < y.size())
                    c += x[j] * y[i - j];
            return c;
        };
        const std::size_t n = std::max(a.num_.size() + b.den_.size(), b.num_.size() + a.den_.size());
        for (std::size_t i = 0; i < n; ++i) {
            int c = cmp(coeff(a.num_, b.den_, i), coeff(b.num_, a.den_, i));
            if (c != 0)
                return c < 0 ? -1 : 1;
        }
        return 0;
    }

    friend bool operator==(const FieldElement& a, const FieldElement& b)
    {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }
    friend bool operator<(const FieldElement& a, const FieldElement& b) { return compare(a, b) < 0; }
    friend bool operator>(const FieldElement& a, const FieldElement& b) { return compare(a, b) > 0; }
    friend bool operator<=(const FieldElement& a, const FieldElement& b) { return compare(a, b) <= 0; }
    friend bool operator>=(const FieldElement& a, const FieldElement& b) { return compare(a, b) >= 0; }

    /// Canonical literal: "-3/4", "1 + 2*e - 3/2*e^2" or "(p)/(q)".
    std::string str() const
    {
        if (is_polynomial())
            return poly_str(num_);
        return "(" + poly_str(num_) + ")/(" + poly_str(den_) + ")";
    }

    friend std::ostream& operator<<(std::ostream& os, const FieldElement& x) { return os << x.str(); }

private:
    static FieldElement from_poly(poly::Poly p)
    {
        check_degree(p);
        FieldElement r;
        r.num_ = std::move(p);
        return r;
    }

    static void check_degree(const poly::Poly& p)
    {
        if (p.size() > degree_cap() + 1)
            fail(ErrorKind::ResourceLimit,
                 "polynomial degree " + std::to_string(p.size() - 1) + " exceeds cap " +
                     std::to_string(degree_cap()));
    }

    void canonicalize()
    {
        if (den_.empty())
            fail(ErrorKind::DivisionByZero, "zero denominator");
        if (num_.empty()) {
            den_ = {Rational(1)};
            return;
        }
        if (den_.size() > 1) {
            poly::Poly g = poly::gcd(num_, den_);
            if (g.size() > 1) {
                num_ = poly::divmod(std::move(num_), g).first;
                den_ = poly::divmod(std::move(den_), g).first;
            }
        }
        Rational lead = den_[static_cast<std::size_t>(poly::ord(den_))];
        if (lead != 1) {
            for (auto& c : num_)
                c /= lead;
            for (auto& c : den_)
                c /= lead;
        }
        check_degree(num_);
        check_degree(den_);
    }

    static std::string poly_str(const poly::Poly& p)
    {
        if (p.empty())
            return "0";
        std::string out;
        bool first = true;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (sgn(p[i]) == 0)
                continue;
            Rational c = p[i];
            if (first) {
                if (sgn(c) < 0) {
                    out += "-";
                    c = -c;
                }
            } else {
                out += sgn(c) < 0 ? " - " : " + ";
                c = abs(c);
            }
            first = false;
            if (i == 0) {
                out += c.get_str();
                continue;
            }
            if (c != 1)
                out += c.get_str() + "*";
            out += "e";
            if (i > 1)
                out += "^" + std::to_string(i);
        }
        return out;
    }

    poly::Poly num_;
    poly::Poly den_;
};

using Scalar = FieldElement;

inline FieldElement abs(const FieldElement& x) { return x.sign() < 0 ? -x : x; }

inline FieldElement power(FieldElement x, unsigned n)
{
    FieldElement r(1);
    while (n > 0) {
        if (n & 1u)
            r *= x;
        n >>= 1u;
        if (n > 0)
            x *= x;
    }
    return r;
}

inline const FieldElement& min(const FieldElement& a, const FieldElement& b) { return b < a ? b : a; }
inline const FieldElement& max(const FieldElement& a, const FieldElement& b) { return a < b ? b : a; }

inline Rational standard_part(const FieldElement& x) { return x.standard_part(); }

namespace detail {

/// Recursive-descent reader for scalar literals and small expressions over
/// integers, e, + - * / ^ and parentheses.
class ScalarReader {
public:
    explicit ScalarReader(std::string_view text) : text_(text) {}

    FieldElement read_all()
    {
        FieldElement v = expr();
        skip();
        if (pos_ != text_.size())
            error("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void error(const std::string& msg) const
    {
        fail(ErrorKind::ParseError, "column " + std::to_string(pos_ + 1) + ": " + msg);
    }

    void skip()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    bool eat(char c)
    {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    FieldElement expr()
    {
        FieldElement v = term();
        for (;;) {
            if (eat('+'))
                v += term();
            else if (eat('-'))
                v -= term();
            else
                return v;
        }
    }

    FieldElement term()
    {
        FieldElement v = factor();
        for (;;) {
            if (eat('*')) {
                v *= factor();
            } else if (eat('/')) {
                FieldElement d = factor();
                if (d.is_zero())
                    error("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    FieldElement factor()
    {
        if (eat('-'))
            return -factor();
        if (eat('+'))
            return factor();
        FieldElement base = primary();
        if (eat('^')) {
            skip();
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (start == pos_)
                error("expected exponent");
            unsigned long n = std::stoul(std::string(text_.substr(start, pos_ - start)));
            if (n > degree_cap())
                fail(ErrorKind::ResourceLimit, "exponent " + std::to_string(n) + " exceeds cap");
            return power(base, static_cast<unsigned>(n));
        }
        return base;
    }

    FieldElement primary()
    {
        skip();
        if (pos_ >= text_.size())
            error("unexpected end of scalar");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            FieldElement v = expr();
            if (!eat(')'))
                error("expected ')'");
            return v;
        }
        if (c == 'e') {
            ++pos_;
            return FieldElement::epsilon();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            return FieldElement(Rational(mpz_class(std::string(text_.substr(start, pos_ - start)))));
        }
        error("unexpected character '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline FieldElement parse_scalar(std::string_view text)
{
    return detail::ScalarReader(text).read_all();
}

} // namespace vtri
