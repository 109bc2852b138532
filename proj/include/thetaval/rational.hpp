#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "error.hpp"

namespace thetaval {

/// Exact rational number (GMP).
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1)
{
    if (den == 0) {
        throw Error(ErrorCode::DomainError, "zero denominator");
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline bool is_integer(const Rational &r)
{
    return r.get_den() == 1;
}

/// "p" or "p/q"; never uses decimal notation, so it parses back exactly.
inline std::string to_string(const Rational &r)
{
    return r.get_str();
}

/// Parses "-3", "7/4", "0.125", "1.5e-3" into an exact rational. Decimal input is converted
/// digit by digit; no binary rounding takes place.
inline Rational parse_rational(std::string_view text)
{
    auto fail = [&]() -> Error {
        return Error(ErrorCode::ParseError, "not a rational number: '" + std::string(text) + "'");
    };
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    std::size_t end = text.size();
    while (end > i && std::isspace(static_cast<unsigned char>(text[end - 1]))) {
        --end;
    }
    std::string_view s = text.substr(i, end - i);
    if (s.empty()) {
        throw fail();
    }
    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) {
        throw fail();
    }
    Rational value;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        auto digits = [](std::string_view d) {
            if (d.empty()) {
                return false;
            }
            for (char c : d) {
                if (!std::isdigit(static_cast<unsigned char>(c))) {
                    return false;
                }
            }
            return true;
        };
        if (!digits(num) || !digits(den)) {
            throw fail();
        }
        mpz_class n(std::string(num), 10), d(std::string(den), 10);
        if (d == 0) {
            throw Error(ErrorCode::DomainError, "zero denominator in '" + std::string(text) + "'");
        }
        value = Rational(n, d);
        value.canonicalize();
    } else {
        std::string mantissa;
        long frac_digits = 0;
        long exponent = 0;
        bool seen_point = false, seen_digit = false;
        std::size_t k = 0;
        for (; k < s.size(); ++k) {
            char c = s[k];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                mantissa.push_back(c);
                seen_digit = true;
                if (seen_point) {
                    ++frac_digits;
                }
            } else if (c == '.' && !seen_point) {
                seen_point = true;
            } else {
                break;
            }
        }
        if (!seen_digit) {
            throw fail();
        }
        if (k < s.size()) {
            if (s[k] != 'e' && s[k] != 'E') {
                throw fail();
            }
            auto exp_text = s.substr(k + 1);
            if (exp_text.empty()) {
                throw fail();
            }
            std::size_t used = 0;
            try {
                exponent = std::stol(std::string(exp_text), &used);
            } catch (const std::exception &) {
                throw fail();
            }
            if (used != exp_text.size() || exponent > 100000 || exponent < -100000) {
                throw fail();
            }
        }
        mpz_class num(mantissa, 10);
        long shift = exponent - frac_digits;
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
        value = shift < 0 ? Rational(num, scale) : Rational(num * scale);
        value.canonicalize();
    }
    return negative ? Rational(-value) : value;
}

} // namespace thetaval
