#pragma once

// Midpoint-radius ("ball") arithmetic on top of MPFR.
//
// A Ball stores an MPFR midpoint at the working precision and a 64-bit MPFR radius that is
// only ever rounded upwards. Every operation returns a ball that contains the exact result
// for every choice of inputs inside the argument balls.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include <mpfr.h>

#include "error.hpp"
#include "rational.hpp"

namespace thetaval {

/// Working precision in bits.
class PrecCtx
{
public:
    static constexpr long min_bits = 64;
    static constexpr long default_bits = 512;

    explicit PrecCtx(long bits = default_bits) : m_bits(bits)
    {
        if (bits < min_bits) {
            throw Error(ErrorCode::PreconditionViolated,
                        "working precision must be at least 64 bits, got " + std::to_string(bits));
        }
    }
    long bits() const noexcept
    {
        return m_bits;
    }
    PrecCtx doubled() const
    {
        return PrecCtx(m_bits * 2);
    }
    PrecCtx with_extra(long extra) const
    {
        return PrecCtx(m_bits + extra);
    }
    friend bool operator==(const PrecCtx &, const PrecCtx &) = default;

private:
    long m_bits;
};

/// RAII owner of an mpfr_t.
class Float
{
public:
    explicit Float(mpfr_prec_t prec = 64)
    {
        mpfr_init2(m_value, prec);
        mpfr_set_zero(m_value, 1);
    }
    Float(const Float &other)
    {
        mpfr_init2(m_value, mpfr_get_prec(other.m_value));
        mpfr_set(m_value, other.m_value, MPFR_RNDN);
    }
    Float(Float &&other) noexcept
    {
        mpfr_init2(m_value, MPFR_PREC_MIN);
        mpfr_swap(m_value, other.m_value);
    }
    Float &operator=(const Float &other)
    {
        if (this != &other) {
            mpfr_set_prec(m_value, mpfr_get_prec(other.m_value));
            mpfr_set(m_value, other.m_value, MPFR_RNDN);
        }
        return *this;
    }
    Float &operator=(Float &&other) noexcept
    {
        mpfr_swap(m_value, other.m_value);
        return *this;
    }
    ~Float()
    {
        mpfr_clear(m_value);
    }

    mpfr_ptr get() noexcept
    {
        return m_value;
    }
    mpfr_srcptr get() const noexcept
    {
        return m_value;
    }
    mpfr_prec_t prec() const noexcept
    {
        return mpfr_get_prec(m_value);
    }

private:
    mpfr_t m_value;
};

namespace detail {

inline constexpr mpfr_prec_t rad_prec = 64;

// Upper bound for one unit in the last place of x (zero for exact zero).
inline void add_ulp(Float &rad, mpfr_srcptr x)
{
    if (mpfr_zero_p(x) || !mpfr_number_p(x)) {
        return;
    }
    Float ulp(rad_prec);
    mpfr_set_ui_2exp(ulp.get(), 1, mpfr_get_exp(x) - mpfr_get_prec(x), MPFR_RNDU);
    mpfr_add(rad.get(), rad.get(), ulp.get(), MPFR_RNDU);
}

inline Float abs_up(mpfr_srcptr x)
{
    Float r(rad_prec);
    mpfr_abs(r.get(), x, MPFR_RNDU);
    return r;
}

inline Float abs_down(mpfr_srcptr x)
{
    Float r(rad_prec);
    mpfr_abs(r.get(), x, MPFR_RNDD);
    return r;
}

} // namespace detail

class Ball
{
public:
    /// Exact zero at the given precision.
    explicit Ball(const PrecCtx &ctx) : Ball(static_cast<mpfr_prec_t>(ctx.bits())) {}

    Ball(long value, const PrecCtx &ctx) : Ball(ctx)
    {
        if (mpfr_set_si(m_mid.get(), value, MPFR_RNDN) != 0) {
            detail::add_ulp(m_rad, m_mid.get());
        }
    }

    Ball(const Rational &value, const PrecCtx &ctx) : Ball(ctx)
    {
        if (mpfr_set_q(m_mid.get(), value.get_mpq_t(), MPFR_RNDN) != 0) {
            detail::add_ulp(m_rad, m_mid.get());
        }
    }

    /// Smallest ball (at `prec` bits) containing the closed interval [lo, hi].
    static Ball from_interval(mpfr_srcptr lo, mpfr_srcptr hi, mpfr_prec_t prec)
    {
        Ball out(prec);
        mpfr_add(out.m_mid.get(), lo, hi, MPFR_RNDN);
        mpfr_div_2ui(out.m_mid.get(), out.m_mid.get(), 1, MPFR_RNDN);
        Float up(detail::rad_prec), down(detail::rad_prec);
        mpfr_sub(up.get(), hi, out.m_mid.get(), MPFR_RNDU);
        mpfr_sub(down.get(), out.m_mid.get(), lo, MPFR_RNDU);
        mpfr_max(out.m_rad.get(), up.get(), down.get(), MPFR_RNDU);
        if (mpfr_sgn(out.m_rad.get()) < 0) {
            mpfr_set_zero(out.m_rad.get(), 1);
        }
        return out;
    }

    /// Ball with explicit midpoint and radius (radius rounded up).
    static Ball from_mid_rad(mpfr_srcptr mid, mpfr_srcptr rad, mpfr_prec_t prec)
    {
        Ball out(prec);
        if (mpfr_set(out.m_mid.get(), mid, MPFR_RNDN) != 0) {
            detail::add_ulp(out.m_rad, out.m_mid.get());
        }
        Float r(detail::rad_prec);
        mpfr_abs(r.get(), rad, MPFR_RNDU);
        mpfr_add(out.m_rad.get(), out.m_rad.get(), r.get(), MPFR_RNDU);
        return out;
    }

    mpfr_prec_t prec() const noexcept
    {
        return m_mid.prec();
    }
    PrecCtx ctx() const
    {
        return PrecCtx(std::max<long>(PrecCtx::min_bits, prec()));
    }
    mpfr_srcptr mid() const noexcept
    {
        return m_mid.get();
    }
    mpfr_srcptr rad() const noexcept
    {
        return m_rad.get();
    }
    bool is_exact() const noexcept
    {
        return mpfr_zero_p(m_rad.get()) != 0;
    }
    bool is_finite() const noexcept
    {
        return mpfr_number_p(m_mid.get()) && mpfr_number_p(m_rad.get());
    }

    /// Lower endpoint, rounded down, at `prec` bits (default: the ball's precision).
    Float lower(mpfr_prec_t prec = 0) const
    {
        Float out(prec ? prec : this->prec());
        mpfr_sub(out.get(), m_mid.get(), m_rad.get(), MPFR_RNDD);
        return out;
    }
    Float upper(mpfr_prec_t prec = 0) const
    {
        Float out(prec ? prec : this->prec());
        mpfr_add(out.get(), m_mid.get(), m_rad.get(), MPFR_RNDU);
        return out;
    }
    /// Upper bound of |x| over the ball (64-bit).
    Float abs_upper() const
    {
        Float out = detail::abs_up(m_mid.get());
        mpfr_add(out.get(), out.get(), m_rad.get(), MPFR_RNDU);
        return out;
    }
    /// Lower bound of |x| over the ball (64-bit); zero when the ball touches zero.
    Float abs_lower() const
    {
        Float out = detail::abs_down(m_mid.get());
        mpfr_sub(out.get(), out.get(), m_rad.get(), MPFR_RNDD);
        if (mpfr_sgn(out.get()) < 0) {
            mpfr_set_zero(out.get(), 1);
        }
        return out;
    }

    bool contains_zero() const
    {
        return mpfr_cmpabs(m_mid.get(), m_rad.get()) <= 0;
    }
    bool is_positive() const
    {
        return mpfr_sgn(lower(detail::rad_prec).get()) > 0;
    }
    bool is_negative() const
    {
        return mpfr_sgn(upper(detail::rad_prec).get()) < 0;
    }
    bool is_nonzero() const
    {
        return !contains_zero();
    }

    bool contains(const Rational &value) const
    {
        Float d(detail::rad_prec);
        mpfr_sub_q(d.get(), m_mid.get(), value.get_mpq_t(), MPFR_RNDZ);
        return mpfr_cmpabs(d.get(), m_rad.get()) <= 0;
    }
    bool contains(long value) const
    {
        return contains(Rational(value));
    }
    /// True iff `inner` lies entirely inside this ball.
    bool contains(const Ball &inner) const
    {
        Float d(detail::rad_prec);
        mpfr_sub(d.get(), m_mid.get(), inner.m_mid.get(), MPFR_RNDA);
        mpfr_abs(d.get(), d.get(), MPFR_RNDU);
        mpfr_add(d.get(), d.get(), inner.m_rad.get(), MPFR_RNDU);
        return mpfr_cmp(d.get(), m_rad.get()) <= 0;
    }

    friend bool overlaps(const Ball &a, const Ball &b)
    {
        Float d(detail::rad_prec), r(detail::rad_prec);
        mpfr_sub(d.get(), a.m_mid.get(), b.m_mid.get(), MPFR_RNDZ);
        mpfr_add(r.get(), a.m_rad.get(), b.m_rad.get(), MPFR_RNDU);
        return mpfr_cmpabs(d.get(), r.get()) <= 0;
    }

    /// Bit-identical comparison (midpoint, radius and precision).
    friend bool identical(const Ball &a, const Ball &b)
    {
        return a.prec() == b.prec() && mpfr_equal_p(a.m_mid.get(), b.m_mid.get()) &&
               mpfr_equal_p(a.m_rad.get(), b.m_rad.get());
    }

    double mid_double() const
    {
        return mpfr_get_d(m_mid.get(), MPFR_RNDN);
    }
    double rad_double() const
    {
        return mpfr_get_d(m_rad.get(), MPFR_RNDU);
    }
    /// floor(log10(rad)), or a very negative number for exact balls.
    long rad_exponent10() const
    {
        if (is_exact()) {
            return -static_cast<long>(prec() * 0.30103) - 1;
        }
        Float l(detail::rad_prec);
        mpfr_log10(l.get(), m_rad.get(), MPFR_RNDU);
        return static_cast<long>(std::floor(mpfr_get_d(l.get(), MPFR_RNDU)));
    }

    /// Midpoint as a decimal string with `digits` significant digits.
    std::string mid_decimal(int digits) const
    {
        return format_decimal(m_mid.get(), digits);
    }

    static std::string format_decimal(mpfr_srcptr x, int digits)
    {
        if (mpfr_zero_p(x)) {
            return "0";
        }
        if (!mpfr_number_p(x)) {
            return mpfr_nan_p(x) ? "nan" : (mpfr_sgn(x) > 0 ? "inf" : "-inf");
        }
        digits = std::max(1, digits);
        mpfr_exp_t exp10 = 0;
        char *raw = mpfr_get_str(nullptr, &exp10, 10, static_cast<std::size_t>(digits), x, MPFR_RNDN);
        std::string s(raw);
        mpfr_free_str(raw);
        std::string sign;
        if (!s.empty() && s.front() == '-') {
            sign = "-";
            s.erase(0, 1);
        }
        // value = 0.s * 10^exp10
        if (exp10 > 0 && exp10 <= 30) {
            auto point = static_cast<std::size_t>(exp10);
            if (point >= s.size()) {
                return sign + s + std::string(point - s.size(), '0');
            }
            return sign + s.substr(0, point) + "." + s.substr(point);
        }
        if (exp10 <= 0 && exp10 > -5) {
            return sign + "0." + std::string(static_cast<std::size_t>(-exp10), '0') + s;
        }
        std::string mant = s.substr(0, 1);
        if (s.size() > 1) {
            mant += "." + s.substr(1);
        }
        return sign + mant + "e" + std::to_string(static_cast<long>(exp10) - 1);
    }

    // Mutators used by the arithmetic kernel.
    mpfr_ptr mid_mut() noexcept
    {
        return m_mid.get();
    }
    mpfr_ptr rad_mut() noexcept
    {
        return m_rad.get();
    }
    /// Widen the radius by a nonnegative error term.
    Ball &add_error(mpfr_srcptr err)
    {
        Float e(detail::rad_prec);
        mpfr_abs(e.get(), err, MPFR_RNDU);
        mpfr_add(m_rad.get(), m_rad.get(), e.get(), MPFR_RNDU);
        return *this;
    }
    /// Account for a rounded midpoint: widen by one ulp if `ternary` reports an inexact result.
    Ball &account_rounding(int ternary)
    {
        if (ternary != 0) {
            detail::add_ulp(m_rad, m_mid.get());
        }
        return *this;
    }

    explicit Ball(mpfr_prec_t prec) : m_mid(prec), m_rad(detail::rad_prec) {}

private:
    Float m_mid;
    Float m_rad;
};

// ---------------------------------------------------------------------------------------------
// Arithmetic

namespace detail {

inline mpfr_prec_t joint_prec(const Ball &a, const Ball &b)
{
    return std::max(a.prec(), b.prec());
}

} // namespace detail

inline Ball operator-(const Ball &x)
{
    Ball out(x.prec());
    mpfr_neg(out.mid_mut(), x.mid(), MPFR_RNDN);
    mpfr_set(out.rad_mut(), x.rad(), MPFR_RNDU);
    return out;
}

inline Ball operator+(const Ball &a, const Ball &b)
{
    Ball out(detail::joint_prec(a, b));
    int t = mpfr_add(out.mid_mut(), a.mid(), b.mid(), MPFR_RNDN);
    mpfr_add(out.rad_mut(), a.rad(), b.rad(), MPFR_RNDU);
    return out.account_rounding(t);
}

inline Ball operator-(const Ball &a, const Ball &b)
{
    Ball out(detail::joint_prec(a, b));
    int t = mpfr_sub(out.mid_mut(), a.mid(), b.mid(), MPFR_RNDN);
    mpfr_add(out.rad_mut(), a.rad(), b.rad(), MPFR_RNDU);
    return out.account_rounding(t);
}

inline Ball operator*(const Ball &a, const Ball &b)
{
    Ball out(detail::joint_prec(a, b));
    int t = mpfr_mul(out.mid_mut(), a.mid(), b.mid(), MPFR_RNDN);
    // |a|*rb + |b|*ra + ra*rb
    Float term(detail::rad_prec);
    Float am = detail::abs_up(a.mid());
    Float bm = detail::abs_up(b.mid());
    mpfr_mul(out.rad_mut(), am.get(), b.rad(), MPFR_RNDU);
    mpfr_mul(term.get(), bm.get(), a.rad(), MPFR_RNDU);
    mpfr_add(out.rad_mut(), out.rad_mut(), term.get(), MPFR_RNDU);
    mpfr_mul(term.get(), a.rad(), b.rad(), MPFR_RNDU);
    mpfr_add(out.rad_mut(), out.rad_mut(), term.get(), MPFR_RNDU);
    return out.account_rounding(t);
}

inline Ball operator/(const Ball &a, const Ball &b)
{
    Float bm_lo = detail::abs_down(b.mid());
    Float gap(detail::rad_prec);
    mpfr_sub(gap.get(), bm_lo.get(), b.rad(), MPFR_RNDD);
    if (mpfr_sgn(gap.get()) <= 0) {
        throw Error(ErrorCode::DivisorStraddlesZero, "divisor enclosure contains zero");
    }
    Ball out(detail::joint_prec(a, b));
    int t = mpfr_div(out.mid_mut(), a.mid(), b.mid(), MPFR_RNDN);
    // (|a| rb + |b| ra) / (|b| (|b| - rb))
    Float num(detail::rad_prec), term(detail::rad_prec), den(detail::rad_prec);
    Float am = detail::abs_up(a.mid());
    Float bm_hi = detail::abs_up(b.mid());
    mpfr_mul(num.get(), am.get(), b.rad(), MPFR_RNDU);
    mpfr_mul(term.get(), bm_hi.get(), a.rad(), MPFR_RNDU);
    mpfr_add(num.get(), num.get(), term.get(), MPFR_RNDU);
    mpfr_mul(den.get(), bm_lo.get(), gap.get(), MPFR_RNDD);
    mpfr_div(out.rad_mut(), num.get(), den.get(), MPFR_RNDU);
    return out.account_rounding(t);
}

inline Ball &operator+=(Ball &a, const Ball &b)
{
    return a = a + b;
}
inline Ball &operator-=(Ball &a, const Ball &b)
{
    return a = a - b;
}
inline Ball &operator*=(Ball &a, const Ball &b)
{
    return a = a * b;
}
inline Ball &operator/=(Ball &a, const Ball &b)
{
    return a = a / b;
}

// Mixed operations with exact integers; the integer takes the ball's precision.
inline Ball operator+(const Ball &a, long b)
{
    return a + Ball(b, a.ctx());
}
inline Ball operator+(long a, const Ball &b)
{
    return Ball(a, b.ctx()) + b;
}
inline Ball operator-(const Ball &a, long b)
{
    return a - Ball(b, a.ctx());
}
inline Ball operator-(long a, const Ball &b)
{
    return Ball(a, b.ctx()) - b;
}
inline Ball operator*(const Ball &a, long b)
{
    return a * Ball(b, a.ctx());
}
inline Ball operator*(long a, const Ball &b)
{
    return Ball(a, b.ctx()) * b;
}
inline Ball operator/(const Ball &a, long b)
{
    return a / Ball(b, a.ctx());
}
inline Ball operator/(long a, const Ball &b)
{
    return Ball(a, b.ctx()) / b;
}

inline Ball sqr(const Ball &x)
{
    return x * x;
}

inline Ball abs(const Ball &x)
{
    if (mpfr_sgn(x.mid()) >= 0) {
        return x;
    }
    return -x;
}

/// Integer power by repeated squaring; negative exponents invert.
inline Ball pow(const Ball &x, long n)
{
    if (n == 0) {
        return Ball(1, x.ctx());
    }
    if (n < 0) {
        return 1 / pow(x, -n);
    }
    Ball result(1, x.ctx());
    Ball base = x;
    auto e = static_cast<unsigned long>(n);
    while (true) {
        if (e & 1u) {
            result = result * base;
        }
        e >>= 1u;
        if (e == 0) {
            break;
        }
        base = base * base;
    }
    return result;
}

// ---------------------------------------------------------------------------------------------
// Elementary functions. Midpoint is correctly rounded by MPFR; the input radius is propagated
// through a bound on |f'| over the ball.

namespace detail {

inline void require_positive(const Ball &x, const char *fn)
{
    if (!x.is_positive()) {
        throw Error(ErrorCode::DomainError, std::string(fn) + " of a non-positive enclosure");
    }
}

} // namespace detail

inline Ball sqrt(const Ball &x)
{
    detail::require_positive(x, "sqrt");
    Ball out(x.prec());
    out.account_rounding(mpfr_sqrt(out.mid_mut(), x.mid(), MPFR_RNDN));
    if (!x.is_exact()) {
        // |f'| <= 1 / (2 sqrt(lo))
        Float lo = x.lower(detail::rad_prec);
        Float d(detail::rad_prec), e(detail::rad_prec);
        mpfr_sqrt(d.get(), lo.get(), MPFR_RNDD);
        mpfr_mul_2ui(d.get(), d.get(), 1, MPFR_RNDD);
        mpfr_div(e.get(), x.rad(), d.get(), MPFR_RNDU);
        out.add_error(e.get());
    }
    return out;
}

/// n-th root. Even n requires a positive ball; odd n accepts any ball excluding zero.
inline Ball rootn(const Ball &x, unsigned long n)
{
    if (n == 0) {
        throw Error(ErrorCode::DomainError, "zeroth root");
    }
    if (n == 1) {
        return x;
    }
    if (n % 2 == 0) {
        if (!x.is_positive()) {
            throw Error(ErrorCode::NegativeBaseEvenRoot, "even root of a non-positive enclosure");
        }
    } else if (x.contains_zero()) {
        if (x.is_exact()) {
            return x;
        }
        throw Error(ErrorCode::DomainError, "odd root of an enclosure containing zero");
    }
    Ball out(x.prec());
    out.account_rounding(mpfr_rootn_ui(out.mid_mut(), x.mid(), n, MPFR_RNDN));
    if (!x.is_exact()) {
        // |f'(t)| = |t|^(1/n) / (n |t|), maximal at the smallest |t|
        Float lo = x.abs_lower();
        Float num(detail::rad_prec), den(detail::rad_prec), e(detail::rad_prec);
        mpfr_rootn_ui(num.get(), lo.get(), n, MPFR_RNDU);
        mpfr_mul_ui(den.get(), lo.get(), n, MPFR_RNDD);
        mpfr_div(e.get(), num.get(), den.get(), MPFR_RNDU);
        mpfr_mul(e.get(), e.get(), x.rad(), MPFR_RNDU);
        out.add_error(e.get());
    }
    return out;
}

/// x^(p/q). Integer exponents accept any base (zero only for positive exponents); fractional
/// exponents require a strictly positive base.
inline Ball pow(const Ball &x, const Rational &e)
{
    if (is_integer(e)) {
        if (!e.get_num().fits_slong_p()) {
            throw Error(ErrorCode::UnsupportedArgument, "integer exponent too large");
        }
        return pow(x, e.get_num().get_si());
    }
    if (!x.is_positive()) {
        throw Error(ErrorCode::NegativeBaseEvenRoot,
                    "fractional power of a non-positive enclosure (exponent " + to_string(e) + ")");
    }
    if (!e.get_den().fits_ulong_p() || !e.get_num().fits_slong_p()) {
        throw Error(ErrorCode::UnsupportedArgument, "rational exponent too large");
    }
    return pow(rootn(x, e.get_den().get_ui()), e.get_num().get_si());
}

inline Ball exp(const Ball &x)
{
    Ball out(x.prec());
    out.account_rounding(mpfr_exp(out.mid_mut(), x.mid(), MPFR_RNDN));
    if (!x.is_exact()) {
        Float hi = x.upper(detail::rad_prec);
        Float e(detail::rad_prec);
        mpfr_exp(e.get(), hi.get(), MPFR_RNDU);
        mpfr_mul(e.get(), e.get(), x.rad(), MPFR_RNDU);
        out.add_error(e.get());
    }
    return out;
}

inline Ball log(const Ball &x)
{
    detail::require_positive(x, "log");
    Ball out(x.prec());
    out.account_rounding(mpfr_log(out.mid_mut(), x.mid(), MPFR_RNDN));
    if (!x.is_exact()) {
        Float lo = x.lower(detail::rad_prec);
        Float e(detail::rad_prec);
        mpfr_div(e.get(), x.rad(), lo.get(), MPFR_RNDU);
        out.add_error(e.get());
    }
    return out;
}

inline Ball cos(const Ball &x)
{
    Ball out(x.prec());
    out.account_rounding(mpfr_cos(out.mid_mut(), x.mid(), MPFR_RNDN));
    return out.add_error(x.rad());
}

inline Ball sin(const Ball &x)
{
    Ball out(x.prec());
    out.account_rounding(mpfr_sin(out.mid_mut(), x.mid(), MPFR_RNDN));
    return out.add_error(x.rad());
}

inline Ball const_pi(const PrecCtx &ctx)
{
    Ball out(ctx);
    return out.account_rounding(mpfr_const_pi(out.mid_mut(), MPFR_RNDN));
}

// ---------------------------------------------------------------------------------------------
// Arithmetic-geometric mean

/// Certified AGM of two positive balls.
///
/// The AGM is increasing in both arguments, and for positive reals it always lies between the
/// two current iterates. Iterating once from the lower endpoints with downward rounding and
/// once from the upper endpoints with upward rounding therefore brackets the true value.
inline Ball agm(const Ball &a, const Ball &b)
{
    if (!a.is_positive() || !b.is_positive()) {
        throw Error(ErrorCode::DomainError, "agm requires positive arguments");
    }
    const mpfr_prec_t prec = detail::joint_prec(a, b);
    const mpfr_prec_t work = prec + 16;

    auto bracket = [work](Float x, Float y, mpfr_rnd_t rnd) {
        Float nx(work), ny(work), diff(detail::rad_prec), prev(detail::rad_prec);
        mpfr_set_inf(prev.get(), 1);
        for (int iter = 0; iter < 200; ++iter) {
            mpfr_add(nx.get(), x.get(), y.get(), rnd);
            mpfr_div_2ui(nx.get(), nx.get(), 1, rnd);
            mpfr_mul(ny.get(), x.get(), y.get(), rnd);
            mpfr_sqrt(ny.get(), ny.get(), rnd);
            std::swap(x, nx);
            std::swap(y, ny);
            mpfr_sub(diff.get(), x.get(), y.get(), MPFR_RNDU);
            mpfr_abs(diff.get(), diff.get(), MPFR_RNDU);
            // Stop once the iterates agree to the working precision or stop improving.
            if (mpfr_zero_p(diff.get()) ||
                mpfr_get_exp(diff.get()) < mpfr_get_exp(x.get()) - static_cast<mpfr_exp_t>(work) + 2 ||
                mpfr_cmp(diff.get(), prev.get()) >= 0) {
                break;
            }
            mpfr_set(prev.get(), diff.get(), MPFR_RNDU);
        }
        return std::pair<Float, Float>(std::move(x), std::move(y));
    };

    auto [la, lb] = bracket(a.lower(work), b.lower(work), MPFR_RNDD);
    auto [ua, ub] = bracket(a.upper(work), b.upper(work), MPFR_RNDU);
    Float lo(work), hi(work);
    mpfr_min(lo.get(), la.get(), lb.get(), MPFR_RNDD);
    mpfr_max(hi.get(), ua.get(), ub.get(), MPFR_RNDU);
    return Ball::from_interval(lo.get(), hi.get(), prec);
}

// ---------------------------------------------------------------------------------------------
// Gamma function

namespace detail {

// Gamma on a ball inside (0, 3]. The midpoint comes from MPFR's correctly rounded gamma.
// Radius propagation: on (0, 3], |psi(t)| <= 1/t + 1 and Gamma is convex, so
// |Gamma'(t)| <= max(Gamma(lo), Gamma(hi), 1) * (1/lo + 1).
inline Ball gamma_small(const Ball &x)
{
    Ball out(x.prec());
    out.account_rounding(mpfr_gamma(out.mid_mut(), x.mid(), MPFR_RNDN));
    if (!x.is_exact()) {
        Float lo = x.lower(rad_prec), hi = x.upper(rad_prec);
        if (mpfr_sgn(lo.get()) <= 0) {
            throw Error(ErrorCode::UnsupportedArgument, "gamma argument enclosure reaches zero");
        }
        Float g1(rad_prec), g2(rad_prec), bound(rad_prec), t(rad_prec);
        mpfr_gamma(g1.get(), lo.get(), MPFR_RNDU);
        mpfr_gamma(g2.get(), hi.get(), MPFR_RNDU);
        mpfr_max(bound.get(), g1.get(), g2.get(), MPFR_RNDU);
        if (mpfr_cmp_ui(bound.get(), 1) < 0) {
            mpfr_set_ui(bound.get(), 1, MPFR_RNDU);
        }
        mpfr_ui_div(t.get(), 1, lo.get(), MPFR_RNDU);
        mpfr_add_ui(t.get(), t.get(), 1, MPFR_RNDU);
        mpfr_mul(bound.get(), bound.get(), t.get(), MPFR_RNDU);
        mpfr_mul(bound.get(), bound.get(), x.rad(), MPFR_RNDU);
        out.add_error(bound.get());
    }
    return out;
}

} // namespace detail

/// Certified enclosure of Gamma(p) for rational p in (0, 2].
inline Ball gamma_rational(const Rational &p, const PrecCtx &ctx)
{
    if (p <= 0 || p > 2) {
        throw Error(ErrorCode::UnsupportedArgument,
                    "gamma_rational supports (0, 2], got " + to_string(p));
    }
    return detail::gamma_small(Ball(p, ctx));
}

} // namespace thetaval
