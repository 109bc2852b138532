#pragma once

// Certified evaluation of Ramanujan's theta functions.
//
//   f(a, b) = sum_{n in Z} a^{n(n+1)/2} b^{n(n-1)/2}          (|ab| < 1)
//   phi(q)  = f(q, q)       = (-q; q^2)^2 (q^2; q^2)
//   psi(q)  = f(q, q^3)     = (q^2; q^2) / (q; q^2)
//   f(-q)   = f(-q, -q^2)   = (q; q)
//   chi(q)  = (-q; q^2)
//
// Every function has a product route (the default) and, where a series exists, an independent
// series route. Both fold a proven truncation bound into the output radius.

#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "precision.hpp"

namespace thetaval {

/// Structured nome q = sign * exp(-pi * sqrt(r)) with r a positive rational.
class QPoint
{
public:
    QPoint(int sign, Rational r) : m_sign(sign), m_r(std::move(r))
    {
        m_r.canonicalize();
        if (sign != 1 && sign != -1) {
            throw Error(ErrorCode::DomainError, "qpoint sign must be +1 or -1");
        }
        if (m_r <= 0) {
            throw Error(ErrorCode::DomainError, "qpoint r must be positive, got " + to_string(m_r));
        }
    }

    int sign() const noexcept
    {
        return m_sign;
    }
    const Rational &r() const noexcept
    {
        return m_r;
    }

    /// q^k computed exactly on r: (s e^{-pi sqrt r})^k = s^k e^{-pi sqrt(k^2 r)}.
    /// Fractional k is only defined for positive q.
    QPoint pow(const Rational &k) const
    {
        if (k <= 0) {
            throw Error(ErrorCode::DomainError, "qpoint exponent must be positive");
        }
        int s = m_sign;
        if (!is_integer(k)) {
            if (m_sign < 0) {
                throw Error(ErrorCode::DomainError, "fractional power of a negative nome");
            }
        } else if (m_sign < 0 && mpz_odd_p(k.get_num().get_mpz_t()) == 0) {
            s = 1;
        }
        return QPoint(s, Rational(m_r * k * k));
    }

    QPoint negated() const
    {
        return QPoint(-m_sign, m_r);
    }

    Ball to_ball(const PrecCtx &ctx) const
    {
        Ball q = exp(-(const_pi(ctx) * sqrt(Ball(m_r, ctx))));
        return m_sign < 0 ? -q : q;
    }

    std::string text() const
    {
        return std::string("qpoint(") + (m_sign > 0 ? "+1" : "-1") + ", " + to_string(m_r) + ")";
    }

    friend bool operator==(const QPoint &a, const QPoint &b)
    {
        return a.m_sign == b.m_sign && a.m_r == b.m_r;
    }

private:
    int m_sign;
    Rational m_r;
};

/// A nome given either exactly (QPoint) or as an enclosure.
class Nome
{
public:
    Nome(QPoint q) : m_value(std::move(q)) {}
    Nome(Ball q) : m_value(std::move(q)) {}

    bool is_qpoint() const noexcept
    {
        return std::holds_alternative<QPoint>(m_value);
    }
    const QPoint &qpoint() const
    {
        return std::get<QPoint>(m_value);
    }

    Ball to_ball(const PrecCtx &ctx) const
    {
        if (is_qpoint()) {
            return qpoint().to_ball(ctx);
        }
        return std::get<Ball>(m_value);
    }

    /// q^k. Exact bookkeeping for QPoints; fractional powers need a positive nome.
    Nome pow(const Rational &k, const PrecCtx &ctx) const
    {
        if (is_qpoint()) {
            return qpoint().pow(k);
        }
        const Ball &q = std::get<Ball>(m_value);
        if (!is_integer(k) && !q.is_positive()) {
            throw Error(ErrorCode::DomainError, "fractional power of a non-positive nome");
        }
        (void)ctx;
        return Nome(thetaval::pow(q, k));
    }

    bool is_positive(const PrecCtx &ctx) const
    {
        if (is_qpoint()) {
            return qpoint().sign() > 0;
        }
        return to_ball(ctx).is_positive();
    }

    std::string text() const
    {
        if (is_qpoint()) {
            return qpoint().text();
        }
        const Ball &q = std::get<Ball>(m_value);
        return q.mid_decimal(20);
    }

private:
    std::variant<QPoint, Ball> m_value;
};

/// Terms used by a truncated series and the proven bound on what was dropped.
struct SeriesTail {
    long terms_used = 0;
    double tail_bound = 0.0; // informational; the exact bound is folded into the radius
};

struct SeriesResult {
    Ball value;
    SeriesTail tail;
};

namespace detail {

using Mag = Float;

inline Mag mag(double v)
{
    Mag m(rad_prec);
    mpfr_set_d(m.get(), v, MPFR_RNDU);
    return m;
}

// |q| upper bound; throws unless it is certainly below 1.
inline Mag nome_bound(const Ball &q)
{
    Mag u = q.abs_upper();
    if (mpfr_cmp_ui(u.get(), 1) >= 0) {
        throw Error(ErrorCode::NotConvergent, "|q| enclosure is not below 1");
    }
    return u;
}

// 2^-(bits + 8): the absolute truncation target for a given precision.
inline Mag target_eps(const PrecCtx &ctx)
{
    Mag e(rad_prec);
    mpfr_set_ui_2exp(e.get(), 1, -(ctx.bits() + 8), MPFR_RNDD);
    return e;
}

// u^e rounded up.
inline Mag pow_up(const Mag &u, unsigned long e)
{
    Mag r(rad_prec);
    mpfr_pow_ui(r.get(), u.get(), e, MPFR_RNDU);
    return r;
}

// 1 / (1 - x) rounded up, for 0 <= x < 1.
inline Mag geometric_factor(const Mag &x)
{
    Mag d(rad_prec), r(rad_prec);
    mpfr_ui_sub(d.get(), 1, x.get(), MPFR_RNDD);
    if (mpfr_sgn(d.get()) <= 0) {
        throw Error(ErrorCode::NotConvergent, "geometric tail ratio not below 1");
    }
    mpfr_ui_div(r.get(), 1, d.get(), MPFR_RNDU);
    return r;
}

inline Mag mul_up(const Mag &a, const Mag &b)
{
    Mag r(rad_prec);
    mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDU);
    return r;
}

inline bool le(const Mag &a, const Mag &b)
{
    return mpfr_cmp(a.get(), b.get()) <= 0;
}

inline double to_double(const Mag &m)
{
    return mpfr_get_d(m.get(), MPFR_RNDU);
}

// Smallest N >= 0 with bound(N) <= eps, where bound is increasing-to-decreasing in N.
template <typename Bound>
long smallest_terms(const Mag &eps, Bound bound, long cap = 10'000'000)
{
    for (long n = 0; n < cap; ++n) {
        if (le(bound(n), eps)) {
            return n;
        }
    }
    throw Error(ErrorCode::NotConvergent, "series needs too many terms");
}

} // namespace detail

// ---------------------------------------------------------------------------------------------
// q-Pochhammer symbol

/// (a; q)_inf = prod_{k >= 0} (1 - a q^k), with the omitted factors bounded through
/// |log prod_{k>=K} (1 - a q^k)| <= sum_{k>=K} |a||q|^k / (1 - |a||q|^k).
inline Ball pochhammer_inf(const Ball &a, const Ball &q, const PrecCtx &ctx)
{
    using namespace detail;
    Mag u = nome_bound(q);
    Mag A = a.abs_upper();
    if (mpfr_zero_p(A.get())) {
        return Ball(1, ctx);
    }
    Mag eps = target_eps(ctx);

    long factors = 1;
    if (!mpfr_zero_p(u.get())) {
        // A u^K / (1 - u) <= eps
        Mag la(rad_prec), lu(rad_prec), le_(rad_prec), l1u(rad_prec);
        mpfr_log(la.get(), A.get(), MPFR_RNDU);
        mpfr_log(lu.get(), u.get(), MPFR_RNDU);
        mpfr_log(le_.get(), eps.get(), MPFR_RNDD);
        Mag one_minus(rad_prec);
        mpfr_ui_sub(one_minus.get(), 1, u.get(), MPFR_RNDD);
        mpfr_log(l1u.get(), one_minus.get(), MPFR_RNDD);
        double need = (mpfr_get_d(le_.get(), MPFR_RNDD) + mpfr_get_d(l1u.get(), MPFR_RNDD) -
                       mpfr_get_d(la.get(), MPFR_RNDU)) /
                      mpfr_get_d(lu.get(), MPFR_RNDU);
        factors = std::max<long>(1, static_cast<long>(std::ceil(need)) + 1);
    }

    // A posteriori: the tail factors must satisfy A u^K <= 1/2.
    Mag half(rad_prec);
    mpfr_set_d(half.get(), 0.5, MPFR_RNDN);
    Mag head = mul_up(A, pow_up(u, static_cast<unsigned long>(factors)));
    while (!le(head, half)) {
        ++factors;
        head = mul_up(A, pow_up(u, static_cast<unsigned long>(factors)));
    }

    Ball product(1, ctx);
    Ball qk(1, ctx);
    for (long k = 0; k < factors; ++k) {
        Ball factor = 1 - a * qk;
        if (factor.contains_zero()) {
            throw Error(ErrorCode::FactorNearZero, "factor " + std::to_string(k) + " of (a; q)_inf straddles zero");
        }
        product = product * factor;
        qk = qk * q;
    }

    if (!mpfr_zero_p(head.get())) {
        Mag s = mul_up(head, geometric_factor(u));      // sum of |a q^k| over k >= K
        Mag L = mul_up(s, geometric_factor(head));      // bound on |log(tail)|
        if (mpfr_cmp_ui(L.get(), 1) >= 0) {
            throw Error(ErrorCode::NotConvergent, "pochhammer tail bound too large");
        }
        Mag delta = mul_up(L, geometric_factor(L));     // |tail - 1| <= L / (1 - L)
        product.add_error(mul_up(product.abs_upper(), delta).get());
    }
    return product;
}

// ---------------------------------------------------------------------------------------------
// Ramanujan's general theta function

namespace detail {

// sum_{n >= 0} a^{n(n+1)/2} b^{n(n-1)/2}: consecutive terms have ratio a (ab)^n.
inline Ball theta_half_sum(const Ball &a, const Ball &ab, const Mag &A, const Mag &AB,
                           const PrecCtx &ctx, long &terms)
{
    Mag eps = target_eps(ctx);
    Mag half(rad_prec);
    mpfr_set_d(half.get(), 0.5, MPFR_RNDN);
    Ball sum(1, ctx);
    Ball term(1, ctx);
    Ball ratio = a;
    Mag ratio_bound = A; // A * AB^n
    Mag scale(rad_prec);
    mpfr_set_ui(scale.get(), 1, MPFR_RNDU);
    for (long n = 0;; ++n) {
        if (n > 10'000'000) {
            throw Error(ErrorCode::NotConvergent, "theta series does not settle");
        }
        if (le(ratio_bound, half)) {
            Mag tail = mul_up(mul_up(term.abs_upper(), ratio_bound), geometric_factor(ratio_bound));
            Mag goal = mul_up(eps, scale);
            if (le(tail, goal)) {
                sum.add_error(tail.get());
                terms = n + 1;
                return sum;
            }
        }
        term = term * ratio;
        sum = sum + term;
        Mag t = term.abs_upper();
        if (mpfr_cmp(t.get(), scale.get()) > 0) {
            mpfr_set(scale.get(), t.get(), MPFR_RNDU);
        }
        ratio = ratio * ab;
        ratio_bound = mul_up(ratio_bound, AB);
    }
}

} // namespace detail

inline SeriesResult theta_f_detail(const Ball &a, const Ball &b, const PrecCtx &ctx)
{
    using namespace detail;
    Ball ab = a * b;
    Mag AB = ab.abs_upper();
    if (mpfr_cmp_ui(AB.get(), 1) >= 0) {
        throw Error(ErrorCode::NotConvergent, "|ab| enclosure is not below 1");
    }
    long t1 = 0, t2 = 0;
    Ball forward = theta_half_sum(a, ab, a.abs_upper(), AB, ctx, t1);
    Ball backward = theta_half_sum(b, ab, b.abs_upper(), AB, ctx, t2);
    Ball value = forward + backward - 1;
    return {value, SeriesTail{t1 + t2 - 1, value.rad_double()}};
}

/// f(a, b) by its bilateral series.
inline Ball theta_f(const Ball &a, const Ball &b, const PrecCtx &ctx)
{
    return theta_f_detail(a, b, ctx).value;
}

/// f(a, b) by the Jacobi triple product (-a; ab)(-b; ab)(ab; ab).
inline Ball theta_f_product(const Ball &a, const Ball &b, const PrecCtx &ctx)
{
    Ball ab = a * b;
    return pochhammer_inf(-a, ab, ctx) * pochhammer_inf(-b, ab, ctx) * pochhammer_inf(ab, ab, ctx);
}

// ---------------------------------------------------------------------------------------------
// phi

/// phi(q) = 1 + 2 sum_{n>=1} q^{n^2}. With N terms the tail is at most
/// 2 |q|^{(N+1)^2} / (1 - |q|^{2N+3}). `terms` overrides the automatic choice.
inline SeriesResult phi_series_detail(const Ball &q, const PrecCtx &ctx, std::optional<long> terms = {})
{
    using namespace detail;
    Mag u = nome_bound(q);
    auto bound = [&](long n) {
        auto m = static_cast<unsigned long>(n + 1);
        Mag t = mul_up(pow_up(u, m * m), geometric_factor(pow_up(u, 2 * m + 1)));
        mpfr_mul_2ui(t.get(), t.get(), 1, MPFR_RNDU);
        return t;
    };
    long n_terms = terms ? *terms : smallest_terms(target_eps(ctx), bound);
    Ball sum(0, ctx);
    Ball qn2 = q;              // q^{n^2}
    Ball step = q * q * q;     // q^{2n+1} for the next n
    Ball q2 = q * q;
    for (long n = 1; n <= n_terms; ++n) {
        sum = sum + qn2;
        qn2 = qn2 * step;
        step = step * q2;
    }
    Ball value = 1 + 2 * sum;
    Mag tail = bound(n_terms);
    value.add_error(tail.get());
    return {value, SeriesTail{n_terms, to_double(tail)}};
}

inline Ball phi_series(const Ball &q, const PrecCtx &ctx)
{
    return phi_series_detail(q, ctx).value;
}

inline Ball phi_product(const Ball &q, const PrecCtx &ctx)
{
    Ball q2 = q * q;
    return sqr(pochhammer_inf(-q, q2, ctx)) * pochhammer_inf(q2, q2, ctx);
}

inline Ball phi(const Ball &q, const PrecCtx &ctx)
{
    return phi_product(q, ctx);
}

// ---------------------------------------------------------------------------------------------
// psi

/// psi(q) = sum_{n>=0} q^{n(n+1)/2}; tail after N terms <= |q|^{(N+1)(N+2)/2} / (1 - |q|^{N+2}).
inline SeriesResult psi_series_detail(const Ball &q, const PrecCtx &ctx, std::optional<long> terms = {})
{
    using namespace detail;
    Mag u = nome_bound(q);
    auto bound = [&](long n) {
        auto m = static_cast<unsigned long>(n);
        return mul_up(pow_up(u, (m + 1) * (m + 2) / 2), geometric_factor(pow_up(u, m + 2)));
    };
    long n_terms = terms ? *terms : smallest_terms(target_eps(ctx), bound);
    Ball sum(1, ctx);
    Ball term(1, ctx);
    Ball qn = q; // q^{n+1}
    for (long n = 1; n <= n_terms; ++n) {
        term = term * qn;
        sum = sum + term;
        qn = qn * q;
    }
    Mag tail = bound(n_terms);
    sum.add_error(tail.get());
    return {sum, SeriesTail{n_terms, to_double(tail)}};
}

inline Ball psi_series(const Ball &q, const PrecCtx &ctx)
{
    return psi_series_detail(q, ctx).value;
}

inline Ball psi_product(const Ball &q, const PrecCtx &ctx)
{
    Ball q2 = q * q;
    return pochhammer_inf(q2, q2, ctx) / pochhammer_inf(q, q2, ctx);
}

inline Ball psi(const Ball &q, const PrecCtx &ctx)
{
    return psi_product(q, ctx);
}

// ---------------------------------------------------------------------------------------------
// f(-q)

/// Pentagonal-number series 1 + sum_{n>=1} (-1)^n (q^{n(3n-1)/2} + q^{n(3n+1)/2}).
/// Tail after N terms <= 2 |q|^{(N+1)(3N+2)/2} / (1 - |q|^{3N+4}).
inline SeriesResult f_neg_series_detail(const Ball &q, const PrecCtx &ctx, std::optional<long> terms = {})
{
    using namespace detail;
    Mag u = nome_bound(q);
    auto bound = [&](long n) {
        auto m = static_cast<unsigned long>(n);
        Mag t = mul_up(pow_up(u, (m + 1) * (3 * m + 2) / 2), geometric_factor(pow_up(u, 3 * m + 4)));
        mpfr_mul_2ui(t.get(), t.get(), 1, MPFR_RNDU);
        return t;
    };
    long n_terms = terms ? *terms : smallest_terms(target_eps(ctx), bound);
    Ball sum(1, ctx);
    Ball lowpow(1, ctx);      // q^{n(3n-1)/2}
    Ball step = q;            // q^{3n-2} for the next n
    Ball q3 = q * q * q;
    for (long n = 1; n <= n_terms; ++n) {
        lowpow = lowpow * step;          // q^{n(3n-1)/2}
        Ball highpow = lowpow * pow(q, n); // q^{n(3n+1)/2}
        Ball pair = lowpow + highpow;
        sum = (n % 2 == 0) ? sum + pair : sum - pair;
        step = step * q3;
    }
    Mag tail = bound(n_terms);
    sum.add_error(tail.get());
    return {sum, SeriesTail{n_terms, to_double(tail)}};
}

inline Ball f_neg_series(const Ball &q, const PrecCtx &ctx)
{
    return f_neg_series_detail(q, ctx).value;
}

inline Ball f_neg_product(const Ball &q, const PrecCtx &ctx)
{
    return pochhammer_inf(q, q, ctx);
}

inline Ball f_neg(const Ball &q, const PrecCtx &ctx)
{
    return f_neg_product(q, ctx);
}

// ---------------------------------------------------------------------------------------------
// chi

inline Ball chi(const Ball &q, const PrecCtx &ctx)
{
    return pochhammer_inf(-q, q * q, ctx);
}

// QPoint / Nome overloads.
inline Ball phi(const Nome &q, const PrecCtx &ctx)
{
    return phi(q.to_ball(ctx), ctx);
}
inline Ball psi(const Nome &q, const PrecCtx &ctx)
{
    return psi(q.to_ball(ctx), ctx);
}
inline Ball f_neg(const Nome &q, const PrecCtx &ctx)
{
    return f_neg(q.to_ball(ctx), ctx);
}
inline Ball chi(const Nome &q, const PrecCtx &ctx)
{
    return chi(q.to_ball(ctx), ctx);
}
inline Ball phi(const QPoint &q, const PrecCtx &ctx)
{
    return phi(q.to_ball(ctx), ctx);
}
inline Ball psi(const QPoint &q, const PrecCtx &ctx)
{
    return psi(q.to_ball(ctx), ctx);
}
inline Ball f_neg(const QPoint &q, const PrecCtx &ctx)
{
    return f_neg(q.to_ball(ctx), ctx);
}
inline Ball chi(const QPoint &q, const PrecCtx &ctx)
{
    return chi(q.to_ball(ctx), ctx);
}

} // namespace thetaval
