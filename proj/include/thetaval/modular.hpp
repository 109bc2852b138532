#pragma once

// The x <-> q <-> z correspondence and everything built on it: elliptic integrals, the three
// transformation processes, multipliers, singular moduli, class invariants, and residual
// checks for individual modular equations.
//
// Conventions (Ramanujan's): x = alpha = k^2, z = 2F1(1/2, 1/2; 1; x) = phi(q)^2 and
// q = exp(-pi 2F1(1-x) / 2F1(x)).

#include <array>
#include <string>
#include <vector>

#include "precision.hpp"
#include "qseries.hpp"

namespace thetaval {

// ---------------------------------------------------------------------------------------------
// 2F1(1/2, 1/2; 1; x), K(k) and the nome

/// 2F1(1/2, 1/2; 1; x) = (2/pi) K(sqrt x) = 1 / agm(1, sqrt(1 - x)).
/// Defined for every x < 1 (negative x arises after a change of sign).
inline Ball hyp2f1_half(const Ball &x, const PrecCtx &ctx)
{
    Ball complement = 1 - x;
    if (!complement.is_positive()) {
        throw Error(ErrorCode::DomainError, "hyp2f1_half needs x < 1");
    }
    return 1 / agm(Ball(1, ctx), sqrt(complement));
}

/// Direct hypergeometric series, sum ((1/2)_n / n!)^2 x^n, for |x| <= 0.7. The coefficients
/// decrease, so the tail after N terms is at most c_N |x|^N / (1 - |x|).
inline Ball hyp2f1_half_series(const Ball &x, const PrecCtx &ctx)
{
    using namespace detail;
    Mag u = x.abs_upper();
    if (mpfr_cmp_d(u.get(), 0.7) > 0) {
        throw Error(ErrorCode::DomainError, "series route is limited to |x| <= 0.7");
    }
    Mag eps = target_eps(ctx);
    Ball sum(0, ctx);
    Ball coeff(1, ctx);  // c_n
    Ball xn(1, ctx);     // x^n
    Mag c_bound(rad_prec);
    mpfr_set_ui(c_bound.get(), 1, MPFR_RNDU);
    for (long n = 0;; ++n) {
        Mag tail = mul_up(mul_up(coeff.abs_upper(), xn.abs_upper()), geometric_factor(u));
        if (le(tail, eps) || mpfr_zero_p(u.get())) {
            if (mpfr_zero_p(u.get()) && n == 0) {
                sum = sum + coeff;
                return sum;
            }
            sum.add_error(tail.get());
            return sum;
        }
        sum = sum + coeff * xn;
        Rational f(2 * n + 1, 2 * n + 2);
        coeff = coeff * sqr(Ball(f, ctx));
        xn = xn * x;
        if (n > 1'000'000) {
            throw Error(ErrorCode::NotConvergent, "hypergeometric series does not settle");
        }
    }
}

/// Complete elliptic integral of the first kind, K(k) = pi / (2 agm(1, k')).
inline Ball elliptic_k(const Ball &k, const PrecCtx &ctx)
{
    return const_pi(ctx) / (2 * agm(Ball(1, ctx), sqrt(1 - k * k)));
}

/// q(x) = exp(-pi 2F1(1 - x) / 2F1(x)) for 0 < x < 1.
inline Ball nome(const Ball &x, const PrecCtx &ctx)
{
    if (!x.is_positive() || !(1 - x).is_positive()) {
        throw Error(ErrorCode::DomainError, "nome needs 0 < x < 1");
    }
    return exp(-(const_pi(ctx) * hyp2f1_half(1 - x, ctx) / hyp2f1_half(x, ctx)));
}

namespace detail {

inline void require_unit_nome(const Ball &q, const char *fn)
{
    if (!q.is_positive() || !(1 - q).is_positive()) {
        throw Error(ErrorCode::DomainError, std::string(fn) + " needs 0 < q < 1");
    }
}

} // namespace detail

/// Inverse of the nome map through theta quotients:
///   x = 16 q psi(q^2)^4 / phi(q)^4       (theta_2^4 / theta_3^4, free of cancellation)
/// The complement 1 - x = (phi(-q) / phi(q))^4 is available from modulus_complement_from_q.
inline Ball modulus_from_q(const Ball &q, const PrecCtx &ctx)
{
    detail::require_unit_nome(q, "modulus_from_q");
    return 16 * q * pow(psi(q * q, ctx) / phi(q, ctx), 4);
}

/// 1 - x(q) = (phi(-q) / phi(q))^4, from a change of sign applied to z = phi(q)^2.
inline Ball modulus_complement_from_q(const Ball &q, const PrecCtx &ctx)
{
    detail::require_unit_nome(q, "modulus_complement_from_q");
    return pow(phi(-q, ctx) / phi(q, ctx), 4);
}

// ---------------------------------------------------------------------------------------------
// Transformation processes

/// (x, q, z) with z = 2F1(1/2, 1/2; 1; x) = phi(q)^2.
struct ModularTriple {
    Ball x;
    Ball q;
    Ball z;

    static ModularTriple from_modulus(const Ball &x, const PrecCtx &ctx)
    {
        return {x, nome(x, ctx), hyp2f1_half(x, ctx)};
    }
};

enum class TransformKind { duplication, dimidiation, change_of_sign };

inline const char *to_string(TransformKind kind)
{
    switch (kind) {
    case TransformKind::duplication: return "duplication";
    case TransformKind::dimidiation: return "dimidiation";
    case TransformKind::change_of_sign: return "change_of_sign";
    }
    return "?";
}

/// Applies one of the three substitutions to a triple:
///   duplication     (((1 - s)/(1 + s))^2, q^2, z (1 + s)/2),     s = sqrt(1 - x)
///   dimidiation     (4 t / (1 + t)^2,     sqrt q, z (1 + t)),     t = sqrt(x)
///   change of sign  (x / (x - 1),         -q,     z sqrt(1 - x))
inline ModularTriple transform(const ModularTriple &t, TransformKind kind, const PrecCtx &ctx)
{
    (void)ctx;
    switch (kind) {
    case TransformKind::duplication: {
        if (!(1 - t.x).is_positive()) {
            throw Error(ErrorCode::DomainError, "duplication needs x < 1");
        }
        Ball s = sqrt(1 - t.x);
        return {sqr((1 - s) / (1 + s)), t.q * t.q, t.z * (1 + s) / 2};
    }
    case TransformKind::dimidiation: {
        if (!t.x.is_positive() || !t.q.is_positive()) {
            throw Error(ErrorCode::DomainError, "dimidiation needs x > 0 and q > 0");
        }
        Ball s = sqrt(t.x);
        return {4 * s / sqr(1 + s), sqrt(t.q), t.z * (1 + s)};
    }
    case TransformKind::change_of_sign: {
        Ball d = t.x - 1;
        if (d.contains_zero()) {
            throw Error(ErrorCode::DomainError, "change of sign needs x != 1");
        }
        return {t.x / d, -t.q, t.z * sqrt(1 - t.x)};
    }
    }
    throw Error(ErrorCode::DomainError, "unknown transform");
}

// ---------------------------------------------------------------------------------------------
// Multipliers, singular moduli, class invariants

/// m = phi(q)^2 / phi(q^n)^2.
inline Ball multiplier(const Ball &q, long n, const PrecCtx &ctx)
{
    if (n < 1) {
        throw Error(ErrorCode::DomainError, "multiplier degree must be positive");
    }
    detail::require_unit_nome(q, "multiplier");
    if (n == 1) {
        return Ball(1, ctx);
    }
    return sqr(phi(q, ctx) / phi(pow(q, n), ctx));
}

/// alpha_n with phi(e^{-pi sqrt n})^2 = 2F1(1/2, 1/2; 1; alpha_n).
inline Ball singular_modulus_sq(const Rational &n, const PrecCtx &ctx)
{
    return modulus_from_q(QPoint(1, n).to_ball(ctx), ctx);
}

/// 1 - alpha_n, computed without cancellation.
inline Ball singular_modulus_complement(const Rational &n, const PrecCtx &ctx)
{
    return modulus_complement_from_q(QPoint(1, n).to_ball(ctx), ctx);
}

/// G_n = 2^{-1/4} q^{-1/24} chi(q) at q = e^{-pi sqrt n}.
inline Ball class_invariant(const Rational &n, const PrecCtx &ctx)
{
    QPoint q(1, n);
    // q^{-1/24} = exp(pi sqrt(n) / 24)
    Ball scale = exp(const_pi(ctx) * sqrt(Ball(n, ctx)) / 24);
    return pow(Ball(2, ctx), make_rational(-1, 4)) * scale * chi(q, ctx);
}

/// {4 alpha (1 - alpha)}^{-1/24}, the class invariant expressed through a modulus.
inline Ball class_invariant_from_modulus(const Ball &alpha, const Ball &complement)
{
    return pow(4 * alpha * complement, make_rational(-1, 24));
}

// ---------------------------------------------------------------------------------------------
// Modular equations

/// alpha, beta with beta of degree n over alpha, and the multiplier m. Complements are kept
/// separately since they are computed directly rather than as 1 - alpha.
struct ModulusPair {
    Ball alpha;
    Ball alpha_c;
    Ball beta;
    Ball beta_c;
    long n;
    Ball m;

    static ModulusPair from_nome(const Ball &q, long n, const PrecCtx &ctx)
    {
        Ball qn = pow(q, n);
        return {modulus_from_q(q, ctx),  modulus_complement_from_q(q, ctx),
                modulus_from_q(qn, ctx), modulus_complement_from_q(qn, ctx),
                n,                       multiplier(q, n, ctx)};
    }
};

/// A modular equation of the shape
///   c m^k = sum_i s_i alpha^{e0} (1-alpha)^{e1} beta^{e2} (1-beta)^{e3}
/// small enough to rewrite mechanically.
struct ModularEquation {
    struct Term {
        int sign;
        std::array<Rational, 4> exps; // alpha, 1 - alpha, beta, 1 - beta

        friend bool operator==(const Term &a, const Term &b)
        {
            return a.sign == b.sign && a.exps == b.exps;
        }
    };

    long degree;
    Rational coeff;
    long m_power;
    std::vector<Term> rhs;

    /// alpha -> 1 - beta, beta -> 1 - alpha, m -> n / m.
    ModularEquation reciprocal() const
    {
        ModularEquation out{degree, coeff, -m_power, {}};
        Rational n_pow = 1;
        for (long i = 0; i < (m_power < 0 ? -m_power : m_power); ++i) {
            n_pow *= degree;
        }
        out.coeff = m_power >= 0 ? Rational(coeff * n_pow) : Rational(coeff / n_pow);
        for (const auto &t : rhs) {
            // new exponent of alpha comes from old (1 - beta), and so on
            out.rhs.push_back(Term{t.sign, {t.exps[3], t.exps[2], t.exps[1], t.exps[0]}});
        }
        return out;
    }

    Ball lhs_value(const ModulusPair &p) const
    {
        return Ball(coeff, p.m.ctx()) * pow(p.m, m_power);
    }

    Ball rhs_value(const ModulusPair &p) const
    {
        const PrecCtx ctx = p.m.ctx();
        const std::array<const Ball *, 4> base{&p.alpha, &p.alpha_c, &p.beta, &p.beta_c};
        Ball sum(0, ctx);
        for (const auto &t : rhs) {
            Ball v(1, ctx);
            for (std::size_t i = 0; i < 4; ++i) {
                if (t.exps[i] != 0) {
                    v = v * pow(*base[i], t.exps[i]);
                }
            }
            sum = t.sign > 0 ? sum + v : sum - v;
        }
        return sum;
    }

    Ball residual(const ModulusPair &p) const
    {
        return lhs_value(p) - rhs_value(p);
    }

    /// Same equation up to the order of the right-hand terms.
    bool equivalent(const ModularEquation &other) const
    {
        if (degree != other.degree || coeff != other.coeff || m_power != other.m_power ||
            rhs.size() != other.rhs.size()) {
            return false;
        }
        std::vector<bool> used(other.rhs.size(), false);
        for (const auto &t : rhs) {
            bool found = false;
            for (std::size_t j = 0; j < other.rhs.size(); ++j) {
                if (!used[j] && other.rhs[j] == t) {
                    used[j] = found = true;
                    break;
                }
            }
            if (!found) {
                return false;
            }
        }
        return true;
    }
};

/// m^2 = (b/a)^{1/2} + ((1-b)/(1-a))^{1/2} - (b(1-b) / (a(1-a)))^{1/2}
inline ModularEquation degree3_equation()
{
    const Rational h = make_rational(1, 2);
    return ModularEquation{3, 1, 2,
                           {{1, {-h, 0, h, 0}}, {1, {0, -h, 0, h}}, {-1, {-h, -h, h, h}}}};
}

/// 9/m^2 = (a/b)^{1/2} + ((1-a)/(1-b))^{1/2} - (a(1-a) / (b(1-b)))^{1/2}
inline ModularEquation degree3_reciprocal_equation()
{
    const Rational h = make_rational(1, 2);
    return ModularEquation{3, 9, -2,
                           {{1, {h, 0, -h, 0}}, {1, {0, h, 0, -h}}, {-1, {h, h, -h, -h}}}};
}

struct Degree3Residuals {
    Ball first;           // the m^2 equation
    Ball second;          // its reciprocal, 9/m^2
    Ball degree_relation; // 3 F(1-a)/F(a) - F(1-b)/F(b)
};

/// Residuals of the degree-3 pair with alpha = x(q), beta = x(q^3), m = phi^2(q)/phi^2(q^3).
inline Degree3Residuals verify_degree3(const Ball &q, const PrecCtx &ctx)
{
    detail::require_unit_nome(q, "verify_degree3");
    ModulusPair pair = ModulusPair::from_nome(q, 3, ctx);
    auto ratio = [&](const Ball &v, const Ball &vc) { return hyp2f1_half(vc, ctx) / hyp2f1_half(v, ctx); };
    return {degree3_equation().residual(pair), degree3_reciprocal_equation().residual(pair),
            3 * ratio(pair.alpha, pair.alpha_c) - ratio(pair.beta, pair.beta_c)};
}

/// PQ + 5/(PQ) - ((Q/P)^2 + 3 Q/P + 3 P/Q - (P/Q)^2) with P = phi(q)/phi(q^5),
/// Q = phi(q^3)/phi(q^15).
inline Ball verify_degree15(const Ball &q, const PrecCtx &ctx)
{
    detail::require_unit_nome(q, "verify_degree15");
    Ball P = phi(q, ctx) / phi(pow(q, 5), ctx);
    Ball Q = phi(pow(q, 3), ctx) / phi(pow(q, 15), ctx);
    Ball PQ = P * Q;
    Ball QP = Q / P;
    Ball PoQ = P / Q;
    return PQ + 5 / PQ - (sqr(QP) + 3 * QP + 3 * PoQ - sqr(PoQ));
}

// ---------------------------------------------------------------------------------------------
// Theta quotients h_{k,n}

struct YiQuotient {
    Rational k;
    Rational n;
    bool primed = false;
};

/// h_{k,n}  = phi(e^{-pi sqrt(n/k)}) / (k^{1/4} phi(e^{-pi sqrt(nk)}))
/// h'_{k,n} = phi(-e^{-2 pi sqrt(n/k)}) / (k^{1/4} phi(-e^{-2 pi sqrt(nk)}))
inline Ball yi_h(const YiQuotient &h, const PrecCtx &ctx)
{
    if (h.k <= 0 || h.n <= 0) {
        throw Error(ErrorCode::DomainError, "h_{k,n} needs positive k and n");
    }
    // e^{-2 pi sqrt(s)} = e^{-pi sqrt(4 s)}
    const int sign = h.primed ? -1 : 1;
    const Rational scale = h.primed ? 4 : 1;
    QPoint top(sign, Rational(scale * h.n / h.k));
    QPoint bottom(sign, Rational(scale * h.n * h.k));
    return phi(top, ctx) / (pow(Ball(h.k, ctx), make_rational(1, 4)) * phi(bottom, ctx));
}

/// Residual of h_{a,b} h_{kc,kd} = h_{ka,kb} h_{c,d}, which requires ab = cd.
inline Ball yi_product_theorem(const Rational &k, const Rational &a, const Rational &b, const Rational &c,
                               const Rational &d, const PrecCtx &ctx)
{
    if (a * b != c * d) {
        throw Error(ErrorCode::PreconditionViolated, "product theorem needs ab = cd");
    }
    auto h = [&](const Rational &x, const Rational &y) { return yi_h({x, y, false}, ctx); };
    return h(a, b) * h(Rational(k * c), Rational(k * d)) - h(Rational(k * a), Rational(k * b)) * h(c, d);
}

// ---------------------------------------------------------------------------------------------
// Series identity
//
//   1/2 + sum e^{-pi n^2 x} cos(pi n^2 sqrt(1-x^2))
//       = (sqrt 2 + sqrt(1+x)) / sqrt(1-x) * sum e^{-pi n^2 x} sin(pi n^2 sqrt(1-x^2))

struct JimsResult {
    Ball residual;
    long terms;
    long prec_bits;
};

inline JimsResult jims_identity_detail(const Ball &x_in, const PrecCtx &ctx)
{
    using namespace detail;
    if (!x_in.is_positive() || !(1 - x_in).is_positive()) {
        throw Error(ErrorCode::DomainError, "jims identity needs 0 < x < 1");
    }
    // Choose N with e^{-pi N^2 x} below the target, then widen the precision by the bits lost
    // to the cosine and sine arguments (which grow like pi N^2).
    const double x_lo = mpfr_get_d(x_in.lower(rad_prec).get(), MPFR_RNDD);
    const double needed = (ctx.bits() + 8) * std::log(2.0) / (M_PI * x_lo);
    const long terms = static_cast<long>(std::ceil(std::sqrt(needed))) + 1;
    const long extra = static_cast<long>(std::ceil(std::log2(M_PI * terms * terms + 1.0))) + 32;
    const PrecCtx work = ctx.with_extra(extra);

    // Re-round the argument to the working precision without losing its enclosure.
    Ball x = Ball::from_mid_rad(x_in.mid(), x_in.rad(), work.bits());
    Ball pi = const_pi(work);
    Ball root = sqrt(1 - x * x);
    Ball cos_sum(0, work), sin_sum(0, work);
    for (long n = 1; n <= terms; ++n) {
        Ball n2(n * n, work);
        Ball damp = exp(-(pi * n2 * x));
        Ball arg = pi * n2 * root;
        cos_sum = cos_sum + damp * cos(arg);
        sin_sum = sin_sum + damp * sin(arg);
    }
    // Tail: sum_{n > N} e^{-pi n^2 x} <= e^{-pi (N+1)^2 x} / (1 - e^{-pi (2N+3) x})
    Mag xl = x.lower(rad_prec);
    Mag pil = pi.lower(rad_prec);
    Mag head(rad_prec), ratio(rad_prec);
    auto n1 = static_cast<unsigned long>(terms + 1);
    mpfr_mul(head.get(), pil.get(), xl.get(), MPFR_RNDD);
    mpfr_mul_ui(ratio.get(), head.get(), 2 * n1 + 1, MPFR_RNDD);
    mpfr_mul_ui(head.get(), head.get(), n1 * n1, MPFR_RNDD);
    mpfr_neg(head.get(), head.get(), MPFR_RNDU);
    mpfr_exp(head.get(), head.get(), MPFR_RNDU);
    mpfr_neg(ratio.get(), ratio.get(), MPFR_RNDU);
    mpfr_exp(ratio.get(), ratio.get(), MPFR_RNDU);
    Mag tail = mul_up(head, geometric_factor(ratio));
    cos_sum.add_error(tail.get());
    sin_sum.add_error(tail.get());

    Ball coeff = (sqrt(Ball(2, work)) + sqrt(1 + x)) / sqrt(1 - x);
    Ball lhs = Ball(make_rational(1, 2), work) + cos_sum;
    Ball rhs = coeff * sin_sum;
    return {lhs - rhs, terms, work.bits()};
}

inline Ball jims_identity(const Ball &x, const PrecCtx &ctx)
{
    return jims_identity_detail(x, ctx).residual;
}

} // namespace thetaval
