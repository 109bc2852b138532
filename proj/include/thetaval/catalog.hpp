#pragma once

// Catalog of explicit theta-function values and their certified verification.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "expr.hpp"

namespace thetaval {

enum class VerifyStatus { verified, unverified };

inline const char *to_string(VerifyStatus s)
{
    return s == VerifyStatus::verified ? "verified" : "unverified";
}

/// lhs = rhs, where lhs is a theta expression and rhs a closed form.
struct Identity {
    std::string id;
    Expr lhs;
    Expr rhs;
    std::string provenance;
    VerifyStatus status = VerifyStatus::unverified;
};

struct Catalog {
    std::vector<Identity> entries;

    const Identity *find(std::string_view id) const
    {
        for (const auto &e : entries) {
            if (e.id == id) {
                return &e;
            }
        }
        return nullptr;
    }
};

// ---------------------------------------------------------------------------------------------
// Closed forms shared between entries and with the septic completion

namespace closed {

inline Expr root4(const Expr &e)
{
    return pow(e, 1, 4);
}

/// G_169, the class invariant at n = 169.
inline Expr g169()
{
    Expr s13 = sqrt(lit(13));
    Expr s3 = sqrt(lit(3));
    Expr half = (lit(11) + s13) / 2;
    Expr inner = cbrt((lit(13) + 3 * s13) / 2) * (cbrt(half + 3 * s3) + cbrt(half - 3 * s3));
    return ((s13 + 2) + inner) / 3;
}

/// G_9 = ((1 + sqrt 3) / sqrt 2)^{1/3}
inline Expr g9()
{
    return cbrt((1 + sqrt(lit(3))) / sqrt(lit(2)));
}

/// 1 / (2 cos(k pi / 7))^2, the roots of the septic cubic at q = e^{-pi/sqrt 7}.
inline Expr septic_root(long k)
{
    return 1 / pow(2 * cospi(make_rational(k, 7)), 2, 1);
}

/// (cos(b pi/7) / (2 cos^2(a pi/7)))^{2/7}
inline Expr septic_term(long a, long b)
{
    return pow(cospi(make_rational(b, 7)) / (2 * pow(cospi(make_rational(a, 7)), 2, 1)), 2, 7);
}

/// factor * (1 + t_1 + t_2 + t_3), with the terms given as (a, b) index pairs in order.
inline Expr septic_completion(const Rational &factor_base, const Rational &factor_exp,
                              const std::vector<std::pair<long, long>> &terms)
{
    Expr sum = lit(1);
    for (const auto &[a, b] : terms) {
        sum = sum + septic_term(a, b);
    }
    return pow(lit(factor_base), factor_exp) * sum;
}

} // namespace closed

inline Expr phi_quotient(const Rational &top, const Rational &bottom)
{
    return phi_at(QPoint(1, top)) / phi_at(QPoint(1, bottom));
}

/// The catalog, in a fixed order.
inline Catalog build_catalog()
{
    using closed::root4;
    auto r = [](long n, long d = 1) { return make_rational(n, d); };
    const Expr pi = pi_const();
    const Expr s2 = sqrt(lit(2));
    const Expr s3 = sqrt(lit(3));
    const Expr s5 = sqrt(lit(5));
    const Expr s7 = sqrt(lit(7));

    Catalog c;
    auto add = [&](std::string id, Expr lhs, Expr rhs, std::string provenance) {
        c.entries.push_back({std::move(id), std::move(lhs), std::move(rhs), std::move(provenance)});
    };

    const Expr phi_e_pi = root4(pi) / gamma_of(r(3, 4));

    add("classical_1", phi_at(QPoint(1, 1)), phi_e_pi,
        "Ramanujan's notebooks: classical value of phi(e^{-pi}) in Gamma values");
    add("classical_sqrt2", phi_at(QPoint(1, 2)),
        gamma_of(r(9, 8)) / gamma_of(r(5, 4)) * sqrt(gamma_of(r(1, 4)) / (root4(lit(2)) * pi)),
        "Ramanujan's notebooks: classical value of phi(e^{-pi sqrt 2}) in Gamma values");
    add("classical_2", phi_at(QPoint(1, 4)), sqrt(2 + s2) / 2 * phi_e_pi,
        "Ramanujan's notebooks: classical value of phi(e^{-2 pi}) in Gamma values");

    add("r5", phi_quotient(25, 1), 1 / sqrt(5 * s5 - 10),
        "Ramanujan's notebooks: phi(e^{-5 pi}) in terms of phi(e^{-pi})");
    add("r3", phi_quotient(9, 1), 1 / root4(6 * s3 - 9),
        "Ramanujan's lost notebook: quotient phi(e^{-3 pi}) / phi(e^{-pi})");
    add("r7", pow(phi_quotient(49, 1), 2, 1), (sqrt(13 + s7) + sqrt(7 + 3 * s7)) / 14 * pow(lit(28), 1, 8),
        "Ramanujan's lost notebook: quotient phi^2(e^{-7 pi}) / phi^2(e^{-pi})");
    add("r9", phi_quotient(81, 1), (1 + cbrt(2 * (s3 + 1))) / 3,
        "Ramanujan's lost notebook: quotient phi(e^{-9 pi}) / phi(e^{-pi})");
    add("r45", phi_quotient(2025, 1),
        (3 + s5 + (s3 + s5 + root4(lit(60))) * cbrt(2 + s3)) / (3 * sqrt(10 + 10 * s5)),
        "Ramanujan's lost notebook: quotient phi(e^{-45 pi}) / phi(e^{-pi})");

    {
        const Expr g = closed::g169();
        const Expr d = g - 1 / g;
        const Expr a = pow(d, 3, 1) + 7 * d;
        add("cb13", phi_quotient(169, 1),
            pow(pow(g, -3, 1) * (a + sqrt(pow(a, 2, 1) + 52)) / 2, -1, 2),
            "Evaluation of phi(e^{-13 pi}) / phi(e^{-pi}) through the class invariant G_169");
    }
    {
        const Expr ratio = (cbrt(2 * (s3 + 1)) + 1) / (cbrt(2 * (s3 - 1)) - 1);
        add("cb27", phi_quotient(729, 9), (1 + (s3 - 1) * cbrt(ratio)) / 3,
            "Evaluation of phi(e^{-27 pi}) / phi(e^{-3 pi}) from the degree-3 multiplier");
    }
    {
        const Expr f7 = root4(lit(7));
        const Expr first = pow((sqrt(4 + s7) - f7) / 2, 3, 1);
        const Expr g = root4(6 * s7);
        const Expr t3 = sqrt(3 + s7);
        const Expr body = first * sqrt(s3 + s7) * pow(2 + s3, 1, 6) * sqrt((2 + s7 + sqrt(7 + 4 * s7)) / 2) *
                          sqrt((t3 + g) / (t3 - g));
        add("cb63", phi_quotient(3969, 49), (1 + body) / 3,
            "Evaluation of phi(e^{-63 pi}) / phi(e^{-7 pi}) from the degree-3 multiplier");
    }

    add("yi_33", yih(3, 9), (1 - cbrt(lit(2)) + cbrt(lit(4))) / s3,
        "Yi's theta-function quotient h_{3,9}");
    add("yi_53", yih(3, 5), sqrt(s5 - 1) / s2, "Yi's theta-function quotient h_{3,5}");
    add("yi_m6", phi_at(QPoint(-1, 36)) / phi_at(QPoint(1, 1)),
        cbrt(1 + s3 + s2 * pow(lit(3), 3, 4)) /
            (pow(lit(2), 11, 24) * pow(lit(3), 3, 8) * pow(s3 - 1, 1, 6)),
        "Yi's evaluation of phi(-e^{-6 pi}) / phi(e^{-pi})");
    {
        const Expr g = (1 + s5) / 2;
        const Expr a = g + sqrt(g);
        add("yi_2s5", yih(5, 4),
            2 * sqrt(2 * a) / ((3 + s2 + s5 + sqrt(lit(10))) * (a - s5)),
            "Yi's theta-function quotient h_{5,4}");
    }
    {
        const Expr m = 11 * s3 - 19;
        add("yi_9", yih(9, 9),
            2 - s3 - cbrt(lit(4)) * (5 - 3 * s3) / cbrt(m) - cbrt(2 * m),
            "Yi's theta-function quotient h_{9,9}, with corrected signs");
    }

    add("ln7", phi_quotient(343, 7),
        closed::septic_completion(7, r(-3, 4), {{2, 1}, {3, 2}, {1, 3}}),
        "Ramanujan's lost notebook: phi(e^{-7 pi sqrt 7}) from the septic theta system");

    add("g9", class_inv(9), closed::g9(), "Ramanujan's class invariant G_9");
    add("g169", class_inv(169), closed::g169(), "Ramanujan's class invariant G_169");
    return c;
}

// ---------------------------------------------------------------------------------------------
// Verification

struct VerifyReport {
    std::string id;
    Ball lhs;
    Ball rhs;
    long agreement_digits = 0;
    VerifyStatus status = VerifyStatus::unverified;
    long prec_bits = 0;
    bool escalated = false;
};

inline constexpr long default_target_digits = 100;

/// Digit target at a working precision: 100 digits, or 80% of the precision when that is less.
inline long target_digits_for(const PrecCtx &ctx)
{
    return std::min(default_target_digits, static_cast<long>(0.8 * ctx.bits() * 0.30103));
}

/// floor(-log10(|lhs.mid - rhs.mid| + lhs.rad + rhs.rad)), clamped at 0.
inline long agreement_digits(const Ball &lhs, const Ball &rhs)
{
    Float s(detail::rad_prec);
    mpfr_sub(s.get(), lhs.mid(), rhs.mid(), MPFR_RNDA);
    mpfr_abs(s.get(), s.get(), MPFR_RNDU);
    mpfr_add(s.get(), s.get(), lhs.rad(), MPFR_RNDU);
    mpfr_add(s.get(), s.get(), rhs.rad(), MPFR_RNDU);
    if (mpfr_zero_p(s.get())) {
        return static_cast<long>(std::min(lhs.prec(), rhs.prec()) * 0.30103);
    }
    mpfr_log10(s.get(), s.get(), MPFR_RNDU);
    mpfr_neg(s.get(), s.get(), MPFR_RNDD);
    mpfr_floor(s.get(), s.get());
    return std::max(0L, mpfr_get_si(s.get(), MPFR_RNDD));
}

namespace detail {

inline bool radius_below(const Ball &x, long digits)
{
    return x.is_exact() || x.rad_exponent10() < -digits;
}

} // namespace detail

/// Evaluates both sides at ctx. Overlap with a radius above 10^{-target} is inconclusive and is
/// retried once at doubled precision. Evaluation errors are rethrown as EvaluationError with the id.
inline VerifyReport verify_identity(const Identity &ident, const PrecCtx &ctx,
                                    std::optional<long> target = std::nullopt)
{
    const long target_digits = target.value_or(target_digits_for(ctx));
    PrecCtx work = ctx;
    for (int attempt = 0;; ++attempt) {
        VerifyReport rep{ident.id, Ball(work), Ball(work)};
        try {
            rep.lhs = eval_expr(ident.lhs, work);
            rep.rhs = eval_expr(ident.rhs, work);
        } catch (const Error &e) {
            throw Error(ErrorCode::EvaluationError, ident.id + ": " + e.what());
        }
        rep.prec_bits = work.bits();
        rep.escalated = attempt > 0;
        rep.agreement_digits = agreement_digits(rep.lhs, rep.rhs);
        const bool overlap = overlaps(rep.lhs, rep.rhs);
        const bool tight = detail::radius_below(rep.lhs, target_digits) && detail::radius_below(rep.rhs, target_digits);
        if (overlap && tight) {
            rep.status = VerifyStatus::verified;
            return rep;
        }
        if (!overlap || attempt > 0) {
            return rep;
        }
        work = work.doubled();
    }
}

} // namespace thetaval
