#pragma once

// The septic theta system at a positive nome q:
//
//   u = 2 q^{1/7} f(q^5, q^9) / phi(q^7)
//   v = 2 q^{4/7} f(q^3, q^11) / phi(q^7)
//   w = 2 q^{9/7} f(q, q^13) / phi(q^7)
//   p = uvw = 8 q^2 (-q; q^2)_inf / (-q^7; q^14)_inf^7
//
//   1 + u + v + w = phi(q^{1/7}) / phi(q^7)
//   x^2 - (2 + 5p) x + (1 - p)^3 = 0        for x = phi^4(q) / phi^4(q^7)
//   u = (alpha^2 p / beta)^{1/7}, v = (beta^2 p / gamma)^{1/7}, w = (gamma^2 p / alpha)^{1/7}
//
// where alpha, beta, gamma are the roots of
//   xi^3 + 2(1 + 3p - x) xi^2 + p^2 (p + 4) xi - p^4.
//
// At q = e^{-pi/sqrt 7} this gives phi(e^{-7 pi sqrt 7}) in closed form. Which quadratic root and
// which ordering of the cubic roots apply is decided numerically against series values.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "catalog.hpp"

namespace thetaval {

struct SepticUVW {
    Ball u, v, w;
};

namespace detail {

inline void require_positive_nome(const Nome &q, const PrecCtx &ctx, const char *fn)
{
    if (!q.is_positive(ctx)) {
        throw Error(ErrorCode::DomainError, std::string(fn) + " needs a positive nome");
    }
    nome_bound(q.to_ball(ctx));
}

} // namespace detail

inline SepticUVW compute_uvw(const Nome &q, const PrecCtx &ctx)
{
    detail::require_positive_nome(q, ctx, "compute_uvw");
    auto at = [&](long num, long den) { return q.pow(make_rational(num, den), ctx).to_ball(ctx); };
    const Ball phi7 = phi(q.pow(7, ctx), ctx);
    auto part = [&](long lead, long a, long b) {
        return 2 * at(lead, 7) * theta_f(at(a, 1), at(b, 1), ctx) / phi7;
    };
    return {part(1, 5, 9), part(4, 3, 11), part(9, 1, 13)};
}

/// p = 8 q^2 chi(q) / chi(q^7)^7 with chi(q) = (-q; q^2)_inf.
inline Ball compute_p(const Nome &q, const PrecCtx &ctx)
{
    detail::require_positive_nome(q, ctx, "compute_p");
    const Ball qb = q.to_ball(ctx);
    return 8 * sqr(qb) * chi(qb, ctx) / pow(chi(q.pow(7, ctx), ctx), 7);
}

/// (1 + u + v + w) - phi(q^{1/7}) / phi(q^7).
inline Ball septic_sum_residual(const Nome &q, const PrecCtx &ctx)
{
    const SepticUVW s = compute_uvw(q, ctx);
    const Ball quotient =
        phi_series(q.pow(make_rational(1, 7), ctx).to_ball(ctx), ctx) / phi_series(q.pow(7, ctx).to_ball(ctx), ctx);
    return 1 + s.u + s.v + s.w - quotient;
}

/// phi^4(q) / phi^4(q^7) from the series.
inline Ball septic_ratio4_series(const Nome &q, const PrecCtx &ctx)
{
    return pow(phi_series(q.to_ball(ctx), ctx) / phi_series(q.pow(7, ctx).to_ball(ctx), ctx), 4);
}

/// x^2 - (2 + 5p) x + (1 - p)^3 at x = phi^4(q)/phi^4(q^7).
inline Ball verify_quartic_relation(const Nome &q, const PrecCtx &ctx)
{
    const Ball p = compute_p(q, ctx);
    const Ball x = septic_ratio4_series(q, ctx);
    return sqr(x) - (2 + 5 * p) * x + pow(1 - p, 3);
}

// ---------------------------------------------------------------------------------------------
// Quadratic

enum class QuadraticBranch { plus, minus, double_root };

inline const char *to_string(QuadraticBranch b)
{
    switch (b) {
    case QuadraticBranch::plus: return "plus";
    case QuadraticBranch::minus: return "minus";
    case QuadraticBranch::double_root: return "double";
    }
    return "?";
}

struct QuadraticRoots {
    Ball minus, plus;
};

/// Roots ((2 + 5p) -+ sqrt(disc)) / 2 with disc = (2 + 5p)^2 - 4 (1 - p)^3.
/// A discriminant enclosure touching zero is treated as [0, hi].
inline QuadraticRoots ratio4_roots(const Ball &p)
{
    const Ball b = 2 + 5 * p;
    const Ball disc = sqr(b) - 4 * pow(1 - p, 3);
    if (disc.is_negative()) {
        throw Error(ErrorCode::PreconditionViolated, "quadratic discriminant is negative");
    }
    Ball root(disc.prec());
    if (disc.is_positive()) {
        root = sqrt(disc);
    } else {
        Float hi = disc.upper(detail::rad_prec);
        Float zero(detail::rad_prec);
        mpfr_set_zero(zero.get(), 1);
        mpfr_sqrt(hi.get(), hi.get(), MPFR_RNDU);
        root = Ball::from_interval(zero.get(), hi.get(), disc.prec());
    }
    return {(b - root) / 2, (b + root) / 2};
}

struct Ratio4Solution {
    Ball value;
    QuadraticBranch branch;
};

/// The quadratic root equal to phi^4(q)/phi^4(q^7), chosen by overlap with the series value.
inline Ratio4Solution solve_ratio4_detail(const Ball &p, const Nome &q, const PrecCtx &ctx)
{
    const QuadraticRoots roots = ratio4_roots(p);
    const Ball oracle = septic_ratio4_series(q, ctx);
    const bool minus = overlaps(roots.minus, oracle);
    const bool plus = overlaps(roots.plus, oracle);
    if (minus && plus) {
        if (identical(roots.minus, roots.plus)) {
            return {roots.plus, QuadraticBranch::double_root};
        }
        throw Error(ErrorCode::BothRootsMatch, "both quadratic roots overlap the series ratio");
    }
    if (plus) {
        return {roots.plus, QuadraticBranch::plus};
    }
    if (minus) {
        return {roots.minus, QuadraticBranch::minus};
    }
    throw Error(ErrorCode::NoRootMatches, "no quadratic root overlaps the series ratio");
}

inline Ball solve_ratio4(const Ball &p, const Nome &q, const PrecCtx &ctx)
{
    return solve_ratio4_detail(p, q, ctx).value;
}

// ---------------------------------------------------------------------------------------------
// Cubic

struct SepticState {
    Nome q;
    Ball p, u, v, w;
    Ball ratio4;
    QuadraticBranch branch;
    Ball c2, c1, c0;
};

inline SepticState septic_state(const Nome &q, const PrecCtx &ctx)
{
    const SepticUVW s = compute_uvw(q, ctx);
    const Ball p = compute_p(q, ctx);
    const Ratio4Solution x = solve_ratio4_detail(p, q, ctx);
    const Ball p2 = sqr(p);
    return {q, p, s.u, s.v, s.w, x.value, x.branch, 2 * (1 + 3 * p - x.value), p2 * (p + 4), -sqr(p2)};
}

namespace detail {

inline Ball cubic_at(const SepticState &s, const Ball &x)
{
    return ((x + s.c2) * x + s.c1) * x + s.c0;
}

// Double-precision starting points from the trigonometric form of the depressed cubic.
inline std::optional<std::array<double, 3>> trig_roots(double b, double c, double d)
{
    const double p = c - b * b / 3;
    const double q = 2 * b * b * b / 27 - b * c / 3 + d;
    if (p >= 0) {
        return std::nullopt;
    }
    const double m = 2 * std::sqrt(-p / 3);
    const double arg = std::clamp(3 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3;
    std::array<double, 3> out{};
    for (int k = 0; k < 3; ++k) {
        out[k] = m * std::cos(theta - 2 * M_PI * k / 3) - b / 3;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Newton iteration on the midpoint polynomial at `prec` bits.
inline Float newton_polish(const SepticState &s, double start, mpfr_prec_t prec)
{
    Float x(prec), fx(prec), dfx(prec), t(prec), step(prec);
    mpfr_set_d(x.get(), start, MPFR_RNDN);
    for (int iter = 0; iter < 200; ++iter) {
        // f = ((x + c2) x + c1) x + c0, f' = (3x + 2 c2) x + c1
        mpfr_add(fx.get(), x.get(), s.c2.mid(), MPFR_RNDN);
        mpfr_mul(fx.get(), fx.get(), x.get(), MPFR_RNDN);
        mpfr_add(fx.get(), fx.get(), s.c1.mid(), MPFR_RNDN);
        mpfr_mul(fx.get(), fx.get(), x.get(), MPFR_RNDN);
        mpfr_add(fx.get(), fx.get(), s.c0.mid(), MPFR_RNDN);
        mpfr_mul_ui(dfx.get(), x.get(), 3, MPFR_RNDN);
        mpfr_mul_ui(t.get(), s.c2.mid(), 2, MPFR_RNDN);
        mpfr_add(dfx.get(), dfx.get(), t.get(), MPFR_RNDN);
        mpfr_mul(dfx.get(), dfx.get(), x.get(), MPFR_RNDN);
        mpfr_add(dfx.get(), dfx.get(), s.c1.mid(), MPFR_RNDN);
        if (mpfr_zero_p(dfx.get())) {
            break;
        }
        mpfr_div(step.get(), fx.get(), dfx.get(), MPFR_RNDN);
        mpfr_sub(x.get(), x.get(), step.get(), MPFR_RNDN);
        if (mpfr_zero_p(step.get()) ||
            mpfr_get_exp(step.get()) < mpfr_get_exp(x.get()) - static_cast<mpfr_exp_t>(prec) + 2) {
            break;
        }
    }
    return x;
}

// Sign of the cubic over a point enclosure: +1, -1, or 0 when undecided.
inline int certified_sign(const SepticState &s, mpfr_srcptr x, mpfr_prec_t prec)
{
    Float zero(detail::rad_prec);
    mpfr_set_zero(zero.get(), 1);
    const Ball value = cubic_at(s, Ball::from_mid_rad(x, zero.get(), prec));
    return value.is_positive() ? 1 : value.is_negative() ? -1 : 0;
}

} // namespace detail

/// Three certified, disjoint real root enclosures of the cubic, ascending. Each enclosure is an
/// interval whose endpoints give opposite certified signs for every cubic in the coefficient balls.
inline std::array<Ball, 3> cubic_roots(const SepticState &s, const PrecCtx &ctx)
{
    const Ball disc = 18 * s.c2 * s.c1 * s.c0 - 4 * pow(s.c2, 3) * s.c0 + sqr(s.c2) * sqr(s.c1) -
                      4 * pow(s.c1, 3) - 27 * sqr(s.c0);
    if (disc.is_negative()) {
        throw Error(ErrorCode::ComplexRootsDetected, "cubic has a complex-conjugate root pair");
    }
    if (!disc.is_positive()) {
        throw Error(ErrorCode::RootsNotSeparable, "cubic discriminant encloses zero");
    }
    auto guesses = detail::trig_roots(s.c2.mid_double(), s.c1.mid_double(), s.c0.mid_double());
    if (!guesses) {
        throw Error(ErrorCode::RootsNotSeparable, "no three-real-root starting configuration");
    }
    const auto prec = static_cast<mpfr_prec_t>(ctx.bits());
    std::array<Ball, 3> out{Ball(ctx), Ball(ctx), Ball(ctx)};
    for (int k = 0; k < 3; ++k) {
        Float x = detail::newton_polish(s, (*guesses)[k], prec);
        Float delta(detail::rad_prec), lo(prec), hi(prec);
        mpfr_set_ui_2exp(delta.get(), 1, mpfr_get_exp(x.get()) - static_cast<mpfr_exp_t>(prec) + 8, MPFR_RNDU);
        bool found = false;
        for (int widen = 0; widen < 64 && !found; ++widen) {
            mpfr_sub(lo.get(), x.get(), delta.get(), MPFR_RNDD);
            mpfr_add(hi.get(), x.get(), delta.get(), MPFR_RNDU);
            const int a = detail::certified_sign(s, lo.get(), prec);
            const int b = detail::certified_sign(s, hi.get(), prec);
            found = a != 0 && b != 0 && a != b;
            if (!found) {
                mpfr_mul_2ui(delta.get(), delta.get(), 4, MPFR_RNDU);
            }
        }
        if (!found) {
            throw Error(ErrorCode::RootsNotSeparable, "could not certify a sign change around a root");
        }
        out[k] = Ball::from_interval(lo.get(), hi.get(), prec);
    }
    for (int k = 0; k + 1 < 3; ++k) {
        if (overlaps(out[k], out[k + 1])) {
            throw Error(ErrorCode::RootsNotSeparable, "root enclosures overlap");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Root ordering

struct RootAssignment {
    Ball alpha, beta, gamma;
    int permutation_index;
};

/// Permutations of {0, 1, 2} in lexicographic order.
inline constexpr std::array<std::array<int, 3>, 6> root_permutations{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

namespace detail {

// 1 if (a^2 p / b)^{1/7} overlaps target, 0 if it excludes it, -1 if undecidable.
inline int seventh_root_match(const Ball &a, const Ball &b, const Ball &p, const Ball &target)
{
    try {
        return overlaps(rootn(sqr(a) * p / b, 7), target) ? 1 : 0;
    } catch (const Error &) {
        return -1;
    }
}

} // namespace detail

/// The unique ordering (alpha, beta, gamma) of the roots reproducing (u, v, w).
inline RootAssignment assign_roots(const SepticState &s, const std::array<Ball, 3> &roots, const PrecCtx &ctx)
{
    (void)ctx;
    std::optional<RootAssignment> found;
    int matches = 0;
    bool undecided = false;
    for (int idx = 0; idx < 6; ++idx) {
        const auto &perm = root_permutations[idx];
        const Ball &a = roots[perm[0]];
        const Ball &b = roots[perm[1]];
        const Ball &g = roots[perm[2]];
        const int mu = detail::seventh_root_match(a, b, s.p, s.u);
        const int mv = detail::seventh_root_match(b, g, s.p, s.v);
        const int mw = detail::seventh_root_match(g, a, s.p, s.w);
        if (mu == 0 || mv == 0 || mw == 0) {
            continue;
        }
        if (mu < 0 || mv < 0 || mw < 0) {
            undecided = true;
            continue;
        }
        ++matches;
        found = RootAssignment{a, b, g, idx};
    }
    if (matches > 1 || (matches == 1 && undecided)) {
        throw Error(ErrorCode::MultiplePermutationsMatch, "more than one root ordering reproduces u, v, w");
    }
    if (!found) {
        throw Error(undecided ? ErrorCode::MultiplePermutationsMatch : ErrorCode::NoPermutationMatches,
                    "no root ordering reproduces u, v, w");
    }
    return *found;
}

// ---------------------------------------------------------------------------------------------
// Full pipeline

struct SepticSolution {
    SepticState state;
    std::array<Ball, 3> roots;
    RootAssignment assignment;
    long prec_bits;
};

inline constexpr int max_septic_doublings = 3;

/// State, certified roots and root ordering at q. Ambiguous branch or ordering decisions are
/// retried at doubled precision, at most three times.
inline SepticSolution solve_septic(const Nome &q, const PrecCtx &ctx)
{
    PrecCtx work = ctx;
    for (int attempt = 0;; ++attempt) {
        try {
            SepticState state = septic_state(q, work);
            std::array<Ball, 3> roots = cubic_roots(state, work);
            RootAssignment assignment = assign_roots(state, roots, work);
            return {std::move(state), std::move(roots), std::move(assignment), work.bits()};
        } catch (const Error &e) {
            const bool retry = e.code() == ErrorCode::BothRootsMatch || e.code() == ErrorCode::MultiplePermutationsMatch ||
                               e.code() == ErrorCode::RootsNotSeparable;
            if (!retry || attempt >= max_septic_doublings) {
                throw;
            }
            work = work.doubled();
        }
    }
}

namespace detail {

// (base, e) with base^e = n and e maximal.
inline std::pair<mpz_class, unsigned long> perfect_power(const mpz_class &n)
{
    for (unsigned long e = mpz_sizeinbase(n.get_mpz_t(), 2); e > 1; --e) {
        mpz_class root;
        if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), e) != 0) {
            return {root, e};
        }
    }
    return {n, 1};
}

// k in {1, 2, 3} with 1/(2 cos(k pi/7))^2 overlapping x.
inline long identify_septic_root(const Ball &x, const PrecCtx &ctx)
{
    long found = 0;
    for (long k = 1; k <= 3; ++k) {
        if (overlaps(eval_expr(closed::septic_root(k), ctx), x)) {
            if (found != 0) {
                throw Error(ErrorCode::RootsNotSeparable, "root matches two closed forms");
            }
            found = k;
        }
    }
    if (found == 0) {
        throw Error(ErrorCode::NoRootMatches, "root matches no 1/(2 cos(k pi/7))^2");
    }
    return found;
}

} // namespace detail

struct Completion {
    Identity identity;
    VerifyReport report;
    Identity misprint;
    VerifyReport misprint_report;
    SepticSolution solution;
    std::array<long, 3> cos_indices; // k for alpha, beta, gamma
};

/// Closed form of phi(e^{-7 pi sqrt 7}) assembled from the pipeline at q = e^{-pi/sqrt 7}.
inline Completion complete_evaluation(const PrecCtx &ctx)
{
    const QPoint q(1, make_rational(1, 7));
    SepticSolution sol = solve_septic(q, ctx);
    const PrecCtx work(sol.prec_bits);
    if (!sol.state.p.contains(1)) {
        throw Error(ErrorCode::EvaluationError, "p does not enclose 1 at q = e^{-pi/sqrt 7}");
    }

    const RootAssignment &ra = sol.assignment;
    const std::array<long, 3> k{detail::identify_septic_root(ra.alpha, work),
                                detail::identify_septic_root(ra.beta, work),
                                detail::identify_septic_root(ra.gamma, work)};
    // With p = 1: u^7 = alpha^2 / beta = (cos(k_b pi/7) / (2 cos^2(k_a pi/7)))^2.
    std::vector<std::pair<long, long>> terms{{k[0], k[1]}, {k[1], k[2]}, {k[2], k[0]}};
    std::sort(terms.begin(), terms.end(), [](const auto &x, const auto &y) { return x.second < y.second; });

    // 1 + u + v + w = phi(q^{1/7}) / phi(q^7), and phi(e^{-pi/sqrt s}) = s^{1/4} phi(e^{-pi sqrt s}).
    const QPoint low = q.pow(make_rational(1, 7));
    const QPoint high = q.pow(7);
    const Rational s = 1 / low.r();
    if (!is_integer(s)) {
        throw Error(ErrorCode::EvaluationError, "q^{1/7} is not of the form e^{-pi/sqrt n}");
    }
    const auto [base, e] = detail::perfect_power(s.get_num());
    const Rational factor_exp = make_rational(-static_cast<long>(e), 4);

    Identity identity{"ln7", phi_quotient(s, high.r()),
                      closed::septic_completion(Rational(base), factor_exp, terms),
                      "Ramanujan's lost notebook: phi(e^{-7 pi sqrt 7}) from the septic theta system"};
    VerifyReport report = verify_identity(identity, ctx);
    identity.status = report.status;

    Identity misprint = identity;
    misprint.id = "ln7_misprint";
    misprint.rhs = replace_exponent(identity.rhs, factor_exp, Rational(-factor_exp));
    VerifyReport misprint_report = verify_identity(misprint, ctx);
    misprint.status = misprint_report.status;

    return {std::move(identity), std::move(report), std::move(misprint), std::move(misprint_report),
            std::move(sol), k};
}

} // namespace thetaval
