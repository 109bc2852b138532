#include <set>

#include "support.hpp"

using namespace thetaval;
using namespace testing_support;

namespace {

const Catalog &catalog()
{
    static const Catalog c = build_catalog();
    return c;
}

const Identity &entry(const char *id)
{
    const Identity *e = catalog().find(id);
    REQUIRE(e != nullptr);
    return *e;
}

} // namespace

TEST_CASE("catalog contents")
{
    const std::vector<std::string> expected{"classical_1", "classical_sqrt2", "classical_2", "r5", "r3", "r7", "r9",
                                            "r45", "cb13", "cb27", "cb63", "yi_33", "yi_53", "yi_m6", "yi_2s5",
                                            "yi_9", "ln7", "g9", "g169"};
    REQUIRE(catalog().entries.size() == 19);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const Identity &e = catalog().entries[i];
        CHECK(e.id == expected[i]);
        CHECK_FALSE(e.provenance.empty());
        CHECK(is_closed_form(e.rhs));
        CHECK_FALSE(is_closed_form(e.lhs));
        ids.insert(e.id);
    }
    CHECK(ids.size() == 19);
    CHECK(catalog().find("nonexistent") == nullptr);
}

TEST_CASE("every entry verifies at 512 bits")
{
    const PrecCtx ctx(512);
    for (const Identity &e : catalog().entries) {
        INFO(e.id);
        const VerifyReport r = verify_identity(e, ctx);
        CHECK(r.status == VerifyStatus::verified);
        CHECK(r.agreement_digits >= 100);
        CHECK_FALSE(r.escalated);
    }
}

TEST_CASE("entries render and parse back unchanged")
{
    for (const Identity &e : catalog().entries) {
        INFO(e.id);
        CHECK(parse_expr(render(e.lhs)) == e.lhs);
        CHECK(parse_expr(render(e.rhs)) == e.rhs);
    }
}

TEST_CASE("classical value against independent routes")
{
    const PrecCtx ctx(512);
    const VerifyReport r = verify_identity(entry("classical_1"), ctx);
    CHECK(r.agreement_digits >= 100);
    // series route for phi and the reflection formula for Gamma(3/4)
    const Ball pi = const_pi(ctx);
    const Ball gamma34 = pi * sqrt(Ball(2, ctx)) / gamma_rational(make_rational(1, 4), ctx);
    const Ball closed = pow(pi, make_rational(1, 4)) / gamma34;
    CHECK(overlaps(phi_series(QPoint(1, 1).to_ball(ctx), ctx), closed));
    CHECK(overlaps(r.rhs, closed));
}

TEST_CASE("r3 right-hand side inverts to the multiplier value")
{
    const PrecCtx ctx(512);
    const Ball r3 = eval_expr(entry("r3").rhs, ctx);
    CHECK(overlaps(1 / pow(r3, 4), 6 * sqrt(Ball(3, ctx)) - 9));
}

TEST_CASE("cross-form consistency")
{
    const PrecCtx ctx(512);
    const Ball product = eval_expr(entry("r9").rhs, ctx) * eval_expr(entry("yi_9").rhs, ctx);
    CHECK(overlaps(product, 1 / sqrt(Ball(3, ctx))));
    CHECK(agreement_digits(product, 1 / sqrt(Ball(3, ctx))) >= 100);

    const Ball combined = eval_expr(entry("cb27").rhs, ctx) * eval_expr(entry("r3").rhs, ctx);
    const Ball direct = phi_series(QPoint(1, 729).to_ball(ctx), ctx) / phi_series(QPoint(1, 1).to_ball(ctx), ctx);
    CHECK(overlaps(combined, direct));
    CHECK(agreement_digits(combined, direct) >= 80);
}

TEST_CASE("a flipped sign in yi_9 is detected")
{
    const PrecCtx ctx(512);
    const Expr s3 = sqrt(lit(3));
    const Expr m = 11 * s3 - 19;
    Identity corrupted = entry("yi_9");
    corrupted.rhs = 2 - s3 - cbrt(lit(4)) * (5 - 3 * s3) / cbrt(m) + cbrt(2 * m);
    const VerifyReport r = verify_identity(corrupted, ctx);
    CHECK(r.status == VerifyStatus::unverified);
    CHECK(r.agreement_digits < 5);
}

TEST_CASE("perturbing any right-hand leaf breaks verification")
{
    const PrecCtx ctx(512);
    const Rational delta = make_rational(1, 1'000'000);
    for (const Identity &e : catalog().entries) {
        const std::size_t n = leaves(e.rhs).size();
        REQUIRE(n > 0);
        for (std::size_t i = 0; i < n; ++i) {
            INFO(e.id << " leaf " << i);
            Identity mutated = e;
            mutated.rhs = perturb_leaf(e.rhs, i, delta);
            VerifyStatus status = VerifyStatus::verified;
            try {
                status = verify_identity(mutated, ctx).status;
            } catch (const Error &) {
                status = VerifyStatus::unverified;
            }
            CHECK(status == VerifyStatus::unverified);
        }
    }
}

TEST_CASE("agreement grows with precision")
{
    for (const Identity &e : catalog().entries) {
        INFO(e.id);
        long previous = -1;
        for (long bits : {256L, 512L, 1024L}) {
            const VerifyReport r = verify_identity(e, PrecCtx(bits));
            CHECK(r.status == VerifyStatus::verified);
            CHECK(r.agreement_digits >= previous);
            previous = r.agreement_digits;
        }
    }
}

TEST_CASE("inconclusive overlap escalates once")
{
    const VerifyReport r = verify_identity(entry("r3"), PrecCtx(64), 100);
    CHECK(r.escalated);
    CHECK(r.prec_bits == 128);
    CHECK(r.status == VerifyStatus::unverified);
    CHECK(overlaps(r.lhs, r.rhs));

    const VerifyReport low = verify_identity(entry("r3"), PrecCtx(64));
    CHECK(low.status == VerifyStatus::verified);
    CHECK(low.agreement_digits >= target_digits_for(PrecCtx(64)));
}

TEST_CASE("evaluation errors name the entry")
{
    const Identity broken{"broken_entry", phi_at(QPoint(1, 1)), 1 / (lit(1) - lit(1)), "test"};
    try {
        verify_identity(broken, PrecCtx(128));
        FAIL("no error");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::EvaluationError);
        CHECK(std::string(e.what()).find("broken_entry") != std::string::npos);
    }
}

TEST_CASE("agreement digits")
{
    const PrecCtx ctx(256);
    CHECK(agreement_digits(Ball(1, ctx), Ball(1, ctx)) >= 70);
    CHECK(agreement_digits(Ball(1, ctx), Ball(2, ctx)) == 0);
    CHECK(agreement_digits(Ball(1, ctx), Ball(make_rational(10005, 10000), ctx)) == 3);
    CHECK(agreement_digits(Ball(1, ctx), Ball(make_rational(1001, 1000), ctx)) == 2);
}
