#include "support.hpp"

using namespace thetaval;
using namespace testing_support;

TEST_CASE("exact integer arithmetic stays exact")
{
    const PrecCtx ctx(128);
    const Ball two = Ball(1, ctx) + Ball(1, ctx);
    CHECK(two.contains(2));
    CHECK(two.is_exact());
}

TEST_CASE("rational parsing")
{
    CHECK(parse_rational("0.8") == make_rational(4, 5));
    CHECK(parse_rational("09/10") == make_rational(9, 10));
    CHECK(parse_rational("-0.075") == make_rational(-3, 40));
    CHECK(parse_rational("25e-2") == make_rational(1, 4));
    CHECK(parse_rational(" 6/4 ") == make_rational(3, 2));
    CHECK_THROWS_AS(parse_rational("0x10"), Error);
    CHECK_THROWS_AS(parse_rational("1/"), Error);
    CHECK_THROWS_AS(parse_rational("1.2.3"), Error);
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("square root squared encloses its argument")
{
    const PrecCtx ctx(256);
    const Ball r = pow(Ball(2, ctx), make_rational(1, 2));
    CHECK(sqr(r).contains(2));
    CHECK(tight(sqr(r), 70));
}

TEST_CASE("product radius follows the interval propagation rule")
{
    const PrecCtx ctx(256);
    Float tiny(64);
    mpfr_set_str(tiny.get(), "1e-50", 10, MPFR_RNDU);
    Ball a(1, ctx);
    a.add_error(tiny.get());
    const Ball p = a * a;
    // |a| rb + |b| ra + ra rb = 2e-50 + 1e-100, plus rounding
    CHECK(p.rad_double() <= 3e-50);
    CHECK(p.rad_double() >= 2e-50);
    // endpoint products lie inside
    const Ball lo = Ball::from_mid_rad(a.lower().get(), Float(64).get(), 256);
    const Ball hi = Ball::from_mid_rad(a.upper().get(), Float(64).get(), 256);
    CHECK(p.contains(lo * lo));
    CHECK(p.contains(hi * hi));
}

TEST_CASE("division and even roots reject straddling enclosures")
{
    const PrecCtx ctx(128);
    Ball z(0, ctx);
    Float r(64);
    mpfr_set_d(r.get(), 1e-10, MPFR_RNDU);
    z.add_error(r.get());
    CHECK_THROWS_MATCHES(Ball(1, ctx) / z, Error, Catch::Matchers::Predicate<Error>([](const Error &e) {
                             return e.code() == ErrorCode::DivisorStraddlesZero;
                         }));
    CHECK_THROWS_MATCHES(pow(Ball(-2, ctx), make_rational(1, 2)), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error &e) { return e.code() == ErrorCode::NegativeBaseEvenRoot; }));
    CHECK(rootn(Ball(-8, ctx), 3).contains(-2));
}

TEST_CASE("elementary functions")
{
    const PrecCtx ctx(256);
    CHECK(exp(Ball(0, ctx)).contains(1));
    CHECK(cos(const_pi(ctx) / 3).contains(make_rational(1, 2)));
    CHECK(sin(const_pi(ctx)).contains_zero());
    CHECK_THROWS_AS(log(Ball(0, ctx)), Error);
    CHECK_THROWS_AS(sqrt(Ball(-1, ctx)), Error);

    // exp(-pi) against a Taylor sum at doubled precision
    const PrecCtx hi = ctx.doubled();
    const Ball x = -const_pi(hi);
    Ball term(1, hi), sum(1, hi);
    for (long n = 1; n < 400; ++n) {
        term = term * x / n;
        sum = sum + term;
    }
    const Ball e = exp(-const_pi(ctx));
    CHECK(overlaps(e, sum));
    CHECK(e.mid_decimal(30).rfind("0.043213918263772", 0) == 0);
}

TEST_CASE("cosine and sine stay certified for large arguments")
{
    const PrecCtx ctx(256);
    const Ball big = const_pi(ctx) * 1'000'000 + const_pi(ctx) / 3;
    const Ball c = cos(big);
    CHECK(c.contains(make_rational(1, 2)));
    CHECK(tight(c, 60));
    CHECK(overlaps(sqr(sin(big)) + sqr(c), Ball(1, ctx)));
}

TEST_CASE("pi is tight at every precision")
{
    const Ball p64 = const_pi(PrecCtx(64));
    CHECK(p64.mid_decimal(15) == "3.14159265358979");
    CHECK(p64.rad_double() < std::ldexp(1.0, -60));
    CHECK(const_pi(PrecCtx(256)).rad_double() < std::ldexp(1.0, -250));
    // AGM route to pi (Gauss-Legendre) at higher precision
    const PrecCtx hi(512);
    const Ball one(1, hi);
    Ball a = one, b = one / sqrt(Ball(2, hi)), t = one / 4, p = one;
    for (int i = 0; i < 12; ++i) {
        const Ball an = (a + b) / 2;
        b = sqrt(a * b);
        t = t - p * sqr(a - an);
        a = an;
        p = 2 * p;
    }
    CHECK(overlaps(sqr(a + b) / (4 * t), p64));
}

TEST_CASE("agm")
{
    const PrecCtx ctx(384);
    CHECK(agm(Ball(1, ctx), Ball(1, ctx)).contains(1));
    const Ball g = agm(Ball(1, ctx), sqrt(Ball(2, ctx)));
    // Gamma(1/4)^2 = 2 pi sqrt(2 pi) / agm(1, sqrt 2)
    const Ball pi = const_pi(ctx);
    CHECK(overlaps(sqr(gamma_rational(make_rational(1, 4), ctx)), 2 * pi * sqrt(2 * pi) / g));
    CHECK(overlaps(agm(Ball(2, ctx), Ball(8, ctx)), 2 * agm(Ball(1, ctx), Ball(4, ctx))));
    CHECK_THROWS_AS(agm(Ball(0, ctx), Ball(1, ctx)), Error);
}

TEST_CASE("agm is homogeneous")
{
    const PrecCtx ctx(256);
    const Ball a(3, ctx), b = rat(7, 5, ctx);
    for (const Rational &lambda : {Rational(2), Rational(10), make_rational(1, 3)}) {
        const Ball l(lambda, ctx);
        CHECK(overlaps(agm(l * a, l * b), l * agm(a, b)));
    }
}

TEST_CASE("gamma at rational arguments")
{
    const PrecCtx ctx(384);
    const Ball pi = const_pi(ctx);
    CHECK(gamma_rational(1, ctx).contains(1));
    CHECK(gamma_rational(2, ctx).contains(1));
    CHECK(overlaps(gamma_rational(make_rational(1, 2), ctx), sqrt(pi)));
    CHECK(overlaps(gamma_rational(make_rational(1, 4), ctx) * gamma_rational(make_rational(3, 4), ctx),
                   pi * sqrt(Ball(2, ctx))));
    CHECK_THROWS_AS(gamma_rational(0, ctx), Error);
    CHECK_THROWS_AS(gamma_rational(make_rational(5, 2), ctx), Error);
}

TEST_CASE("gamma reflection and duplication")
{
    const PrecCtx ctx(384);
    const Ball pi = const_pi(ctx);
    auto G = [&](const Rational &p) {
        // Gamma(9/8) via the recurrence Gamma(9/8) = (1/8) Gamma(1/8)
        return gamma_rational(p, ctx);
    };
    CHECK(overlaps(G(make_rational(9, 8)), G(make_rational(1, 8)) / 8));
    for (const Rational &p : {make_rational(1, 8), make_rational(1, 4), make_rational(3, 8), make_rational(1, 2),
                              make_rational(3, 4), make_rational(9, 8)}) {
        INFO("p = " << p.get_str());
        const Ball sp = sin(pi * Ball(p, ctx));
        if (p < 1) {
            CHECK(overlaps(G(p) * G(Rational(1 - p)), pi / sp));
        }
        // Gamma(p) Gamma(p + 1/2) = 2^{1-2p} sqrt(pi) Gamma(2p)
        const Rational half_shift = p + make_rational(1, 2);
        const Rational twice = 2 * p;
        if (half_shift <= 2 && twice <= 2) {
            CHECK(overlaps(G(p) * G(half_shift), pow(Ball(2, ctx), Rational(1 - twice)) * sqrt(pi) * G(twice)));
        }
    }
}

TEST_CASE("higher precision refines lower precision")
{
    const Ball lo = gamma_rational(make_rational(3, 4), PrecCtx(128));
    const Ball hi = gamma_rational(make_rational(3, 4), PrecCtx(512));
    CHECK(overlaps(lo, hi));
    CHECK(hi.rad_double() < lo.rad_double());
    const Ball e1 = exp(sqrt(Ball(7, PrecCtx(128))));
    const Ball e2 = exp(sqrt(Ball(7, PrecCtx(512))));
    CHECK(e1.contains(e2));
}

TEST_CASE("evaluation is deterministic")
{
    const PrecCtx ctx(320);
    auto run = [&] { return agm(Ball(1, ctx), sqrt(Ball(3, ctx))) * gamma_rational(make_rational(5, 4), ctx); };
    CHECK(identical(run(), run()));
}

TEST_CASE("precision context bounds")
{
    CHECK_THROWS_AS(PrecCtx(32), Error);
    CHECK(PrecCtx(64).doubled().bits() == 128);
}
