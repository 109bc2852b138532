// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>

#include "cli.hpp"

using namespace thetaval;
using thetaval::cli::json;

namespace {

const PrecCtx P512(512);

Ball rat(long n, long d, const PrecCtx &ctx = P512)
{
    return Ball(make_rational(n, d), ctx);
}

Ball expr(const Expr &e, const PrecCtx &ctx = P512)
{
    return eval_expr(e, ctx);
}

const Catalog &catalog()
{
    static const Catalog c = build_catalog();
    return c;
}

struct Criterion {
    std::string detail;
    bool ok = true;

    void check(bool cond, const std::string &what)
    {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

bool verified_100(const std::string &id, Criterion &c)
{
    const VerifyReport r = verify_identity(*catalog().find(id), P512);
    const bool ok = r.status == VerifyStatus::verified && r.agreement_digits >= 100;
    c.check(ok, id + " " + std::to_string(r.agreement_digits) + " digits");
    return ok;
}

double run_verify_all(unsigned jobs, Criterion &c)
{
    std::ostringstream out, err;
    const auto start = std::chrono::steady_clock::now();
    const int code = cli::run_cli({"verify", "--all", "--prec", "512", "--jobs", std::to_string(jobs)}, out, err);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.check(code == 0, "exit code " + std::to_string(code));
    const json d = json::parse(out.str());
    c.check(d["entries"].size() == 19, "entry count");
    for (const json &row : d["entries"]) {
        if (row["status"] != "verified" || row["agreement_digits"].get<long>() < 100) {
            c.check(false, row["id"].get<std::string>());
        }
    }
    return seconds;
}

void criterion1(Criterion &c)
{
    const double single = run_verify_all(1, c);
    const double parallel = run_verify_all(8, c);
    c.check(single <= 300, "single-threaded " + std::to_string(single) + " s");
    c.check(parallel <= 60, "8 jobs " + std::to_string(parallel) + " s");
    c.detail += (c.detail.empty() ? "" : "; ") + std::string("1 job ") + std::to_string(single) + " s, 8 jobs " +
                std::to_string(parallel) + " s";
}

void criterion2(Criterion &c)
{
    for (const char *id : {"classical_1", "classical_sqrt2", "classical_2"}) {
        verified_100(id, c);
    }
}

void criterion3(Criterion &c)
{
    std::vector<Ball> points{rat(1, 20), rat(1, 10), rat(1, 5), rat(3, 10), rat(2, 5), QPoint(1, 1).to_ball(P512)};
    for (const Ball &q : points) {
        const Degree3Residuals r = verify_degree3(q, P512);
        c.check(r.first.contains(0) && r.second.contains(0) && r.degree_relation.contains(0),
                "degree-3 residual at q = " + q.mid_decimal(6));
    }
    const Ball m = multiplier(QPoint(1, 1).to_ball(P512), 3, P512);
    const Ball m2 = sqr(m);
    c.check(overlaps(m2, 6 * sqrt(Ball(3, P512)) - 9), "m^2 vs 6 sqrt 3 - 9");
    c.check(m2.rad_exponent10() < -100, "m^2 radius");
}

void criterion4(Criterion &c)
{
    c.check(agreement_digits(class_invariant(9, P512), expr(closed::g9())) >= 100, "G_9");
    c.check(agreement_digits(class_invariant(169, P512), expr(closed::g169())) >= 100, "G_169");
    for (long n : {1L, 3L, 7L, 9L}) {
        const Ball a = singular_modulus_sq(n, P512);
        const Ball g = pow(4 * a * (1 - a), make_rational(-1, 24));
        const Ball direct = class_invariant(n, P512);
        c.check(overlaps(direct, g) && agreement_digits(direct, g) >= 80, "G_" + std::to_string(n) + " from alpha_n");
    }
}

void criterion5(Criterion &c)
{
    const QPoint q(1, make_rational(1, 7));
    const Ball p = compute_p(q, P512);
    c.check(p.contains(1) && p.rad_exponent10() < -100, "p at e^{-pi/sqrt 7}");
    c.check(solve_ratio4(p, q, P512).contains(7), "ratio4 = 7");
    const SepticSolution sol = solve_septic(q, P512);
    const SepticState &s = sol.state;
    c.check(s.c2.contains(-6) && s.c1.contains(5) && s.c0.contains(-1), "cubic coefficients");
    for (long k = 1; k <= 3; ++k) {
        c.check(overlaps(sol.roots[k - 1], expr(closed::septic_root(k))), "root k = " + std::to_string(k));
    }
    const RootAssignment &ra = sol.assignment;
    c.check(ra.permutation_index == 5 && overlaps(ra.alpha, expr(closed::septic_root(3))) &&
                overlaps(ra.beta, expr(closed::septic_root(2))) && overlaps(ra.gamma, expr(closed::septic_root(1))),
            "root ordering");
    const Completion done = complete_evaluation(P512);
    c.check(done.identity.rhs == catalog().find("ln7")->rhs, "emitted rhs differs from catalog");
    c.check(done.report.status == VerifyStatus::verified && done.report.agreement_digits >= 100,
            "completion " + std::to_string(done.report.agreement_digits) + " digits");
    c.check(done.misprint_report.status == VerifyStatus::unverified && done.misprint_report.agreement_digits < 5,
            "misprint " + std::to_string(done.misprint_report.agreement_digits) + " digits");
}

void criterion6(Criterion &c)
{
    auto small = [](const Ball &r) { return r.contains(0) && r.rad_exponent10() < -80; };
    for (long n : {1L, 2L, 3L, 4L}) {
        const Nome q(rat(n, 10));
        const SepticUVW s = compute_uvw(q, P512);
        const std::string at = " at q = 0." + std::to_string(n);
        c.check(small(compute_p(q, P512) - s.u * s.v * s.w), "p - uvw" + at);
        c.check(small(septic_sum_residual(q, P512)), "sum relation" + at);
        c.check(small(verify_quartic_relation(q, P512)), "quartic relation" + at);
    }
}

void criterion7(Criterion &c)
{
    std::vector<Ball> points{rat(3, 20), rat(2, 5), QPoint(1, make_rational(1, 15)).to_ball(P512)};
    for (const Ball &q : points) {
        c.check(verify_degree15(q, P512).contains(0), "degree 15 at q = " + q.mid_decimal(6));
    }
    const std::vector<std::array<long, 5>> tuples{{2, 1, 6, 2, 3}, {3, 1, 1, 1, 1}, {5, 2, 2, 4, 1}};
    for (const auto &[k, a, b, cc, d] : tuples) {
        c.check(yi_product_theorem(k, a, b, cc, d, P512).contains(0), "product theorem k = " + std::to_string(k));
    }
    for (const char *id : {"yi_33", "yi_53", "yi_m6", "yi_2s5", "yi_9"}) {
        verified_100(id, c);
    }
}

void criterion8(Criterion &c)
{
    for (long n : {3L, 6L, 9L}) {
        const JimsResult r = jims_identity_detail(rat(n, 10), P512);
        c.check(r.residual.contains(0) && r.residual.rad_exponent10() < -60, "x = 0." + std::to_string(n));
    }
}

bool triple_overlaps(const ModularTriple &a, const ModularTriple &b)
{
    return overlaps(a.x, b.x) && overlaps(a.q, b.q) && overlaps(a.z, b.z);
}

void criterion9(Criterion &c)
{
    for (long n : {2L, 5L, 8L}) {
        const ModularTriple t = ModularTriple::from_modulus(rat(n, 10), P512);
        const ModularTriple round =
            transform(transform(t, TransformKind::duplication, P512), TransformKind::dimidiation, P512);
        c.check(triple_overlaps(t, round), "dimidiation after duplication at x = 0." + std::to_string(n));
        const ModularTriple twice =
            transform(transform(t, TransformKind::change_of_sign, P512), TransformKind::change_of_sign, P512);
        c.check(triple_overlaps(t, twice), "change of sign twice at x = 0." + std::to_string(n));
    }
    const Ball x = rat(1, 2);
    const Ball q = nome(x, P512);
    const Ball lhs = phi_series(pow(q, 4), P512);
    const Ball rhs = sqrt(hyp2f1_half(x, P512)) * (1 + pow(1 - x, make_rational(1, 4))) / 2;
    c.check(overlaps(lhs, rhs) && agreement_digits(lhs, rhs) >= 100, "phi(q^4) at x = 1/2");
}

void criterion10(Criterion &c)
{
    const PrecCtx ctx(256);
    for (const char *text : {"-0.6", "-0.3", "-0.05", "0.05", "0.3", "0.6"}) {
        const Ball q(parse_rational(text), ctx);
        c.check(overlaps(phi_series(q, ctx), phi_product(q, ctx)), std::string("phi at ") + text);
        c.check(overlaps(psi_series(q, ctx), psi_product(q, ctx)), std::string("psi at ") + text);
        c.check(overlaps(f_neg_series(q, ctx), f_neg_product(q, ctx)), std::string("f(-q) at ") + text);
    }
    for (const Rational &r : {make_rational(1, 1), make_rational(7, 1), make_rational(1, 7)}) {
        const Ball q = QPoint(1, r).to_ball(ctx);
        c.check(overlaps(phi_series(q, ctx), phi_product(q, ctx)), "phi at a QPoint");
    }
    std::mt19937_64 rng(20241019);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        long an, bn;
        do {
            an = std::lround(unit(rng) * 900'000);
            bn = std::lround(unit(rng) * 900'000);
        } while (an == 0 || bn == 0 || std::abs(static_cast<double>(an) * bn) > 0.8e12);
        const Ball a = rat(an, 1'000'000, ctx);
        const Ball b = rat(bn, 1'000'000, ctx);
        c.check(overlaps(theta_f(a, b, ctx), theta_f_product(a, b, ctx)), "triple product sample " + std::to_string(i));
    }
}

void criterion11(Criterion &c)
{
    const Ball product = expr(catalog().find("r9")->rhs) * expr(catalog().find("yi_9")->rhs);
    const Ball target = 1 / sqrt(Ball(3, P512));
    c.check(overlaps(product, target) && agreement_digits(product, target) >= 100, "r9 * yi_9");
    const Ball combined = expr(catalog().find("cb27")->rhs) * expr(catalog().find("r3")->rhs);
    const Ball direct = phi_series(QPoint(1, 729).to_ball(P512), P512) / phi_series(QPoint(1, 1).to_ball(P512), P512);
    c.check(overlaps(combined, direct) && agreement_digits(combined, direct) >= 80, "cb27 * r3");
}

void criterion12(Criterion &c)
{
    const Rational delta = make_rational(1, 1'000'000);
    long total = 0;
    for (const Identity &e : catalog().entries) {
        const std::size_t n = leaves(e.rhs).size();
        c.check(n > 0, e.id + " has no leaves");
        for (std::size_t i = 0; i < n; ++i) {
            Identity mutated = e;
            mutated.rhs = perturb_leaf(e.rhs, i, delta);
            bool still = false;
            try {
                still = verify_identity(mutated, P512).status == VerifyStatus::verified;
            } catch (const Error &) {
                still = false;
            }
            c.check(!still, e.id + " leaf " + std::to_string(i));
            ++total;
        }
    }
    c.detail += (c.detail.empty() ? "" : "; ") + std::to_string(total) + " mutations";
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, void (*)(Criterion &)>> criteria{
        {"1 catalog completeness", criterion1},   {"2 classical values", criterion2},
        {"3 degree-3 replay", criterion3},         {"4 class invariants", criterion4},
        {"5 septic pipeline", criterion5},         {"6 septic relations on a grid", criterion6},
        {"7 modular-equation sweeps", criterion7}, {"8 series identity", criterion8},
        {"9 transform algebra", criterion9},       {"10 oracle equivalence", criterion10},
        {"11 cross-form consistency", criterion11}, {"12 mutation sensitivity", criterion12},
    };
    int failures = 0;
    for (const auto &[name, fn] : criteria) {
        Criterion c;
        try {
            fn(c);
        } catch (const std::exception &e) {
            c.check(false, std::string("exception: ") + e.what());
        }
        failures += c.ok ? 0 : 1;
        std::cout << (c.ok ? "PASS " : "FAIL ") << name;
        if (!c.detail.empty()) {
            std::cout << " (" << c.detail << ")";
        }
        std::cout << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
