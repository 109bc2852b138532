#pragma once

// Command-line front end. Every command writes one JSON document (sorted keys, two-space indent,
// trailing newline). Exit codes: 0 all pass, 1 verification failure, 2 usage or domain error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thetaval/lostnotebook.hpp"

namespace thetaval::cli {

inline constexpr const char *tool_version = "0.1.0";

enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_usage = 2 };

using json = nlohmann::json;

/// Error raised for bad user input; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PrecisionOptions {
    long bits = 0;
    long digits = 0;

    long resolve() const
    {
        long out = PrecCtx::default_bits;
        if (const char *env = std::getenv("THETAVAL_PREC_BITS"); env && *env) {
            try {
                std::size_t used = 0;
                out = std::stol(env, &used);
                if (used != std::string(env).size()) {
                    throw std::invalid_argument("trailing characters");
                }
            } catch (const std::exception &) {
                throw UsageError(std::string("THETAVAL_PREC_BITS is not an integer: ") + env);
            }
        }
        if (digits > 0) {
            out = static_cast<long>(std::ceil(digits * 3.33));
        }
        if (bits > 0) {
            out = bits;
        }
        if (out < PrecCtx::min_bits) {
            throw UsageError("precision must be at least " + std::to_string(PrecCtx::min_bits) + " bits");
        }
        return out;
    }
};

inline void add_precision_flags(CLI::App &cmd, PrecisionOptions &p)
{
    cmd.add_option("--prec", p.bits, "Working precision in bits (default: THETAVAL_PREC_BITS or 512)");
    cmd.add_option("--digits", p.digits, "Working precision in decimal digits (3.33 bits per digit)");
}

/// Runs `task(i)` for i in [0, n) on up to `jobs` threads.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)> &task)
{
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                task(i);
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
}

inline std::string magnitude_text(const Ball &b)
{
    return Ball::format_decimal(b.abs_upper().get(), 6);
}

inline std::vector<Rational> parse_grid(const std::string &text)
{
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) {
            throw UsageError("empty grid point");
        }
        try {
            out.push_back(parse_rational(std::string_view(item).substr(first, last - first + 1)));
        } catch (const Error &e) {
            throw UsageError(std::string("bad grid point '") + item + "': " + e.what());
        }
    }
    if (out.empty()) {
        throw UsageError("grid is empty");
    }
    return out;
}

inline void require_open_unit(const Rational &x, const char *what)
{
    if (x <= 0 || x >= 1) {
        throw UsageError(std::string(what) + " must lie in (0, 1), got " + to_string(x));
    }
}

// ---------------------------------------------------------------------------------------------
// verify

struct VerifyOptions {
    std::vector<std::string> ids;
    bool all = false;
    PrecisionOptions prec;
    unsigned jobs = 1;
    bool timings = false;
};

inline int cmd_verify(const VerifyOptions &opt, json &doc)
{
    const Catalog catalog = build_catalog();
    std::vector<const Identity *> selected;
    if (opt.all) {
        if (!opt.ids.empty()) {
            throw UsageError("pass either ids or --all, not both");
        }
        for (const auto &e : catalog.entries) {
            selected.push_back(&e);
        }
    } else {
        if (opt.ids.empty()) {
            throw UsageError("no catalog ids given (use --all for every entry)");
        }
        for (const auto &id : opt.ids) {
            const Identity *e = catalog.find(id);
            if (!e) {
                throw UsageError("unknown catalog id '" + id + "'");
            }
            selected.push_back(e);
        }
    }

    const PrecCtx ctx(opt.prec.resolve());
    std::vector<json> rows(selected.size());
    std::vector<char> passed(selected.size(), 0);
    parallel_for(selected.size(), opt.jobs, [&](std::size_t i) {
        const Identity &ident = *selected[i];
        const auto start = std::chrono::steady_clock::now();
        json row;
        row["id"] = ident.id;
        row["provenance"] = ident.provenance;
        try {
            const VerifyReport rep = verify_identity(ident, ctx);
            row["status"] = to_string(rep.status);
            row["agreement_digits"] = rep.agreement_digits;
            row["lhs_mid_decimal"] = rep.lhs.mid_decimal(50);
            row["prec_bits_used"] = rep.prec_bits;
            row["escalated"] = rep.escalated;
            passed[i] = rep.status == VerifyStatus::verified;
        } catch (const Error &e) {
            row["status"] = "error";
            row["agreement_digits"] = 0;
            row["lhs_mid_decimal"] = "";
            row["prec_bits_used"] = ctx.bits();
            row["escalated"] = false;
            row["error"] = e.what();
        }
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        row["runtime_ms"] = opt.timings ? elapsed.count() : 0;
        rows[i] = std::move(row);
    });

    doc["tool_version"] = tool_version;
    doc["prec_bits"] = ctx.bits();
    doc["entries"] = rows;
    return std::all_of(passed.begin(), passed.end(), [](char b) { return b != 0; }) ? exit_pass : exit_fail;
}

// ---------------------------------------------------------------------------------------------
// eval

inline int cmd_eval(const std::string &text, const PrecisionOptions &prec, json &doc)
{
    Expr e;
    try {
        e = parse_expr(text);
    } catch (const Error &err) {
        throw UsageError(err.what());
    }
    const PrecCtx ctx(prec.resolve());
    doc["tool_version"] = tool_version;
    doc["prec_bits"] = ctx.bits();
    doc["expr"] = render(e);
    try {
        const Ball value = eval_expr(e, ctx);
        long digits = std::min<long>(1000, static_cast<long>(ctx.bits() * 0.30103));
        if (!value.is_exact() && !mpfr_zero_p(value.mid())) {
            Float l(detail::rad_prec);
            mpfr_abs(l.get(), value.mid(), MPFR_RNDD);
            mpfr_log10(l.get(), l.get(), MPFR_RNDD);
            const long lead = static_cast<long>(std::floor(mpfr_get_d(l.get(), MPFR_RNDD)));
            digits = std::clamp<long>(lead - value.rad_exponent10(), 1, digits);
        }
        doc["value"] = value.mid_decimal(static_cast<int>(digits));
        doc["digits"] = digits;
        doc["radius_exponent"] = value.rad_exponent10();
        doc["status"] = "ok";
        return exit_pass;
    } catch (const Error &err) {
        doc["status"] = "error";
        doc["error"] = err.what();
        return exit_fail;
    }
}

// ---------------------------------------------------------------------------------------------
// sweep

struct SweepOptions {
    std::string target;
    std::string grid;
    PrecisionOptions prec;
    unsigned jobs = 1;
};

inline const std::vector<std::string> &sweep_targets()
{
    static const std::vector<std::string> names{"deg3", "deg15", "yi_product", "jims", "septic"};
    return names;
}

/// Product-theorem tuples (a, b, c, d) run at each grid value k.
inline const std::vector<std::array<long, 4>> &yi_product_tuples()
{
    static const std::vector<std::array<long, 4>> tuples{{1, 6, 2, 3}, {1, 1, 1, 1}, {2, 2, 4, 1}};
    return tuples;
}

inline std::vector<std::pair<std::string, Ball>> sweep_point(const std::string &target, const Rational &x,
                                                             const PrecCtx &ctx)
{
    std::vector<std::pair<std::string, Ball>> out;
    const Ball xb(x, ctx);
    if (target == "deg3") {
        const Degree3Residuals r = verify_degree3(xb, ctx);
        out.emplace_back("first", r.first);
        out.emplace_back("second", r.second);
        out.emplace_back("degree_relation", r.degree_relation);
    } else if (target == "deg15") {
        out.emplace_back("degree15", verify_degree15(xb, ctx));
    } else if (target == "yi_product") {
        for (const auto &[a, b, c, d] : yi_product_tuples()) {
            const std::string name = "h(" + std::to_string(a) + "," + std::to_string(b) + ")h(k" + std::to_string(c) +
                                     ",k" + std::to_string(d) + ")";
            out.emplace_back(name, yi_product_theorem(x, a, b, c, d, ctx));
        }
    } else if (target == "jims") {
        out.emplace_back("jims", jims_identity(xb, ctx));
    } else {
        const Nome q(xb);
        const SepticUVW s = compute_uvw(q, ctx);
        out.emplace_back("p_minus_uvw", compute_p(q, ctx) - s.u * s.v * s.w);
        out.emplace_back("sum_relation", septic_sum_residual(q, ctx));
        out.emplace_back("quartic_relation", verify_quartic_relation(q, ctx));
    }
    return out;
}

inline int cmd_sweep(const SweepOptions &opt, json &doc)
{
    const auto &targets = sweep_targets();
    if (std::find(targets.begin(), targets.end(), opt.target) == targets.end()) {
        throw UsageError("unknown sweep target '" + opt.target + "'");
    }
    const std::vector<Rational> grid = parse_grid(opt.grid);
    for (const auto &x : grid) {
        if (opt.target == "yi_product") {
            if (x <= 0) {
                throw UsageError("yi_product grid values k must be positive, got " + to_string(x));
            }
        } else {
            require_open_unit(x, opt.target == "jims" ? "x" : "q");
        }
    }

    const PrecCtx ctx(opt.prec.resolve());
    std::vector<json> rows(grid.size());
    std::vector<int> codes(grid.size(), exit_pass);
    parallel_for(grid.size(), opt.jobs, [&](std::size_t i) {
        json row;
        row["point"] = to_string(grid[i]);
        try {
            json residuals = json::array();
            bool all_zero = true;
            for (const auto &[name, r] : sweep_point(opt.target, grid[i], ctx)) {
                const bool ok = r.contains_zero();
                all_zero = all_zero && ok;
                residuals.push_back(
                    {{"name", name}, {"contains_zero", ok}, {"magnitude", magnitude_text(r)}, {"radius_exponent", r.rad_exponent10()}});
            }
            row["residuals"] = residuals;
            row["status"] = all_zero ? "pass" : "fail";
            codes[i] = all_zero ? exit_pass : exit_fail;
        } catch (const Error &e) {
            row["status"] = "error";
            row["error"] = e.what();
            const bool domain = e.code() == ErrorCode::DomainError || e.code() == ErrorCode::NotConvergent ||
                                e.code() == ErrorCode::PreconditionViolated;
            codes[i] = domain ? exit_usage : exit_fail;
        }
        rows[i] = std::move(row);
    });

    doc["tool_version"] = tool_version;
    doc["prec_bits"] = ctx.bits();
    doc["target"] = opt.target;
    doc["points"] = rows;
    return *std::max_element(codes.begin(), codes.end());
}

// ---------------------------------------------------------------------------------------------
// complete

inline int cmd_complete(const PrecisionOptions &prec, json &doc)
{
    const PrecCtx ctx(prec.resolve());
    doc["tool_version"] = tool_version;
    doc["prec_bits"] = ctx.bits();
    try {
        const Completion c = complete_evaluation(ctx);
        doc["identity"] = {{"id", c.identity.id},
                           {"lhs_text", render(c.identity.lhs)},
                           {"rhs_text", render(c.identity.rhs)},
                           {"provenance", c.identity.provenance}};
        doc["quadratic_branch"] = to_string(c.solution.state.branch);
        doc["permutation_index"] = c.solution.assignment.permutation_index;
        doc["cos_indices"] = c.cos_indices;
        doc["pipeline_prec_bits"] = c.solution.prec_bits;
        doc["status"] = to_string(c.report.status);
        doc["agreement_digits"] = c.report.agreement_digits;
        doc["prec_bits_used"] = c.report.prec_bits;
        doc["misprint"] = {{"rhs_text", render(c.misprint.rhs)},
                           {"status", to_string(c.misprint_report.status)},
                           {"agreement_digits", c.misprint_report.agreement_digits}};
        return c.report.status == VerifyStatus::verified ? exit_pass : exit_fail;
    } catch (const Error &e) {
        doc["status"] = "error";
        doc["error_code"] = to_string(e.code());
        doc["error"] = e.what();
        return exit_fail;
    }
}

// ---------------------------------------------------------------------------------------------
// catalog

inline json catalog_json(const Catalog &catalog)
{
    json out = json::array();
    for (const auto &e : catalog.entries) {
        out.push_back({{"id", e.id}, {"lhs_text", render(e.lhs)}, {"rhs_text", render(e.rhs)}, {"provenance", e.provenance}});
    }
    return out;
}

// ---------------------------------------------------------------------------------------------

inline int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Certified evaluation of Ramanujan theta-function values", "thetaval"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    std::string out_path;

    VerifyOptions verify;
    auto *verify_cmd = app.add_subcommand("verify", "Verify catalog identities");
    verify_cmd->add_option("ids", verify.ids, "Catalog ids");
    verify_cmd->add_flag("--all", verify.all, "Verify every catalog entry");
    verify_cmd->add_option("--jobs", verify.jobs, "Parallel workers")->check(CLI::PositiveNumber);
    verify_cmd->add_flag("--timings", verify.timings, "Record wall-clock runtime_ms (otherwise 0)");
    verify_cmd->add_option("--out", out_path, "Write the JSON report to this file");
    add_precision_flags(*verify_cmd, verify.prec);

    std::string eval_text;
    PrecisionOptions eval_prec;
    auto *eval_cmd = app.add_subcommand("eval", "Evaluate an expression");
    eval_cmd->add_option("expr", eval_text, "Expression text")->required();
    eval_cmd->add_option("--out", out_path, "Write the JSON report to this file");
    add_precision_flags(*eval_cmd, eval_prec);

    SweepOptions sweep;
    auto *sweep_cmd = app.add_subcommand("sweep", "Residual sweep over a grid");
    sweep_cmd->add_option("target", sweep.target, "deg3 | deg15 | yi_product | jims | septic")->required();
    sweep_cmd->add_option("--grid", sweep.grid, "Comma-separated rationals or decimals")->required();
    sweep_cmd->add_option("--jobs", sweep.jobs, "Parallel workers")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", out_path, "Write the JSON report to this file");
    add_precision_flags(*sweep_cmd, sweep.prec);

    PrecisionOptions complete_prec;
    auto *complete_cmd = app.add_subcommand("complete", "Septic completion of phi(e^{-7 pi sqrt 7})");
    complete_cmd->add_option("--out", out_path, "Write the JSON report to this file");
    add_precision_flags(*complete_cmd, complete_prec);

    auto *catalog_cmd = app.add_subcommand("catalog", "List catalog entries with provenance");
    catalog_cmd->add_option("--out", out_path, "Write the JSON report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_pass : exit_usage;
    }

    json doc;
    int code = exit_pass;
    try {
        if (*verify_cmd) {
            code = cmd_verify(verify, doc);
        } else if (*eval_cmd) {
            code = cmd_eval(eval_text, eval_prec, doc);
        } else if (*sweep_cmd) {
            code = cmd_sweep(sweep, doc);
        } else if (*complete_cmd) {
            code = cmd_complete(complete_prec, doc);
        } else {
            doc["tool_version"] = tool_version;
            doc["entries"] = catalog_json(build_catalog());
        }
    } catch (const UsageError &e) {
        err << "thetaval: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error &e) {
        err << "thetaval: " << e.what() << "\n";
        return exit_usage;
    }

    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            err << "thetaval: cannot write " << out_path << "\n";
            return exit_usage;
        }
        file << text;
    }
    return code;
}

inline int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    std::vector<const char *> argv{"thetaval"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace thetaval::cli
