#pragma once

// Expression trees: exact closed forms (rationals, pi, gamma and cos at rational arguments,
// arithmetic, rational powers) plus the theta-function calls used on the left-hand side of
// catalog identities and by the `eval` command.
//
// Text grammar (rendering is canonical and parses back to the same tree):
//
//   expr     := term (('+' | '-') term)*
//   term     := unary (('*' | '/') unary)*
//   unary    := ('-' | '+') unary | power
//   power    := primary ('^' exponent)?
//   exponent := ['-'] primary                      must fold to a rational constant
//   primary  := number | 'pi' | call | '(' expr ')'
//   call     := phi(arg) | psi(arg) | fneg(arg) | chi(arg)
//             | f(expr, expr) | agm(expr, expr) | hyp(expr)
//             | gamma(rat) | cospi(rat) | classinv(rat) | yih(rat, rat) | yihp(rat, rat)
//   arg      := qpoint(sign, rat) | expr           qpoint(s, r) = s * exp(-pi sqrt r)
//   number   := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]   (read exactly)
//
// Rendering: rationals are "7", "(3/4)", "(-2)"; binary nodes are "(a op b)"; negation is
// "(-a)"; powers are "base^k" for k a nonnegative integer and "base^(p/q)" otherwise.

#include <cctype>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "modular.hpp"
#include "precision.hpp"
#include "qseries.hpp"

namespace thetaval {

enum class ThetaFn { phi, psi, fneg, chi };

inline const char *to_string(ThetaFn fn)
{
    switch (fn) {
    case ThetaFn::phi: return "phi";
    case ThetaFn::psi: return "psi";
    case ThetaFn::fneg: return "fneg";
    case ThetaFn::chi: return "chi";
    }
    return "?";
}

enum class BinOp { add, sub, mul, div };

struct Node;

/// Immutable, shared expression tree.
class Expr
{
public:
    Expr() = default;
    explicit Expr(std::shared_ptr<const Node> node) : m_node(std::move(node)) {}
    const Node &node() const
    {
        return *m_node;
    }
    bool empty() const noexcept
    {
        return !m_node;
    }

private:
    std::shared_ptr<const Node> m_node;
};

namespace node {
struct Num {
    Rational value;
};
struct Pi {
};
struct GammaRat {
    Rational arg;
};
struct CosPiRat {
    Rational arg;
};
struct Neg {
    Expr arg;
};
struct Binary {
    BinOp op;
    Expr lhs, rhs;
};
struct PowRat {
    Expr base;
    Rational exp;
};
struct Theta {
    ThetaFn fn;
    std::variant<QPoint, Expr> arg;
};
struct ThetaF {
    Expr a, b;
};
struct Agm {
    Expr a, b;
};
struct Hyp {
    Expr x;
};
struct ClassInv {
    Rational n;
};
struct YiH {
    Rational k, n;
    bool primed;
};
} // namespace node

struct Node {
    std::variant<node::Num, node::Pi, node::GammaRat, node::CosPiRat, node::Neg, node::Binary,
                 node::PowRat, node::Theta, node::ThetaF, node::Agm, node::Hyp, node::ClassInv,
                 node::YiH>
        v;
};

namespace detail {
template <typename T>
Expr make(T &&value)
{
    return Expr(std::make_shared<const Node>(Node{std::forward<T>(value)}));
}
inline const Rational *as_num(const Expr &e)
{
    if (auto p = std::get_if<node::Num>(&e.node().v)) {
        return &p->value;
    }
    return nullptr;
}
} // namespace detail

// ---------------------------------------------------------------------------------------------
// Builders. neg and div fold rational literals so that "(3/4)" and 3/4 build the same tree.

inline Expr lit(const Rational &r)
{
    return detail::make(node::Num{r});
}
inline Expr lit(long n)
{
    return lit(Rational(n));
}
inline Expr lit(long num, long den)
{
    return lit(make_rational(num, den));
}
inline Expr pi_const()
{
    return detail::make(node::Pi{});
}
inline Expr gamma_of(const Rational &p)
{
    return detail::make(node::GammaRat{p});
}
inline Expr cospi(const Rational &p)
{
    return detail::make(node::CosPiRat{p});
}
inline Expr operator-(const Expr &e)
{
    if (auto r = detail::as_num(e)) {
        return lit(Rational(-*r));
    }
    return detail::make(node::Neg{e});
}
inline Expr binary(BinOp op, const Expr &a, const Expr &b)
{
    if (op == BinOp::div) {
        auto x = detail::as_num(a);
        auto y = detail::as_num(b);
        if (x && y && *y != 0) {
            return lit(Rational(*x / *y));
        }
    }
    return detail::make(node::Binary{op, a, b});
}
inline Expr operator+(const Expr &a, const Expr &b)
{
    return binary(BinOp::add, a, b);
}
inline Expr operator-(const Expr &a, const Expr &b)
{
    return binary(BinOp::sub, a, b);
}
inline Expr operator*(const Expr &a, const Expr &b)
{
    return binary(BinOp::mul, a, b);
}
inline Expr operator/(const Expr &a, const Expr &b)
{
    return binary(BinOp::div, a, b);
}
inline Expr operator+(const Expr &a, long b)
{
    return a + lit(b);
}
inline Expr operator+(long a, const Expr &b)
{
    return lit(a) + b;
}
inline Expr operator-(const Expr &a, long b)
{
    return a - lit(b);
}
inline Expr operator-(long a, const Expr &b)
{
    return lit(a) - b;
}
inline Expr operator*(long a, const Expr &b)
{
    return lit(a) * b;
}
inline Expr operator*(const Expr &a, long b)
{
    return a * lit(b);
}
inline Expr operator/(const Expr &a, long b)
{
    return a / lit(b);
}
inline Expr operator/(long a, const Expr &b)
{
    return lit(a) / b;
}
inline Expr pow(const Expr &base, const Rational &e)
{
    return detail::make(node::PowRat{base, e});
}
inline Expr pow(const Expr &base, long num, long den)
{
    return pow(base, make_rational(num, den));
}
inline Expr sqrt(const Expr &e)
{
    return pow(e, 1, 2);
}
inline Expr cbrt(const Expr &e)
{
    return pow(e, 1, 3);
}
inline Expr theta_at(ThetaFn fn, const QPoint &q)
{
    return detail::make(node::Theta{fn, q});
}
inline Expr theta_at(ThetaFn fn, const Expr &q)
{
    return detail::make(node::Theta{fn, q});
}
inline Expr phi_at(const QPoint &q)
{
    return theta_at(ThetaFn::phi, q);
}
inline Expr theta_f_of(const Expr &a, const Expr &b)
{
    return detail::make(node::ThetaF{a, b});
}
inline Expr agm_of(const Expr &a, const Expr &b)
{
    return detail::make(node::Agm{a, b});
}
inline Expr hyp_of(const Expr &x)
{
    return detail::make(node::Hyp{x});
}
inline Expr class_inv(const Rational &n)
{
    return detail::make(node::ClassInv{n});
}
inline Expr yih(const Rational &k, const Rational &n, bool primed = false)
{
    return detail::make(node::YiH{k, n, primed});
}

// ---------------------------------------------------------------------------------------------
// Structure

inline bool operator==(const Expr &a, const Expr &b);

namespace detail {
inline bool same(const node::Num &a, const node::Num &b) { return a.value == b.value; }
inline bool same(const node::Pi &, const node::Pi &) { return true; }
inline bool same(const node::GammaRat &a, const node::GammaRat &b) { return a.arg == b.arg; }
inline bool same(const node::CosPiRat &a, const node::CosPiRat &b) { return a.arg == b.arg; }
inline bool same(const node::Neg &a, const node::Neg &b) { return a.arg == b.arg; }
inline bool same(const node::Binary &a, const node::Binary &b)
{
    return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs;
}
inline bool same(const node::PowRat &a, const node::PowRat &b) { return a.exp == b.exp && a.base == b.base; }
inline bool same(const node::Theta &a, const node::Theta &b) { return a.fn == b.fn && a.arg == b.arg; }
inline bool same(const node::ThetaF &a, const node::ThetaF &b) { return a.a == b.a && a.b == b.b; }
inline bool same(const node::Agm &a, const node::Agm &b) { return a.a == b.a && a.b == b.b; }
inline bool same(const node::Hyp &a, const node::Hyp &b) { return a.x == b.x; }
inline bool same(const node::ClassInv &a, const node::ClassInv &b) { return a.n == b.n; }
inline bool same(const node::YiH &a, const node::YiH &b)
{
    return a.k == b.k && a.n == b.n && a.primed == b.primed;
}
} // namespace detail

/// Node-for-node structural equality.
inline bool operator==(const Expr &a, const Expr &b)
{
    if (a.empty() || b.empty()) {
        return a.empty() == b.empty();
    }
    if (&a.node() == &b.node()) {
        return true;
    }
    return std::visit(
        [](const auto &x, const auto &y) -> bool {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, std::decay_t<decltype(y)>>) {
                return detail::same(x, y);
            } else {
                return false;
            }
        },
        a.node().v, b.node().v);
}

/// True iff the tree uses only exact closed-form nodes.
inline bool is_closed_form(const Expr &e)
{
    return std::visit(
        [](const auto &n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, node::Num> || std::is_same_v<T, node::Pi> ||
                          std::is_same_v<T, node::GammaRat> || std::is_same_v<T, node::CosPiRat>) {
                return true;
            } else if constexpr (std::is_same_v<T, node::Neg>) {
                return is_closed_form(n.arg);
            } else if constexpr (std::is_same_v<T, node::Binary>) {
                return is_closed_form(n.lhs) && is_closed_form(n.rhs);
            } else if constexpr (std::is_same_v<T, node::PowRat>) {
                return is_closed_form(n.base);
            } else {
                return false;
            }
        },
        e.node().v);
}

/// Rational leaves (Num, GammaRat, CosPiRat) in depth-first order.
inline std::vector<Rational> leaves(const Expr &e)
{
    std::vector<Rational> out;
    std::function<void(const Expr &)> walk = [&](const Expr &x) {
        std::visit(
            [&](const auto &n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, node::Num>) {
                    out.push_back(n.value);
                } else if constexpr (std::is_same_v<T, node::GammaRat> || std::is_same_v<T, node::CosPiRat>) {
                    out.push_back(n.arg);
                } else if constexpr (std::is_same_v<T, node::Neg>) {
                    walk(n.arg);
                } else if constexpr (std::is_same_v<T, node::Binary>) {
                    walk(n.lhs);
                    walk(n.rhs);
                } else if constexpr (std::is_same_v<T, node::PowRat>) {
                    walk(n.base);
                }
            },
            x.node().v);
    };
    walk(e);
    return out;
}

/// Copy of `e` with the `index`-th rational leaf shifted by `delta`. Built directly (no folding)
/// so the perturbed tree has the same shape.
inline Expr perturb_leaf(const Expr &e, std::size_t index, const Rational &delta)
{
    std::size_t counter = 0;
    std::function<Expr(const Expr &)> walk = [&](const Expr &x) -> Expr {
        return std::visit(
            [&](const auto &n) -> Expr {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, node::Num>) {
                    return counter++ == index ? detail::make(node::Num{Rational(n.value + delta)}) : x;
                } else if constexpr (std::is_same_v<T, node::GammaRat>) {
                    return counter++ == index ? detail::make(node::GammaRat{Rational(n.arg + delta)}) : x;
                } else if constexpr (std::is_same_v<T, node::CosPiRat>) {
                    return counter++ == index ? detail::make(node::CosPiRat{Rational(n.arg + delta)}) : x;
                } else if constexpr (std::is_same_v<T, node::Neg>) {
                    return detail::make(node::Neg{walk(n.arg)});
                } else if constexpr (std::is_same_v<T, node::Binary>) {
                    Expr l = walk(n.lhs);
                    Expr r = walk(n.rhs);
                    return detail::make(node::Binary{n.op, l, r});
                } else if constexpr (std::is_same_v<T, node::PowRat>) {
                    return detail::make(node::PowRat{walk(n.base), n.exp});
                } else {
                    return x;
                }
            },
            x.node().v);
    };
    return walk(e);
}

/// Copy of `e` with every PowRat exponent equal to `from` replaced by `to`.
inline Expr replace_exponent(const Expr &e, const Rational &from, const Rational &to)
{
    return std::visit(
        [&](const auto &n) -> Expr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, node::Neg>) {
                return detail::make(node::Neg{replace_exponent(n.arg, from, to)});
            } else if constexpr (std::is_same_v<T, node::Binary>) {
                return detail::make(
                    node::Binary{n.op, replace_exponent(n.lhs, from, to), replace_exponent(n.rhs, from, to)});
            } else if constexpr (std::is_same_v<T, node::PowRat>) {
                return detail::make(node::PowRat{replace_exponent(n.base, from, to), n.exp == from ? to : n.exp});
            } else {
                return e;
            }
        },
        e.node().v);
}

// ---------------------------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::string render_rational(const Rational &r)
{
    if (is_integer(r) && r >= 0) {
        return r.get_str();
    }
    return "(" + r.get_str() + ")";
}

inline std::string render_exponent(const Rational &r)
{
    if (is_integer(r) && r >= 0) {
        return r.get_str();
    }
    return "(" + r.get_str() + ")";
}

} // namespace detail

inline std::string render(const Expr &e)
{
    return std::visit(
        [](const auto &n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, node::Num>) {
                return detail::render_rational(n.value);
            } else if constexpr (std::is_same_v<T, node::Pi>) {
                return "pi";
            } else if constexpr (std::is_same_v<T, node::GammaRat>) {
                return "gamma(" + n.arg.get_str() + ")";
            } else if constexpr (std::is_same_v<T, node::CosPiRat>) {
                return "cospi(" + n.arg.get_str() + ")";
            } else if constexpr (std::is_same_v<T, node::Neg>) {
                return "(-" + render(n.arg) + ")";
            } else if constexpr (std::is_same_v<T, node::Binary>) {
                const char *op = n.op == BinOp::add ? " + " : n.op == BinOp::sub ? " - " : n.op == BinOp::mul ? " * " : " / ";
                return "(" + render(n.lhs) + op + render(n.rhs) + ")";
            } else if constexpr (std::is_same_v<T, node::PowRat>) {
                std::string base = render(n.base);
                if (std::holds_alternative<node::PowRat>(n.base.node().v)) {
                    base = "(" + base + ")";
                }
                return base + "^" + detail::render_exponent(n.exp);
            } else if constexpr (std::is_same_v<T, node::Theta>) {
                std::string arg = std::holds_alternative<QPoint>(n.arg) ? std::get<QPoint>(n.arg).text()
                                                                         : render(std::get<Expr>(n.arg));
                return std::string(to_string(n.fn)) + "(" + arg + ")";
            } else if constexpr (std::is_same_v<T, node::ThetaF>) {
                return "f(" + render(n.a) + ", " + render(n.b) + ")";
            } else if constexpr (std::is_same_v<T, node::Agm>) {
                return "agm(" + render(n.a) + ", " + render(n.b) + ")";
            } else if constexpr (std::is_same_v<T, node::Hyp>) {
                return "hyp(" + render(n.x) + ")";
            } else if constexpr (std::is_same_v<T, node::ClassInv>) {
                return "classinv(" + n.n.get_str() + ")";
            } else {
                return std::string(n.primed ? "yihp(" : "yih(") + n.k.get_str() + ", " + n.n.get_str() + ")";
            }
        },
        e.node().v);
}

// ---------------------------------------------------------------------------------------------
// Evaluation

namespace detail {

// Thrown for enclosures that straddle a singularity; more precision may resolve them.
struct Straddle {
    ErrorCode code;
    std::string what;
};

inline Ball cospi_ball(const Rational &p_in, const PrecCtx &ctx)
{
    // Reduce to t in [0, 2).
    mpz_class k;
    mpz_class twice_den = p_in.get_den() * 2;
    mpz_fdiv_q(k.get_mpz_t(), p_in.get_num().get_mpz_t(), twice_den.get_mpz_t());
    Rational t = p_in - Rational(2 * k);
    auto eq = [&](long a, long b) { return t == make_rational(a, b); };
    if (eq(0, 1)) return Ball(1, ctx);
    if (eq(1, 1)) return Ball(-1, ctx);
    if (eq(1, 2) || eq(3, 2)) return Ball(0, ctx);
    if (eq(1, 3) || eq(5, 3)) return Ball(make_rational(1, 2), ctx);
    if (eq(2, 3) || eq(4, 3)) return Ball(make_rational(-1, 2), ctx);
    if (eq(1, 4) || eq(7, 4)) return sqrt(Ball(2, ctx)) / 2;
    if (eq(3, 4) || eq(5, 4)) return -(sqrt(Ball(2, ctx)) / 2);
    if (eq(1, 6) || eq(11, 6)) return sqrt(Ball(3, ctx)) / 2;
    if (eq(5, 6) || eq(7, 6)) return -(sqrt(Ball(3, ctx)) / 2);
    return cos(const_pi(ctx) * Ball(t, ctx));
}

// Gamma(p) for rational p > 0, reduced to (0, 1] by the recurrence Gamma(p) = (p - 1) Gamma(p - 1).
inline Ball gamma_ball(const Rational &p, const PrecCtx &ctx)
{
    if (p <= 0) {
        throw Error(ErrorCode::UnsupportedGammaArgument, "gamma needs a positive argument, got " + to_string(p));
    }
    Rational base = p;
    Rational factor = 1;
    while (base > 1) {
        base -= 1;
        factor *= base;
    }
    return Ball(factor, ctx) * gamma_rational(base, ctx);
}

inline Rational exact_rational_value(const Expr &e, const char *what)
{
    if (auto r = as_num(e)) {
        return *r;
    }
    throw Error(ErrorCode::ParseError, std::string(what) + " must be a rational constant");
}

inline Ball eval_node(const Expr &e, const PrecCtx &ctx)
{
    return std::visit(
        [&](const auto &n) -> Ball {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, node::Num>) {
                return Ball(n.value, ctx);
            } else if constexpr (std::is_same_v<T, node::Pi>) {
                return const_pi(ctx);
            } else if constexpr (std::is_same_v<T, node::GammaRat>) {
                return gamma_ball(n.arg, ctx);
            } else if constexpr (std::is_same_v<T, node::CosPiRat>) {
                return cospi_ball(n.arg, ctx);
            } else if constexpr (std::is_same_v<T, node::Neg>) {
                return -eval_node(n.arg, ctx);
            } else if constexpr (std::is_same_v<T, node::Binary>) {
                Ball a = eval_node(n.lhs, ctx);
                Ball b = eval_node(n.rhs, ctx);
                switch (n.op) {
                case BinOp::add: return a + b;
                case BinOp::sub: return a - b;
                case BinOp::mul: return a * b;
                case BinOp::div:
                    if (b.contains_zero()) {
                        throw Straddle{ErrorCode::DivisionByZeroEnclosure, "divisor " + render(n.rhs) + " encloses zero"};
                    }
                    return a / b;
                }
                throw Error(ErrorCode::EvaluationError, "bad operator");
            } else if constexpr (std::is_same_v<T, node::PowRat>) {
                Ball base = eval_node(n.base, ctx);
                if (!is_integer(n.exp)) {
                    if (base.is_negative()) {
                        throw Error(ErrorCode::NegativeEvenRootEnclosure,
                                    "fractional power of negative base " + render(n.base));
                    }
                    if (!base.is_positive()) {
                        throw Straddle{ErrorCode::NegativeEvenRootEnclosure,
                                       "base " + render(n.base) + " of a fractional power encloses zero"};
                    }
                } else if (n.exp < 0 && base.contains_zero()) {
                    throw Straddle{ErrorCode::DivisionByZeroEnclosure, "negative power of " + render(n.base) + " encloses zero"};
                }
                return pow(base, n.exp);
            } else if constexpr (std::is_same_v<T, node::Theta>) {
                Ball q = std::holds_alternative<QPoint>(n.arg) ? std::get<QPoint>(n.arg).to_ball(ctx)
                                                                : eval_node(std::get<Expr>(n.arg), ctx);
                switch (n.fn) {
                case ThetaFn::phi: return phi(q, ctx);
                case ThetaFn::psi: return psi(q, ctx);
                case ThetaFn::fneg: return f_neg(q, ctx);
                case ThetaFn::chi: return chi(q, ctx);
                }
                throw Error(ErrorCode::EvaluationError, "bad theta function");
            } else if constexpr (std::is_same_v<T, node::ThetaF>) {
                return theta_f(eval_node(n.a, ctx), eval_node(n.b, ctx), ctx);
            } else if constexpr (std::is_same_v<T, node::Agm>) {
                return agm(eval_node(n.a, ctx), eval_node(n.b, ctx));
            } else if constexpr (std::is_same_v<T, node::Hyp>) {
                return hyp2f1_half(eval_node(n.x, ctx), ctx);
            } else if constexpr (std::is_same_v<T, node::ClassInv>) {
                return class_invariant(n.n, ctx);
            } else {
                return yi_h(YiQuotient{n.k, n.n, n.primed}, ctx);
            }
        },
        e.node().v);
}

} // namespace detail

/// Certified enclosure of `e`. Enclosures that straddle a division or root singularity are
/// retried at doubled precision (at most three times) before the error is reported.
inline Ball eval_expr(const Expr &e, const PrecCtx &ctx)
{
    PrecCtx work = ctx;
    for (int attempt = 0;; ++attempt) {
        try {
            return detail::eval_node(e, work);
        } catch (const detail::Straddle &s) {
            if (attempt >= 3) {
                throw Error(s.code, s.what);
            }
            work = work.doubled();
        } catch (const Error &err) {
            switch (err.code()) {
            case ErrorCode::DivisorStraddlesZero:
                throw Error(ErrorCode::DivisionByZeroEnclosure, err.what());
            case ErrorCode::NegativeBaseEvenRoot:
                throw Error(ErrorCode::NegativeEvenRootEnclosure, err.what());
            case ErrorCode::UnsupportedArgument:
                throw Error(ErrorCode::UnsupportedGammaArgument, err.what());
            default:
                throw;
            }
        }
    }
}

// ---------------------------------------------------------------------------------------------
// Parsing

class ExprParser
{
public:
    explicit ExprParser(std::string_view text) : m_text(text) {}

    Expr parse()
    {
        Expr e = parse_expr();
        skip_ws();
        if (m_pos != m_text.size()) {
            fail("unexpected '" + std::string(1, m_text[m_pos]) + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string &msg) const
    {
        throw Error(ErrorCode::ParseError, msg + " at position " + std::to_string(m_pos));
    }

    void skip_ws()
    {
        while (m_pos < m_text.size() && std::isspace(static_cast<unsigned char>(m_text[m_pos]))) {
            ++m_pos;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (m_pos < m_text.size() && m_text[m_pos] == c) {
            ++m_pos;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    Expr parse_expr()
    {
        Expr e = parse_term();
        while (true) {
            if (accept('+')) {
                e = e + parse_term();
            } else if (accept('-')) {
                e = e - parse_term();
            } else {
                return e;
            }
        }
    }

    Expr parse_term()
    {
        Expr e = parse_unary();
        while (true) {
            if (accept('*')) {
                e = e * parse_unary();
            } else if (accept('/')) {
                std::size_t at = m_pos;
                Expr d = parse_unary();
                if (auto r = detail::as_num(d); r && *r == 0) {
                    m_pos = at;
                    fail("division by literal zero");
                }
                e = e / d;
            } else {
                return e;
            }
        }
    }

    Expr parse_unary()
    {
        if (accept('-')) {
            return -parse_unary();
        }
        if (accept('+')) {
            return parse_unary();
        }
        return parse_power();
    }

    Expr parse_power()
    {
        Expr base = parse_primary();
        if (accept('^')) {
            bool negative = accept('-');
            std::size_t at = m_pos;
            Expr ex = parse_primary();
            auto r = detail::as_num(ex);
            if (!r) {
                m_pos = at;
                fail("exponent must be a rational constant");
            }
            Rational exponent = negative ? Rational(-*r) : *r;
            skip_ws();
            if (m_pos < m_text.size() && m_text[m_pos] == '^') {
                fail("chained '^' needs parentheses");
            }
            return pow(base, exponent);
        }
        return base;
    }

    Rational parse_rational_arg(const char *what)
    {
        std::size_t at = m_pos;
        Expr e = parse_expr();
        auto r = detail::as_num(e);
        if (!r) {
            m_pos = at;
            fail(std::string(what) + " must be a rational constant");
        }
        return *r;
    }

    std::string parse_identifier()
    {
        skip_ws();
        std::size_t start = m_pos;
        while (m_pos < m_text.size() &&
               (std::isalnum(static_cast<unsigned char>(m_text[m_pos])) || m_text[m_pos] == '_')) {
            ++m_pos;
        }
        return std::string(m_text.substr(start, m_pos - start));
    }

    Expr parse_number()
    {
        skip_ws();
        std::size_t start = m_pos;
        while (m_pos < m_text.size() && (std::isdigit(static_cast<unsigned char>(m_text[m_pos])) || m_text[m_pos] == '.')) {
            ++m_pos;
        }
        if (m_pos < m_text.size() && (m_text[m_pos] == 'e' || m_text[m_pos] == 'E')) {
            std::size_t save = m_pos++;
            if (m_pos < m_text.size() && (m_text[m_pos] == '+' || m_text[m_pos] == '-')) {
                ++m_pos;
            }
            if (m_pos < m_text.size() && std::isdigit(static_cast<unsigned char>(m_text[m_pos]))) {
                while (m_pos < m_text.size() && std::isdigit(static_cast<unsigned char>(m_text[m_pos]))) {
                    ++m_pos;
                }
            } else {
                m_pos = save;
            }
        }
        try {
            return lit(parse_rational(m_text.substr(start, m_pos - start)));
        } catch (const Error &) {
            m_pos = start;
            fail("malformed number");
        }
    }

    Expr parse_theta_arg(ThetaFn fn)
    {
        skip_ws();
        std::size_t save = m_pos;
        if (parse_identifier() == "qpoint") {
            expect('(');
            std::size_t at = m_pos;
            Rational sign = parse_rational_arg("qpoint sign");
            if (sign != 1 && sign != -1) {
                m_pos = at;
                fail("qpoint sign must be +1 or -1");
            }
            expect(',');
            at = m_pos;
            Rational r = parse_rational_arg("qpoint r");
            if (r <= 0) {
                m_pos = at;
                fail("qpoint r must be positive");
            }
            expect(')');
            return theta_at(fn, QPoint(sign > 0 ? 1 : -1, r));
        }
        m_pos = save;
        return theta_at(fn, parse_expr());
    }

    Expr parse_primary()
    {
        skip_ws();
        if (m_pos >= m_text.size()) {
            fail("unexpected end of input");
        }
        char c = m_text[m_pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (accept('(')) {
            Expr e = parse_expr();
            expect(')');
            return e;
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) {
            fail(std::string("unexpected '") + c + "'");
        }
        std::size_t name_at = m_pos;
        std::string name = parse_identifier();
        if (name == "pi") {
            return pi_const();
        }
        expect('(');
        Expr result;
        if (name == "phi" || name == "psi" || name == "fneg" || name == "chi") {
            ThetaFn fn = name == "phi" ? ThetaFn::phi : name == "psi" ? ThetaFn::psi : name == "fneg" ? ThetaFn::fneg : ThetaFn::chi;
            result = parse_theta_arg(fn);
        } else if (name == "f" || name == "agm") {
            Expr a = parse_expr();
            expect(',');
            Expr b = parse_expr();
            result = name == "f" ? theta_f_of(a, b) : agm_of(a, b);
        } else if (name == "hyp") {
            result = hyp_of(parse_expr());
        } else if (name == "gamma") {
            result = gamma_of(parse_rational_arg("gamma argument"));
        } else if (name == "cospi") {
            result = cospi(parse_rational_arg("cospi argument"));
        } else if (name == "classinv") {
            std::size_t at = m_pos;
            Rational n = parse_rational_arg("classinv argument");
            if (n <= 0) {
                m_pos = at;
                fail("classinv argument must be positive");
            }
            result = class_inv(n);
        } else if (name == "yih" || name == "yihp") {
            Rational k = parse_rational_arg("yih k");
            expect(',');
            Rational n = parse_rational_arg("yih n");
            if (k <= 0 || n <= 0) {
                fail("yih arguments must be positive");
            }
            result = yih(k, n, name == "yihp");
        } else {
            m_pos = name_at;
            fail("unknown function '" + name + "'");
        }
        expect(')');
        return result;
    }

    std::string_view m_text;
    std::size_t m_pos = 0;
};

inline Expr parse_expr(std::string_view text)
{
    return ExprParser(text).parse();
}

} // namespace thetaval
