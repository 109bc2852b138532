#pragma once

#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "thetaval/lostnotebook.hpp"

namespace testing_support {

using namespace thetaval;

inline Ball rat(long num, long den, const PrecCtx &ctx)
{
    return Ball(make_rational(num, den), ctx);
}

inline Ball dec(const char *text, const PrecCtx &ctx)
{
    return Ball(parse_rational(text), ctx);
}

/// True iff rad < 10^{-digits}.
inline bool tight(const Ball &b, long digits)
{
    return b.is_exact() || b.rad_exponent10() < -digits;
}

/// Deterministic sampler for property tests.
class Sampler
{
public:
    explicit Sampler(unsigned seed) : m_engine(seed) {}
    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(m_engine);
    }
    /// A double in [lo, hi], turned into an exact rational with six decimals.
    Rational rational(double lo, double hi)
    {
        const long scaled = std::lround(uniform(lo, hi) * 1e6);
        return make_rational(scaled, 1'000'000);
    }

private:
    std::mt19937 m_engine;
};

} // namespace testing_support
