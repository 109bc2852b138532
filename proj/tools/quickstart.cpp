// Minimal library usage: a theta value, a catalog check and an expression round trip.

#include <iostream>

#include "thetaval/catalog.hpp"

int main()
{
    using namespace thetaval;
    const PrecCtx ctx(256);

    const Ball value = phi(QPoint(1, 1), ctx);
    std::cout << "phi(e^-pi) = " << value.mid_decimal(40) << " +/- 1e" << value.rad_exponent10() << "\n";

    const Catalog catalog = build_catalog();
    const VerifyReport report = verify_identity(*catalog.find("r3"), ctx);
    std::cout << report.id << ": " << to_string(report.status) << ", " << report.agreement_digits << " digits\n";

    const Expr e = parse_expr("gamma(1/2)^2 - pi");
    const Ball residual = eval_expr(e, ctx);
    std::cout << render(e) << " contains 0: " << std::boolalpha << residual.contains_zero() << "\n";
    return residual.contains_zero() && report.status == VerifyStatus::verified ? 0 : 1;
}
