#pragma once

namespace pifa {

// Standard normal CDF and its inverse.  The inverse uses a rational
// approximation polished with one Halley step, giving errors far below the
// 1e-9 the probit transform needs; inputs must lie in (0, 1).
double norm_cdf(double x);
double norm_ppf(double p);

}  // namespace pifa
