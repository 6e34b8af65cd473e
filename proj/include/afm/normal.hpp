#pragma once

namespace afm {

// Standard normal CDF.  Absolute error well below 1e-15 (erfc based).
double norm_cdf(double x);

// Standard normal quantile on (0, 1).  Rational approximation polished with
// one Halley step against norm_cdf; absolute error below 1e-13.
// Throws std::invalid_argument outside (0, 1).
double norm_quantile(double p);

}  // namespace afm
