#pragma once

// Special functions needed for likelihoods and p-values. Relative accuracy is
// better than 1e-10 over the domains used here.

namespace lobrate::stats {

/// ln |Gamma(x)| for x > 0.
double ln_gamma(double x);

/// ln B(u, v) = ln Gamma(u) + ln Gamma(v) - ln Gamma(u + v).
double ln_beta(double u, double v);

/// Regularized incomplete beta I_x(a, b), x in [0, 1].
double reg_inc_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(s, x), x >= 0.
double reg_inc_gamma_lower(double s, double x);

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x), computed
/// directly so small tails keep full relative precision.
double reg_inc_gamma_upper(double s, double x);

}  // namespace lobrate::stats
