#pragma once

namespace cordscan::stats {

/// log B(a, b) = lgamma(a) + lgamma(b) - lgamma(a + b), evaluated without
/// the cancellation that plain lgamma sums suffer when one argument is large.
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
/// y must equal 1 - x; passing it separately keeps full precision when x is
/// close to 1. Continued fraction (modified Lentz) on the side where it
/// converges fastest.
double incomplete_beta(double a, double b, double x, double y);
double incomplete_beta(double a, double b, double x);

/// Student-t CDF with df > 0 degrees of freedom (df may be non-integer).
double t_cdf(double x, double df);

/// Two-sided tail probability P(|T| >= |t|).
double t_two_sided(double t, double df);

double normal_cdf(double x);

/// CDF of the studentized range of k means with df error degrees of
/// freedom, by nested adaptive 61-point Gauss-Kronrod quadrature (tolerance ~1e-10).
/// df = +inf gives the range of k standard normals.
double studentized_range_cdf(double q, double k, double df);
double studentized_range_sf(double q, double k, double df);

}  // namespace cordscan::stats
