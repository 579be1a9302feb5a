#pragma once

#include <cstddef>

namespace qrng {

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double igamc(double a, double x);

// Standard normal CDF, via erfc.
double normal_cdf(double x);

// Chi-square upper tail probability with k degrees of freedom.
double chi_square_pvalue(double chi2, double dof);

// One-sample Kolmogorov-Smirnov statistic against Uniform(0,1).
double ks_uniform_statistic(const double* p, std::size_t n);

// Asymptotic KS critical value at significance alpha for n samples.
double ks_critical_value(double alpha, std::size_t n);

} // namespace qrng
