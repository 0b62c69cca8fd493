#pragma once

#include <vector>

namespace cre::stats {

double normal_cdf(double x);

// Inverse standard-normal CDF, |error| < 1e-12 on (0,1).
double normal_quantile(double p);

// Regularized lower incomplete gamma P(a, x).
double lower_reg_gamma(double a, double x);

double chi_square_cdf(double x, int df);

// Inverse chi-square CDF by bisection on lower_reg_gamma, tolerance 1e-10.
double chi_square_quantile(double p, int df);

// Empirical quantile with linear interpolation between order statistics
// (the h = (n-1)p convention). Copies and sorts.
double quantile(std::vector<double> values, double p);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // denominator n-1

}  // namespace cre::stats
