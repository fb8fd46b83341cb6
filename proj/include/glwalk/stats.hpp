#pragma once

#include <cstdint>
#include <vector>

#include "glwalk/types.hpp"

namespace glwalk {

// Standard normal CDF via erfc (accurate in both tails).
double normal_cdf(double x);

// Two-sided Kolmogorov-Smirnov statistic of the sample against N(mu, sigma^2).
// Sorts a copy of the sample.
double ks_statistic_normal(std::vector<double> sample, double mu, double sigma);

// P[K > t] for the Kolmogorov distribution, evaluated with whichever of the
// two classical series converges fastest at t.
double kolmogorov_sf(double t);

// Asymptotic p-value for a KS statistic d at sample size n, using the
// finite-sample argument t = d (sqrt(n) + 0.12 + 0.11/sqrt(n)).
double ks_p_value(double d, std::int64_t n);

struct MardiaResult {
  double skewness = 0.0;      // b_{1,q} = mean over pairs of (z_i . z_j)^3
  double kurtosis = 0.0;      // b_{2,q} = mean of |z_i|^4
  double kurtosis_z = 0.0;    // (b_2 - q(q+2)) / sqrt(8 q (q+2) (q+3) / N)
  int dimension = 0;
  std::int64_t samples = 0;
};

// Mardia multinormality measures of rows already whitened against the KNOWN
// target law (mean 0, identity covariance), so the kurtosis null moments are
// q(q+2) and 8q(q+2)(q+3)/N rather than the estimated-parameter ones.
MardiaResult mardia_statistics(const RealMatrix& z);

}  // namespace glwalk
