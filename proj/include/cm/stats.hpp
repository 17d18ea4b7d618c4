#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "cm/rng.hpp"

namespace cm::statistics {

// sup |F_a - F_b| of the empirical CDFs.
double ks_distance(std::span<const double> a, std::span<const double> b);

// P(K > x) for the Kolmogorov distribution.
double kolmogorov_sf(double x);

// Asymptotic two-sample p-value for statistic d on sizes n, m.
double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m);

struct KsResult {
  double statistic = 0;
  double p_value = 0;
};

// One-sample test against Exp(rate) (Stephens' small-sample correction).
KsResult ks_exponential(std::span<const double> sample, double rate);

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  int bins = 0;
};

// Goodness of fit for categorical counts; categories with expected count
// below min_expected are pooled into one bin (and that bin is merged into
// the smallest remaining one if still too small).
ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed,
                               std::span<const double> probabilities, double min_expected = 5.0);

// Two-sample homogeneity test on integer-valued samples; values are binned
// from 0 upwards and the tail is pooled once either expected count drops
// below min_expected.
ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a,
                                      std::span<const std::int64_t> b, double min_expected = 5.0);

using Point2 = std::array<double, 2>;

struct EnergyTest {
  double statistic = 0;
  double p_value = 1;
  int permutations = 0;
};

// Two-sample energy distance with a permutation p-value (1 + #{>=}) / (1 + B).
EnergyTest energy_test(std::span<const Point2> a, std::span<const Point2> b, int permutations,
                       Rng& rng);

// q-quantile (type 7) of values.
double quantile(std::vector<double> values, double q);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased

struct Interval {
  double lo = 0;
  double hi = 0;
};

// Percentile bootstrap interval for the two-sample KS distance.
Interval bootstrap_ks(std::span<const double> a, std::span<const double> b, int resamples,
                      double level, Rng& rng);

// q-quantile of the KS distance between random disjoint subsamples of pool
// with sizes size_a and size_b.
double ks_split_null_quantile(std::span<const double> pool, std::size_t size_a,
                              std::size_t size_b, int splits, double q, Rng& rng);

}  // namespace cm::statistics
