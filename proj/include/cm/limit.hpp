#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cm/degrees.hpp"
#include "cm/rng.hpp"

namespace cm {

struct LimitParams {
  double mu = 0;
  double eta = 0;
  double beta = 0;
  double lambda = 0;
};

// mu = E D, eta = E[D^3] E[D] - E[D^2]^2, beta = 1/mu; throws if eta <= 0.
LimitParams limit_params(const ProbabilityVector& dist, double lambda);
LimitParams limit_params(double mu, double sigma2, double sigma3, double lambda);

struct PercolationLimit {
  ProbabilityVector tilde_law;  // law of D~ at p = 1/nu
  LimitParams params;           // for D~, carrying the caller's lambda
  double zeta = 0;              // 1 + mu (1 - nu^{-1/2})
  double sqrt_nu = 0;
};

// D~: r~_j = (sum_l r_l Bin(l, j; nu^{-1/2}) + [j = 1] mu (1 - nu^{-1/2})) / zeta.
PercolationLimit percolation_limit_params(const ProbabilityVector& dist, double nu,
                                          double lambda);

struct Excursion {
  std::int64_t left = 0;   // first grid index with W > 0
  std::int64_t right = 0;  // closing zero (or the last grid index if truncated)
  double length = 0;
  double area = 0;         // trapezoid integral of W over [left, right]
  bool truncated = false;
};

struct ExcursionSample {
  double dt = 0;
  double horizon = 0;
  std::vector<double> path;       // B on the grid, path[0] = 0
  std::vector<double> reflected;  // W = B - running min
};

// Euler scheme with the drift evaluated at the interval midpoint.
ExcursionSample sample_reflected(const LimitParams& params, double horizon, double dt, Rng& rng);
// Same scheme on given standard normal increments (one per step).
ExcursionSample sample_reflected(const LimitParams& params, double dt,
                                 std::span<const double> normals);

// Excursions of W sorted by length (desc), ties by left end.
std::vector<Excursion> extract_excursions(const ExcursionSample& sample);
std::vector<Excursion> extract_excursions(std::span<const double> reflected, double dt);

// Poisson(beta * area) per excursion.
std::vector<std::int64_t> mark_excursions(std::span<const Excursion> excursions, double beta,
                                          Rng& rng);

struct LimitEntry {
  double length = 0;
  std::int64_t marks = 0;
  bool truncated = false;
};

struct LimitVector {
  std::vector<LimitEntry> entries;  // U0-down order: length desc, marks desc
  bool truncated = false;           // a retained excursion touches the horizon
};

// Lengths are multiplied by size_scale (1 for the plain model; the
// percolation multiplier otherwise). Keeps the first top_k entries (0 = all).
LimitVector sample_limit_vector(const LimitParams& params, double horizon, double dt, Rng& rng,
                                std::size_t top_k, double size_scale = 1.0);

// Horizon with room for the top excursions: in standardized units
// (s' = s mu^{-4/3} eta^{1/3}) the window [0, 16 + 2 max(lambda', 0)] is used.
double default_horizon(const LimitParams& params);

// replica,rank,length,marks,truncated
void write_ensemble_csv(std::ostream& out, const std::vector<LimitVector>& ensemble);

}  // namespace cm
