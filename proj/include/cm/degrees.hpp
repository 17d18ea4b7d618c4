#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cm/rng.hpp"

namespace cm {

class DegreeSequence {
 public:
  DegreeSequence() = default;
  // Throws std::invalid_argument unless n >= 1, all degrees >= 0, the total
  // is positive and even.
  explicit DegreeSequence(std::vector<int> degrees);

  std::int64_t n() const { return static_cast<std::int64_t>(d_.size()); }
  std::int64_t total() const { return ell_; }
  int operator[](std::int64_t i) const { return d_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& degrees() const { return d_; }

  // degree -> number of vertices with that degree, ascending degree
  std::vector<std::pair<int, std::int64_t>> counts() const;

 private:
  std::vector<int> d_;
  std::int64_t ell_ = 0;
};

struct DegreeStats {
  std::int64_t n = 0;
  std::int64_t ell = 0;
  double mu = 0;
  double sigma2 = 0;
  double sigma3 = 0;
  double nu = 0;
  int d_max = 0;
};

DegreeStats stats(const DegreeSequence& ds);

// Same statistics on a raw degree list; rejects a zero total but not odd
// totals (used for partial objects such as explosion output before checks).
DegreeStats stats(const std::vector<int>& degrees);

class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  // Entries (degree, probability). Duplicated degrees are rejected, zero
  // entries dropped, the rest sorted by degree.
  explicit ProbabilityVector(std::vector<std::pair<int, double>> support);

  const std::vector<std::pair<int, double>>& support() const { return support_; }
  double probability(int k) const;
  // E[D^r]
  double moment(int r) const;
  // E[D(D-1)] / E[D]
  double nu() const;
  int max_degree() const { return support_.empty() ? 0 : support_.back().first; }

 private:
  std::vector<std::pair<int, double>> support_;
};

DegreeSequence sample_iid(const ProbabilityVector& dist, std::int64_t n, Rng& rng);

// The law w * delta_1 + (1 - w) * Law(D | D >= 2) whose nu equals target.
// Degree-0 mass is discarded. Throws if no w in (0, 1) reaches the target.
ProbabilityVector critical_mixture(const ProbabilityVector& dist, double target_nu);

// Counts floor(n r_k) topped up by largest remainder (ties to smaller
// degree); sums to n.
std::vector<std::pair<int, std::int64_t>> materialize_counts(const ProbabilityVector& law,
                                                             std::int64_t n);

// Exactly materialized counts of law on n vertices, labels shuffled, parity
// fixed.
DegreeSequence materialize_sequence(const ProbabilityVector& law, std::int64_t n, Rng& rng);

// Sequence with |nu_n - (1 + lambda n^{-1/3})| <= n^{-1/3}/10 and at least one
// degree-one vertex. The degree-1 weight of the mixture above is bisected on
// the materialized counts; vertex labels are shuffled with rng.
DegreeSequence tune_to_critical(const ProbabilityVector& dist, std::int64_t n, double lambda,
                                Rng& rng);

// Total variation distance between the empirical degree law of ds and law.
double total_variation(const DegreeSequence& ds, const ProbabilityVector& law);

// I/O. Degree files are either one integer per line or a JSON object
// {"n": N, "counts": {"k": count, ...}}; the reader detects the form.
DegreeSequence read_degrees(std::istream& in);
DegreeSequence read_degrees_file(const std::string& path);
void write_degrees_text(std::ostream& out, const DegreeSequence& ds);
void write_degrees_json(std::ostream& out, const DegreeSequence& ds);

// Distribution files: JSON {"k": prob, ...} or {"probabilities": {...}}.
ProbabilityVector read_distribution(std::istream& in);
ProbabilityVector read_distribution_file(const std::string& path);

}  // namespace cm
