#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cm/degrees.hpp"
#include "cm/limit.hpp"
#include "cm/rng.hpp"
#include "cm/stats.hpp"

namespace cm {

enum class Pipeline { kDirect, kPercolation, kDynamic };

std::string to_string(Pipeline p);
Pipeline parse_pipeline(const std::string& s);

struct ExperimentConfig {
  std::string name = "experiment";
  // Degree law; direct runs tune it to each (n, lambda), percolation and
  // dynamic runs materialize it as the supercritical base.
  std::optional<ProbabilityVector> dist;
  // Alternatively a fixed sequence (the n grid is then ignored).
  std::optional<DegreeSequence> degrees;
  std::vector<std::int64_t> ns;
  std::vector<double> lambdas;
  int replicas = 2;
  std::uint64_t seed = 1;
  Pipeline pipeline = Pipeline::kDirect;
  std::size_t top_k = 3;
  std::string output_dir;  // empty: nothing persisted
  int jobs = 1;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct EnsembleRow {
  Pipeline pipeline = Pipeline::kDirect;
  std::int64_t n = 0;
  double lambda = 0;
  int replica = 0;
  std::uint64_t seed = 0;
  int rank = 0;
  std::int64_t size = 0;
  double rescaled_size = 0;
  std::int64_t surplus = 0;
  bool refined = true;  // coupled pipelines: the lambda partitions are nested
};

struct EnsembleTable {
  std::vector<EnsembleRow> rows;
};

double rescale(std::int64_t size, std::int64_t n);
std::uint64_t replica_seed(std::uint64_t base, std::int64_t n, int replica);

// Rows of one replica (all lambdas).
std::vector<EnsembleRow> run_replica(const ExperimentConfig& cfg, std::int64_t n, int replica);

// All (n, replica) pairs, jobs in parallel. With an output directory each
// replica is written atomically to parts/ and reused on a rerun; the full
// table goes to ensemble.csv.
EnsembleTable run_experiment(const ExperimentConfig& cfg);

void write_table_csv(std::ostream& out, const EnsembleTable& table);
EnsembleTable read_table_csv(std::istream& in);

// Rank-j rescaled sizes (0 when the replica has fewer components) for the
// chosen slice, in replica order.
std::vector<double> rank_sizes(const EnsembleTable& t, Pipeline p, std::int64_t n, double lambda,
                               int rank);
std::vector<std::int64_t> rank_surplus(const EnsembleTable& t, Pipeline p, std::int64_t n,
                                       double lambda, int rank);

// Limit ensembles.
struct LimitEnsemble {
  double lambda = 0;  // window location the ensemble stands for
  LimitParams params;
  double size_scale = 1;
  double horizon = 0;
  double dt = 0;
  std::vector<LimitVector> vectors;
};

// horizon 0 picks default_horizon, dt 0 picks horizon / 2^20.
LimitEnsemble sample_limit_ensemble(const LimitParams& params, double size_scale, int count,
                                    std::uint64_t seed, std::size_t top_k, double horizon = 0,
                                    double dt = 0, int jobs = 1);

// Percolation clusters at p_n(lambda) against excursions of B^{lambda'} for
// D~ with lambda' = lambda * lambda_scale, sizes multiplied by size_scale.
struct PercolationScaling {
  PercolationLimit limit;
  double size_scale = 1;
  double lambda_scale = 1;
  LimitParams at(double lambda) const;
};

// size_scale = zeta^{2/3} / sqrt(nu), lambda_scale = zeta^{1/3}.
PercolationScaling percolation_scaling(const ProbabilityVector& dist, double nu);
// size_scale = sqrt(nu) zeta^{2/3}, lambda_scale = 1 (kept for comparison).
PercolationScaling stated_percolation_scaling(const ProbabilityVector& dist, double nu);

struct ComparisonOptions {
  int ranks = 3;
  int null_splits = 1000;
  double null_quantile = 0.99;
  int bootstrap = 200;
  double surplus_alpha = 0.01;
  std::uint64_t seed = 1;
};

struct RankComparison {
  int rank = 0;
  double ks = 0;
  double p_value = 0;
  statistics::Interval ci;
  double null_threshold = 0;
  bool pass = false;
};

struct ComparisonReport {
  std::vector<RankComparison> ranks;
  statistics::ChiSquareResult surplus;
  bool surplus_pass = false;
  std::size_t reference_size = 0;
  std::size_t excluded_truncated = 0;
  bool pass = false;
};

// The first half of the (non-truncated) limit ensemble is the reference;
// the null threshold is the requested quantile of KS between random disjoint
// subsamples of the whole pool with the same sizes as the comparison.
ComparisonReport compare_to_limit(const EnsembleTable& table, Pipeline pipeline, std::int64_t n,
                                  double lambda, const LimitEnsemble& limit,
                                  const ComparisonOptions& opts);

// Joint (rank-1 at lambda0, rank-1 at lambda1) samples of the limit: all
// excursions at lambda0 evolved by the multiplicative coalescent for the
// window increment. Masses are lengths / sqrt(mu) so the coalescent runs at
// unit rate per unit of the effective lambda.
std::vector<statistics::Point2> sample_joint_limit(const LimitParams& at_lambda0,
                                                   double delta_lambda, double size_scale,
                                                   int count, std::uint64_t seed, double horizon = 0,
                                                   double dt = 0, int jobs = 1);

struct JointReport {
  std::size_t replicas = 0;
  std::size_t refined = 0;
  statistics::EnergyTest energy;
  double alpha = 0.001;
  bool pass = false;
};

JointReport joint_lambda_check(const EnsembleTable& table, std::int64_t n, double lambda0,
                               double lambda1, const std::vector<statistics::Point2>& limit_joint,
                               int permutations, std::uint64_t seed, double alpha = 0.001);

// {"experiment", "thresholds", "statistics", "pass"}
std::string summary_json(const std::string& experiment, const ComparisonReport& report);
std::string summary_json(const std::string& experiment, const JointReport& report);

// temp file + rename
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace cm
