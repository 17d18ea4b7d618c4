#pragma once

#include <cstdint>
#include <vector>

#include "cm/degrees.hpp"
#include "cm/multigraph.hpp"
#include "cm/rng.hpp"

namespace cm {

// 1/2 log(nu/(nu-1)) + lambda / (2 (nu-1) n^{1/3}); requires nu_n > 1.
double t_map(double nu_n, std::int64_t n, double lambda);

struct DynamicEvent {
  double time = 0;
  HalfEdge a = 0;
  HalfEdge b = 0;
};

struct DynamicSnapshot {
  double time = 0;
  std::int64_t open = 0;   // s_1(t)
  std::int64_t edges = 0;
  Partition partition;     // open_halfedges per component are the O_i
};

struct DynamicRun {
  HalfEdgeGraph graph;     // partial pairing at the final time
  double time = 0;
  std::vector<DynamicSnapshot> snapshots;
  std::vector<DynamicEvent> events;  // only when requested
};

struct DynamicOptions {
  bool record_events = false;
};

// Open half-edges pair at total rate s_1(t): after an Exp(s_1) wait a uniform
// unordered pair of distinct open half-edges closes. Runs until t_end or the
// pool is exhausted; snapshot_times must be sorted.
DynamicRun run_dynamic(const DegreeSequence& ds, double t_end,
                       const std::vector<double>& snapshot_times, Rng& rng,
                       const DynamicOptions& opts = {});

// sup over event-constant stretches of |s_1(t)/ell - e^{-2t}| on [0, horizon];
// needs the run's event log.
double open_curve_deviation(const DynamicRun& run, std::int64_t ell, double horizon);

struct ModifiedComponent {
  std::int64_t size = 0;
  std::int64_t mass = 0;   // kept-alive open half-edges
  std::int64_t edges = 0;
  Vertex min_vertex = 0;
  std::int64_t surplus() const { return edges - size + 1; }
};

struct ModifiedSnapshot {
  double lambda = 0;
  std::int64_t events = 0;
  std::int64_t bad_edges = 0;
  std::vector<ModifiedComponent> components;  // ordered by min_vertex
};

struct ModifiedMerge {
  double lambda = 0;
  std::int64_t mass_a = 0;
  std::int64_t mass_b = 0;
  std::int64_t merged_mass = 0;
};

struct ModifiedEvent {
  double lambda = 0;
  HalfEdge a = 0;
  HalfEdge b = 0;
  bool standard = false;  // also paired in the standard process
};

struct ModifiedRun {
  std::int64_t pool_size = 0;  // s-bar_1
  double beta = 0;             // (s-bar (nu-1) n^{1/3})^{1/2}
  double event_rate = 0;       // events per unit lambda
  std::int64_t events = 0;
  std::int64_t bad_edges = 0;
  std::vector<ModifiedSnapshot> snapshots;
  std::vector<ModifiedMerge> merges;  // only when requested
  std::vector<ModifiedEvent> log;     // only when requested
  HalfEdgeGraph standard;             // coupled standard process at lambda_end
};

struct ModifiedOptions {
  bool record_merges = false;
  bool record_events = false;
};

// Kept-alive process from a snapshot graph: the OPEN half-edges of base form
// a frozen pool of size s-bar. In lambda, events arrive as a Poisson process
// of rate s-bar / (2 (nu-1) n^{1/3}); each picks two pool half-edges
// uniformly with replacement and joins their components in the modified
// graph. The standard process pairs the same two half-edges when they are
// distinct and still open there; otherwise the event is a bad edge.
ModifiedRun run_modified(const HalfEdgeGraph& base, double nu_n, std::int64_t n,
                         double lambda_start, double lambda_end,
                         const std::vector<double>& snapshot_lambdas, Rng& rng,
                         const ModifiedOptions& opts = {});

}  // namespace cm
