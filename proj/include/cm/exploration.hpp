#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cm/degrees.hpp"
#include "cm/multigraph.hpp"
#include "cm/rng.hpp"

namespace cm {

// Stage j = 1..n is stored at index j-1.
struct ExplorationTrace {
  std::vector<Vertex> vertex;
  std::vector<int> degree;
  // (|B| + |C|) / 2 at the stage: half-edges of the new vertex that close a
  // cycle, either into an active half-edge or onto itself.
  std::vector<std::int64_t> cycles;
  std::vector<std::int64_t> walk;         // S_n(j)
  std::vector<std::int64_t> simple_walk;  // s_n(j)
  std::vector<std::int64_t> active;       // A_j after the stage
  // Number of components started at or before stage j (stages drawn from
  // the sleeping set).
  std::vector<std::int64_t> started;

  std::int64_t stages() const { return static_cast<std::int64_t>(vertex.size()); }
  // Surplus marks at stage j are the cycle counts.
  std::int64_t surplus_marks(std::int64_t j) const { return cycles[static_cast<std::size_t>(j - 1)]; }
};

struct Exploration {
  ExplorationTrace trace;
  HalfEdgeGraph graph;  // pairing revealed during the run (fully matched)
};

// Algorithm-1 depth-first exploration on a uniform matching revealed on demand.
ExplorationTrace explore(const DegreeSequence& ds, Rng& rng);
Exploration explore_graph(const DegreeSequence& ds, Rng& rng);

// Same exploration on a fixed, fully matched pairing. rng drives only the
// choice of each new starting half-edge.
ExplorationTrace replay(const HalfEdgeGraph& g, Rng& rng);

struct HittingTimes {
  std::vector<std::int64_t> tau;  // tau[0] = 0
  std::int64_t components() const { return static_cast<std::int64_t>(tau.size()) - 1; }
  std::vector<std::int64_t> sizes() const;
};

HittingTimes hitting_times(const ExplorationTrace& trace);
std::vector<std::int64_t> surplus_per_component(const ExplorationTrace& trace,
                                                const HittingTimes& hit);

// N_k(t) for t = 0..n: vertices of degree k among the first t stages.
std::vector<std::int64_t> degree_discovery_counts(const ExplorationTrace& trace, int k);

// Component summaries read off the trace (size, surplus, first vertex), in
// exploration order; edges = size - 1 + surplus.
std::vector<ComponentSummary> trace_components(const ExplorationTrace& trace);

struct WalkIdentityReport {
  std::int64_t stages = 0;
  std::int64_t walk_vs_simple = 0;     // S != s - 2 sum c
  std::int64_t active_vs_minimum = 0;  // A != S - min S (literal form)
  std::int64_t active_vs_started = 0;  // A != S + 2 * started
  bool final_value = true;             // S(n) = -2 * #components
  bool ok() const { return walk_vs_simple == 0 && active_vs_started == 0 && final_value; }
};

// Counts stages violating each identity.
WalkIdentityReport check_walk_identities(const ExplorationTrace& trace);

void write_trace_csv(std::ostream& out, const ExplorationTrace& trace);

}  // namespace cm
