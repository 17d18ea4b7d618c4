#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cm/degrees.hpp"
#include "cm/multigraph.hpp"
#include "cm/rng.hpp"

namespace cm {

// (1 + lambda n^{-1/3}) / nu_n; requires nu_n > 1 and a result in (0, 1].
double p_critical(double nu_n, std::int64_t n, double lambda);

struct ExplodedSequence {
  // d~ on [n~]: original vertices first, then n_plus red vertices of degree 1.
  std::vector<int> tilde_degrees;
  std::int64_t n = 0;
  std::int64_t n_plus = 0;
  std::int64_t n_tilde() const { return n + n_plus; }
};

ExplodedSequence explode(const DegreeSequence& ds, double p, Rng& rng);

struct ExplosionPercolation {
  ExplodedSequence exploded;
  Partition tilde;  // components of CM_{n~}(d~) before cleanup
  // per tilde component: degree-one vertices removed by the cleanup
  std::vector<std::int64_t> cleanup;
  std::vector<char> deleted;  // indexed by vertex of [n~]
  // Survivors relabelled in index order; half-edges whose mate was deleted
  // are OPEN.
  HalfEdgeGraph graph;
  Partition result;
};

// Explosion, uniform matching of the exploded sequence, then removal of
// n_plus uniformly chosen degree-one vertices.
ExplosionPercolation percolate_via_explosion(const DegreeSequence& ds, double p, Rng& rng);

// Keeps each matched pair independently with probability p.
HalfEdgeGraph percolate_direct(const HalfEdgeGraph& g, double p, Rng& rng);

struct GridSnapshot {
  double lambda = 0;
  double p = 0;
  std::int64_t edges = 0;  // E_n(lambda)
  Partition partition;
};

struct CouplingGrid {
  std::int64_t n = 0;
  double nu_n = 0;
  std::vector<GridSnapshot> snapshots;
  // Every snapshot refines the next one.
  bool refinement_holds() const;
};

// E_n(lambda) = #{pairs with label U <= p_n(lambda)}; the first E_n pairs of
// one sequential uniform matching form the graph at lambda.
CouplingGrid coupled_grid(const DegreeSequence& ds, const std::vector<double>& lambdas, Rng& rng);
// Same on explicit retention probabilities (lambda is reported through the
// inverse of p_n, which needs no nu_n > 1).
CouplingGrid coupled_grid_p(const DegreeSequence& ds, const std::vector<double>& ps, Rng& rng);

// lambda,rank,rescaled_size,surplus,open_halfedges
void write_grid_csv(std::ostream& out, const CouplingGrid& grid, std::size_t top_k);

}  // namespace cm
