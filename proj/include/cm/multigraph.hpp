#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "cm/degrees.hpp"
#include "cm/rng.hpp"

namespace cm {

using Vertex = std::int32_t;
using HalfEdge = std::int64_t;
inline constexpr HalfEdge kOpen = -1;

// Half-edges of vertex v are the contiguous range [first(v), first(v) + d_v).
// All half-edges start OPEN.
class HalfEdgeGraph {
 public:
  HalfEdgeGraph() = default;
  explicit HalfEdgeGraph(const DegreeSequence& ds);
  // Any non-negative degree list; the total need not be even (graphs with
  // dangling half-edges).
  explicit HalfEdgeGraph(const std::vector<int>& degrees);

  std::int64_t num_vertices() const { return static_cast<std::int64_t>(first_.size()) - 1; }
  std::int64_t num_half_edges() const { return static_cast<std::int64_t>(mate_.size()); }
  Vertex owner(HalfEdge h) const { return owner_[static_cast<std::size_t>(h)]; }
  HalfEdge mate(HalfEdge h) const { return mate_[static_cast<std::size_t>(h)]; }
  bool is_open(HalfEdge h) const { return mate(h) == kOpen; }
  HalfEdge first(Vertex v) const { return first_[static_cast<std::size_t>(v)]; }
  int degree(Vertex v) const { return static_cast<int>(first(v + 1) - first(v)); }
  std::vector<int> degrees() const;

  // Pairs two distinct OPEN half-edges.
  void pair(HalfEdge a, HalfEdge b);
  // Returns h and its mate to OPEN.
  void unpair(HalfEdge h);

  std::int64_t matched_pairs() const { return matched_; }
  std::int64_t open_count() const { return num_half_edges() - 2 * matched_; }
  bool fully_matched() const { return open_count() == 0; }
  // Involution without fixed points on the paired subset.
  bool valid() const;

 private:
  std::vector<HalfEdge> first_;
  std::vector<Vertex> owner_;
  std::vector<HalfEdge> mate_;
  std::int64_t matched_ = 0;
};

HalfEdgeGraph uniform_match(const DegreeSequence& ds, Rng& rng);

struct ComponentSummary {
  std::int64_t vertex_count = 0;
  std::int64_t edge_count = 0;
  std::int64_t surplus = 0;
  std::int64_t open_halfedges = 0;
  Vertex min_vertex = 0;
  // degree -> count; filled only on request
  std::vector<std::pair<int, std::int64_t>> degree_hist;
};

struct Partition {
  // label[v] indexes into components; components ordered by min_vertex.
  std::vector<std::int32_t> label;
  std::vector<ComponentSummary> components;
};

Partition partition(const HalfEdgeGraph& g, bool with_degree_hist = false);
std::vector<ComponentSummary> components(const HalfEdgeGraph& g, bool with_degree_hist = false);

// True when every block of fine lies inside a block of coarse.
bool refines(std::span<const std::int32_t> fine, std::span<const std::int32_t> coarse);

struct ComponentEntry {
  double rescaled_size = 0;
  std::int64_t size = 0;
  std::int64_t edges = 0;
  std::int64_t surplus = 0;
  std::int64_t open_halfedges = 0;
  Vertex min_vertex = 0;
};

struct ComponentVector {
  std::vector<ComponentEntry> entries;
};

// Sorted by size desc, surplus desc, min_vertex asc; rescaled by n^{-2/3}.
ComponentVector to_component_vector(const std::vector<ComponentSummary>& comps, std::int64_t n);

void write_components_csv(std::ostream& out, const ComponentVector& cv);
void write_graph_csv(std::ostream& out, const HalfEdgeGraph& g);

}  // namespace cm
