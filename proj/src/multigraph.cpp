#include "cm/multigraph.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "cm/union_find.hpp"

namespace cm {

HalfEdgeGraph::HalfEdgeGraph(const DegreeSequence& ds) : HalfEdgeGraph(ds.degrees()) {}

HalfEdgeGraph::HalfEdgeGraph(const std::vector<int>& degrees) {
  first_.resize(degrees.size() + 1);
  HalfEdge acc = 0;
  for (std::size_t v = 0; v < degrees.size(); ++v) {
    if (degrees[v] < 0) throw std::invalid_argument("negative degree");
    first_[v] = acc;
    acc += degrees[v];
  }
  first_[degrees.size()] = acc;
  owner_.resize(static_cast<std::size_t>(acc));
  for (std::size_t v = 0; v < degrees.size(); ++v)
    std::fill(owner_.begin() + first_[v], owner_.begin() + first_[v + 1], static_cast<Vertex>(v));
  mate_.assign(static_cast<std::size_t>(acc), kOpen);
}

std::vector<int> HalfEdgeGraph::degrees() const {
  std::vector<int> d(static_cast<std::size_t>(num_vertices()));
  for (Vertex v = 0; v < static_cast<Vertex>(d.size()); ++v) d[v] = degree(v);
  return d;
}

void HalfEdgeGraph::pair(HalfEdge a, HalfEdge b) {
  if (a == b) throw std::invalid_argument("cannot pair a half-edge with itself");
  if (!is_open(a) || !is_open(b)) throw std::logic_error("pairing a matched half-edge");
  mate_[static_cast<std::size_t>(a)] = b;
  mate_[static_cast<std::size_t>(b)] = a;
  ++matched_;
}

void HalfEdgeGraph::unpair(HalfEdge h) {
  const HalfEdge m = mate(h);
  if (m == kOpen) return;
  mate_[static_cast<std::size_t>(h)] = kOpen;
  mate_[static_cast<std::size_t>(m)] = kOpen;
  --matched_;
}

bool HalfEdgeGraph::valid() const {
  std::int64_t paired = 0;
  for (HalfEdge h = 0; h < num_half_edges(); ++h) {
    const HalfEdge m = mate(h);
    if (m == kOpen) continue;
    if (m < 0 || m >= num_half_edges() || m == h || mate(m) != h) return false;
    ++paired;
  }
  return paired == 2 * matched_;
}

HalfEdgeGraph uniform_match(const DegreeSequence& ds, Rng& rng) {
  HalfEdgeGraph g(ds);
  const HalfEdge ell = g.num_half_edges();
  if (ell % 2 != 0) throw std::invalid_argument("uniform_match: odd total degree");
  std::vector<HalfEdge> pool(static_cast<std::size_t>(ell));
  for (HalfEdge h = 0; h < ell; ++h) pool[static_cast<std::size_t>(h)] = h;
  while (!pool.empty()) {
    const HalfEdge a = pool.back();
    pool.pop_back();
    const auto j = uniform_below(rng, pool.size());
    const HalfEdge b = pool[j];
    pool[j] = pool.back();
    pool.pop_back();
    g.pair(a, b);
  }
  return g;
}

Partition partition(const HalfEdgeGraph& g, bool with_degree_hist) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  UnionFind uf(n);
  for (HalfEdge h = 0; h < g.num_half_edges(); ++h) {
    const HalfEdge m = g.mate(h);
    if (m > h) uf.unite(g.owner(h), g.owner(m));
  }
  Partition out;
  out.label.assign(n, -1);
  std::vector<std::int32_t> root_label(n, -1);
  for (Vertex v = 0; v < static_cast<Vertex>(n); ++v) {
    const auto r = uf.find(v);
    if (root_label[r] < 0) {
      root_label[r] = static_cast<std::int32_t>(out.components.size());
      out.components.emplace_back();
      out.components.back().min_vertex = v;
    }
    const auto c = root_label[r];
    out.label[v] = c;
    out.components[c].vertex_count += 1;
  }
  for (HalfEdge h = 0; h < g.num_half_edges(); ++h) {
    auto& c = out.components[out.label[g.owner(h)]];
    const HalfEdge m = g.mate(h);
    if (m == kOpen) c.open_halfedges += 1;
    else if (m > h) c.edge_count += 1;
  }
  for (auto& c : out.components) c.surplus = c.edge_count - c.vertex_count + 1;
  if (with_degree_hist) {
    std::vector<std::pair<std::int32_t, int>> keyed(n);
    for (Vertex v = 0; v < static_cast<Vertex>(n); ++v) keyed[v] = {out.label[v], g.degree(v)};
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && keyed[j] == keyed[i]) ++j;
      out.components[keyed[i].first].degree_hist.emplace_back(keyed[i].second,
                                                             static_cast<std::int64_t>(j - i));
      i = j;
    }
  }
  return out;
}

std::vector<ComponentSummary> components(const HalfEdgeGraph& g, bool with_degree_hist) {
  return partition(g, with_degree_hist).components;
}

bool refines(std::span<const std::int32_t> fine, std::span<const std::int32_t> coarse) {
  if (fine.size() != coarse.size()) throw std::invalid_argument("refines: size mismatch");
  std::int32_t max_label = -1;
  for (auto l : fine) max_label = std::max(max_label, l);
  std::vector<std::int32_t> image(static_cast<std::size_t>(max_label + 1), -1);
  for (std::size_t v = 0; v < fine.size(); ++v) {
    auto& im = image[static_cast<std::size_t>(fine[v])];
    if (im < 0) im = coarse[v];
    else if (im != coarse[v]) return false;
  }
  return true;
}

ComponentVector to_component_vector(const std::vector<ComponentSummary>& comps, std::int64_t n) {
  if (n <= 0) throw std::invalid_argument("to_component_vector: n must be positive");
  const double scale = std::pow(static_cast<double>(n), -2.0 / 3.0);
  ComponentVector cv;
  cv.entries.reserve(comps.size());
  for (const auto& c : comps)
    cv.entries.push_back({static_cast<double>(c.vertex_count) * scale, c.vertex_count,
                          c.edge_count, c.surplus, c.open_halfedges, c.min_vertex});
  std::sort(cv.entries.begin(), cv.entries.end(), [](const auto& a, const auto& b) {
    if (a.size != b.size) return a.size > b.size;
    if (a.surplus != b.surplus) return a.surplus > b.surplus;
    return a.min_vertex < b.min_vertex;
  });
  return cv;
}

void write_components_csv(std::ostream& out, const ComponentVector& cv) {
  out << "rank,size,edges,surplus,open_halfedges\n";
  std::size_t rank = 1;
  for (const auto& e : cv.entries)
    out << rank++ << ',' << e.size << ',' << e.edges << ',' << e.surplus << ','
        << e.open_halfedges << '\n';
}

void write_graph_csv(std::ostream& out, const HalfEdgeGraph& g) {
  out << "half_edge,owner,mate\n";
  for (HalfEdge h = 0; h < g.num_half_edges(); ++h) {
    out << h << ',' << g.owner(h) << ',';
    if (g.is_open(h)) out << "OPEN";
    else out << g.mate(h);
    out << '\n';
  }
}

}  // namespace cm
