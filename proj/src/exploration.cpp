#include "cm/exploration.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace cm {

namespace {

// Reveals mates lazily: an unpaired half-edge is matched to a uniform
// unpaired partner the first time its mate is requested.
class LazyPairing {
 public:
  explicit LazyPairing(HalfEdgeGraph& g) : g_(g), pos_(static_cast<std::size_t>(g.num_half_edges())) {
    pool_.resize(pos_.size());
    for (std::size_t h = 0; h < pool_.size(); ++h) {
      pool_[h] = static_cast<HalfEdge>(h);
      pos_[h] = static_cast<HalfEdge>(h);
    }
  }

  HalfEdge mate_of(HalfEdge h, Rng& rng) {
    if (g_.is_open(h)) {
      remove(h);
      const HalfEdge x = pool_[uniform_below(rng, pool_.size())];
      remove(x);
      g_.pair(h, x);
    }
    return g_.mate(h);
  }

  bool has_sleeping() const { return !pool_.empty(); }
  // Only called with no active half-edges, when the unpaired pool is exactly
  // the sleeping set.
  HalfEdge sample_sleeping(Rng& rng) const { return pool_[uniform_below(rng, pool_.size())]; }
  void discover(Vertex) {}

 private:
  void remove(HalfEdge h) {
    const HalfEdge last = pool_.back();
    const HalfEdge p = pos_[static_cast<std::size_t>(h)];
    pool_[static_cast<std::size_t>(p)] = last;
    pos_[static_cast<std::size_t>(last)] = p;
    pool_.pop_back();
  }

  HalfEdgeGraph& g_;
  std::vector<HalfEdge> pool_;
  std::vector<HalfEdge> pos_;
};

// Fixed pairing; the sleeping set is tracked explicitly.
class FixedPairing {
 public:
  explicit FixedPairing(const HalfEdgeGraph& g) : g_(g), pos_(static_cast<std::size_t>(g.num_half_edges())) {
    pool_.resize(pos_.size());
    for (std::size_t h = 0; h < pool_.size(); ++h) {
      pool_[h] = static_cast<HalfEdge>(h);
      pos_[h] = static_cast<HalfEdge>(h);
    }
  }

  HalfEdge mate_of(HalfEdge h, Rng&) const { return g_.mate(h); }
  bool has_sleeping() const { return !pool_.empty(); }
  HalfEdge sample_sleeping(Rng& rng) const { return pool_[uniform_below(rng, pool_.size())]; }
  void discover(Vertex v) {
    for (HalfEdge h = g_.first(v); h < g_.first(v + 1); ++h) {
      const HalfEdge last = pool_.back();
      const HalfEdge p = pos_[static_cast<std::size_t>(h)];
      pool_[static_cast<std::size_t>(p)] = last;
      pos_[static_cast<std::size_t>(last)] = p;
      pool_.pop_back();
    }
  }

 private:
  const HalfEdgeGraph& g_;
  std::vector<HalfEdge> pool_;
  std::vector<HalfEdge> pos_;
};

template <class Pairing>
ExplorationTrace run_dfs(const HalfEdgeGraph& g, Pairing& pairing, Rng& rng) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  ExplorationTrace t;
  t.vertex.reserve(n);
  t.degree.reserve(n);
  t.cycles.reserve(n);
  t.walk.reserve(n);
  t.simple_walk.reserve(n);
  t.active.reserve(n);
  t.started.reserve(n);

  std::vector<char> discovered(n, 0);
  std::vector<char> alive(static_cast<std::size_t>(g.num_half_edges()), 0);
  // Top of the stack is the smallest active half-edge. Half-edges killed by
  // a back edge stay in the stack and are skipped when they surface.
  std::vector<HalfEdge> stack;
  std::int64_t active = 0, walk = 0, simple = 0, started = 0;

  for (;;) {
    while (!stack.empty() && !alive[static_cast<std::size_t>(stack.back())]) stack.pop_back();
    Vertex w;
    HalfEdge entry = kOpen;
    if (!stack.empty()) {
      const HalfEdge a = stack.back();
      stack.pop_back();
      alive[static_cast<std::size_t>(a)] = 0;
      --active;
      entry = pairing.mate_of(a, rng);
      w = g.owner(entry);
    } else {
      if (!pairing.has_sleeping()) break;
      w = g.owner(pairing.sample_sleeping(rng));
      ++started;
    }
    discovered[static_cast<std::size_t>(w)] = 1;
    pairing.discover(w);

    std::int64_t cyc = 0;
    for (HalfEdge h = g.first(w); h < g.first(w + 1); ++h) {
      if (h == entry) continue;
      const HalfEdge x = pairing.mate_of(h, rng);
      if (g.owner(x) == w) {
        if (h < x) ++cyc;  // self-loop, counted once
        continue;
      }
      if (alive[static_cast<std::size_t>(x)]) {
        alive[static_cast<std::size_t>(x)] = 0;
        --active;
        ++cyc;
        continue;
      }
      stack.push_back(h);
      alive[static_cast<std::size_t>(h)] = 1;
      ++active;
    }
    const int d = g.degree(w);
    walk += d - 2 - 2 * cyc;
    simple += d - 2;
    t.vertex.push_back(w);
    t.degree.push_back(d);
    t.cycles.push_back(cyc);
    t.walk.push_back(walk);
    t.simple_walk.push_back(simple);
    t.active.push_back(active);
    t.started.push_back(started);
  }

  // Isolated vertices carry no half-edges; each is its own component.
  for (Vertex v = 0; v < static_cast<Vertex>(n); ++v) {
    if (discovered[static_cast<std::size_t>(v)]) continue;
    if (g.degree(v) != 0) throw std::logic_error("exploration left a vertex with half-edges");
    ++started;
    walk -= 2;
    simple -= 2;
    t.vertex.push_back(v);
    t.degree.push_back(0);
    t.cycles.push_back(0);
    t.walk.push_back(walk);
    t.simple_walk.push_back(simple);
    t.active.push_back(active);
    t.started.push_back(started);
  }
  return t;
}

}  // namespace

Exploration explore_graph(const DegreeSequence& ds, Rng& rng) {
  Exploration out{{}, HalfEdgeGraph(ds)};
  LazyPairing pairing(out.graph);
  out.trace = run_dfs(out.graph, pairing, rng);
  return out;
}

ExplorationTrace explore(const DegreeSequence& ds, Rng& rng) {
  return explore_graph(ds, rng).trace;
}

ExplorationTrace replay(const HalfEdgeGraph& g, Rng& rng) {
  if (!g.fully_matched()) throw std::invalid_argument("replay: graph is not fully matched");
  FixedPairing pairing(g);
  return run_dfs(g, pairing, rng);
}

std::vector<std::int64_t> HittingTimes::sizes() const {
  std::vector<std::int64_t> s;
  for (std::size_t k = 1; k < tau.size(); ++k) s.push_back(tau[k] - tau[k - 1]);
  return s;
}

HittingTimes hitting_times(const ExplorationTrace& trace) {
  HittingTimes h{{0}};
  std::int64_t k = 1;
  for (std::int64_t j = 1; j <= trace.stages(); ++j) {
    const auto s = trace.walk[static_cast<std::size_t>(j - 1)];
    if (s == -2 * k) {
      h.tau.push_back(j);
      ++k;
    } else if (s < -2 * k) {
      throw std::runtime_error("walk jumped below -2k without hitting it at stage " +
                               std::to_string(j));
    }
  }
  if (trace.stages() > 0 && h.tau.back() != trace.stages())
    throw std::runtime_error("walk does not end at -2 * #components");
  return h;
}

std::vector<std::int64_t> surplus_per_component(const ExplorationTrace& trace,
                                                const HittingTimes& hit) {
  std::vector<std::int64_t> out;
  for (std::size_t k = 1; k < hit.tau.size(); ++k) {
    std::int64_t s = 0;
    for (auto j = hit.tau[k - 1]; j < hit.tau[k]; ++j) s += trace.cycles[static_cast<std::size_t>(j)];
    out.push_back(s);
  }
  return out;
}

std::vector<std::int64_t> degree_discovery_counts(const ExplorationTrace& trace, int k) {
  std::vector<std::int64_t> n_k(static_cast<std::size_t>(trace.stages()) + 1, 0);
  for (std::size_t j = 0; j < trace.degree.size(); ++j)
    n_k[j + 1] = n_k[j] + (trace.degree[j] == k ? 1 : 0);
  return n_k;
}

std::vector<ComponentSummary> trace_components(const ExplorationTrace& trace) {
  const auto hit = hitting_times(trace);
  const auto surplus = surplus_per_component(trace, hit);
  std::vector<ComponentSummary> out;
  for (std::size_t k = 1; k < hit.tau.size(); ++k) {
    ComponentSummary c;
    c.vertex_count = hit.tau[k] - hit.tau[k - 1];
    c.surplus = surplus[k - 1];
    c.edge_count = c.vertex_count - 1 + c.surplus;
    Vertex m = trace.vertex[static_cast<std::size_t>(hit.tau[k - 1])];
    for (auto j = hit.tau[k - 1]; j < hit.tau[k]; ++j)
      m = std::min(m, trace.vertex[static_cast<std::size_t>(j)]);
    c.min_vertex = m;
    out.push_back(c);
  }
  return out;
}

WalkIdentityReport check_walk_identities(const ExplorationTrace& trace) {
  WalkIdentityReport r;
  r.stages = trace.stages();
  std::int64_t sum_c = 0, running_min = 0;
  for (std::size_t j = 0; j < trace.walk.size(); ++j) {
    sum_c += trace.cycles[j];
    const auto s = trace.walk[j];
    running_min = j == 0 ? s : std::min(running_min, s);
    if (s != trace.simple_walk[j] - 2 * sum_c) ++r.walk_vs_simple;
    if (trace.active[j] != s - running_min) ++r.active_vs_minimum;
    if (trace.active[j] != s + 2 * trace.started[j]) ++r.active_vs_started;
  }
  if (!trace.walk.empty()) {
    std::int64_t comps = 0;
    try {
      comps = hitting_times(trace).components();
      r.final_value = trace.walk.back() == -2 * comps;
    } catch (const std::runtime_error&) {
      r.final_value = false;
    }
  }
  return r;
}

void write_trace_csv(std::ostream& out, const ExplorationTrace& t) {
  out << "stage,vertex,degree,c,S,s,A\n";
  for (std::size_t j = 0; j < t.vertex.size(); ++j)
    out << j + 1 << ',' << t.vertex[j] << ',' << t.degree[j] << ',' << t.cycles[j] << ','
        << t.walk[j] << ',' << t.simple_walk[j] << ',' << t.active[j] << '\n';
}

}  // namespace cm
