#include "cm/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cm {

double p_critical(double nu_n, std::int64_t n, double lambda) {
  if (!(nu_n > 1)) throw std::invalid_argument("p_critical: nu_n must exceed 1");
  if (n <= 0) throw std::invalid_argument("p_critical: n must be positive");
  const double p = (1.0 + lambda / std::cbrt(static_cast<double>(n))) / nu_n;
  if (!(p > 0 && p <= 1))
    throw std::invalid_argument("p_critical: p=" + std::to_string(p) + " outside (0,1]");
  return p;
}

namespace {

void check_p(double p) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("retention probability outside [0,1]");
}

}  // namespace

ExplodedSequence explode(const DegreeSequence& ds, double p, Rng& rng) {
  check_p(p);
  const double keep = std::sqrt(p);
  ExplodedSequence ex;
  ex.n = ds.n();
  ex.tilde_degrees.resize(static_cast<std::size_t>(ds.n()));
  for (std::int64_t v = 0; v < ds.n(); ++v) {
    int kept = 0;
    for (int h = 0; h < ds[v]; ++h) kept += uniform01(rng) < keep ? 1 : 0;
    ex.tilde_degrees[static_cast<std::size_t>(v)] = kept;
    ex.n_plus += ds[v] - kept;
  }
  ex.tilde_degrees.insert(ex.tilde_degrees.end(), static_cast<std::size_t>(ex.n_plus), 1);
  return ex;
}

ExplosionPercolation percolate_via_explosion(const DegreeSequence& ds, double p, Rng& rng) {
  ExplosionPercolation out;
  out.exploded = explode(ds, p, rng);
  const auto& dt = out.exploded.tilde_degrees;
  const HalfEdgeGraph tilde_graph = uniform_match(DegreeSequence(dt), rng);
  out.tilde = partition(tilde_graph);

  std::vector<Vertex> ones;
  for (std::size_t v = 0; v < dt.size(); ++v)
    if (dt[v] == 1) ones.push_back(static_cast<Vertex>(v));
  const auto n_plus = static_cast<std::size_t>(out.exploded.n_plus);
  if (ones.size() < n_plus) throw std::logic_error("fewer degree-one vertices than n_plus");
  // partial Fisher-Yates: the first n_plus entries are a uniform subset
  for (std::size_t i = 0; i < n_plus; ++i)
    std::swap(ones[i], ones[i + uniform_below(rng, ones.size() - i)]);

  out.deleted.assign(dt.size(), 0);
  out.cleanup.assign(out.tilde.components.size(), 0);
  for (std::size_t i = 0; i < n_plus; ++i) {
    out.deleted[static_cast<std::size_t>(ones[i])] = 1;
    out.cleanup[static_cast<std::size_t>(out.tilde.label[static_cast<std::size_t>(ones[i])])] += 1;
  }

  std::vector<int> kept_degrees;
  std::vector<Vertex> new_id(dt.size(), -1);
  for (std::size_t v = 0; v < dt.size(); ++v) {
    if (out.deleted[v]) continue;
    new_id[v] = static_cast<Vertex>(kept_degrees.size());
    kept_degrees.push_back(dt[v]);
  }
  out.graph = HalfEdgeGraph(kept_degrees);
  for (HalfEdge h = 0; h < tilde_graph.num_half_edges(); ++h) {
    const HalfEdge m = tilde_graph.mate(h);
    if (m < h) continue;
    const Vertex a = new_id[static_cast<std::size_t>(tilde_graph.owner(h))];
    const Vertex b = new_id[static_cast<std::size_t>(tilde_graph.owner(m))];
    if (a < 0 || b < 0) continue;
    const HalfEdge ha = out.graph.first(a) + (h - tilde_graph.first(tilde_graph.owner(h)));
    const HalfEdge hb = out.graph.first(b) + (m - tilde_graph.first(tilde_graph.owner(m)));
    out.graph.pair(ha, hb);
  }
  out.result = partition(out.graph);
  return out;
}

HalfEdgeGraph percolate_direct(const HalfEdgeGraph& g, double p, Rng& rng) {
  if (!g.fully_matched()) throw std::invalid_argument("percolate_direct: graph not fully matched");
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("retention probability outside [0,1]");
  HalfEdgeGraph out = g;
  for (HalfEdge h = 0; h < g.num_half_edges(); ++h) {
    const HalfEdge m = g.mate(h);
    if (m > h && !(uniform01(rng) < p)) out.unpair(h);
  }
  return out;
}

bool CouplingGrid::refinement_holds() const {
  for (std::size_t k = 1; k < snapshots.size(); ++k)
    if (!refines(snapshots[k - 1].partition.label, snapshots[k].partition.label)) return false;
  return true;
}

CouplingGrid coupled_grid(const DegreeSequence& ds, const std::vector<double>& lambdas, Rng& rng) {
  if (!std::is_sorted(lambdas.begin(), lambdas.end()))
    throw std::invalid_argument("coupled_grid: lambda grid must be sorted");
  const double nu = stats(ds).nu;
  std::vector<double> ps;
  for (double l : lambdas) ps.push_back(p_critical(nu, ds.n(), l));
  auto grid = coupled_grid_p(ds, ps, rng);
  for (std::size_t k = 0; k < lambdas.size(); ++k) grid.snapshots[k].lambda = lambdas[k];
  return grid;
}

CouplingGrid coupled_grid_p(const DegreeSequence& ds, const std::vector<double>& ps, Rng& rng) {
  if (!std::is_sorted(ps.begin(), ps.end()))
    throw std::invalid_argument("coupled_grid: retention probabilities must be sorted");
  for (double p : ps)
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("coupled_grid: p outside [0, 1]");
  CouplingGrid grid;
  grid.n = ds.n();
  grid.nu_n = stats(ds).nu;

  const std::int64_t pairs = ds.total() / 2;
  std::vector<std::int64_t> edges(ps.size(), 0);
  for (std::int64_t i = 0; i < pairs; ++i) {
    const double u = uniform01(rng);
    for (std::size_t k = 0; k < ps.size(); ++k) edges[k] += u <= ps[k] ? 1 : 0;
  }

  HalfEdgeGraph g(ds);
  std::vector<HalfEdge> pool(static_cast<std::size_t>(g.num_half_edges()));
  for (std::size_t h = 0; h < pool.size(); ++h) pool[h] = static_cast<HalfEdge>(h);
  auto take = [&]() {
    const auto j = uniform_below(rng, pool.size());
    const HalfEdge h = pool[j];
    pool[j] = pool.back();
    pool.pop_back();
    return h;
  };
  const double scale = std::cbrt(static_cast<double>(grid.n));
  std::int64_t done = 0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    for (; done < edges[k]; ++done) {
      const HalfEdge a = take();
      const HalfEdge b = take();
      g.pair(a, b);
    }
    grid.snapshots.push_back({(ps[k] * grid.nu_n - 1) * scale, ps[k], edges[k], partition(g)});
  }
  return grid;
}

void write_grid_csv(std::ostream& out, const CouplingGrid& grid, std::size_t top_k) {
  out << "lambda,rank,rescaled_size,surplus,open_halfedges\n";
  out << std::setprecision(17);
  for (const auto& s : grid.snapshots) {
    const auto cv = to_component_vector(s.partition.components, grid.n);
    for (std::size_t r = 0; r < cv.entries.size() && r < top_k; ++r) {
      const auto& e = cv.entries[r];
      out << s.lambda << ',' << r + 1 << ',' << e.rescaled_size << ',' << e.surplus << ','
          << e.open_halfedges << '\n';
    }
  }
}

}  // namespace cm
