#include "cm/dynamic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cm/union_find.hpp"

namespace cm {

double t_map(double nu_n, std::int64_t n, double lambda) {
  if (!(nu_n > 1)) throw std::invalid_argument("t_map: nu_n must exceed 1");
  if (n <= 0) throw std::invalid_argument("t_map: n must be positive");
  return 0.5 * std::log(nu_n / (nu_n - 1)) +
         lambda / (2 * (nu_n - 1) * std::cbrt(static_cast<double>(n)));
}

DynamicRun run_dynamic(const DegreeSequence& ds, double t_end,
                       const std::vector<double>& snapshot_times, Rng& rng,
                       const DynamicOptions& opts) {
  if (!(t_end >= 0)) throw std::invalid_argument("run_dynamic: t_end must be >= 0");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()))
    throw std::invalid_argument("run_dynamic: snapshot times must be sorted");
  DynamicRun run{HalfEdgeGraph(ds), 0.0, {}, {}};
  auto& g = run.graph;
  std::vector<HalfEdge> pool(static_cast<std::size_t>(g.num_half_edges()));
  for (std::size_t h = 0; h < pool.size(); ++h) pool[h] = static_cast<HalfEdge>(h);

  std::size_t next_snap = 0;
  auto snapshot_until = [&](double t) {
    while (next_snap < snapshot_times.size() && snapshot_times[next_snap] < t &&
           snapshot_times[next_snap] <= t_end) {
      run.snapshots.push_back({snapshot_times[next_snap], static_cast<std::int64_t>(pool.size()),
                               g.matched_pairs(), partition(g)});
      ++next_snap;
    }
  };

  double t = 0;
  while (pool.size() >= 2) {
    const double next = t + exponential(rng, static_cast<double>(pool.size()));
    if (next > t_end) break;
    snapshot_until(next);
    t = next;
    const auto s = pool.size();
    const auto i = uniform_below(rng, s);
    auto j = uniform_below(rng, s - 1);
    if (j >= i) ++j;
    const HalfEdge a = pool[i], b = pool[j];
    // remove the larger position first so the smaller stays valid
    for (auto pos : {std::max(i, j), std::min(i, j)}) {
      pool[pos] = pool.back();
      pool.pop_back();
    }
    g.pair(a, b);
    if (opts.record_events) run.events.push_back({t, a, b});
  }
  run.time = pool.size() >= 2 ? t_end : t;
  snapshot_until(std::numeric_limits<double>::infinity());
  return run;
}

double open_curve_deviation(const DynamicRun& run, std::int64_t ell, double horizon) {
  if (ell <= 0) throw std::invalid_argument("open_curve_deviation: ell must be positive");
  const double L = static_cast<double>(ell);
  double sup = 0, t_prev = 0;
  std::int64_t s = ell;
  auto span = [&](double a, double b) {
    sup = std::max({sup, std::abs(s / L - std::exp(-2 * a)), std::abs(s / L - std::exp(-2 * b))});
  };
  for (const auto& e : run.events) {
    if (e.time > horizon) break;
    span(t_prev, e.time);
    s -= 2;
    t_prev = e.time;
  }
  span(t_prev, horizon);
  return sup;
}

ModifiedRun run_modified(const HalfEdgeGraph& base, double nu_n, std::int64_t n,
                         double lambda_start, double lambda_end,
                         const std::vector<double>& snapshot_lambdas, Rng& rng,
                         const ModifiedOptions& opts) {
  if (!(nu_n > 1)) throw std::invalid_argument("run_modified: nu_n must exceed 1");
  if (lambda_end < lambda_start) throw std::invalid_argument("run_modified: lambda_end < lambda_start");
  if (!std::is_sorted(snapshot_lambdas.begin(), snapshot_lambdas.end()))
    throw std::invalid_argument("run_modified: snapshot lambdas must be sorted");

  ModifiedRun run;
  run.standard = base;
  const auto nv = static_cast<std::size_t>(base.num_vertices());
  std::vector<HalfEdge> pool;
  for (HalfEdge h = 0; h < base.num_half_edges(); ++h)
    if (base.is_open(h)) pool.push_back(h);
  run.pool_size = static_cast<std::int64_t>(pool.size());
  const double kappa = (nu_n - 1) * std::cbrt(static_cast<double>(n));
  run.beta = std::sqrt(static_cast<double>(run.pool_size) * kappa);
  run.event_rate = static_cast<double>(run.pool_size) / (2 * kappa);

  UnionFind bar(nv);
  std::vector<std::int64_t> mass(nv, 0), edges(nv, 0);
  for (HalfEdge h = 0; h < base.num_half_edges(); ++h) {
    const HalfEdge m = base.mate(h);
    if (m > h) bar.unite(base.owner(h), base.owner(m));
  }
  for (HalfEdge h = 0; h < base.num_half_edges(); ++h) {
    const HalfEdge m = base.mate(h);
    const auto r = bar.find(base.owner(h));
    if (m == kOpen) mass[r] += 1;
    else if (m > h) edges[r] += 1;
  }

  std::size_t next_snap = 0;
  auto snapshot_until = [&](double lam) {
    while (next_snap < snapshot_lambdas.size() && snapshot_lambdas[next_snap] < lam &&
           snapshot_lambdas[next_snap] <= lambda_end) {
      ModifiedSnapshot s{snapshot_lambdas[next_snap], run.events, run.bad_edges, {}};
      std::vector<std::int32_t> idx(nv, -1);
      for (Vertex v = 0; v < static_cast<Vertex>(nv); ++v) {
        const auto r = bar.find(v);
        if (idx[r] < 0) {
          idx[r] = static_cast<std::int32_t>(s.components.size());
          s.components.push_back({0, mass[r], edges[r], v});
        }
        s.components[idx[r]].size += 1;
      }
      run.snapshots.push_back(std::move(s));
      ++next_snap;
    }
  };

  double lam = lambda_start;
  while (run.pool_size > 0) {
    const double next = lam + exponential(rng, run.event_rate);
    if (next > lambda_end) break;
    snapshot_until(next);
    lam = next;
    ++run.events;
    const HalfEdge a = pool[uniform_below(rng, pool.size())];
    const HalfEdge b = pool[uniform_below(rng, pool.size())];
    const Vertex u = base.owner(a), v = base.owner(b);
    const auto ru = bar.find(u), rv = bar.find(v);
    if (ru == rv) {
      edges[ru] += 1;
    } else {
      const auto ma = mass[ru], mb = mass[rv];
      const auto ea = edges[ru], eb = edges[rv];
      const auto r = bar.unite(ru, rv);
      mass[r] = ma + mb;
      edges[r] = ea + eb + 1;
      if (opts.record_merges) run.merges.push_back({lam, ma, mb, mass[r]});
    }
    const bool standard = a != b && run.standard.is_open(a) && run.standard.is_open(b);
    if (standard) run.standard.pair(a, b);
    else ++run.bad_edges;
    if (opts.record_events) run.log.push_back({lam, a, b, standard});
  }
  snapshot_until(std::numeric_limits<double>::infinity());
  return run;
}

}  // namespace cm
