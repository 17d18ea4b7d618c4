// Acceptance suite: one PASS/FAIL line per criterion. The process exits 0
// whenever every check ran to completion, whatever the verdicts; a crash or
// an exception is the only nonzero exit. Pass criterion numbers as arguments
// to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "cm/cli.hpp"
#include "cm/dynamic.hpp"
#include "cm/exploration.hpp"
#include "cm/harness.hpp"
#include "cm/limit.hpp"
#include "cm/percolation.hpp"
#include "cm/stats.hpp"
#include "cm/union_find.hpp"
#include "oracle.hpp"

using namespace cm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int jobs() { return static_cast<int>(std::max(1U, std::thread::hardware_concurrency())); }

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

const ProbabilityVector& law13() {
  static const ProbabilityVector d({{1, 0.5}, {3, 0.5}});
  return d;
}

// ---------------------------------------------------------------- oracle laws

struct LawTally {
  int tests = 0;
  int failed = 0;
  double min_p = 1;
  std::string worst;

  void add(const std::map<std::string, double>& law, const std::map<std::string, std::int64_t>& seen,
           const std::string& label) {
    ++tests;
    double p = 1;
    bool impossible = false;
    for (const auto& [k, c] : seen)
      if (!law.count(k) && c > 0) impossible = true;
    if (impossible) {
      p = 0;
    } else if (law.size() > 1) {
      std::vector<std::int64_t> obs;
      std::vector<double> probs;
      for (const auto& [k, q] : law) {
        const auto it = seen.find(k);
        obs.push_back(it == seen.end() ? 0 : it->second);
        probs.push_back(q);
      }
      p = statistics::chi_square_gof(obs, probs).p_value;
    }
    if (p < 1e-3) ++failed;
    if (p < min_p) {
      min_p = p;
      worst = label;
    }
  }

  Outcome outcome() const {
    return {failed == 0, std::to_string(tests - failed) + "/" + std::to_string(tests) +
                             " chi-square tests at 1e-3, min p " + fmt(min_p) + " (" + worst + ")"};
  }
};

std::string seq_label(const std::vector<int>& d) {
  std::string s = "(";
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s + ")";
}

Outcome ac1() {
  const int reps = 100000;
  Rng rng(1001);
  LawTally tally;
  for (const auto& d : oracle::small_sequences(8)) {
    const auto law = oracle::matching_law(d);
    const DegreeSequence ds(d);
    std::map<std::string, std::int64_t> matched, explored, replayed;
    for (int r = 0; r < reps; ++r) {
      const auto g = uniform_match(ds, rng);
      ++matched[oracle::key_of_components(components(g))];
      ++explored[oracle::key_of_components(trace_components(explore(ds, rng)))];
      ++replayed[oracle::key_of_components(trace_components(replay(g, rng)))];
    }
    tally.add(law, matched, "match " + seq_label(d));
    tally.add(law, explored, "explore " + seq_label(d));
    tally.add(law, replayed, "replay " + seq_label(d));
  }
  return tally.outcome();
}

// ---------------------------------------------------------------- identities

struct IdentityTally {
  std::int64_t runs = 0, stages = 0;
  std::int64_t walk = 0, started = 0, final_value = 0, tau = 0, surplus = 0, halfedges = 0;
  std::int64_t literal_a = 0, literal_a_runs = 0;

  void partition_checks(const std::vector<ComponentSummary>& comps, std::int64_t n, std::int64_t ell,
                        std::int64_t edges) {
    std::int64_t s = 0, h = 0;
    for (const auto& c : comps) {
      s += c.surplus;
      h += 2 * c.edge_count + c.open_halfedges;
    }
    surplus += s != edges - n + static_cast<std::int64_t>(comps.size());
    halfedges += h != ell;
    ++runs;
  }

  void trace_checks(const ExplorationTrace& t, const HalfEdgeGraph& g) {
    const auto r = check_walk_identities(t);
    stages += r.stages;
    walk += r.walk_vs_simple;
    started += r.active_vs_started;
    final_value += !r.final_value;
    literal_a += r.active_vs_minimum;
    literal_a_runs += r.active_vs_minimum > 0;
    const auto comps = components(g);
    std::vector<std::int64_t> a, b, sa, sb;
    for (const auto& c : comps) {
      a.push_back(c.vertex_count);
      sa.push_back(c.surplus);
    }
    const auto h = hitting_times(t);
    b = h.sizes();
    sb = surplus_per_component(t, h);
    for (auto* v : {&a, &b, &sa, &sb}) std::sort(v->begin(), v->end());
    tau += a != b || sa != sb;
    partition_checks(comps, g.num_vertices(), g.num_half_edges(), g.matched_pairs());
  }
};

DegreeSequence random_sequence(const ProbabilityVector& law, std::int64_t n, Rng& rng) {
  for (;;) {
    auto ds = sample_iid(law, n, rng);
    if (ds.total() > 0) return ds;
  }
}

Outcome ac2() {
  IdentityTally t;
  Rng rng(2002);
  const std::vector<ProbabilityVector> laws{
      law13(),
      ProbabilityVector({{0, 0.1}, {1, 0.45}, {2, 0.15}, {3, 0.2}, {5, 0.1}}),
      ProbabilityVector({{1, 0.6}, {2, 0.1}, {4, 0.2}, {9, 0.1}}),
  };
  for (std::int64_t n : {2, 10, 100, 1000, 100000, 1000000}) {
    const int runs = n >= 100000 ? 2 : 20;
    for (const auto& law : laws) {
      for (int r = 0; r < runs; ++r) {
        const auto ds = random_sequence(law, n, rng);
        const auto ex = explore_graph(ds, rng);
        t.trace_checks(ex.trace, ex.graph);
        t.trace_checks(replay(ex.graph, rng), ex.graph);

        const double p = 0.3 + 0.4 * uniform01(rng);
        const auto direct = percolate_direct(ex.graph, p, rng);
        t.partition_checks(components(direct), n, ds.total(), direct.matched_pairs());
        const auto expl = percolate_via_explosion(ds, p, rng);
        t.partition_checks(expl.result.components, expl.graph.num_vertices(),
                           expl.graph.num_half_edges(), expl.graph.matched_pairs());
        t.partition_checks(expl.tilde.components, expl.exploded.n_tilde(), ds.total(),
                           ds.total() / 2);
        const auto grid = coupled_grid_p(ds, {0.5 * p, p}, rng);
        for (const auto& s : grid.snapshots) t.partition_checks(s.partition.components, n, ds.total(), s.edges);
        const auto dyn = run_dynamic(ds, 0.6, {0.05, 0.2, 0.6}, rng);
        for (const auto& s : dyn.snapshots) t.partition_checks(s.partition.components, n, ds.total(), s.edges);
      }
    }
  }
  const std::int64_t exact = t.walk + t.started + t.final_value + t.tau + t.surplus + t.halfedges;
  std::string detail = std::to_string(t.runs) + " partitions, " + std::to_string(t.stages) +
                       " stages: S vs s-2sum(c) " + std::to_string(t.walk) + ", A=S+2*started " +
                       std::to_string(t.started) + ", final S " + std::to_string(t.final_value) +
                       ", tau sizes " + std::to_string(t.tau) + ", surplus sum " +
                       std::to_string(t.surplus) + ", half-edge sum " + std::to_string(t.halfedges) +
                       " violations; literal A=S-min S violated at " + std::to_string(t.literal_a) +
                       " stages in " + std::to_string(t.literal_a_runs) +
                       " traces (fails whenever a component is entered, e.g. d=(1,1))";
  return {exact == 0 && t.literal_a == 0, detail};
}

// ---------------------------------------------------------------- percolation

Outcome ac3() {
  const int reps = 100000;
  Rng rng(3003);
  LawTally tally;
  for (const auto& d : oracle::small_sequences(8)) {
    const DegreeSequence ds(d);
    for (double p : {0.3, 0.7}) {
      const auto law = oracle::percolation_law(d, p);
      std::map<std::string, std::int64_t> direct, explosion, grid;
      for (int r = 0; r < reps; ++r) {
        ++direct[oracle::key_of_components(components(percolate_direct(uniform_match(ds, rng), p, rng)))];
        ++explosion[oracle::key_of_components(percolate_via_explosion(ds, p, rng).result.components)];
        ++grid[oracle::key_of_components(coupled_grid_p(ds, {p}, rng).snapshots[0].partition.components)];
      }
      const auto tag = seq_label(d) + " p=" + fmt(p, 2);
      tally.add(law, direct, "direct " + tag);
      tally.add(law, explosion, "explosion " + tag);
      tally.add(law, grid, "grid " + tag);
    }
  }
  return tally.outcome();
}

Outcome ac4() {
  const std::int64_t n = 1000000;
  Rng rng(4004);
  const auto ds = materialize_sequence(law13(), n, rng);
  const auto st = stats(ds);
  const double p = p_critical(st.nu, n, 0.0);
  const double target = 1 + st.mu * (1 - 1 / std::sqrt(st.nu));
  const double expected_fraction = 1 - std::sqrt(p);
  const double big = std::pow(static_cast<double>(n), 2.0 / 3.0);
  int zeta_ok = 0;
  std::int64_t large = 0, large_ok = 0;
  double worst_zeta = 0, worst_frac = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng r(derive_seed(4004, static_cast<std::uint64_t>(seed)));
    const auto ex = percolate_via_explosion(ds, p, r);
    const double dev = std::abs(static_cast<double>(ex.exploded.n_tilde()) / n - target);
    worst_zeta = std::max(worst_zeta, dev);
    zeta_ok += dev < 5e-3;
    for (std::size_t i = 0; i < ex.tilde.components.size(); ++i) {
      const auto size = ex.tilde.components[i].vertex_count;
      if (size <= big) continue;
      ++large;
      const double rel = std::abs(static_cast<double>(ex.cleanup[i]) / size / expected_fraction - 1);
      worst_frac = std::max(worst_frac, rel);
      large_ok += rel < 0.05;
    }
  }
  return {zeta_ok >= 99 && large > 0 && large_ok == large,
          "zeta within 5e-3 in " + std::to_string(zeta_ok) + "/100 seeds (max dev " + fmt(worst_zeta) +
              "); cleanup fraction within 5% of 1-sqrt(p) in " + std::to_string(large_ok) + "/" +
              std::to_string(large) + " components > n^(2/3) (max rel dev " + fmt(worst_frac) + ")"};
}

// ---------------------------------------------------------------- dynamic

Outcome ac5() {
  const std::int64_t n = 1000000;
  Rng rng(5005);
  const auto ds = materialize_sequence(law13(), n, rng);
  DynamicOptions opts;
  opts.record_events = true;
  int ok = 0;
  double worst = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng r(derive_seed(5005, static_cast<std::uint64_t>(seed)));
    const auto run = run_dynamic(ds, 1.0, {}, r, opts);
    const double dev = open_curve_deviation(run, ds.total(), 1.0);
    worst = std::max(worst, dev);
    ok += dev < 0.01;
  }
  return {ok >= 95, std::to_string(ok) + "/100 seeds with sup deviation < 0.01 (max " + fmt(worst) + ")"};
}

Outcome ac7() {
  // two kept-alive components of masses a, b
  const int a = 3, b = 5;
  const double nu = 2.0;
  const std::int64_t n = 1000;
  const double kappa = (nu - 1) * std::cbrt(static_cast<double>(n));
  const double rate = static_cast<double>(a * b) / ((a + b) * kappa);
  Rng rng(7007);
  const HalfEdgeGraph pair_base(std::vector<int>{a, b});
  ModifiedOptions merge_opts;
  merge_opts.record_merges = true;
  std::vector<double> times;
  std::int64_t bad_merges = 0;
  for (int r = 0; r < 10000; ++r) {
    const auto run = run_modified(pair_base, nu, n, 0.0, 400.0, {}, rng, merge_opts);
    if (run.merges.size() != 1 || run.merges[0].merged_mass != a + b) {
      ++bad_merges;
      continue;
    }
    times.push_back(run.merges[0].lambda);
  }
  const auto ks = statistics::ks_exponential(times, rate);

  // additivity and containment on a realistic instance, rebuilt from the log
  const std::int64_t big_n = 100000;
  const auto ds = materialize_sequence(law13(), big_n, rng);
  const double nu_n = stats(ds).nu;
  std::int64_t additivity = 0, containment = 0, accounting = 0, events = 0, merges = 0;
  for (int rep = 0; rep < 5; ++rep) {
    const auto base = run_dynamic(ds, t_map(nu_n, big_n, -1.0), {}, rng);
    const auto& g = base.graph;
    ModifiedOptions opts;
    opts.record_events = true;
    opts.record_merges = true;
    const std::vector<double> marks{-0.5, 0.0, 0.5, 1.0};
    const auto run = run_modified(g, nu_n, big_n, -1.0, 1.0, marks, rng, opts);
    events += run.events;
    merges += static_cast<std::int64_t>(run.merges.size());
    for (const auto& m : run.merges) additivity += m.merged_mass != m.mass_a + m.mass_b;

    UnionFind uf(static_cast<std::size_t>(big_n));
    for (HalfEdge h = 0; h < g.num_half_edges(); ++h)
      if (g.mate(h) > h) uf.unite(g.owner(h), g.owner(g.mate(h)));
    std::set<std::pair<HalfEdge, HalfEdge>> standard_pairs;
    std::size_t next = 0;
    std::int64_t standard = 0;
    for (const auto& snap : run.snapshots) {
      for (; next < run.log.size() && run.log[next].lambda <= snap.lambda; ++next) {
        const auto& e = run.log[next];
        uf.unite(g.owner(e.a), g.owner(e.b));
        if (e.standard) {
          standard_pairs.insert(std::minmax(e.a, e.b));
          ++standard;
        }
      }
      std::map<std::int32_t, std::int64_t> mass;
      for (HalfEdge h = 0; h < g.num_half_edges(); ++h)
        if (g.is_open(h)) ++mass[uf.find(g.owner(h))];
      std::int64_t total = 0;
      for (const auto& c : snap.components) {
        const auto it = mass.find(uf.find(c.min_vertex));
        additivity += c.mass != (it == mass.end() ? 0 : it->second);
        total += c.mass;
      }
      additivity += total != run.pool_size;
    }
    accounting += standard + run.bad_edges != run.events;
    // Each standard edge is a base edge or a logged pair, hence an edge of the
    // modified graph; edges are never removed, so this holds at every event.
    const auto& st = run.standard;
    for (HalfEdge h = 0; h < st.num_half_edges(); ++h) {
      const HalfEdge m = st.mate(h);
      if (m == kOpen || m < h) continue;
      const bool in_base = g.mate(h) == m;
      containment += !in_base && !standard_pairs.count(std::minmax(h, m));
    }
  }
  const bool pass = bad_merges == 0 && ks.p_value >= 1e-3 && additivity == 0 && containment == 0 &&
                    accounting == 0;
  return {pass, "two-particle merge times: KS " + fmt(ks.statistic) + " p " + fmt(ks.p_value) +
                    " vs Exp(" + fmt(rate) + ") over " + std::to_string(times.size()) +
                    " runs; additivity violations " + std::to_string(additivity) + " over " +
                    std::to_string(merges) + " merges, containment violations " +
                    std::to_string(containment) + " over " + std::to_string(events) + " events"};
}

// ---------------------------------------------------------------- limits

Outcome ac6() {
  ExperimentConfig cfg;
  cfg.name = "ac6";
  cfg.dist = law13();
  cfg.ns = {10000, 100000, 1000000};
  cfg.lambdas = {0.0};
  cfg.replicas = 2000;
  cfg.seed = 6006;
  cfg.pipeline = Pipeline::kDirect;
  cfg.top_k = 3;
  cfg.jobs = jobs();
  const auto table = run_experiment(cfg);

  const auto params = limit_params(critical_mixture(law13(), 1.0), 0.0);
  auto limit = sample_limit_ensemble(params, 1.0, 4000, 6060, 3, 0, 0, jobs());
  limit.lambda = 0.0;
  ComparisonOptions opts;
  opts.ranks = 3;
  opts.null_splits = 1000;
  opts.null_quantile = 0.99;
  opts.surplus_alpha = 0.01;
  opts.seed = 6066;

  std::vector<ComparisonReport> reps;
  for (auto n : cfg.ns) reps.push_back(compare_to_limit(table, Pipeline::kDirect, n, 0.0, limit, opts));
  bool monotone = true;
  std::string detail;
  for (int r = 0; r < 3; ++r) {
    detail += "rank " + std::to_string(r + 1) + " KS";
    for (std::size_t i = 0; i < reps.size(); ++i) {
      detail += " " + fmt(reps[i].ranks[static_cast<std::size_t>(r)].ks, 3);
      if (i > 0)
        monotone = monotone && reps[i].ranks[static_cast<std::size_t>(r)].ks <=
                                   reps[i - 1].ranks[static_cast<std::size_t>(r)].ks;
    }
    detail += " (band " + fmt(reps.back().ranks[static_cast<std::size_t>(r)].null_threshold, 3) + "); ";
  }
  const auto& last = reps.back();
  bool in_band = true;
  for (const auto& rc : last.ranks) in_band = in_band && rc.pass;
  detail += "surplus chi-square p " + fmt(last.surplus.p_value) + "; non-increasing " +
            (monotone ? "yes" : "no") + ", in band at 1e6 " + (in_band ? "yes" : "no") + ", " +
            std::to_string(last.excluded_truncated) + " truncated limit paths excluded";
  return {monotone && in_band && last.surplus_pass, detail};
}

Outcome ac8() {
  ExperimentConfig cfg;
  cfg.name = "ac8";
  cfg.dist = law13();
  cfg.ns = {1000000};
  cfg.lambdas = {-1.0, 1.0};
  cfg.replicas = 1000;
  cfg.seed = 8008;
  cfg.pipeline = Pipeline::kPercolation;
  cfg.top_k = 1;
  cfg.jobs = jobs();
  const auto table = run_experiment(cfg);
  const auto ps = percolation_scaling(law13(), law13().nu());
  const auto joint = sample_joint_limit(ps.at(-1.0), 2.0 * ps.lambda_scale, ps.size_scale, 2000, 8080,
                                        0, 0, jobs());
  const auto rep = joint_lambda_check(table, 1000000, -1.0, 1.0, joint, 4999, 8088, 0.001);
  return {rep.pass, "refinement " + std::to_string(rep.refined) + "/" + std::to_string(rep.replicas) +
                        "; energy statistic " + fmt(rep.energy.statistic) + " p " +
                        fmt(rep.energy.p_value) + " (alpha 0.001, " +
                        std::to_string(rep.energy.permutations) + " permutations)"};
}

Outcome ac9() {
  const auto params = limit_params(critical_mixture(law13(), 1.0), 1.0);
  const double horizon = default_horizon(params);
  const int paths = 10000;
  Rng rng(9009);
  std::vector<double> end;
  // Marginals at grid points are exact for any step, so a coarse grid suffices here.
  for (int i = 0; i < paths; ++i) end.push_back(sample_reflected(params, horizon, horizon / (1 << 14), rng).path.back());
  const double mu = params.mu, eta = params.eta;
  const double want_mean = params.lambda * horizon - eta * horizon * horizon / (2 * mu * mu * mu);
  const double want_var = eta * horizon / (mu * mu);
  const double m = statistics::mean(end), v = statistics::variance(end);
  const double se_mean = std::sqrt(want_var / paths);
  const double se_var = want_var * std::sqrt(2.0 / (paths - 1));
  const double z_mean = (m - want_mean) / se_mean, z_var = (v - want_var) / se_var;

  // dt refinement on a common driver at the default resolution
  const std::size_t fine_steps = 1 << 20;
  const double fine_dt = horizon / static_cast<double>(fine_steps);
  std::vector<double> fine_top, coarse_top, fine(fine_steps), coarse(fine_steps / 2);
  for (int i = 0; i < 1000; ++i) {
    for (auto& z : fine) z = standard_normal(rng);
    for (std::size_t k = 0; k < coarse.size(); ++k) coarse[k] = (fine[2 * k] + fine[2 * k + 1]) / std::sqrt(2.0);
    const auto ef = extract_excursions(sample_reflected(params, fine_dt, fine));
    const auto ec = extract_excursions(sample_reflected(params, 2 * fine_dt, coarse));
    fine_top.push_back(ef.empty() ? 0 : ef.front().length);
    coarse_top.push_back(ec.empty() ? 0 : ec.front().length);
  }
  const double med_f = statistics::quantile(fine_top, 0.5), med_c = statistics::quantile(coarse_top, 0.5);
  const double shift = std::abs(med_c / med_f - 1);
  return {std::abs(z_mean) <= 3 && std::abs(z_var) <= 3 && shift < 0.01,
          "B(T) mean z " + fmt(z_mean, 3) + ", variance z " + fmt(z_var, 3) + " at T=" + fmt(horizon) +
              " over " + std::to_string(paths) + " paths; halving dt from T/2^19 to T/2^20 moves the median top length by " +
              fmt(100 * shift, 3) + "%"};
}

// ---------------------------------------------------------------- CLI

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Concatenated contents of a file or of every file under a directory.
std::string snapshot(const fs::path& p) {
  if (!fs::is_directory(p)) return slurp(p);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(p))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += fs::relative(f, p).string() + "\n" + slurp(f);
  return all;
}

Outcome ac10() {
  const fs::path dir = fs::absolute("acceptance_cli");
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto at = [&](const std::string& f) { return (dir / f).string(); };
  std::ofstream(at("d.json")) << R"({"probabilities": {"1": 0.5, "3": 0.5}})";
  std::ofstream(at("m.txt")) << "0.4\n1.1\n0.7\n2.0\n0.05\n";
  // inputs shared by the later commands
  cli::run({"gen", "--dist", at("d.json"), "--n", "20000", "--mode", "exact", "--seed", "1", "--out", at("base.txt")});
  cli::run({"gen", "--dist", at("d.json"), "--n", "20000", "--lambda", "0", "--seed", "1", "--out", at("crit.txt")});

  using Args = std::vector<std::string>;
  struct Case {
    std::string name;
    Args args;
    bool directory;
  };
  const std::vector<Case> cases{
      {"gen tuned", {"gen", "--dist", at("d.json"), "--n", "5000", "--lambda", "0.5", "--seed", "7"}, false},
      {"gen iid", {"gen", "--dist", at("d.json"), "--n", "5000", "--mode", "iid", "--seed", "7", "--format", "json"}, false},
      {"explore", {"explore", "--deg", at("crit.txt"), "--seed", "7", "--top-k", "0"}, false},
      {"explore trace", {"explore", "--dist", at("d.json"), "--n", "3000", "--seed", "7", "--trace", "@EXTRA"}, false},
      {"percolate grid", {"percolate", "--deg", at("base.txt"), "--grid", "-1,0,1", "--seed", "7"}, false},
      {"percolate explosion", {"percolate", "--deg", at("base.txt"), "--lambda", "0", "--method", "explosion", "--seed", "7"}, false},
      {"percolate direct", {"percolate", "--deg", at("base.txt"), "--lambda", "0", "--method", "direct", "--seed", "7"}, false},
      {"dynamic", {"dynamic", "--deg", at("base.txt"), "--lambda-grid", "-1,0,1", "--seed", "7"}, false},
      {"coalescent", {"coalescent", "--masses-file", at("m.txt"), "--time", "3", "--seed", "7", "--log", "@EXTRA"}, false},
      {"limit", {"limit", "--dist", at("d.json"), "--lambda", "0", "--replicas", "40", "-T", "20.48", "--dt", "0.005", "--seed", "7", "--jobs", "2"}, false},
      {"limit percolation", {"limit", "--dist", at("d.json"), "--lambda", "1", "--percolation", "--replicas", "20", "-T", "20.48", "--dt", "0.005", "--seed", "7"}, false},
      {"sweep direct", {"sweep", "--dist", at("d.json"), "--ns", "2000,4000", "--lambda", "0", "--replicas", "40", "--seed", "7", "--jobs", "2"}, true},
      {"sweep percolation", {"sweep", "--dist", at("d.json"), "--ns", "4000", "--grid", "-1,1", "--pipeline", "percolation", "--replicas", "20", "--seed", "7"}, true},
      {"sweep dynamic", {"sweep", "--dist", at("d.json"), "--ns", "4000", "--grid", "-1,1", "--pipeline", "dynamic", "--replicas", "10", "--seed", "7"}, true},
  };

  int identical = 0, total = 0;
  std::string broken;
  std::map<std::string, fs::path> first_outputs;
  for (const auto& c : cases) {
    std::string a, b;
    int codes[2] = {0, 0};
    for (int k = 0; k < 2; ++k) {
      const auto out = dir / ("run" + std::to_string(total) + "_" + std::to_string(k));
      const auto extra = out.string() + ".extra";
      auto args = c.args;
      for (auto& x : args)
        if (x == "@EXTRA") x = extra;
      args.insert(args.end(), {"--out", out.string()});
      codes[k] = cli::run(args);
      (k == 0 ? a : b) = snapshot(out) + (fs::exists(extra) ? slurp(extra) : std::string());
      if (k == 0) first_outputs[c.name] = out;
    }
    ++total;
    if (codes[0] == 0 && codes[1] == 0 && !a.empty() && a == b) ++identical;
    else broken += " " + c.name;
  }

  // compare on a sweep table, once per output format
  for (const std::string format : {"csv", "json"}) {
    std::string a, b;
    int codes[2] = {0, 0};
    for (int k = 0; k < 2; ++k) {
      const auto out = dir / ("compare_" + format + std::to_string(k));
      codes[k] = cli::run({"compare", "--table", (first_outputs["sweep direct"] / "ensemble.csv").string(),
                           "--dist", at("d.json"), "--pipeline", "direct", "--n", "4000", "--lambda", "0",
                           "--replicas", "200", "-T", "20.48", "--dt", "0.005", "--seed", "7",
                           "--format", format, "--out", out.string()});
      (k == 0 ? a : b) = slurp(out);
    }
    ++total;
    // exit 1 only reports failed thresholds; the summary must still match
    if (codes[0] == codes[1] && codes[0] <= 1 && !a.empty() && a == b) ++identical;
    else broken += " compare-" + format;
  }
  fs::remove_all(dir);
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                  " pipelines byte-identical on rerun" +
                                  (broken.empty() ? std::string() : ";" + broken)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> all{
      {1, ac1}, {2, ac2}, {3, ac3}, {4, ac4}, {5, ac5},
      {6, ac6}, {7, ac7}, {8, ac8}, {9, ac9}, {10, ac10}};
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::stoi(argv[i]));
  std::ofstream report("acceptance_results.txt");
  int failed = 0;
  for (const auto& [id, fn] : all) {
    if (!chosen.empty() && !chosen.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = fn();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line << "AC" << id << ' ' << (r.pass ? "PASS" : "FAIL") << ' ' << r.detail << " [" << std::fixed
         << std::setprecision(1) << secs << " s]";
    std::cout << line.str() << std::endl;
    report << line.str() << '\n';
    failed += !r.pass;
  }
  std::cout << "acceptance: " << failed << " criteria failed" << std::endl;
  report << "acceptance: " << failed << " criteria failed\n";
  return 0;
}
