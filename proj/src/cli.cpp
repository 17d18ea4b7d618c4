#include "cm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "cm/coalescent.hpp"
#include "cm/degrees.hpp"
#include "cm/dynamic.hpp"
#include "cm/exploration.hpp"
#include "cm/harness.hpp"
#include "cm/limit.hpp"
#include "cm/multigraph.hpp"
#include "cm/percolation.hpp"

namespace cm::cli {

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size() || !std::isfinite(v))
      throw std::invalid_argument("bad number '" + cell + "' in list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string deg, dist;
  std::int64_t n = 0;
  double lambda = 0;
  std::string grid;
  std::optional<double> p;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  bool dry_run = false;
  int jobs = 1;
  std::size_t top_k = 10;
  double horizon = 0;
  double dt = 0;
  int replicas = 0;
  std::string method = "grid";
  std::string mode = "tuned";
  std::string trace;
  std::string masses, masses_file, log;
  double time = 0;
  bool percolation = false;
  std::string table;
  std::string pipeline = "direct";
  std::string ns;
  std::optional<double> lambda1;
  int ranks = 3;
  int null_splits = 1000;
  int permutations = 4999;
};

std::uint64_t resolve_seed(const Flags& f) {
  if (f.seed) return *f.seed;
  if (const char* env = std::getenv("CM_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("CM_SEED: not an unsigned integer: '" + std::string(env) + "'");
  }
  throw UsageError("--seed: required (or set CM_SEED)");
}

void emit(const std::string& path, const std::string& contents) {
  if (path.empty()) std::cout << contents;
  else write_file_atomic(path, contents);
}

std::vector<double> grid_or_lambda(const Flags& f) {
  if (f.grid.empty()) return {f.lambda};
  try {
    return parse_grid(f.grid);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
}

void require_source(const Flags& f) {
  if (f.deg.empty() && f.dist.empty()) throw UsageError("--deg or --dist is required");
  if (!f.dist.empty() && f.n <= 0) throw UsageError("--n: required with --dist and must be positive");
}

// Critical sequences for explore; supercritical bases for percolate/dynamic.
DegreeSequence load_sequence(const Flags& f, bool tuned, Rng& rng) {
  if (!f.deg.empty()) return read_degrees_file(f.deg);
  const auto law = read_distribution_file(f.dist);
  if (tuned) return tune_to_critical(law, f.n, f.lambda, rng);
  return materialize_sequence(law, f.n, rng);
}

void add_source(CLI::App* app, Flags& f) {
  auto* deg = app->add_option("--deg", f.deg, "degree file (one integer per line, or JSON {n, counts})")
                  ->check(CLI::ExistingFile);
  auto* dist = app->add_option("--dist", f.dist, "degree distribution JSON {\"k\": p, ...}")
                   ->check(CLI::ExistingFile);
  auto* n = app->add_option("--n", f.n, "number of vertices (with --dist)");
  deg->excludes(dist);
  deg->excludes(n);
  dist->needs(n);
}

void add_seed(CLI::App* app, Flags& f) {
  app->add_option("--seed", f.seed, "base seed (falls back to $CM_SEED)");
}

void add_out(CLI::App* app, Flags& f, const std::string& what) {
  app->add_option("--out", f.out, what + " (stdout when omitted)");
}

void add_dry_run(CLI::App* app, Flags& f) {
  app->add_flag("--dry-run", f.dry_run, "validate flags and inputs, do not simulate");
}

int dry_run_ok() {
  std::cerr << "dry run: configuration is valid\n";
  return 0;
}

// --- subcommands ---

int cmd_gen(const Flags& f) {
  if (f.dist.empty()) throw UsageError("--dist: required");
  if (f.n <= 0) throw UsageError("--n: required and must be positive");
  if (f.mode != "tuned" && f.mode != "exact" && f.mode != "iid")
    throw UsageError("--mode: expected tuned, exact or iid");
  const auto law = read_distribution_file(f.dist);
  Rng rng(resolve_seed(f));
  if (f.dry_run) return dry_run_ok();
  DegreeSequence ds;
  if (f.mode == "tuned") ds = tune_to_critical(law, f.n, f.lambda, rng);
  else if (f.mode == "exact") ds = materialize_sequence(law, f.n, rng);
  else ds = sample_iid(law, f.n, rng);
  std::ostringstream out;
  if (f.format == "json") write_degrees_json(out, ds);
  else write_degrees_text(out, ds);
  emit(f.out, out.str());
  return 0;
}

int cmd_explore(const Flags& f) {
  require_source(f);
  Rng rng(resolve_seed(f));
  const auto ds = load_sequence(f, true, rng);
  if (f.dry_run) return dry_run_ok();
  const auto trace = explore(ds, rng);
  auto cv = to_component_vector(trace_components(trace), ds.n());
  if (f.top_k > 0 && cv.entries.size() > f.top_k) cv.entries.resize(f.top_k);
  std::ostringstream out;
  write_components_csv(out, cv);
  emit(f.out, out.str());
  if (!f.trace.empty()) {
    std::ostringstream t;
    write_trace_csv(t, trace);
    write_file_atomic(f.trace, t.str());
  }
  return 0;
}

void write_partition_rows(std::ostream& out, double lambda, const std::vector<ComponentSummary>& comps,
                          std::int64_t n, std::size_t top_k) {
  const auto cv = to_component_vector(comps, n);
  for (std::size_t r = 0; r < cv.entries.size() && (top_k == 0 || r < top_k); ++r) {
    const auto& e = cv.entries[r];
    out << lambda << ',' << r + 1 << ',' << e.rescaled_size << ',' << e.surplus << ','
        << e.open_halfedges << '\n';
  }
}

int cmd_percolate(const Flags& f) {
  require_source(f);
  if (f.method != "grid" && f.method != "explosion" && f.method != "direct")
    throw UsageError("--method: expected grid, explosion or direct");
  const auto lambdas = grid_or_lambda(f);
  if (f.method == "grid" && !std::is_sorted(lambdas.begin(), lambdas.end()))
    throw UsageError("--grid: values must be increasing");
  if (f.p && f.method == "grid") throw UsageError("--p: only with --method explosion or direct");
  if (f.p && !(*f.p > 0 && *f.p <= 1)) throw UsageError("--p: must lie in (0, 1]");
  Rng rng(resolve_seed(f));
  const auto ds = load_sequence(f, false, rng);
  const double nu = stats(ds).nu;
  if (!(nu > 1)) throw std::invalid_argument("percolate: the base sequence needs nu > 1");
  for (double l : lambdas) p_critical(nu, ds.n(), l);
  if (f.dry_run) return dry_run_ok();

  std::ostringstream out;
  out << std::setprecision(17);
  if (f.method == "grid") {
    write_grid_csv(out, coupled_grid(ds, lambdas, rng), f.top_k == 0 ? SIZE_MAX : f.top_k);
  } else {
    out << "lambda,rank,rescaled_size,surplus,open_halfedges\n";
    for (double l : lambdas) {
      const double p = f.p ? *f.p : p_critical(nu, ds.n(), l);
      if (f.method == "explosion") {
        const auto res = percolate_via_explosion(ds, p, rng);
        write_partition_rows(out, l, res.result.components, ds.n(), f.top_k);
      } else {
        const auto g = percolate_direct(uniform_match(ds, rng), p, rng);
        write_partition_rows(out, l, components(g), ds.n(), f.top_k);
      }
    }
  }
  emit(f.out, out.str());
  return 0;
}

int cmd_dynamic(const Flags& f) {
  require_source(f);
  const auto lambdas = grid_or_lambda(f);
  if (!std::is_sorted(lambdas.begin(), lambdas.end()))
    throw UsageError("--grid: values must be increasing");
  Rng rng(resolve_seed(f));
  const auto ds = load_sequence(f, false, rng);
  const auto st = stats(ds);
  if (!(st.nu > 1)) throw std::invalid_argument("dynamic: the base sequence needs nu > 1");
  const double t0 = t_map(st.nu, ds.n(), lambdas.front());
  if (t0 < 0) throw UsageError("--grid: first value maps to a negative time");
  if (f.dry_run) return dry_run_ok();

  const auto base = run_dynamic(ds, t0, {}, rng);
  const auto run = run_modified(base.graph, st.nu, ds.n(), lambdas.front(), lambdas.back(), lambdas, rng);
  std::ostringstream out;
  out << std::setprecision(17);
  out << "lambda,rank,rescaled_size,rescaled_mass,surplus,bad_edges_so_far\n";
  for (const auto& s : run.snapshots) {
    auto comps = s.components;
    std::sort(comps.begin(), comps.end(), [](const ModifiedComponent& a, const ModifiedComponent& b) {
      if (a.size != b.size) return a.size > b.size;
      if (a.surplus() != b.surplus()) return a.surplus() > b.surplus();
      return a.min_vertex < b.min_vertex;
    });
    for (std::size_t r = 0; r < comps.size() && (f.top_k == 0 || r < f.top_k); ++r) {
      const auto& c = comps[r];
      out << s.lambda << ',' << r + 1 << ',' << rescale(c.size, ds.n()) << ','
          << static_cast<double>(c.mass) / run.beta << ',' << c.surplus() << ',' << s.bad_edges
          << '\n';
    }
  }
  emit(f.out, out.str());
  return 0;
}

std::vector<double> read_masses(const Flags& f) {
  if (f.masses.empty() == f.masses_file.empty())
    throw UsageError("exactly one of --masses and --masses-file is required");
  std::vector<double> m;
  if (!f.masses.empty()) {
    try {
      m = parse_grid(f.masses);
    } catch (const std::exception& e) {
      throw UsageError(std::string("--masses: ") + e.what());
    }
  } else {
    std::ifstream in(f.masses_file);
    if (!in) throw UsageError("--masses-file: cannot read " + f.masses_file);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) m.push_back(std::stod(line));
  }
  for (double v : m)
    if (!(v > 0)) throw UsageError("--masses: masses must be positive");
  return m;
}

int cmd_coalescent(const Flags& f) {
  const auto masses = read_masses(f);
  if (!(f.time >= 0)) throw UsageError("--time: must be non-negative");
  Rng rng(resolve_seed(f));
  if (f.dry_run) return dry_run_ok();
  CoalescentState s;
  for (double m : masses) s.particles.push_back({m, m});
  std::vector<CoalescentMerge> log;
  auto end = simulate(s, f.time, rng, f.log.empty() ? nullptr : &log);
  std::sort(end.particles.begin(), end.particles.end(),
            [](const Particle& a, const Particle& b) { return a.mass > b.mass; });
  std::ostringstream out;
  out << std::setprecision(17) << "rank,mass\n";
  for (std::size_t i = 0; i < end.particles.size(); ++i)
    out << i + 1 << ',' << end.particles[i].mass << '\n';
  emit(f.out, out.str());
  if (!f.log.empty()) {
    std::ostringstream l;
    write_merge_log_csv(l, log);
    write_file_atomic(f.log, l.str());
  }
  return 0;
}

int cmd_limit(const Flags& f) {
  if (f.dist.empty()) throw UsageError("--dist: required");
  if (f.replicas < 1) throw UsageError("--replicas: must be positive");
  if (f.horizon < 0) throw UsageError("-T: must be non-negative");
  if (f.dt < 0) throw UsageError("--dt: must be non-negative");
  const auto law = read_distribution_file(f.dist);
  LimitParams params;
  double scale = 1;
  if (f.percolation) {
    const auto ps = percolation_scaling(law, law.nu());
    params = ps.at(f.lambda);
    scale = ps.size_scale;
  } else {
    params = limit_params(law, f.lambda);
  }
  const auto seed = resolve_seed(f);
  if (f.dry_run) return dry_run_ok();
  const auto e = sample_limit_ensemble(params, scale, f.replicas, seed, f.top_k, f.horizon, f.dt, f.jobs);
  std::ostringstream out;
  write_ensemble_csv(out, e.vectors);
  emit(f.out, out.str());
  return 0;
}

std::string comparison_csv(const ComparisonReport& r) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "check,statistic,p_value,ci_lo,ci_hi,threshold,pass\n";
  for (const auto& k : r.ranks)
    out << "ks_rank" << k.rank << ',' << k.ks << ',' << k.p_value << ',' << k.ci.lo << ','
        << k.ci.hi << ',' << k.null_threshold << ',' << (k.pass ? 1 : 0) << '\n';
  out << "surplus_chi2," << r.surplus.statistic << ',' << r.surplus.p_value << ",,,0.01,"
      << (r.surplus_pass ? 1 : 0) << '\n';
  return out.str();
}

std::string joint_csv(const JointReport& r) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "check,statistic,p_value,threshold,pass\n";
  out << "refinement," << r.refined << ",," << r.replicas << ',' << (r.refined == r.replicas ? 1 : 0)
      << '\n';
  out << "energy," << r.energy.statistic << ',' << r.energy.p_value << ',' << r.alpha << ','
      << (r.energy.p_value >= r.alpha ? 1 : 0) << '\n';
  return out.str();
}

int cmd_compare(const Flags& f) {
  if (f.table.empty()) throw UsageError("--table: required");
  if (f.dist.empty()) throw UsageError("--dist: required");
  if (f.n <= 0) throw UsageError("--n: required and must be positive");
  if (f.format != "csv" && f.format != "json") throw UsageError("--format: expected csv or json");
  Pipeline pipeline;
  try {
    pipeline = parse_pipeline(f.pipeline);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--pipeline: ") + e.what());
  }
  const auto law = read_distribution_file(f.dist);
  std::ifstream in(f.table);
  if (!in) throw UsageError("--table: cannot read " + f.table);
  const auto table = read_table_csv(in);
  const auto seed = resolve_seed(f);
  const int pool = f.replicas > 0 ? f.replicas : 4000;

  LimitParams params;
  double scale = 1;
  std::optional<PercolationScaling> ps;
  if (pipeline == Pipeline::kDirect) {
    params = limit_params(critical_mixture(law, 1.0), f.lambda);
  } else {
    ps = percolation_scaling(law, law.nu());
    params = ps->at(f.lambda);
    scale = ps->size_scale;
  }
  if (f.dry_run) return dry_run_ok();

  const std::string name = f.pipeline + "_n" + std::to_string(f.n);
  bool pass = false;
  if (f.lambda1) {
    if (!ps) throw UsageError("--lambda1: needs a coupled pipeline (percolation or dynamic)");
    const auto joint = sample_joint_limit(params, (*f.lambda1 - f.lambda) * ps->lambda_scale, scale,
                                          pool, derive_seed(seed, 1), f.horizon, f.dt, f.jobs);
    const auto rep = joint_lambda_check(table, f.n, f.lambda, *f.lambda1, joint, f.permutations,
                                        derive_seed(seed, 2));
    emit(f.out, f.format == "json" ? summary_json(name, rep) + "\n" : joint_csv(rep));
    pass = rep.pass;
  } else {
    const auto limit = sample_limit_ensemble(params, scale, pool, derive_seed(seed, 1),
                                             static_cast<std::size_t>(f.ranks), f.horizon, f.dt,
                                             f.jobs);
    LimitEnsemble tagged = limit;
    tagged.lambda = f.lambda;
    ComparisonOptions opts;
    opts.ranks = f.ranks;
    opts.null_splits = f.null_splits;
    opts.seed = derive_seed(seed, 2);
    const auto rep = compare_to_limit(table, pipeline, f.n, f.lambda, tagged, opts);
    emit(f.out, f.format == "json" ? summary_json(name, rep) + "\n" : comparison_csv(rep));
    pass = rep.pass;
  }
  return pass ? 0 : 1;
}

int cmd_sweep(const Flags& f) {
  if (f.out.empty()) throw UsageError("--out: output directory required");
  if (f.deg.empty() && f.dist.empty()) throw UsageError("--deg or --dist is required");
  ExperimentConfig cfg;
  try {
    cfg.pipeline = parse_pipeline(f.pipeline);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--pipeline: ") + e.what());
  }
  if (!f.deg.empty()) {
    cfg.degrees = read_degrees_file(f.deg);
  } else {
    cfg.dist = read_distribution_file(f.dist);
    if (f.ns.empty()) throw UsageError("--ns: required with --dist");
    std::vector<double> ns;
    try {
      ns = parse_grid(f.ns);
    } catch (const std::exception& e) {
      throw UsageError(std::string("--ns: ") + e.what());
    }
    for (double v : ns) {
      if (v < 1 || v != std::floor(v)) throw UsageError("--ns: sizes must be positive integers");
      cfg.ns.push_back(static_cast<std::int64_t>(v));
    }
  }
  cfg.lambdas = grid_or_lambda(f);
  cfg.replicas = f.replicas > 0 ? f.replicas : 2;
  cfg.seed = resolve_seed(f);
  cfg.top_k = f.top_k == 0 ? 3 : f.top_k;
  cfg.output_dir = f.out;
  cfg.jobs = f.jobs;
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (f.dry_run) return dry_run_ok();
  const auto table = run_experiment(cfg);
  std::cerr << "wrote " << table.rows.size() << " rows to " << f.out << "/ensemble.csv\n";
  return 0;
}

const char* kEnsembleColumns =
    "ensemble.csv: pipeline,n,lambda,replica,seed,rank,size,rescaled_size,surplus,refined";

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Critical configuration model simulator", "cm"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 1 compare thresholds failed, 2 usage or runtime error.\n"
             "Seeds: --seed, or $CM_SEED when the flag is absent.");
  Flags f;

  auto* gen = app.add_subcommand("gen", "generate a degree sequence");
  gen->add_option("--dist", f.dist, "degree distribution JSON")->check(CLI::ExistingFile);
  gen->add_option("--n", f.n, "number of vertices");
  gen->add_option("--lambda", f.lambda, "window location for --mode tuned");
  gen->add_option("--mode", f.mode,
                  "tuned: critical at lambda; exact: materialized counts; iid: i.i.d. draws")
      ->capture_default_str();
  gen->add_option("--format", f.format, "csv (one degree per line) or json {n, counts}")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  add_seed(gen, f);
  add_out(gen, f, "degree file");
  add_dry_run(gen, f);

  auto* exp = app.add_subcommand("explore", "depth-first exploration of CM_n(d)");
  add_source(exp, f);
  exp->add_option("--lambda", f.lambda, "window location when tuning --dist");
  exp->add_option("--top-k", f.top_k, "rows to keep, 0 for all")->capture_default_str();
  exp->add_option("--trace", f.trace, "also write the walk: stage,vertex,degree,c,S,s,A");
  add_seed(exp, f);
  add_out(exp, f, "components CSV");
  add_dry_run(exp, f);
  exp->footer("Output: rank,size,edges,surplus,open_halfedges (size desc, surplus desc).\n"
              "--dist is tuned to the window at --lambda; --deg is used as given.");

  auto* perc = app.add_subcommand("percolate", "bond percolation at p_n(lambda)");
  add_source(perc, f);
  perc->add_option("--lambda", f.lambda, "window location")->capture_default_str();
  perc->add_option("--grid", f.grid, "comma-separated lambda grid (overrides --lambda)");
  perc->add_option("--method", f.method, "grid (coupled), explosion or direct")->capture_default_str();
  perc->add_option("--p", f.p, "retention probability (explosion/direct only)");
  perc->add_option("--top-k", f.top_k, "rows per lambda, 0 for all")->capture_default_str();
  add_seed(perc, f);
  add_out(perc, f, "results CSV");
  add_dry_run(perc, f);
  perc->footer("Output: lambda,rank,rescaled_size,surplus,open_halfedges.\n"
               "--dist is materialized as the supercritical base sequence.");

  auto* dyn = app.add_subcommand("dynamic", "exponential-clock construction and kept-alive process");
  add_source(dyn, f);
  dyn->add_option("--grid,--lambda-grid", f.grid, "comma-separated increasing lambda grid");
  dyn->add_option("--lambda", f.lambda, "single lambda when no grid is given");
  dyn->add_option("--top-k", f.top_k, "rows per lambda, 0 for all")->capture_default_str();
  add_seed(dyn, f);
  add_out(dyn, f, "trajectory CSV");
  add_dry_run(dyn, f);
  dyn->footer("Output: lambda,rank,rescaled_size,rescaled_mass,surplus,bad_edges_so_far.\n"
              "The standard process runs to t_n(first lambda); the kept-alive process then\n"
              "covers the grid. rescaled_mass is the kept-alive mass divided by beta_n.");

  auto* coal = app.add_subcommand("coalescent", "multiplicative coalescent");
  coal->add_option("--masses", f.masses, "comma-separated initial masses");
  coal->add_option("--masses-file", f.masses_file, "one initial mass per line")
      ->check(CLI::ExistingFile);
  coal->add_option("--time", f.time, "run length")->capture_default_str();
  coal->add_option("--log", f.log, "also write merges: time,i,j,new_mass,new_weight");
  add_seed(coal, f);
  add_out(coal, f, "final masses CSV");
  add_dry_run(coal, f);
  coal->footer("Output: rank,mass (descending).");

  auto* lim = app.add_subcommand("limit", "sample excursion vectors of the scaling limit");
  lim->add_option("--dist", f.dist, "degree distribution JSON")->check(CLI::ExistingFile);
  lim->add_option("--lambda", f.lambda, "window location")->capture_default_str();
  lim->add_option("--replicas", f.replicas, "number of paths");
  lim->add_option("-T,--horizon", f.horizon, "path horizon, 0 for the default");
  lim->add_option("--dt", f.dt, "time step, 0 for horizon / 2^20");
  lim->add_option("--top-k", f.top_k, "excursions kept per path, 0 for all")->capture_default_str();
  lim->add_flag("--percolation", f.percolation, "limit of percolation clusters of --dist at p ~ 1/nu");
  lim->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  add_seed(lim, f);
  add_out(lim, f, "ensemble CSV");
  add_dry_run(lim, f);
  lim->footer("Output: replica,rank,length,marks,truncated.");

  auto* cmp = app.add_subcommand("compare", "compare an ensemble table with the scaling limit");
  cmp->add_option("--table", f.table, "ensemble.csv written by sweep")->check(CLI::ExistingFile);
  cmp->add_option("--dist", f.dist, "degree distribution the table was generated from")
      ->check(CLI::ExistingFile);
  cmp->add_option("--pipeline", f.pipeline, "direct, percolation or dynamic")->capture_default_str();
  cmp->add_option("--n", f.n, "table slice: number of vertices");
  cmp->add_option("--lambda", f.lambda, "table slice: lambda")->capture_default_str();
  cmp->add_option("--lambda1", f.lambda1, "second lambda: joint check on coupled pipelines");
  cmp->add_option("--replicas", f.replicas, "limit ensemble size (default 4000)");
  cmp->add_option("--ranks", f.ranks, "ranks compared")->capture_default_str();
  cmp->add_option("--null-splits", f.null_splits, "splits for the null band")->capture_default_str();
  cmp->add_option("--permutations", f.permutations, "energy test permutations")->capture_default_str();
  cmp->add_option("-T,--horizon", f.horizon, "path horizon, 0 for the default");
  cmp->add_option("--dt", f.dt, "time step, 0 for horizon / 2^20");
  cmp->add_option("--format", f.format, "summary format: csv or json")->capture_default_str();
  cmp->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  add_seed(cmp, f);
  add_out(cmp, f, "summary");
  add_dry_run(cmp, f);
  cmp->footer("CSV summary: check,statistic,p_value,ci_lo,ci_hi,threshold,pass\n"
              "joint CSV summary: check,statistic,p_value,threshold,pass\n"
              "JSON summary: {experiment, thresholds, statistics, pass}\n"
              "Exit 1 when a threshold fails.");

  auto* sweep = app.add_subcommand("sweep", "replicated experiment over n and lambda");
  sweep->add_option("--deg", f.deg, "fixed degree file")->check(CLI::ExistingFile);
  sweep->add_option("--dist", f.dist, "degree distribution JSON")->check(CLI::ExistingFile);
  sweep->add_option("--ns", f.ns, "comma-separated vertex counts");
  sweep->add_option("--grid", f.grid, "comma-separated lambda grid");
  sweep->add_option("--lambda", f.lambda, "single lambda when no grid is given");
  sweep->add_option("--pipeline", f.pipeline, "direct, percolation or dynamic")->capture_default_str();
  sweep->add_option("--replicas", f.replicas, "replicas per n (>= 2)");
  sweep->add_option("--top-k", f.top_k, "ranks recorded")->capture_default_str();
  sweep->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  add_seed(sweep, f);
  sweep->add_option("--out", f.out, "output directory (parts/ and ensemble.csv)");
  add_dry_run(sweep, f);
  sweep->footer(std::string("Output: ") + kEnsembleColumns +
                "\nReplica files in parts/ are reused when the sweep is rerun.");

  if (!args.empty() && !args.front().empty() && args.front()[0] != '-') {
    const auto subs = app.get_subcommands([](const CLI::App*) { return true; });
    const bool known = std::any_of(subs.begin(), subs.end(),
                                   [&](const CLI::App* s) { return s->get_name() == args.front(); });
    if (!known) {
      std::cerr << "cm: unknown subcommand '" << args.front() << "'\n";
      return 2;
    }
  }

  std::vector<std::string> storage{"cm"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) return cmd_gen(f);
    if (*exp) return cmd_explore(f);
    if (*perc) return cmd_percolate(f);
    if (*dyn) return cmd_dynamic(f);
    if (*coal) return cmd_coalescent(f);
    if (*lim) return cmd_limit(f);
    if (*cmp) return cmd_compare(f);
    if (*sweep) return cmd_sweep(f);
  } catch (const UsageError& e) {
    std::cerr << "cm: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "cm: error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace cm::cli
