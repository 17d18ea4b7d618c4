#include "cm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "cm/coalescent.hpp"
#include "cm/dynamic.hpp"
#include "cm/exploration.hpp"
#include "cm/multigraph.hpp"
#include "cm/percolation.hpp"

namespace cm {

namespace fs = std::filesystem;

std::string to_string(Pipeline p) {
  switch (p) {
    case Pipeline::kDirect: return "direct";
    case Pipeline::kPercolation: return "percolation";
    case Pipeline::kDynamic: return "dynamic";
  }
  return "?";
}

Pipeline parse_pipeline(const std::string& s) {
  if (s == "direct") return Pipeline::kDirect;
  if (s == "percolation") return Pipeline::kPercolation;
  if (s == "dynamic") return Pipeline::kDynamic;
  throw std::invalid_argument("unknown pipeline '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (dist.has_value() == degrees.has_value())
    throw std::invalid_argument("config: exactly one of dist and degrees is required");
  if (!degrees && ns.empty()) throw std::invalid_argument("config: n grid is empty");
  for (auto n : ns)
    if (n <= 0) throw std::invalid_argument("config: n must be positive");
  if (lambdas.empty()) throw std::invalid_argument("config: lambda grid is empty");
  if (pipeline != Pipeline::kDirect && !std::is_sorted(lambdas.begin(), lambdas.end()))
    throw std::invalid_argument("config: lambda grid must be sorted for coupled pipelines");
  if (replicas < 2) throw std::invalid_argument("config: replicas must be >= 2");
  if (top_k == 0) throw std::invalid_argument("config: top_k must be positive");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
}

double rescale(std::int64_t size, std::int64_t n) {
  return static_cast<double>(size) * std::pow(static_cast<double>(n), -2.0 / 3.0);
}

std::uint64_t replica_seed(std::uint64_t base, std::int64_t n, int replica) {
  return derive_seed(derive_seed(base, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(replica));
}

namespace {

constexpr std::uint64_t kDegreeStream = 0x6465677265657300ULL;

// One sequence per lambda for direct runs, one base sequence otherwise.
std::vector<DegreeSequence> degree_sequences(const ExperimentConfig& cfg, std::int64_t n) {
  if (cfg.degrees) return {*cfg.degrees};
  const auto base = derive_seed(cfg.seed ^ kDegreeStream, static_cast<std::uint64_t>(n));
  if (cfg.pipeline == Pipeline::kDirect) {
    std::vector<DegreeSequence> out;
    for (std::size_t k = 0; k < cfg.lambdas.size(); ++k) {
      Rng rng(derive_seed(base, k));
      out.push_back(tune_to_critical(*cfg.dist, n, cfg.lambdas[k], rng));
    }
    return out;
  }
  Rng rng(base);
  return {materialize_sequence(*cfg.dist, n, rng)};
}

void append_rows(std::vector<EnsembleRow>& rows, const std::vector<ComponentSummary>& comps,
                 const ExperimentConfig& cfg, std::int64_t n, double lambda, int replica,
                 std::uint64_t seed) {
  const auto cv = to_component_vector(comps, n);
  for (std::size_t r = 0; r < cv.entries.size() && r < cfg.top_k; ++r) {
    const auto& e = cv.entries[r];
    rows.push_back({cfg.pipeline, n, lambda, replica, seed, static_cast<int>(r + 1), e.size,
                    rescale(e.size, n), e.surplus, true});
  }
}

std::vector<EnsembleRow> replica_rows(const ExperimentConfig& cfg,
                                      const std::vector<DegreeSequence>& seqs, int replica) {
  const std::int64_t n = seqs.front().n();
  const auto seed = replica_seed(cfg.seed, n, replica);
  Rng rng(seed);
  std::vector<EnsembleRow> rows;
  bool refined = true;
  switch (cfg.pipeline) {
    case Pipeline::kDirect:
      for (std::size_t k = 0; k < cfg.lambdas.size(); ++k) {
        const auto& ds = seqs[cfg.degrees ? 0 : k];
        append_rows(rows, trace_components(explore(ds, rng)), cfg, n, cfg.lambdas[k], replica, seed);
      }
      break;
    case Pipeline::kPercolation: {
      const auto grid = coupled_grid(seqs.front(), cfg.lambdas, rng);
      refined = grid.refinement_holds();
      for (const auto& s : grid.snapshots)
        append_rows(rows, s.partition.components, cfg, n, s.lambda, replica, seed);
      break;
    }
    case Pipeline::kDynamic: {
      const double nu = stats(seqs.front()).nu;
      std::vector<double> times;
      for (double l : cfg.lambdas) times.push_back(t_map(nu, n, l));
      const auto run = run_dynamic(seqs.front(), times.back(), times, rng);
      for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        if (k > 0)
          refined = refined && refines(run.snapshots[k - 1].partition.label,
                                       run.snapshots[k].partition.label);
        append_rows(rows, run.snapshots[k].partition.components, cfg, n, cfg.lambdas[k], replica,
                    seed);
      }
      break;
    }
  }
  for (auto& r : rows) r.refined = refined;
  return rows;
}

template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  if (threads == 1 || count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

std::string part_path(const std::string& dir, std::int64_t n, int replica) {
  return (fs::path(dir) / "parts" / ("n" + std::to_string(n) + "_r" + std::to_string(replica) + ".csv"))
      .string();
}

// A stored part is reused only if it was written for this configuration.
bool part_matches(const std::vector<EnsembleRow>& rows, const ExperimentConfig& cfg, std::int64_t n,
                  int replica) {
  if (rows.empty()) return false;
  const auto seed = replica_seed(cfg.seed, n, replica);
  std::vector<double> seen;
  for (const auto& r : rows) {
    if (r.pipeline != cfg.pipeline || r.n != n || r.replica != replica || r.seed != seed ||
        r.rank < 1 || static_cast<std::size_t>(r.rank) > cfg.top_k)
      return false;
    if (seen.empty() || seen.back() != r.lambda) seen.push_back(r.lambda);
  }
  return seen == cfg.lambdas;
}

std::string table_csv(const std::vector<EnsembleRow>& rows) {
  std::ostringstream out;
  write_table_csv(out, EnsembleTable{rows});
  return out.str();
}

}  // namespace

std::vector<EnsembleRow> run_replica(const ExperimentConfig& cfg, std::int64_t n, int replica) {
  cfg.validate();
  return replica_rows(cfg, degree_sequences(cfg, n), replica);
}

EnsembleTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::int64_t> ns = cfg.ns;
  if (cfg.degrees) ns = {cfg.degrees->n()};
  if (!cfg.output_dir.empty()) fs::create_directories(fs::path(cfg.output_dir) / "parts");

  EnsembleTable table;
  for (auto n : ns) {
    const auto seqs = degree_sequences(cfg, n);
    std::vector<std::vector<EnsembleRow>> parts(static_cast<std::size_t>(cfg.replicas));
    parallel_for(parts.size(), cfg.jobs, [&](std::size_t i) {
      const int replica = static_cast<int>(i);
      if (!cfg.output_dir.empty()) {
        const auto path = part_path(cfg.output_dir, n, replica);
        std::ifstream in(path);
        if (in) {
          auto rows = read_table_csv(in).rows;
          if (part_matches(rows, cfg, n, replica)) {
            parts[i] = std::move(rows);
            return;
          }
        }
      }
      parts[i] = replica_rows(cfg, seqs, replica);
      if (!cfg.output_dir.empty())
        write_file_atomic(part_path(cfg.output_dir, n, replica), table_csv(parts[i]));
    });
    for (auto& p : parts) table.rows.insert(table.rows.end(), p.begin(), p.end());
  }
  if (!cfg.output_dir.empty())
    write_file_atomic((fs::path(cfg.output_dir) / "ensemble.csv").string(), table_csv(table.rows));
  return table;
}

void write_table_csv(std::ostream& out, const EnsembleTable& table) {
  out << "pipeline,n,lambda,replica,seed,rank,size,rescaled_size,surplus,refined\n";
  out << std::setprecision(17);
  for (const auto& r : table.rows)
    out << to_string(r.pipeline) << ',' << r.n << ',' << r.lambda << ',' << r.replica << ','
        << r.seed << ',' << r.rank << ',' << r.size << ',' << r.rescaled_size << ',' << r.surplus
        << ',' << (r.refined ? 1 : 0) << '\n';
}

EnsembleTable read_table_csv(std::istream& in) {
  EnsembleTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ensemble CSV: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) throw std::runtime_error("ensemble CSV: bad row '" + line + "'");
    EnsembleRow r;
    r.pipeline = parse_pipeline(f[0]);
    r.n = std::stoll(f[1]);
    r.lambda = std::stod(f[2]);
    r.replica = std::stoi(f[3]);
    r.seed = std::stoull(f[4]);
    r.rank = std::stoi(f[5]);
    r.size = std::stoll(f[6]);
    r.rescaled_size = std::stod(f[7]);
    r.surplus = std::stoll(f[8]);
    r.refined = f[9] == "1";
    t.rows.push_back(r);
  }
  return t;
}

namespace {

template <class Get>
auto rank_values(const EnsembleTable& t, Pipeline p, std::int64_t n, double lambda, int rank,
                 Get get) {
  using V = decltype(get(t.rows.front()));
  std::map<int, V> by_replica;
  std::map<int, bool> seen;
  for (const auto& r : t.rows) {
    if (r.pipeline != p || r.n != n || r.lambda != lambda) continue;
    seen[r.replica] = true;
    if (r.rank == rank) by_replica[r.replica] = get(r);
  }
  std::vector<V> out;
  for (const auto& [rep, _] : seen) {
    auto it = by_replica.find(rep);
    out.push_back(it == by_replica.end() ? V{} : it->second);
  }
  return out;
}

}  // namespace

std::vector<double> rank_sizes(const EnsembleTable& t, Pipeline p, std::int64_t n, double lambda,
                               int rank) {
  if (t.rows.empty()) return {};
  return rank_values(t, p, n, lambda, rank, [](const EnsembleRow& r) { return r.rescaled_size; });
}

std::vector<std::int64_t> rank_surplus(const EnsembleTable& t, Pipeline p, std::int64_t n,
                                       double lambda, int rank) {
  if (t.rows.empty()) return {};
  return rank_values(t, p, n, lambda, rank, [](const EnsembleRow& r) { return r.surplus; });
}

LimitEnsemble sample_limit_ensemble(const LimitParams& params, double size_scale, int count,
                                    std::uint64_t seed, std::size_t top_k, double horizon,
                                    double dt, int jobs) {
  LimitEnsemble e;
  e.lambda = params.lambda;
  e.params = params;
  e.size_scale = size_scale;
  e.horizon = horizon > 0 ? horizon : default_horizon(params);
  e.dt = dt > 0 ? dt : e.horizon / static_cast<double>(1 << 20);
  e.vectors.resize(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(e.vectors.size(), jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    e.vectors[i] = sample_limit_vector(params, e.horizon, e.dt, rng, top_k, size_scale);
  });
  return e;
}

LimitParams PercolationScaling::at(double lambda) const {
  LimitParams p = limit.params;
  p.lambda = lambda * lambda_scale;
  return p;
}

PercolationScaling percolation_scaling(const ProbabilityVector& dist, double nu) {
  PercolationScaling s;
  s.limit = percolation_limit_params(dist, nu, 0.0);
  s.size_scale = std::pow(s.limit.zeta, 2.0 / 3.0) / s.limit.sqrt_nu;
  s.lambda_scale = std::cbrt(s.limit.zeta);
  return s;
}

PercolationScaling stated_percolation_scaling(const ProbabilityVector& dist, double nu) {
  PercolationScaling s;
  s.limit = percolation_limit_params(dist, nu, 0.0);
  s.size_scale = std::pow(s.limit.zeta, 2.0 / 3.0) * s.limit.sqrt_nu;
  s.lambda_scale = 1.0;
  return s;
}

ComparisonReport compare_to_limit(const EnsembleTable& table, Pipeline pipeline, std::int64_t n,
                                  double lambda, const LimitEnsemble& limit,
                                  const ComparisonOptions& opts) {
  if (std::abs(limit.lambda - lambda) > 1e-12)
    throw std::invalid_argument("compare_to_limit: metadata mismatch (lambda " +
                                std::to_string(lambda) + " vs limit " +
                                std::to_string(limit.lambda) + ")");
  ComparisonReport rep;
  std::vector<const LimitVector*> pool;
  for (const auto& v : limit.vectors) {
    if (v.truncated) ++rep.excluded_truncated;
    else pool.push_back(&v);
  }
  const auto finite1 = rank_sizes(table, pipeline, n, lambda, 1);
  if (finite1.empty()) throw std::invalid_argument("compare_to_limit: no finite-n rows for this slice");
  const std::size_t m = finite1.size();
  if (pool.size() < m + 2)
    throw std::invalid_argument("compare_to_limit: limit ensemble too small for " +
                                std::to_string(m) + " finite replicas");
  const std::size_t ref = std::min(pool.size() / 2, pool.size() - m);
  rep.reference_size = ref;
  Rng rng(opts.seed);

  auto limit_rank = [&](int rank) {
    std::vector<double> v;
    for (const auto* lv : pool)
      v.push_back(static_cast<std::size_t>(rank) <= lv->entries.size()
                      ? lv->entries[static_cast<std::size_t>(rank - 1)].length
                      : 0.0);
    return v;
  };

  rep.pass = true;
  for (int rank = 1; rank <= opts.ranks; ++rank) {
    const auto finite = rank_sizes(table, pipeline, n, lambda, rank);
    const auto all = limit_rank(rank);
    const std::span<const double> reference(all.data(), ref);
    RankComparison rc;
    rc.rank = rank;
    rc.ks = statistics::ks_distance(finite, reference);
    rc.p_value = statistics::ks_two_sample_pvalue(rc.ks, finite.size(), reference.size());
    rc.ci = statistics::bootstrap_ks(finite, reference, opts.bootstrap, 0.95, rng);
    rc.null_threshold = statistics::ks_split_null_quantile(all, finite.size(), ref, opts.null_splits,
                                                           opts.null_quantile, rng);
    rc.pass = rc.ks <= rc.null_threshold;
    rep.pass = rep.pass && rc.pass;
    rep.ranks.push_back(rc);
  }

  const auto surplus = rank_surplus(table, pipeline, n, lambda, 1);
  std::vector<std::int64_t> marks;
  for (std::size_t i = 0; i < ref; ++i)
    marks.push_back(pool[i]->entries.empty() ? 0 : pool[i]->entries.front().marks);
  rep.surplus = statistics::chi_square_two_sample(surplus, marks);
  rep.surplus_pass = rep.surplus.p_value >= opts.surplus_alpha;
  rep.pass = rep.pass && rep.surplus_pass;
  return rep;
}

std::vector<statistics::Point2> sample_joint_limit(const LimitParams& at_lambda0,
                                                   double delta_lambda, double size_scale,
                                                   int count, std::uint64_t seed, double horizon,
                                                   double dt, int jobs) {
  if (delta_lambda < 0) throw std::invalid_argument("sample_joint_limit: negative increment");
  const double T = horizon > 0 ? horizon : default_horizon(at_lambda0);
  const double step = dt > 0 ? dt : T / static_cast<double>(1 << 20);
  const double root_mu = std::sqrt(at_lambda0.mu);
  std::vector<statistics::Point2> out(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const auto lv = sample_limit_vector(at_lambda0, T, step, rng, 0, 1.0);
    CoalescentState s;
    for (const auto& e : lv.entries) s.particles.push_back({e.length / root_mu, e.length});
    const double top0 = lv.entries.empty() ? 0.0 : lv.entries.front().length;
    const auto evolved = simulate(s, delta_lambda, rng);
    // weights carry the summed lengths, so no round trip through the mass scale
    double top1 = 0, top_mass = -1;
    for (const auto& p : evolved.particles)
      if (p.mass > top_mass) {
        top_mass = p.mass;
        top1 = p.weight;
      }
    out[i] = {top0 * size_scale, top1 * size_scale};
  });
  return out;
}

JointReport joint_lambda_check(const EnsembleTable& table, std::int64_t n, double lambda0,
                               double lambda1, const std::vector<statistics::Point2>& limit_joint,
                               int permutations, std::uint64_t seed, double alpha) {
  std::map<int, statistics::Point2> pts;
  std::map<int, bool> refined;
  bool coupled = false;
  for (const auto& r : table.rows) {
    if (r.n != n) continue;
    if (r.pipeline == Pipeline::kDirect) continue;
    coupled = true;
    if (r.lambda == lambda0 || r.lambda == lambda1) {
      auto it = refined.find(r.replica);
      refined[r.replica] = (it == refined.end() ? true : it->second) && r.refined;
      pts.try_emplace(r.replica, statistics::Point2{0.0, 0.0});
    }
    if (r.rank != 1) continue;
    if (r.lambda == lambda0) pts[r.replica][0] = r.rescaled_size;
    if (r.lambda == lambda1) pts[r.replica][1] = r.rescaled_size;
  }
  if (!coupled) throw std::invalid_argument("joint_lambda_check: uncoupled inputs");
  JointReport rep;
  rep.alpha = alpha;
  rep.replicas = pts.size();
  for (const auto& [_, ok] : refined) rep.refined += ok ? 1 : 0;
  std::vector<statistics::Point2> finite;
  for (const auto& [_, p] : pts) finite.push_back(p);
  if (finite.empty() || limit_joint.empty())
    throw std::invalid_argument("joint_lambda_check: empty sample");
  Rng rng(seed);
  rep.energy = statistics::energy_test(finite, limit_joint, permutations, rng);
  rep.pass = rep.refined == rep.replicas && rep.energy.p_value >= alpha;
  return rep;
}

std::string summary_json(const std::string& experiment, const ComparisonReport& report) {
  nlohmann::json j;
  j["experiment"] = experiment;
  nlohmann::json ranks = nlohmann::json::array();
  nlohmann::json thresholds = nlohmann::json::object();
  for (const auto& r : report.ranks) {
    ranks.push_back({{"rank", r.rank},
                     {"ks", r.ks},
                     {"p_value", r.p_value},
                     {"ci", {r.ci.lo, r.ci.hi}},
                     {"pass", r.pass}});
    thresholds["ks_rank" + std::to_string(r.rank)] = r.null_threshold;
  }
  thresholds["surplus_min_p"] = 0.01;
  j["thresholds"] = thresholds;
  j["statistics"] = {{"ranks", ranks},
                     {"surplus_chi2", report.surplus.statistic},
                     {"surplus_dof", report.surplus.dof},
                     {"surplus_p", report.surplus.p_value},
                     {"reference_size", report.reference_size},
                     {"excluded_truncated", report.excluded_truncated}};
  j["pass"] = report.pass;
  return j.dump(2);
}

std::string summary_json(const std::string& experiment, const JointReport& report) {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["thresholds"] = {{"energy_min_p", report.alpha}, {"refined_fraction", 1.0}};
  j["statistics"] = {{"replicas", report.replicas},
                     {"refined", report.refined},
                     {"energy", report.energy.statistic},
                     {"energy_p", report.energy.p_value},
                     {"permutations", report.energy.permutations}};
  j["pass"] = report.pass;
  return j.dump(2);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace cm
