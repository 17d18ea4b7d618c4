#include "cm/limit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

namespace cm {

LimitParams limit_params(double mu, double sigma2, double sigma3, double lambda) {
  if (!(mu > 0)) throw std::invalid_argument("limit_params: mean degree must be positive");
  const double eta = sigma3 * mu - sigma2 * sigma2;
  if (!(eta > 1e-12 * sigma3 * mu))
    throw std::invalid_argument("limit_params: eta = " + std::to_string(eta) +
                                " <= 0, degenerate degree law");
  return {mu, eta, 1.0 / mu, lambda};
}

LimitParams limit_params(const ProbabilityVector& dist, double lambda) {
  return limit_params(dist.moment(1), dist.moment(2), dist.moment(3), lambda);
}

PercolationLimit percolation_limit_params(const ProbabilityVector& dist, double nu,
                                          double lambda) {
  if (!(nu > 1)) throw std::invalid_argument("percolation_limit_params: nu must exceed 1");
  const double q = 1.0 / std::sqrt(nu);
  const double mu = dist.moment(1);
  const int kmax = dist.max_degree();
  std::vector<double> mass(static_cast<std::size_t>(std::max(kmax, 1)) + 1, 0.0);
  for (const auto& [l, r] : dist.support()) {
    // Bin(l, q) pmf by the multiplicative recurrence
    double pmf = std::pow(1 - q, l);
    for (int j = 0; j <= l; ++j) {
      mass[static_cast<std::size_t>(j)] += r * pmf;
      if (j < l) pmf *= (static_cast<double>(l - j) / (j + 1)) * (q / (1 - q));
    }
  }
  mass[1] += mu * (1 - q);
  PercolationLimit out;
  out.zeta = 1 + mu * (1 - q);
  out.sqrt_nu = std::sqrt(nu);
  std::vector<std::pair<int, double>> law;
  double total = 0;
  for (std::size_t j = 0; j < mass.size(); ++j) total += mass[j];
  for (std::size_t j = 0; j < mass.size(); ++j)
    if (mass[j] > 0) law.emplace_back(static_cast<int>(j), mass[j] / total);
  out.tilde_law = ProbabilityVector(std::move(law));
  out.params = limit_params(out.tilde_law, lambda);
  return out;
}

namespace {

// Calls step(k, B_k) for k = 1..steps.
template <class Normal, class Step>
void euler(const LimitParams& p, double dt, std::int64_t steps, Normal&& normal, Step&& step) {
  const double sd = std::sqrt(p.eta) / p.mu * std::sqrt(dt);
  const double curv = p.eta / (p.mu * p.mu * p.mu);
  double b = 0;
  for (std::int64_t k = 1; k <= steps; ++k) {
    b += sd * normal() + (p.lambda - curv * (static_cast<double>(k) - 0.5) * dt) * dt;
    step(k, b);
  }
}

std::int64_t step_count(double horizon, double dt) {
  if (!(horizon > 0) || !(dt > 0)) throw std::invalid_argument("horizon and dt must be positive");
  const double r = horizon / dt;
  const auto steps = static_cast<std::int64_t>(std::llround(r));
  if (steps < 1 || std::abs(r - static_cast<double>(steps)) > 1e-9 * r)
    throw std::invalid_argument("horizon/dt must be an integer");
  return steps;
}

// Streams W and closes excursions as they end.
class ExcursionScanner {
 public:
  explicit ExcursionScanner(double dt) : dt_(dt) {}
  void push(std::int64_t k, double w) {
    if (w > 0) {
      if (!open_) {
        open_ = true;
        left_ = k;
        area_ = 0;
      }
      area_ += w;
    } else if (open_) {
      close(k, false);
    }
  }
  void finish(std::int64_t end) {
    if (open_) close(end, true);
  }
  std::vector<Excursion> take() { return std::move(out_); }

 private:
  void close(std::int64_t right, bool truncated) {
    out_.push_back({left_, right, static_cast<double>(right - left_) * dt_, area_ * dt_, truncated});
    open_ = false;
  }
  double dt_;
  bool open_ = false;
  std::int64_t left_ = 0;
  double area_ = 0;
  std::vector<Excursion> out_;
};

void sort_excursions(std::vector<Excursion>& ex) {
  std::stable_sort(ex.begin(), ex.end(), [](const Excursion& a, const Excursion& b) {
    if (a.length != b.length) return a.length > b.length;
    return a.left < b.left;
  });
}

}  // namespace

ExcursionSample sample_reflected(const LimitParams& params, double horizon, double dt, Rng& rng) {
  const auto steps = step_count(horizon, dt);
  ExcursionSample s{dt, horizon, {}, {}};
  s.path.resize(static_cast<std::size_t>(steps) + 1, 0.0);
  s.reflected.resize(static_cast<std::size_t>(steps) + 1, 0.0);
  NormalSource normal(rng);
  double running_min = 0;
  euler(params, dt, steps, normal, [&](std::int64_t k, double b) {
    running_min = std::min(running_min, b);
    s.path[static_cast<std::size_t>(k)] = b;
    s.reflected[static_cast<std::size_t>(k)] = b - running_min;
  });
  return s;
}

ExcursionSample sample_reflected(const LimitParams& params, double dt,
                                 std::span<const double> normals) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  const auto steps = static_cast<std::int64_t>(normals.size());
  ExcursionSample s{dt, dt * static_cast<double>(steps), {}, {}};
  s.path.resize(normals.size() + 1, 0.0);
  s.reflected.resize(normals.size() + 1, 0.0);
  std::size_t next = 0;
  double running_min = 0;
  euler(params, dt, steps, [&] { return normals[next++]; }, [&](std::int64_t k, double b) {
    running_min = std::min(running_min, b);
    s.path[static_cast<std::size_t>(k)] = b;
    s.reflected[static_cast<std::size_t>(k)] = b - running_min;
  });
  return s;
}

std::vector<Excursion> extract_excursions(std::span<const double> reflected, double dt) {
  ExcursionScanner scan(dt);
  for (std::size_t k = 0; k < reflected.size(); ++k) scan.push(static_cast<std::int64_t>(k), reflected[k]);
  scan.finish(static_cast<std::int64_t>(reflected.size()));
  auto ex = scan.take();
  sort_excursions(ex);
  return ex;
}

std::vector<Excursion> extract_excursions(const ExcursionSample& sample) {
  return extract_excursions(sample.reflected, sample.dt);
}

std::vector<std::int64_t> mark_excursions(std::span<const Excursion> excursions, double beta,
                                          Rng& rng) {
  if (!(beta >= 0)) throw std::invalid_argument("mark_excursions: beta must be >= 0");
  std::vector<std::int64_t> marks;
  marks.reserve(excursions.size());
  for (const auto& e : excursions) {
    const double mean = beta * e.area;
    if (!(mean > 0)) {
      marks.push_back(0);
      continue;
    }
    std::poisson_distribution<std::int64_t> pois(mean);
    marks.push_back(pois(rng));
  }
  return marks;
}

LimitVector sample_limit_vector(const LimitParams& params, double horizon, double dt, Rng& rng,
                                std::size_t top_k, double size_scale) {
  const auto steps = step_count(horizon, dt);
  ExcursionScanner scan(dt);
  NormalSource normal(rng);
  double running_min = 0;
  euler(params, dt, steps, normal, [&](std::int64_t k, double b) {
    running_min = std::min(running_min, b);
    scan.push(k, b - running_min);
  });
  scan.finish(steps + 1);
  auto ex = scan.take();
  // marks in path order, then U0-down ordering
  const auto marks = mark_excursions(ex, params.beta, rng);
  LimitVector out;
  for (std::size_t i = 0; i < ex.size(); ++i)
    out.entries.push_back({ex[i].length * size_scale, marks[i], ex[i].truncated});
  std::stable_sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
    if (a.length != b.length) return a.length > b.length;
    return a.marks > b.marks;
  });
  if (top_k > 0 && out.entries.size() > top_k) out.entries.resize(top_k);
  for (const auto& e : out.entries) out.truncated = out.truncated || e.truncated;
  return out;
}

double default_horizon(const LimitParams& p) {
  const double a = std::pow(p.mu, 4.0 / 3.0) / std::cbrt(p.eta);
  const double lambda_std = p.lambda * std::pow(p.mu, 5.0 / 3.0) / std::pow(p.eta, 2.0 / 3.0);
  return a * (16.0 + 2.0 * std::max(lambda_std, 0.0));
}

void write_ensemble_csv(std::ostream& out, const std::vector<LimitVector>& ensemble) {
  out << "replica,rank,length,marks,truncated\n";
  out << std::setprecision(17);
  for (std::size_t r = 0; r < ensemble.size(); ++r)
    for (std::size_t k = 0; k < ensemble[r].entries.size(); ++k) {
      const auto& e = ensemble[r].entries[k];
      out << r << ',' << k + 1 << ',' << e.length << ',' << e.marks << ',' << (e.truncated ? 1 : 0)
          << '\n';
    }
}

}  // namespace cm
