#include "cm/coalescent.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "cm/union_find.hpp"

namespace cm {

MultiplicativeCoalescent::MultiplicativeCoalescent(CoalescentState state)
    : p_(std::move(state.particles)), alive_(p_.size(), 1), parent_(p_.size()), time_(state.time) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  for (const auto& q : p_) {
    if (!(q.mass >= 0) || !std::isfinite(q.mass) || !(q.weight >= 0) || !std::isfinite(q.weight))
      throw std::invalid_argument("coalescent: masses and weights must be finite and >= 0");
    mass_total_ += q.mass;
  }
  while (leaves_ < std::max<std::size_t>(p_.size(), 1)) leaves_ *= 2;
  mass_tree_.assign(2 * leaves_, 0.0);
  rate_tree_.assign(2 * leaves_, 0.0);
  for (std::size_t i = 0; i < p_.size(); ++i) {
    mass_tree_[leaves_ + i] = p_[i].mass;
    rate_tree_[leaves_ + i] = std::max(0.0, p_[i].mass * (mass_total_ - p_[i].mass));
  }
  for (std::size_t k = leaves_ - 1; k >= 1; --k) {
    mass_tree_[k] = mass_tree_[2 * k] + mass_tree_[2 * k + 1];
    rate_tree_[k] = rate_tree_[2 * k] + rate_tree_[2 * k + 1];
  }
}

double MultiplicativeCoalescent::total_rate() const { return 0.5 * rate_tree_[1]; }

double MultiplicativeCoalescent::recomputed_rate() const {
  long double s = 0, s2 = 0;
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!alive_[i]) continue;
    s += p_[i].mass;
    s2 += static_cast<long double>(p_[i].mass) * p_[i].mass;
  }
  return static_cast<double>((s * s - s2) / 2);
}

void MultiplicativeCoalescent::set_leaf(std::vector<double>& tree, std::size_t i, double v) {
  std::size_t k = leaves_ + i;
  tree[k] = v;
  for (k /= 2; k >= 1; k /= 2) tree[k] = tree[2 * k] + tree[2 * k + 1];
}

std::size_t MultiplicativeCoalescent::descend(const std::vector<double>& tree, double u) const {
  std::size_t k = 1;
  while (k < leaves_) {
    const double left = tree[2 * k];
    if (u < left || tree[2 * k + 1] <= 0) {
      k = 2 * k;
    } else {
      u -= left;
      k = 2 * k + 1;
    }
  }
  return k - leaves_;
}

bool MultiplicativeCoalescent::step(double t_end, Rng& rng, CoalescentMerge* merge) {
  if (t_end < time_) throw std::invalid_argument("coalescent: t_end before current time");
  const double rate = total_rate();
  if (!(rate > 0)) {
    time_ = t_end;
    return false;
  }
  const double next = time_ + exponential(rng, rate);
  if (next > t_end) {
    time_ = t_end;
    return false;
  }
  time_ = next;
  std::size_t i = descend(rate_tree_, uniform01(rng) * rate_tree_[1]);
  while (rate_tree_[leaves_ + i] <= 0)  // rounding landed on an empty leaf
    i = descend(rate_tree_, uniform01(rng) * rate_tree_[1]);
  const double xi = mass_tree_[leaves_ + i];
  set_leaf(mass_tree_, i, 0.0);
  std::size_t j = descend(mass_tree_, uniform01(rng) * mass_tree_[1]);
  while (mass_tree_[leaves_ + j] <= 0) j = descend(mass_tree_, uniform01(rng) * mass_tree_[1]);
  set_leaf(mass_tree_, i, xi);

  if (j < i) std::swap(i, j);
  p_[i].mass += p_[j].mass;
  p_[i].weight += p_[j].weight;
  p_[j] = {};
  alive_[j] = 0;
  parent_[j] = i;
  set_leaf(mass_tree_, i, p_[i].mass);
  set_leaf(mass_tree_, j, 0.0);
  set_leaf(rate_tree_, j, 0.0);
  // S is unchanged by a merge, so only the two touched leaves move.
  set_leaf(rate_tree_, i, std::max(0.0, p_[i].mass * (mass_total_ - p_[i].mass)));
  if (merge) *merge = {time_, i, j, p_[i].mass, p_[i].weight};
  return true;
}

CoalescentState MultiplicativeCoalescent::state() const {
  CoalescentState s;
  s.time = time_;
  for (std::size_t i = 0; i < p_.size(); ++i)
    if (alive_[i]) s.particles.push_back(p_[i]);
  return s;
}

std::vector<std::size_t> MultiplicativeCoalescent::blocks() const {
  std::vector<std::size_t> b(p_.size());
  for (std::size_t i = 0; i < p_.size(); ++i) {
    std::size_t r = i;
    while (parent_[r] != r) r = parent_[r];
    b[i] = r;
  }
  return b;
}

double MultiplicativeCoalescent::total_mass() const {
  long double s = 0;
  for (std::size_t i = 0; i < p_.size(); ++i)
    if (alive_[i]) s += p_[i].mass;
  return static_cast<double>(s);
}

double MultiplicativeCoalescent::total_weight() const {
  long double s = 0;
  for (std::size_t i = 0; i < p_.size(); ++i)
    if (alive_[i]) s += p_[i].weight;
  return static_cast<double>(s);
}

CoalescentState simulate(const CoalescentState& state, double t_end, Rng& rng,
                         std::vector<CoalescentMerge>* log) {
  if (t_end < state.time) throw std::invalid_argument("simulate: t_end before state time");
  MultiplicativeCoalescent mc(state);
  CoalescentMerge m;
  while (mc.step(t_end, rng, &m))
    if (log) log->push_back(m);
  return mc.state();
}

namespace {

CoalescentState collapse(const std::vector<Particle>& p, UnionFind& uf,
                         std::vector<std::size_t>& blocks, double t) {
  const std::size_t k = p.size();
  std::vector<std::int32_t> root_min(k, -1);
  for (std::size_t i = 0; i < k; ++i) {
    const auto r = static_cast<std::size_t>(uf.find(static_cast<std::int32_t>(i)));
    if (root_min[r] < 0) root_min[r] = static_cast<std::int32_t>(i);
  }
  CoalescentState s;
  s.time = t;
  std::vector<std::int64_t> slot(k, -1);
  blocks.assign(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    const auto rep = static_cast<std::size_t>(root_min[static_cast<std::size_t>(uf.find(static_cast<std::int32_t>(i)))]);
    blocks[i] = rep;
    if (slot[rep] < 0) {
      slot[rep] = static_cast<std::int64_t>(s.particles.size());
      s.particles.push_back({});
    }
    auto& q = s.particles[static_cast<std::size_t>(slot[rep])];
    q.mass += p[i].mass;
    q.weight += p[i].weight;
  }
  return s;
}

}  // namespace

CoupledTrajectories subgraph_couple(const CoalescentState& lower, const CoalescentState& upper,
                                    double t_end, Rng& rng) {
  const auto& lo = lower.particles;
  const auto& up = upper.particles;
  if (lo.size() != up.size()) throw std::invalid_argument("subgraph_couple: misaligned inputs");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (lo[i].mass > up[i].mass || lo[i].mass < 0)
      throw std::invalid_argument("subgraph_couple: lower mass exceeds upper at index " +
                                  std::to_string(i));
  if (lower.time != upper.time || t_end < lower.time)
    throw std::invalid_argument("subgraph_couple: inconsistent times");
  const double dt = t_end - lower.time;
  const std::size_t k = lo.size();
  UnionFind uf_lo(k), uf_up(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double xi = exponential(rng, 1.0);
      if (xi <= dt * up[i].mass * up[j].mass)
        uf_up.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
      if (xi <= dt * lo[i].mass * lo[j].mass)
        uf_lo.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
    }
  CoupledTrajectories out;
  out.lower = collapse(lo, uf_lo, out.lower_blocks, t_end);
  out.upper = collapse(up, uf_up, out.upper_blocks, t_end);
  return out;
}

void write_merge_log_csv(std::ostream& out, const std::vector<CoalescentMerge>& log) {
  out << "time,i,j,new_mass,new_weight\n";
  out << std::setprecision(17);
  for (const auto& m : log)
    out << m.time << ',' << m.i << ',' << m.j << ',' << m.new_mass << ',' << m.new_weight << '\n';
}

}  // namespace cm
