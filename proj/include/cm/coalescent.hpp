#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cm/rng.hpp"

namespace cm {

struct Particle {
  double mass = 0;
  double weight = 0;
};

struct CoalescentState {
  std::vector<Particle> particles;
  double time = 0;
};

struct CoalescentMerge {
  double time = 0;
  std::size_t i = 0;  // survivor (smaller original index)
  std::size_t j = 0;  // absorbed
  double new_mass = 0;
  double new_weight = 0;
};

// Particles i and j merge at rate x_i x_j; masses and weights add. The total
// rate sum_{i<j} x_i x_j is kept in a sum tree over x_i (S - x_i); a merge picks
// i proportional to x_i (S - x_i), then j != i proportional to x_j.
class MultiplicativeCoalescent {
 public:
  explicit MultiplicativeCoalescent(CoalescentState state);

  double time() const { return time_; }
  double total_rate() const;
  // From scratch, O(k).
  double recomputed_rate() const;
  // Advances to the next merge if it happens by t_end and returns true;
  // otherwise sets the time to t_end and returns false.
  bool step(double t_end, Rng& rng, CoalescentMerge* merge = nullptr);
  // Surviving particles in original index order (absorbed ones removed).
  CoalescentState state() const;
  // Block id per original particle: index of the survivor it merged into.
  std::vector<std::size_t> blocks() const;
  double total_mass() const;
  double total_weight() const;

 private:
  void set_leaf(std::vector<double>& tree, std::size_t i, double v);
  std::size_t descend(const std::vector<double>& tree, double u) const;

  std::vector<Particle> p_;
  std::vector<char> alive_;
  std::vector<std::size_t> parent_;
  double time_ = 0;
  double mass_total_ = 0;
  std::size_t leaves_ = 1;
  std::vector<double> mass_tree_;
  std::vector<double> rate_tree_;
};

CoalescentState simulate(const CoalescentState& state, double t_end, Rng& rng,
                         std::vector<CoalescentMerge>* log = nullptr);

struct CoupledTrajectories {
  CoalescentState lower;
  CoalescentState upper;
  std::vector<std::size_t> lower_blocks;
  std::vector<std::size_t> upper_blocks;
};

// Aldous' random-graph representation driven by one Exp(1) per pair: the
// pair {i, j} is joined in a coordinate by time xi_ij / (x_i x_j). With
// lower <= upper componentwise, lower blocks refine upper blocks.
CoupledTrajectories subgraph_couple(const CoalescentState& lower, const CoalescentState& upper,
                                    double t_end, Rng& rng);

void write_merge_log_csv(std::ostream& out, const std::vector<CoalescentMerge>& log);

}  // namespace cm
