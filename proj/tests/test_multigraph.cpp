#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "cm/multigraph.hpp"
#include "cm/stats.hpp"
#include "oracle.hpp"

using namespace cm;

TEST_CASE("two leaves always form one edge") {
  Rng rng(1);
  const auto g = uniform_match(DegreeSequence({1, 1}), rng);
  CHECK(g.mate(0) == 1);
  CHECK(g.fully_matched());
  const auto c = components(g);
  REQUIRE(c.size() == 1);
  CHECK(c[0].vertex_count == 2);
  CHECK(c[0].surplus == 0);
}

TEST_CASE("a single vertex of degree two is a self-loop") {
  Rng rng(2);
  const auto g = uniform_match(DegreeSequence({2}), rng);
  const auto c = components(g);
  REQUIRE(c.size() == 1);
  CHECK(c[0].vertex_count == 1);
  CHECK(c[0].edge_count == 1);
  CHECK(c[0].surplus == 1);
}

TEST_CASE("the three matchings of four leaves are equally likely") {
  Rng rng(3);
  std::map<HalfEdge, std::int64_t> partner_of_zero;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) ++partner_of_zero[uniform_match(DegreeSequence({1, 1, 1, 1}), rng).mate(0)];
  REQUIRE(partner_of_zero.size() == 3);
  const double sd = std::sqrt(reps * (1.0 / 3) * (2.0 / 3));
  for (const auto& [h, c] : partner_of_zero) CHECK(std::abs(c - reps / 3.0) < 3 * sd + 1);
}

TEST_CASE("hand-built components") {
  HalfEdgeGraph path(DegreeSequence({1, 2, 1}));
  path.pair(0, 1);
  path.pair(2, 3);
  auto c = components(path, true);
  REQUIRE(c.size() == 1);
  CHECK(c[0].vertex_count == 3);
  CHECK(c[0].edge_count == 2);
  CHECK(c[0].surplus == 0);
  CHECK(c[0].degree_hist == std::vector<std::pair<int, std::int64_t>>{{1, 2}, {2, 1}});

  HalfEdgeGraph tri(DegreeSequence({2, 2, 2}));
  tri.pair(1, 2);
  tri.pair(3, 4);
  tri.pair(5, 0);
  c = components(tri);
  REQUIRE(c.size() == 1);
  CHECK(c[0].edge_count == 3);
  CHECK(c[0].surplus == 1);

  CHECK_THROWS(tri.pair(0, 2));
  tri.unpair(0);
  CHECK(tri.is_open(0));
  CHECK(tri.is_open(5));
  CHECK(tri.valid());
  c = components(tri);
  CHECK(c[0].open_halfedges == 2);
}

TEST_CASE("triangle frequency on (2,2,2) matches enumeration") {
  const auto law = oracle::matching_law({2, 2, 2});
  // 15 matchings: 8 triangles, 6 loop + double edge, 1 three loops
  CHECK(law.at(oracle::key_of({3}, {1})) == doctest::Approx(8.0 / 15));
  Rng rng(4);
  std::map<std::string, std::int64_t> seen;
  const int reps = 60000;
  for (int r = 0; r < reps; ++r)
    ++seen[oracle::key_of_components(components(uniform_match(DegreeSequence({2, 2, 2}), rng)))];
  std::vector<std::int64_t> obs;
  std::vector<double> probs;
  for (const auto& [k, p] : law) {
    obs.push_back(seen[k]);
    probs.push_back(p);
  }
  CHECK(seen.size() == law.size());
  CHECK(statistics::chi_square_gof(obs, probs).p_value > 1e-3);
}

TEST_CASE("component vector ordering") {
  std::vector<ComponentSummary> comps(3);
  comps[0].vertex_count = 3;
  comps[0].surplus = 0;
  comps[0].min_vertex = 0;
  comps[1].vertex_count = 5;
  comps[1].surplus = 1;
  comps[1].min_vertex = 1;
  comps[2].vertex_count = 3;
  comps[2].surplus = 2;
  comps[2].min_vertex = 2;
  const auto cv = to_component_vector(comps, 11);
  REQUIRE(cv.entries.size() == 3);
  CHECK(cv.entries[0].size == 5);
  CHECK(cv.entries[0].surplus == 1);
  CHECK(cv.entries[1].surplus == 2);
  CHECK(cv.entries[2].surplus == 0);
  CHECK(cv.entries[0].rescaled_size == 5 * std::pow(11.0, -2.0 / 3.0));

  HalfEdgeGraph empty(std::vector<int>{0, 0, 0, 0});
  const auto iso = to_component_vector(components(empty), 4);
  REQUIRE(iso.entries.size() == 4);
  for (const auto& e : iso.entries) {
    CHECK(e.rescaled_size == std::pow(4.0, -2.0 / 3.0));
    CHECK(e.surplus == 0);
  }
}

TEST_CASE("refinement of labellings") {
  CHECK(refines(std::vector<std::int32_t>{0, 1, 2}, std::vector<std::int32_t>{0, 0, 1}));
  CHECK(refines(std::vector<std::int32_t>{0, 0, 1}, std::vector<std::int32_t>{0, 0, 0}));
  CHECK_FALSE(refines(std::vector<std::int32_t>{0, 0, 1}, std::vector<std::int32_t>{0, 1, 1}));
}

TEST_CASE("partial pairings conserve half-edges") {
  Rng rng(7);
  std::vector<int> d(2000);
  for (auto& x : d) x = 1 + static_cast<int>(uniform_below(rng, 4));
  if ((std::accumulate(d.begin(), d.end(), 0) & 1) != 0) ++d[0];
  HalfEdgeGraph g{DegreeSequence(d)};
  // pair a random half of the half-edges
  std::vector<HalfEdge> pool(static_cast<std::size_t>(g.num_half_edges()));
  std::iota(pool.begin(), pool.end(), HalfEdge{0});
  for (std::size_t i = 0; i + 1 < pool.size() / 2; i += 2) {
    std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
    std::swap(pool[i + 1], pool[i + 1 + uniform_below(rng, pool.size() - i - 1)]);
    g.pair(pool[i], pool[i + 1]);
  }
  const auto p = partition(g);
  std::int64_t total = 0, surplus = 0;
  for (const auto& c : p.components) {
    total += 2 * c.edge_count + c.open_halfedges;
    surplus += c.surplus;
  }
  CHECK(total == g.num_half_edges());
  CHECK(surplus == g.matched_pairs() - g.num_vertices() + static_cast<std::int64_t>(p.components.size()));
  CHECK(g.valid());
}

TEST_CASE("graph CSV marks open half-edges") {
  HalfEdgeGraph g(std::vector<int>{1, 2});
  g.pair(0, 1);
  std::ostringstream out;
  write_graph_csv(out, g);
  CHECK(out.str() == "half_edge,owner,mate\n0,0,1\n1,1,0\n2,1,OPEN\n");
}
