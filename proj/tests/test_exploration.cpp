#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "cm/exploration.hpp"
#include "cm/stats.hpp"
#include "oracle.hpp"

using namespace cm;

namespace {

ExplorationTrace walk_only(std::vector<std::int64_t> s) {
  ExplorationTrace t;
  t.walk = std::move(s);
  t.vertex.assign(t.walk.size(), 0);
  t.cycles.assign(t.walk.size(), 0);
  return t;
}

std::vector<std::int64_t> sorted(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("explore on two leaves") {
  Rng rng(1);
  const auto t = explore(DegreeSequence({1, 1}), rng);
  CHECK(t.walk == std::vector<std::int64_t>{-1, -2});
  CHECK(t.cycles == std::vector<std::int64_t>{0, 0});
  const auto h = hitting_times(t);
  CHECK(h.tau == std::vector<std::int64_t>{0, 2});
}

TEST_CASE("explore on a forced self-loop") {
  Rng rng(2);
  const auto t = explore(DegreeSequence({2}), rng);
  CHECK(t.walk == std::vector<std::int64_t>{-2});
  CHECK(t.cycles == std::vector<std::int64_t>{1});
  CHECK(hitting_times(t).sizes() == std::vector<std::int64_t>{1});
}

TEST_CASE("explore on (2,2) matches the enumerated law") {
  const auto law = oracle::matching_law({2, 2});
  CHECK(law.at(oracle::key_of({2}, {1})) == doctest::Approx(2.0 / 3));
  CHECK(law.at(oracle::key_of({1, 1}, {1, 1})) == doctest::Approx(1.0 / 3));
  Rng rng(3);
  std::map<std::string, std::int64_t> seen;
  for (int r = 0; r < 30000; ++r)
    ++seen[oracle::key_of_components(trace_components(explore(DegreeSequence({2, 2}), rng)))];
  std::vector<std::int64_t> obs;
  std::vector<double> probs;
  for (const auto& [k, p] : law) {
    obs.push_back(seen[k]);
    probs.push_back(p);
  }
  CHECK(statistics::chi_square_gof(obs, probs).p_value > 1e-3);
}

TEST_CASE("replay of a triangle") {
  HalfEdgeGraph tri(DegreeSequence({2, 2, 2}));
  tri.pair(1, 2);
  tri.pair(3, 4);
  tri.pair(5, 0);
  Rng rng(4);
  const auto t = replay(tri, rng);
  CHECK(t.walk == std::vector<std::int64_t>{0, 0, -2});
  CHECK(t.cycles == std::vector<std::int64_t>{0, 0, 1});
  const auto h = hitting_times(t);
  CHECK(h.sizes() == std::vector<std::int64_t>{3});
  CHECK(surplus_per_component(t, h) == std::vector<std::int64_t>{1});

  Rng a(9), b(9);
  const auto ta = replay(tri, a), tb = replay(tri, b);
  CHECK(ta.vertex == tb.vertex);
  CHECK(ta.walk == tb.walk);

  HalfEdgeGraph partial(DegreeSequence({1, 1}));
  CHECK_THROWS(replay(partial, rng));
}

TEST_CASE("hitting times on given walks") {
  CHECK(hitting_times(walk_only({-1, -2, -3, -4})).tau == std::vector<std::int64_t>{0, 2, 4});
  CHECK(hitting_times(walk_only({-1, -2, -3, -4})).sizes() == std::vector<std::int64_t>{2, 2});
  CHECK(hitting_times(walk_only({1, 0, -2})).sizes() == std::vector<std::int64_t>{3});
  CHECK_THROWS(hitting_times(walk_only({-1, -5})));
  CHECK_THROWS(hitting_times(walk_only({1, 0})));
}

TEST_CASE("degree discovery counts") {
  Rng rng(5);
  const auto t = explore(DegreeSequence({2, 2, 2, 2, 2}), rng);
  const auto n2 = degree_discovery_counts(t, 2);
  for (std::size_t i = 0; i < n2.size(); ++i) CHECK(n2[i] == static_cast<std::int64_t>(i));
  const auto n3 = degree_discovery_counts(t, 3);
  CHECK(std::all_of(n3.begin(), n3.end(), [](auto v) { return v == 0; }));
}

TEST_CASE("random instances agree with the revealed graph") {
  Rng rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<int> d(500 + 50 * rep);
    for (auto& x : d) x = static_cast<int>(uniform_below(rng, 5));
    int sum = 0;
    for (int x : d) sum += x;
    if (sum % 2 != 0) ++d[0];
    const DegreeSequence ds(d);
    const auto ex = explore_graph(ds, rng);
    REQUIRE(ex.graph.fully_matched());
    const auto comps = components(ex.graph);
    std::vector<std::int64_t> sizes, surplus;
    for (const auto& c : comps) {
      sizes.push_back(c.vertex_count);
      surplus.push_back(c.surplus);
    }
    const auto h = hitting_times(ex.trace);
    CHECK(sorted(h.sizes()) == sorted(sizes));
    CHECK(sorted(surplus_per_component(ex.trace, h)) == sorted(surplus));
    CHECK(check_walk_identities(ex.trace).ok());

    // replay keeps the partition of a fixed graph
    const auto t = replay(ex.graph, rng);
    CHECK(sorted(hitting_times(t).sizes()) == sorted(sizes));
    CHECK(check_walk_identities(t).ok());
  }
}

TEST_CASE("active count against past minima") {
  Rng rng(7);
  const auto t = explore(DegreeSequence({1, 1}), rng);
  // one active half-edge after the first stage while S - min S = 0
  CHECK(t.active.front() == 1);
  const auto r = check_walk_identities(t);
  CHECK(r.active_vs_minimum == 1);
  CHECK(r.active_vs_started == 0);
}

TEST_CASE("trace CSV") {
  Rng rng(8);
  const auto t = explore(DegreeSequence({1, 1}), rng);
  std::ostringstream out;
  write_trace_csv(out, t);
  CHECK(out.str().rfind("stage,vertex,degree,c,S,s,A\n", 0) == 0);
}
