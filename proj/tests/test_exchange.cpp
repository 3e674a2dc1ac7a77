#include <doctest.h>

#include <random>

#include "dcf/bipartite.hpp"
#include "dcf/errors.hpp"
#include "dcf/exchange.hpp"
#include "dcf/generators.hpp"

using namespace dcf;

namespace {

// Rep with explicit cross arcs over n marked-or-not pairs.
BipartiteRep make_rep(int n, const std::vector<Arc>& arcs,
                      const std::vector<int>& marked) {
  return mark_m0(build_bipartite_rep(Digraph(n, arcs)), VertexSet::of(n, marked));
}

}  // namespace

TEST_CASE("lemma1 insertion") {
  // 4-cycle on pairs {0,1}, spare pair 2, all four cross edges present.
  BipartiteRep rep = make_rep(
      3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}, {0, 1, 2});
  FeasibleCycle c = make_feasible_cycle(rep, {0, 1});
  FeasibleCycle grown = lemma1_insert(rep, c, 2);
  CHECK(grown.pair_size() == 3);
  CHECK(m0_length(rep, grown) == 3);

  // Degree sum 3 still guarantees a slot: every cross-edge pattern between
  // the spare pair and the 4-cycle with exactly three edges admits one.
  for (int drop = 0; drop < 4; ++drop) {
    std::vector<Arc> arcs = {{0, 1}, {1, 0}};
    std::vector<Arc> cross = {{2, 0}, {2, 1}, {0, 2}, {1, 2}};
    for (int i = 0; i < 4; ++i)
      if (i != drop) arcs.push_back(cross[i]);
    BipartiteRep rep3 = make_rep(3, arcs, {0, 1, 2});
    FeasibleCycle c3 = make_feasible_cycle(rep3, {0, 1});
    FeasibleCycle grown3 = lemma1_insert(rep3, c3, 2);
    CHECK(grown3.pair_size() == 3);
  }

  // Degree sum 2 misses the bound r+1 = 3.
  BipartiteRep rep2 = make_rep(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}}, {0, 1, 2});
  FeasibleCycle c2 = make_feasible_cycle(rep2, {0, 1});
  CHECK_THROWS_AS(lemma1_insert(rep2, c2, 2), PreconditionError);
}

TEST_CASE("lemma1 randomized against in-subgraph enumeration") {
  std::mt19937_64 rng(41);
  int ran = 0;
  for (int trial = 0; trial < 400; ++trial) {
    int n = 4 + static_cast<int>(rng() % 4);
    Digraph d = gen_random(n, 0.7, rng());
    BipartiteRep rep = build_bipartite_rep(d);  // everything marked
    uint64_t all = (uint64_t{1} << n) - 1;
    auto cycles = enumerate_feasible_cycles(rep, all, 4);
    if (cycles.empty()) continue;
    const FeasibleCycle& c = cycles[rng() % cycles.size()];
    uint64_t cmask = pair_mask(c.pairs);
    int spare = -1;
    for (int f = 0; f < n; ++f) {
      if ((cmask >> f) & 1) continue;
      if (degree_sum_into(rep, {{true, f}, {false, f}}, cmask) >=
          c.pair_size() + 1) {
        spare = f;
        break;
      }
    }
    if (spare < 0) continue;
    ++ran;
    FeasibleCycle grown = lemma1_insert(rep, c, spare);
    CHECK(grown.length() == c.length() + 2);
    CHECK(m0_length(rep, grown) == m0_length(rep, c) + 1);
    CHECK(pair_mask(grown.pairs) == (cmask | (uint64_t{1} << spare)));
  }
  CHECK(ran > 50);
}

TEST_CASE("lemma2 preconditions") {
  // Two digon cycles: marked lengths 2 and 2 violate t >= 3.
  BipartiteRep rep = make_rep(
      4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}, {0, 2}, {2, 0}, {1, 3}, {3, 1},
          {0, 3}, {3, 0}, {1, 2}, {2, 1}},
      {0, 1, 2, 3});
  FeasibleCycle a = make_feasible_cycle(rep, {0, 1});
  FeasibleCycle b = make_feasible_cycle(rep, {2, 3});
  CHECK_THROWS_AS(lemma2_shorten(rep, a, b), PreconditionError);
}

TEST_CASE("lemma2 shortens a dense pair and respects the strict boundary") {
  // c1 on pairs {0,1} (marked), c2 on pairs {2,3,4} (marked); edge budget
  // over the cross sum drives applicability.
  std::mt19937_64 rng(43);
  int applied = 0, boundary = 0;
  for (int trial = 0; trial < 600; ++trial) {
    std::vector<Arc> arcs = {{0, 1}, {1, 0}, {2, 3}, {3, 4}, {4, 2}};
    for (int f = 2; f < 5; ++f) {
      for (int g = 0; g < 2; ++g) {
        if (rng() % 2) arcs.push_back({f, g});
        if (rng() % 2) arcs.push_back({g, f});
      }
    }
    if (rng() % 2) arcs.push_back({0, 2});
    if (rng() % 2) arcs.push_back({2, 1});
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    BipartiteRep rep = make_rep(5, arcs, {0, 1, 2, 3, 4});
    FeasibleCycle c1 = make_feasible_cycle(rep, {0, 1});
    FeasibleCycle c2 = make_feasible_cycle(rep, {2, 3, 4});
    long long cross_sum = 0;
    for (int f : c2.pairs)
      cross_sum += degree_sum_into(rep, {{true, f}, {false, f}},
                                   pair_mask(c1.pairs));
    if (4 * cross_sum == 3 * 3 * c1.length()) {
      ++boundary;
      CHECK_THROWS_AS(lemma2_shorten(rep, c1, c2), PreconditionError);
      continue;
    }
    if (4 * cross_sum < 3 * 3 * c1.length()) continue;
    ShortenResult res = lemma2_shorten(rep, c1, c2);
    ++applied;
    CHECK(res.first.length() + res.second.length() < c1.length() + c2.length());
    CHECK(m0_length(rep, res.first) >= 2);
    CHECK(m0_length(rep, res.second) >= 2);
    uint64_t uni = pair_mask(c1.pairs) | pair_mask(c2.pairs);
    CHECK((pair_mask(res.first.pairs) & ~uni) == 0);
    CHECK((pair_mask(res.second.pairs) & ~uni) == 0);
    CHECK((pair_mask(res.first.pairs) & pair_mask(res.second.pairs)) == 0);
  }
  CHECK(applied > 20);
  CHECK(boundary > 0);
}

TEST_CASE("lemma3 arc search") {
  BipOrientedGraph single(1, 1, {{0, 1}});
  auto arc = lemma3_find_arc(single);
  REQUIRE(arc.has_value());
  CHECK(*arc == Arc{0, 1});

  BipOrientedGraph arcless(2, 2, {});
  CHECK_FALSE(lemma3_find_arc(arcless).has_value());

  CHECK_THROWS_AS(BipOrientedGraph(1, 1, {{0, 1}, {1, 0}}), PreconditionError);
  CHECK_THROWS_AS(BipOrientedGraph(2, 1, {{0, 1}}), std::invalid_argument);
}

TEST_CASE("lemma3 exhaustive on small orders") {
  // The strict bound fails exactly on equality-boundary orientations (a
  // directed 4-cycle over 2+2 already shows it), so the search may return
  // none there; the relaxed non-strict bound must always have a witness.
  long long strict_failures = 0;
  for (int r1 = 1; r1 <= 4; ++r1) {
    for (int r2 = 1; r1 + r2 <= 5; ++r2) {
      int r = r1 + r2;
      int cells = r1 * r2;
      long long total = 1;
      for (int i = 0; i < cells; ++i) total *= 3;
      for (long long code = 1; code < total; ++code) {
        long long c = code;
        std::vector<Arc> arcs;
        for (int i = 0; i < r1; ++i) {
          for (int j = 0; j < r2; ++j) {
            int state = c % 3;
            c /= 3;
            if (state == 1) arcs.push_back({i, r1 + j});
            if (state == 2) arcs.push_back({r1 + j, i});
          }
        }
        if (arcs.empty()) continue;
        BipOrientedGraph b(r1, r2, arcs);
        if (!lemma3_find_arc(b).has_value()) {
          ++strict_failures;
          bool relaxed = false;
          for (auto [u, v] : b.arcs())
            if (2 * (b.in_degree(u) + b.out_degree(v)) <= r) relaxed = true;
          CHECK(relaxed);
        }
      }
    }
  }
  CHECK(strict_failures > 0);  // the boundary is real, not hypothetical
  MESSAGE("strict-inequality failures at r <= 5: ", strict_failures);
}

TEST_CASE("lemma4 closes paths") {
  // Two pairs and the closing edge.
  BipartiteRep rep = make_rep(2, {{0, 1}, {1, 0}}, {0, 1});
  FeasiblePath p = make_feasible_path(rep, {0, 1});
  FeasibleCycle c = lemma4_close_path(rep, p);
  CHECK(c.pair_size() == 2);

  // Endpoint degree below (3/2) r.
  BipartiteRep weak = make_rep(3, {{0, 1}, {1, 2}}, {0, 1, 2});
  FeasiblePath wp = make_feasible_path(weak, {0, 1, 2});
  CHECK_THROWS_AS(lemma4_close_path(weak, wp), PreconditionError);
}

TEST_CASE("lemma4 randomized against spanning-cycle search") {
  std::mt19937_64 rng(47);
  int ran = 0, indirect = 0, tight = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    int r = 3 + static_cast<int>(rng() % 4);
    Digraph d = gen_random(r, 0.55 + 0.3 * ((rng() >> 11) * 0x1.0p-53), rng());
    BipartiteRep rep = build_bipartite_rep(d);
    uint64_t mask = (uint64_t{1} << r) - 1;
    auto seq = find_spanning_alt_path(rep, mask);
    if (!seq) continue;
    FeasiblePath p = select_good_feasible_path(rep, make_feasible_path(rep, *seq));
    if (2 * path_endpoint_degree(rep, p, mask) < 3 * r) continue;
    if (has_shorter_same_m0_path(rep, p)) continue;
    ++ran;
    if (!rep.cross(p.back(), p.front())) {
      ++indirect;
      // The example shape: four pairs, endpoint degree exactly (3/2)r,
      // no closing edge, resolved by the crossing construction.
      if (r == 4 && path_endpoint_degree(rep, p, mask) == 6) ++tight;
    }
    FeasibleCycle c = lemma4_close_path(rep, p);
    CHECK(pair_mask(c.pairs) == mask);
    CHECK(m0_length(rep, c) == m0_length(rep, p));
    CHECK(find_spanning_alt_cycle(rep, mask).has_value());
  }
  CHECK(ran > 100);
  CHECK(indirect > 0);  // the crossing-split machinery actually runs
  CHECK(tight > 0);     // including at the exact threshold
}

TEST_CASE("claim1 base packing") {
  // Complete symmetric on 4 vertices, everything marked: two digon cycles.
  std::vector<Arc> arcs;
  for (int u = 0; u < 4; ++u)
    for (int v = 0; v < 4; ++v)
      if (u != v) arcs.emplace_back(u, v);
  BipartiteRep rep = make_rep(4, arcs, {0, 1, 2, 3});
  auto cycles = claim1_base_packing(rep);
  REQUIRE(cycles.size() == 2);
  for (const auto& c : cycles) {
    CHECK(m0_length(rep, c) == 2);
    CHECK(c.pair_size() <= 4);
  }
  CHECK((pair_mask(cycles[0].pairs) & pair_mask(cycles[1].pairs)) == 0);

  // Two marked pairs joined both ways: a single 4-cycle.
  BipartiteRep two = make_rep(2, {{0, 1}, {1, 0}}, {0, 1});
  auto one = claim1_base_packing(two);
  REQUIRE(one.size() == 1);
  CHECK(one[0].pair_size() == 2);

  // One marked pair: empty packing.
  BipartiteRep lone = make_rep(2, {{0, 1}, {1, 0}}, {0});
  CHECK(claim1_base_packing(lone).empty());

  // Degree below the bound.
  BipartiteRep weak = make_rep(4, {{0, 1}, {1, 0}}, {0, 1, 2, 3});
  CHECK_THROWS_AS(claim1_base_packing(weak), PreconditionError);
}

TEST_CASE("claim1 randomized") {
  std::mt19937_64 rng(53);
  int ran = 0;
  for (int trial = 0; trial < 120 || ran < 40; ++trial) {
    if (trial > 3000) break;
    int n = 4 + static_cast<int>(rng() % 5);
    Digraph d = gen_random(n, 0.9, rng());
    std::vector<int> ids;
    for (int v = 0; v < n; ++v)
      if (rng() % 3) ids.push_back(v);
    if (ids.size() < 2) ids = {0, 1};
    BipartiteRep rep =
        fact1_reduce(mark_m0(build_bipartite_rep(d), VertexSet::of(n, ids)));
    if (4 * rep.min_marked_degree() < 3 * n + 1) continue;
    ++ran;
    auto cycles = claim1_base_packing(rep);
    CHECK(static_cast<int>(cycles.size()) == rep.marked_count() / 2);
    uint64_t used = 0;
    for (const auto& c : cycles) {
      CHECK(m0_length(rep, c) == 2);
      CHECK(c.length() <= 8);
      CHECK((pair_mask(c.pairs) & used) == 0);
      used |= pair_mask(c.pairs);
    }
  }
  CHECK(ran >= 40);
}
