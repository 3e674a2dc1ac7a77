#include <doctest.h>

#include <set>

#include "dcf/errors.hpp"
#include "dcf/generators.hpp"
#include "dcf/oracle.hpp"

using namespace dcf;

TEST_CASE("first extremal family") {
  for (int k = 1; k <= 3; ++k) {
    Digraph d = gen_d1(k);
    CHECK(d.order() == 16 * k - 2);
    CHECK(min_semi_degree(d, VertexSet::all(d.order())) == 12 * k - 3);
  }
  CHECK_THROWS_AS(gen_d1(0), PreconditionError);
  CHECK_FALSE(oracle_digon_factor(gen_d1(1)));
}

TEST_CASE("second extremal family") {
  for (int k = 1; k <= 4; ++k) {
    Digraph d = gen_d2(k);
    CHECK(d.order() == 3 * k);
    CHECK(min_semi_degree(d, VertexSet::all(d.order())) == 2 * k - 1);
    // Independent block: no arcs inside it.
    for (int u = 2 * k - 1; u < d.order(); ++u)
      for (int v = 2 * k - 1; v < d.order(); ++v)
        if (u != v) CHECK_FALSE(d.has_arc(u, v));
  }
  Digraph d1 = gen_d2(1);
  CHECK(d1.order() == 3);
  CHECK(d1.out_degree(0) == 2);
}

TEST_CASE("orientation tables are data") {
  OrientationTable bad{{{"U", "Y", true}, {"X", "Z", true}}};
  CHECK_THROWS_AS(gen_d1(1, bad), std::invalid_argument);
  OrientationTable parsed = parse_orientation_table(
      "# comment\nU <-> Y\nX <-> Z\nU -> X\nX -> Y\nY -> Z\nZ -> U\n");
  CHECK(parsed.relations.size() == 6);
  CHECK(gen_d1(1, parsed).order() == 14);
  CHECK_THROWS_AS(parse_orientation_table("U => X\n"), ParseError);
}

TEST_CASE("complete bipartite symmetric") {
  Digraph k23 = gen_complete_bipartite_sym(2, 3);
  CHECK(k23.order() == 5);
  CHECK(min_semi_degree(k23, VertexSet::all(5)) == 2);

  Digraph k12 = gen_complete_bipartite_sym(1, 2);
  // Only digons: no directed cycle of odd length in a bipartite digraph.
  auto res = oracle_cyclable(k12, VertexSet::of(3, {0, 1}));
  CHECK(res.verdict == OracleVerdict::yes);
  CHECK(res.cycle->size() == 2);

  Digraph k33 = gen_complete_bipartite_sym(3, 3);
  CHECK(oracle_cyclable(k33, VertexSet::all(6)).verdict == OracleVerdict::yes);
}

TEST_CASE("random generator determinism and extremes") {
  Digraph full = gen_random(5, 1.0, 99);
  CHECK(full.arc_count() == 20);
  Digraph none = gen_random(5, 0.0, 99);
  CHECK(none.arc_count() == 0);
  Digraph a = gen_random(12, 0.37, 1234);
  Digraph b = gen_random(12, 0.37, 1234);
  CHECK(a.arcs() == b.arcs());
  Digraph c = gen_random(12, 0.37, 1235);
  CHECK(a.arcs() != c.arcs());
}

TEST_CASE("degree-targeted sampling") {
  auto [d, w] = gen_random_min_semidegree(8, 3, 5, 7);
  CHECK(min_semi_degree(d, w) >= 5);
  CHECK(w.size() == 3);
  CHECK_THROWS_AS(gen_random_min_semidegree(4, 2, 4, 7), PreconditionError);
}

TEST_CASE("exhaustive enumeration counts") {
  int count2 = 0;
  std::set<std::vector<Arc>> seen;
  enumerate_digraphs(2, false, [&](const Digraph& d) {
    ++count2;
    seen.insert(d.arcs());
  });
  CHECK(count2 == 4);
  CHECK(seen.size() == 4);

  int count3 = 0;
  std::set<std::vector<Arc>> seen3;
  enumerate_digraphs(3, false, [&](const Digraph& d) {
    ++count3;
    seen3.insert(d.arcs());
  });
  CHECK(count3 == 64);
  CHECK(seen3.size() == 64);

  CHECK(labeled_digraph_count(4) == 4096);
  CHECK_THROWS_AS(enumerate_digraphs(5, false, [](const Digraph&) {}),
                  PreconditionError);
  CHECK(digraph_from_arc_mask(3, 0).arc_count() == 0);
  CHECK(digraph_from_arc_mask(3, 0b111111).arc_count() == 6);
}
