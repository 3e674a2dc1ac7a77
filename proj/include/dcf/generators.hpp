#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dcf/digraph.hpp"

namespace dcf {

/// Complete join between two named blocks, either one-directional or
/// symmetric. The extremal constructions take their between-block arcs from
/// a table of these so alternative orientations can be tried as data.
struct BlockRelation {
  std::string from;
  std::string to;
  bool symmetric;
};

struct OrientationTable {
  std::vector<BlockRelation> relations;
};

OrientationTable default_d1_table();
OrientationTable default_d2_table();

/// Lines "A -> B" or "A <-> B"; '#' starts a comment line.
OrientationTable parse_orientation_table(const std::string& text);

/// Four blocks U, X (order 4k-1, complete symmetric) and Y, Z (order 4k,
/// complete symmetric) joined per the table. Self-checks that the minimum
/// semi-degree comes out at 12k-3.
Digraph gen_d1(int k);
Digraph gen_d1(int k, const OrientationTable& table);

/// Complete symmetric block X of order 2k-1 plus an independent block Y of
/// order k+1 joined per the table. Self-checks the semi-degree 2k-1.
Digraph gen_d2(int k);
Digraph gen_d2(int k, const OrientationTable& table);

Digraph gen_complete_bipartite_sym(int a, int b);

/// Independent arcs with the given probability; identical arc sets for a
/// fixed seed on every platform.
Digraph gen_random(int n, double arc_probability, uint64_t seed);

/// Rejection-samples digraph and W until min_semi_degree(D, W) >= target,
/// ramping the arc density between retries.
std::pair<Digraph, VertexSet> gen_random_min_semidegree(int n, int w_size,
                                                        int target,
                                                        uint64_t seed,
                                                        int max_tries = 10000);

/// Every labeled simple digraph on n vertices exactly once, lexicographic
/// arc-set order. n <= 4 freely; n = 5 only behind the huge flag.
void enumerate_digraphs(int n, bool huge,
                        const std::function<void(const Digraph&)>& fn);

/// The digraph at one enumeration index: bit i of mask selects the i-th
/// ordered pair in lexicographic order. Lets workers split an exhaustive
/// range without sharing a stream.
Digraph digraph_from_arc_mask(int n, uint64_t mask);

uint64_t labeled_digraph_count(int n);

}  // namespace dcf
