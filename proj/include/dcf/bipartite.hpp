#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcf/digraph.hpp"

namespace dcf {

/// Balanced bipartite graph on vertex copies x_0..x_{n-1} / y_0..y_{n-1}
/// with the built-in perfect matching {x_i y_i} and a marked subset of
/// matching edges. A non-matching edge {x_u, y_v} (u != v) exists exactly
/// when cross(u, v) holds; building from a digraph makes that the arc
/// relation u->v. Capped at 64 matched pairs so pair sets fit in one word.
class BipartiteRep {
 public:
  static constexpr int kMaxPairs = 64;

  static BipartiteRep from_digraph(const Digraph& d);

  int pair_count() const { return n_; }
  bool cross(int u, int v) const { return (row_[u] >> v) & 1; }
  uint64_t cross_row(int u) const { return row_[u]; }   // {v : x_u y_v edge}
  uint64_t cross_col(int v) const { return col_[v]; }   // {u : x_u y_v edge}
  uint64_t marked_mask() const { return marked_; }
  bool is_marked(int i) const { return (marked_ >> i) & 1; }
  std::vector<int> marked_indices() const;
  int marked_count() const;

  int x_degree(int u) const;  // bipartite degree of x_u, matching edge included
  int y_degree(int v) const;

  /// Minimum bipartite degree over all endpoints of marked matching edges;
  /// returns pair count + 1 (an unattainable maximum) when nothing is marked.
  int min_marked_degree() const;

  BipartiteRep with_marks(const VertexSet& w) const;
  BipartiteRep fact1_reduced() const;

  /// Arc relation recovered from the non-matching edges.
  Digraph to_digraph() const;

 private:
  int n_ = 0;
  std::vector<uint64_t> row_;
  std::vector<uint64_t> col_;
  uint64_t marked_ = 0;
};

/// M-alternating path, stored as the pair-index sequence of its matched
/// pairs in arc direction: consecutive pairs p_i, p_{i+1} are joined by the
/// non-matching edge {x_{p_i}, y_{p_{i+1}}}. Both end pairs are marked. In
/// the x->y writing convention the sequence reads back-to-front; reversal
/// is explicit, never implicit.
struct FeasiblePath {
  std::vector<int> pairs;
  int pair_size() const { return static_cast<int>(pairs.size()); }
  int length() const { return 2 * pair_size(); }  // vertex count = edge count
  int front() const { return pairs.front(); }
  int back() const { return pairs.back(); }
};

/// M-alternating cycle in the same directed encoding, wrap-around edge
/// {x_back, y_front} included. Carries >= 2 marked pairs.
struct FeasibleCycle {
  std::vector<int> pairs;  // canonical: smallest pair index first
  int pair_size() const { return static_cast<int>(pairs.size()); }
  int length() const { return 2 * pair_size(); }
};

FeasiblePath make_feasible_path(const BipartiteRep& rep, std::vector<int> pairs);
FeasibleCycle make_feasible_cycle(const BipartiteRep& rep, std::vector<int> pairs);

int m0_length(const BipartiteRep& rep, const FeasiblePath& p);
int m0_length(const BipartiteRep& rep, const FeasibleCycle& c);

uint64_t pair_mask(const std::vector<int>& pairs);

/// One side of a matched pair.
struct BipVertex {
  bool x_side;
  int idx;
};

/// Number of bipartite edges from v into the vertices of the given pairs,
/// the pair's own matching edge included when its index lies in the mask.
int degree_into(const BipartiteRep& rep, BipVertex v, uint64_t pairs);

/// Degree sum of several bipartite vertices into a pair set; an edge with
/// both endpoints among the sources is counted from each side.
int degree_sum_into(const BipartiteRep& rep, const std::vector<BipVertex>& vs,
                    uint64_t pairs);

/// Endpoint degree sum e({x_front-of-convention, y_back}, pairs) of a path:
/// the quantity good feasible paths minimize.
int path_endpoint_degree(const BipartiteRep& rep, const FeasiblePath& p,
                         uint64_t pairs);

BipartiteRep build_bipartite_rep(const Digraph& d);
BipartiteRep mark_m0(const BipartiteRep& rep, const VertexSet& w);
BipartiteRep fact1_reduce(const BipartiteRep& rep);

/// Contracts each matched pair of an alternating cycle to one vertex,
/// yielding the corresponding directed cycle of half the length.
std::vector<int> alt_cycle_to_dicycle(const BipartiteRep& rep,
                                      const FeasibleCycle& c);

/// Inverse of alt_cycle_to_dicycle for a directed cycle of the source digraph.
FeasibleCycle dicycle_to_alt_cycle(const BipartiteRep& rep,
                                   const std::vector<int>& cycle);

/// Among all feasible paths on exactly V(p) with the same marked set,
/// returns one minimizing the endpoint degree sum into [V(p)]; ties broken
/// by lexicographically least pair sequence. Exhaustive within [V(p)],
/// which is capped at max_pairs matched pairs.
FeasiblePath select_good_feasible_path(const BipartiteRep& rep,
                                       const FeasiblePath& p,
                                       int max_pairs = 12);

/// True when [V(p)] contains a feasible path on fewer pairs carrying the
/// same marked set.
bool has_shorter_same_m0_path(const BipartiteRep& rep, const FeasiblePath& p);

/// Lexicographically least feasible path using exactly the pairs of `mask`
/// with the given marked assignment, if one exists.
std::optional<std::vector<int>> find_spanning_alt_path(const BipartiteRep& rep,
                                                       uint64_t mask);

/// Lexicographically least alternating cycle spanning exactly `mask`, if any.
std::optional<std::vector<int>> find_spanning_alt_cycle(const BipartiteRep& rep,
                                                        uint64_t mask);

/// All feasible cycles whose pairs lie inside `allowed`, canonical rotation,
/// optionally capped by pair count. Intended for desk-scale subgraphs.
std::vector<FeasibleCycle> enumerate_feasible_cycles(const BipartiteRep& rep,
                                                     uint64_t allowed,
                                                     int max_pairs = 64);

std::string dump_bipartite(const BipartiteRep& rep);

}  // namespace dcf
