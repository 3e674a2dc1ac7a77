#pragma once

#include <optional>
#include <vector>

#include "dcf/bipartite.hpp"

namespace dcf {

/// Extends a feasible cycle by an outside marked pair. Requires the pair's
/// degree sum into the cycle to be at least pair_size(c) + 1; the slot scan
/// is then guaranteed to succeed and its failure aborts loudly.
FeasibleCycle lemma1_insert(const BipartiteRep& rep, const FeasibleCycle& c,
                            int marked_pair);

struct ShortenResult {
  FeasibleCycle first;
  FeasibleCycle second;
  bool m0_preserved;  // combined marked count unchanged vs the inputs
};

/// Rewrites two disjoint feasible cycles into a strictly shorter disjoint
/// pair inside their union, minimizing (combined marked count, combined
/// length) lexicographically. Applicability: m0(c1)=s, m0(c2)=t with
/// t >= s >= 2, t >= 3, and the marked pairs of c2 must send more than
/// (3/4)*t*length(c1) edges into c1.
ShortenResult lemma2_shorten(const BipartiteRep& rep, const FeasibleCycle& c1,
                             const FeasibleCycle& c2);

/// Orientation of a subgraph of a complete bipartite graph. X-side vertices
/// are 0..nx-1, Y-side nx..nx+ny-1; digons are rejected.
class BipOrientedGraph {
 public:
  BipOrientedGraph(int nx, int ny, std::vector<Arc> arcs);

  int x_size() const { return nx_; }
  int y_size() const { return ny_; }
  int order() const { return nx_ + ny_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  int out_degree(int v) const { return out_[v]; }
  int in_degree(int v) const { return in_[v]; }

 private:
  int nx_ = 0, ny_ = 0;
  std::vector<Arc> arcs_;
  std::vector<int> out_, in_;
};

/// First arc (u,v) in lexicographic endpoint order with
/// in_degree(u) + out_degree(v) < order/2, if any.
std::optional<Arc> lemma3_find_arc(const BipOrientedGraph& b);

/// Closes a good feasible path into a feasible cycle on exactly its vertex
/// set. Requires the endpoint degree sum to be at least (3/2) * pair count,
/// the path to be good, and no shorter feasible path with the same marked
/// set to exist inside [V(p)].
FeasibleCycle lemma4_close_path(const BipartiteRep& rep, const FeasiblePath& p,
                                int max_pairs = 12);

/// Packs floor(marked/2) disjoint feasible cycles, each carrying exactly two
/// marked pairs and at most four pairs total. Requires every marked matching
/// edge endpoint to have bipartite degree at least (3n+1)/4.
std::vector<FeasibleCycle> claim1_base_packing(const BipartiteRep& rep,
                                               long long node_budget = 50'000'000);

}  // namespace dcf
