#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcf/digraph.hpp"
#include "dcf/oracle.hpp"
#include "dcf/solve_common.hpp"

namespace dcf {

/// A path meeting the current cycle only at its (possibly equal) end
/// vertices, with at least one internal W-vertex. `w_pos` indexes the
/// designated internal W-vertex inside `path`.
struct Bypass {
  std::vector<int> path;
  int w_pos = 0;

  int origin() const { return path.front(); }
  int terminus() const { return path.back(); }
  int through() const { return path[w_pos]; }
  int size() const { return static_cast<int>(path.size()); }
};

/// Internally disjoint u->v and v->u paths of length at most 2. Requires
/// u, v in W, u != v and 2 * min_semi_degree(d, w) >= order.
std::pair<std::vector<int>, std::vector<int>> short_connecting_paths(
    const Digraph& d, const VertexSet& w, int u, int v);

/// Splices u between two consecutive path vertices. Requires u off the path
/// with degree into it at least path-arc-count + 2; the slot scan must then
/// succeed and its failure aborts loudly.
std::vector<int> insert_vertex(const Digraph& d, const std::vector<int>& path,
                               int u);

/// One path through all of V(q) and k_set, same endpoints as q, built by
/// iterated insertion. Every k_set vertex must be individually insertable
/// into q. Tries all insertion orders up to 6 vertices, then
/// most-constrained-first with backtracking.
std::vector<int> merge_insertable_set(const Digraph& d,
                                      const std::vector<int>& q,
                                      const std::vector<int>& k_set);

/// A bypass through v for the given cycle, built from short connecting
/// paths to W-vertices on the cycle and trimmed at the cycle boundary.
/// Candidates are ranked by (amount of cycle spanned, length).
Bypass find_bypass(const Digraph& d, const VertexSet& w,
                   const std::vector<int>& cycle, int v);

struct NoCycleReport {
  std::string reason;
  std::optional<OracleVerdict> oracle;  // set when within oracle bounds
};

struct CyclableOptions {
  SolveMode mode = SolveMode::guaranteed;
  int oracle_max_order = 10;
  TraceFn trace;
};

struct CyclableResult {
  std::optional<std::vector<int>> cycle;
  std::optional<NoCycleReport> report;
  SolveStats stats;
};

/// One directed cycle containing all of W. Guaranteed mode requires
/// 2 * min_semi_degree(d, w) >= order and |W| >= 2.
CyclableResult find_w_cycle(const Digraph& d, const VertexSet& w,
                            CyclableOptions opts = {});

/// Greedy chaining construction: links consecutive W-vertices of each part
/// by an arc or one fresh intermediate vertex outside W. Requires
/// order >= 2|W| and 2 * min_semi_degree(d, w) >= order + 2|W| - 2.
CycleFactorCertificate theorem5_factor(const Digraph& d, const VertexSet& w,
                                       const Partition& parts);

}  // namespace dcf
