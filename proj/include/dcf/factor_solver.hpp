#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcf/bipartite.hpp"
#include "dcf/exchange.hpp"
#include "dcf/oracle.hpp"
#include "dcf/solve_common.hpp"

namespace dcf {

struct CycleSlot {
  FeasibleCycle cycle;
  int target;  // marked pairs this cycle must end up with
};

struct OpenSlot {
  FeasiblePath path;
  int target;
};

/// Disjoint feasible cycles plus at most one open feasible path, with the
/// solver's potential tracked incrementally: total marked-pair deficit
/// against the targets, total length over cycles and path, and whether a
/// path is open (closing at equal deficit and length still makes progress).
struct PackingState {
  std::vector<CycleSlot> cycles;
  std::optional<OpenSlot> open_path;
  int deficit = 0;
  int total_length = 0;

  static PackingState make(const BipartiteRep& rep, std::vector<CycleSlot> cycles,
                           std::optional<OpenSlot> open);
  void recompute(const BipartiteRep& rep);
  uint64_t used_pairs() const;
  uint64_t free_marked(const BipartiteRep& rep) const;
  std::string to_text() const;
};

struct GrowOutcome {
  PackingState state;
  std::string move;  // empty when no move applies
};

/// Applies one move: insert a free marked pair into a cycle, shorten a cycle
/// pair, shrink or close the open path, exchange the path's deficit with a
/// donor cycle, or open a cycle that is below target.
GrowOutcome grow_step(const PackingState& state, const BipartiteRep& rep);

struct NoFactorReport {
  std::string reason;
  std::string stalled_state;                  // debug text serialization
  std::optional<OracleVerdict> oracle;        // set when within oracle bounds
};

struct SolveOptions {
  SolveMode mode = SolveMode::guaranteed;
  long long backtrack_budget = 10'000;        // grow steps across variations
  long long fallback_budget = 200'000'000;    // complete-search nodes
  int oracle_max_order = 10;                  // best-effort report cross-check
  TraceFn trace;
};

struct FactorSolveResult {
  std::optional<CycleFactorCertificate> certificate;
  std::optional<NoFactorReport> report;
  SolveStats stats;
};

FactorSolveResult solve_w_cycle_factor(const Digraph& d, const VertexSet& w,
                                       const Partition& parts,
                                       SolveOptions opts = {});

}  // namespace dcf
