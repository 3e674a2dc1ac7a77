#pragma once

#include <optional>

#include "dcf/digraph.hpp"

namespace dcf {

enum class OracleVerdict { yes, no, budget_exceeded };

struct FactorOracleResult {
  OracleVerdict verdict;
  std::optional<CycleFactorCertificate> certificate;  // set on yes
};

/// Exhaustive backtracking over ordered selections of disjoint directed
/// cycles meeting the per-part W-counts. `no` only after full exploration;
/// budgets are explored-node counts.
FactorOracleResult oracle_factor_exists(const Digraph& d, const VertexSet& w,
                                        const Partition& parts,
                                        long long budget = 200'000'000);

struct CyclableOracleResult {
  OracleVerdict verdict;
  std::optional<std::vector<int>> cycle;  // set on yes
};

/// Exhaustive search for one directed cycle containing all of W.
CyclableOracleResult oracle_cyclable(const Digraph& d, const VertexSet& w,
                                     long long budget = 200'000'000);

/// Whether the digon graph (vertices of d, an edge where both arcs exist)
/// has a perfect matching. Polynomial and exact at any order.
bool oracle_digon_factor(const Digraph& d);

}  // namespace dcf
