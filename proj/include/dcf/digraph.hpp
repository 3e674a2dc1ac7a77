#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dcf {

using Arc = std::pair<int, int>;

/// Simple loop-free digraph over dense vertex ids 0..n-1. Immutable after
/// construction; arcs are kept both as a sorted arc set and as per-vertex
/// out/in lists, plus an n*n membership matrix for O(1) arc tests.
class Digraph {
 public:
  Digraph() = default;
  Digraph(int n, std::vector<Arc> arcs);

  int order() const { return n_; }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const std::vector<Arc>& arcs() const { return arcs_; }

  bool has_arc(int u, int v) const;
  const std::vector<int>& out_neighbors(int v) const;
  const std::vector<int>& in_neighbors(int v) const;
  int out_degree(int v) const;
  int in_degree(int v) const;

 private:
  void check_vertex(int v) const;

  int n_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::vector<bool> adj_;
};

/// Sorted duplicate-free vertex ids, bounds-checked against a host order.
class VertexSet {
 public:
  VertexSet() = default;
  static VertexSet of(int host_order, std::vector<int> ids);
  static VertexSet all(int host_order);

  const std::vector<int>& ids() const { return ids_; }
  int host_order() const { return n_; }
  int size() const { return static_cast<int>(ids_.size()); }
  bool empty() const { return ids_.empty(); }
  bool contains(int v) const;

 private:
  int n_ = 0;
  std::vector<int> ids_;
};

/// Integer partition with every part >= 2.
class Partition {
 public:
  static Partition of(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int count() const { return static_cast<int>(parts_.size()); }
  int sum() const;

 private:
  std::vector<int> parts_;
};

/// k vertex-disjoint directed cycles with per-cycle counts of W-vertices.
/// Each cycle is a cyclic vertex sequence; the wrap-around pair is an arc.
struct CycleFactorCertificate {
  std::vector<std::vector<int>> cycles;
  std::vector<int> w_counts;
};

struct ValidationReport {
  bool pass = true;
  std::vector<std::string> violations;
};

/// Simple loop-free undirected graph, used as input to build_symmetric.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  static UndirectedGraph of(int n, std::vector<std::pair<int, int>> edges);

  int order() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;  // stored with u < v, sorted
};

int min_semi_degree(const Digraph& d, const VertexSet& w);

/// Replaces every edge uv by the arc pair uv, vu.
Digraph build_symmetric(const UndirectedGraph& g);

/// Collapses digon pairs of a symmetric digraph back to edges. Throws if
/// some arc lacks its reverse.
UndirectedGraph collapse_symmetric(const Digraph& d);

ValidationReport validate_certificate(const Digraph& d, const VertexSet& w,
                                      const Partition& parts,
                                      const CycleFactorCertificate& cert);

/// Rotates a cyclic vertex sequence so the smallest vertex comes first.
std::vector<int> canonical_rotation(const std::vector<int>& cycle);

}  // namespace dcf
