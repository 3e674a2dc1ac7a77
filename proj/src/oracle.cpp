#include "dcf/oracle.hpp"

#include <algorithm>
#include <queue>
#include <vector>

namespace dcf {

namespace {

struct FactorSearch {
  const Digraph& d;
  const VertexSet& w;
  long long budget;
  long long nodes = 0;
  bool budget_hit = false;
  std::vector<int> part_values{};  // sorted ascending
  std::vector<bool> part_used{};
  std::vector<bool> free_vertex{};
  std::vector<std::vector<int>> cycles{};
  std::vector<int> cycle_parts{};

  bool tick() {
    if (++nodes > budget) budget_hit = true;
    return !budget_hit;
  }

  bool solve(int parts_left) {
    if (!tick()) return false;
    if (parts_left == 0) return true;
    int anchor = -1;
    for (int v : w.ids()) {
      if (free_vertex[v]) {
        anchor = v;
        break;
      }
    }
    if (anchor < 0) return false;
    for (size_t i = 0; i < part_values.size(); ++i) {
      if (part_used[i]) continue;
      if (i > 0 && part_values[i] == part_values[i - 1] && !part_used[i - 1])
        continue;  // identical part already tried at this level
      part_used[i] = true;
      std::vector<int> path{anchor};
      free_vertex[anchor] = false;
      bool found = extend(anchor, path, 1, part_values[i], parts_left);
      free_vertex[anchor] = true;
      if (found) {
        cycle_parts.push_back(part_values[i]);
        return true;
      }
      part_used[i] = false;
      if (budget_hit) return false;
    }
    return false;
  }

  // Grows a cycle through path.front(); every closure with the exact W-count
  // is tried as a placed cycle before the search continues.
  bool extend(int cur, std::vector<int>& path, int wcount, int target,
              int parts_left) {
    if (!tick()) return false;
    int anchor = path.front();
    if (wcount == target && path.size() >= 2 && d.has_arc(cur, anchor)) {
      cycles.push_back(path);
      if (solve(parts_left - 1)) return true;
      cycles.pop_back();
      if (budget_hit) return false;
    }
    for (int nxt : d.out_neighbors(cur)) {
      if (!free_vertex[nxt]) continue;
      int nw = wcount + (w.contains(nxt) ? 1 : 0);
      if (nw > target) continue;
      free_vertex[nxt] = false;
      path.push_back(nxt);
      bool found = extend(nxt, path, nw, target, parts_left);
      path.pop_back();
      free_vertex[nxt] = true;
      if (found) return true;
      if (budget_hit) return false;
    }
    return false;
  }
};

}  // namespace

FactorOracleResult oracle_factor_exists(const Digraph& d, const VertexSet& w,
                                        const Partition& parts,
                                        long long budget) {
  if (parts.sum() != w.size()) return {OracleVerdict::no, std::nullopt};
  FactorSearch search{d, w, budget};
  search.part_values = parts.parts();
  std::sort(search.part_values.begin(), search.part_values.end());
  search.part_used.assign(search.part_values.size(), false);
  search.free_vertex.assign(d.order(), true);
  bool found = search.solve(parts.count());
  if (found) {
    CycleFactorCertificate cert;
    for (size_t i = 0; i < search.cycles.size(); ++i) {
      cert.cycles.push_back(canonical_rotation(search.cycles[i]));
      int wc = 0;
      for (int v : search.cycles[i])
        if (w.contains(v)) ++wc;
      cert.w_counts.push_back(wc);
    }
    return {OracleVerdict::yes, std::move(cert)};
  }
  if (search.budget_hit) return {OracleVerdict::budget_exceeded, std::nullopt};
  return {OracleVerdict::no, std::nullopt};
}

namespace {

struct CyclableSearch {
  const Digraph& d;
  const VertexSet& w;
  long long budget;
  long long nodes = 0;
  bool budget_hit = false;
  std::vector<bool> on_path{};
  std::vector<int> path{};

  bool extend(int cur, int wcount) {
    if (++nodes > budget) {
      budget_hit = true;
      return false;
    }
    int start = path.front();
    if (wcount == w.size() && path.size() >= 2 && d.has_arc(cur, start))
      return true;
    for (int nxt : d.out_neighbors(cur)) {
      if (on_path[nxt]) continue;
      on_path[nxt] = true;
      path.push_back(nxt);
      if (extend(nxt, wcount + (w.contains(nxt) ? 1 : 0))) return true;
      path.pop_back();
      on_path[nxt] = false;
      if (budget_hit) return false;
    }
    return false;
  }
};

}  // namespace

CyclableOracleResult oracle_cyclable(const Digraph& d, const VertexSet& w,
                                     long long budget) {
  if (w.empty()) return {OracleVerdict::no, std::nullopt};
  int start = w.ids().front();  // any W-spanning cycle passes through min(W)
  CyclableSearch search{d, w, budget};
  search.on_path.assign(d.order(), false);
  search.on_path[start] = true;
  search.path.push_back(start);
  if (search.extend(start, 1))
    return {OracleVerdict::yes, canonical_rotation(search.path)};
  if (search.budget_hit) return {OracleVerdict::budget_exceeded, std::nullopt};
  return {OracleVerdict::no, std::nullopt};
}

namespace {

// Classic blossom maximum matching on a general graph.
struct BlossomMatcher {
  int n;
  std::vector<std::vector<int>> adj;
  std::vector<int> match, parent, base;
  std::vector<bool> used, blossom;

  explicit BlossomMatcher(const std::vector<std::vector<int>>& graph)
      : n(static_cast<int>(graph.size())),
        adj(graph),
        match(n, -1),
        parent(n),
        base(n),
        used(n),
        blossom(n) {}

  int lowest_common_ancestor(int a, int b) {
    std::vector<bool> seen(n, false);
    while (true) {
      a = base[a];
      seen[a] = true;
      if (match[a] < 0) break;
      a = parent[match[a]];
    }
    while (true) {
      b = base[b];
      if (seen[b]) return b;
      b = parent[match[b]];
    }
  }

  void mark_path(int v, int b, int child) {
    while (base[v] != b) {
      blossom[base[v]] = true;
      blossom[base[match[v]]] = true;
      parent[v] = child;
      child = match[v];
      v = parent[match[v]];
    }
  }

  bool find_augmenting_path(int root) {
    std::fill(used.begin(), used.end(), false);
    std::fill(parent.begin(), parent.end(), -1);
    for (int i = 0; i < n; ++i) base[i] = i;
    std::queue<int> q;
    used[root] = true;
    q.push(root);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int u : adj[v]) {
        if (base[v] == base[u] || match[v] == u) continue;
        if (u == root || (match[u] >= 0 && parent[match[u]] >= 0)) {
          int cur_base = lowest_common_ancestor(v, u);
          std::fill(blossom.begin(), blossom.end(), false);
          mark_path(v, cur_base, u);
          mark_path(u, cur_base, v);
          for (int i = 0; i < n; ++i) {
            if (blossom[base[i]]) {
              base[i] = cur_base;
              if (!used[i]) {
                used[i] = true;
                q.push(i);
              }
            }
          }
        } else if (parent[u] < 0) {
          parent[u] = v;
          if (match[u] < 0) {
            int cur = u;
            while (cur != -1) {
              int prev = parent[cur];
              int nxt = prev >= 0 ? match[prev] : -1;
              match[cur] = prev;
              if (prev >= 0) match[prev] = cur;
              cur = nxt;
            }
            return true;
          }
          used[match[u]] = true;
          q.push(match[u]);
        }
      }
    }
    return false;
  }

  int max_matching() {
    int size = 0;
    for (int v = 0; v < n; ++v)
      if (match[v] < 0 && find_augmenting_path(v)) ++size;
    return size;
  }
};

}  // namespace

bool oracle_digon_factor(const Digraph& d) {
  int n = d.order();
  if (n % 2 != 0) return false;
  std::vector<std::vector<int>> digons(n);
  for (auto [u, v] : d.arcs())
    if (u < v && d.has_arc(v, u)) {
      digons[u].push_back(v);
      digons[v].push_back(u);
    }
  BlossomMatcher matcher(digons);
  return matcher.max_matching() == n / 2;
}

}  // namespace dcf
