#include "dcf/cyclable.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

#include "dcf/errors.hpp"

namespace dcf {

namespace {

std::string seq_text(const std::vector<int>& seq) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < seq.size(); ++i) os << (i ? " " : "") << seq[i];
  os << "]";
  return os.str();
}

void check_simple_cycle(const Digraph& d, const std::vector<int>& cyc) {
  if (cyc.size() < 2)
    throw GuaranteeViolation("cycle below length 2: " + seq_text(cyc));
  std::set<int> uniq(cyc.begin(), cyc.end());
  if (uniq.size() != cyc.size())
    throw GuaranteeViolation("cycle repeats a vertex: " + seq_text(cyc));
  for (size_t i = 0; i < cyc.size(); ++i)
    if (!d.has_arc(cyc[i], cyc[(i + 1) % cyc.size()]))
      throw GuaranteeViolation("cycle misses an arc: " + seq_text(cyc));
}

int degree_into_set(const Digraph& d, int v, const std::vector<char>& member) {
  int total = 0;
  for (int u : d.out_neighbors(v)) total += member[u] ? 1 : 0;
  for (int u : d.in_neighbors(v)) total += member[u] ? 1 : 0;
  return total;
}

bool has_insertion_slot(const Digraph& d, const std::vector<int>& path, int u) {
  for (size_t i = 0; i + 1 < path.size(); ++i)
    if (d.has_arc(path[i], u) && d.has_arc(u, path[i + 1])) return true;
  return false;
}

}  // namespace

std::pair<std::vector<int>, std::vector<int>> short_connecting_paths(
    const Digraph& d, const VertexSet& w, int u, int v) {
  if (!w.contains(u) || !w.contains(v) || u == v)
    throw PreconditionError("need two distinct W-vertices");
  int n = d.order();
  if (2 * min_semi_degree(d, w) < n)
    throw PreconditionError("semi-degree below n/2");

  auto common = [&](int from, int to) {
    std::vector<int> out;
    for (int z : d.out_neighbors(from))
      if (z != to && z != from && d.has_arc(z, to)) out.push_back(z);
    return out;  // already ascending (neighbor lists are sorted)
  };

  std::vector<int> p1, p2;
  std::vector<int> c1 = common(u, v), c2 = common(v, u);
  if (d.has_arc(u, v))
    p1 = {u, v};
  else if (!c1.empty())
    p1 = {u, c1[0], v};
  if (d.has_arc(v, u)) {
    p2 = {v, u};
  } else {
    int skip = p1.size() == 3 ? p1[1] : -1;
    for (int z : c2) {
      if (z != skip) {
        p2 = {v, z, u};
        break;
      }
    }
  }
  if (p1.empty() || p2.empty())
    throw GuaranteeViolation("connecting paths missing under the degree bound");
  return {p1, p2};
}

std::vector<int> insert_vertex(const Digraph& d, const std::vector<int>& path,
                               int u) {
  if (path.size() < 2) throw PreconditionError("path needs at least one arc");
  if (std::find(path.begin(), path.end(), u) != path.end())
    throw PreconditionError("vertex already on the path");
  int p = static_cast<int>(path.size()) - 1;
  std::vector<char> member(d.order(), 0);
  for (int x : path) member[x] = 1;
  int deg = degree_into_set(d, u, member);
  if (deg < p + 2) {
    std::ostringstream os;
    os << "degree " << deg << " into the path is below " << (p + 2);
    throw PreconditionError(os.str());
  }
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    if (d.has_arc(path[i], u) && d.has_arc(u, path[i + 1])) {
      std::vector<int> out(path.begin(), path.begin() + i + 1);
      out.push_back(u);
      out.insert(out.end(), path.begin() + i + 1, path.end());
      return out;
    }
  }
  throw GuaranteeViolation("no insertion slot despite the degree bound: " +
                           seq_text(path));
}

namespace {

std::optional<std::vector<int>> insert_at_first_slot(const Digraph& d,
                                                     const std::vector<int>& path,
                                                     int u) {
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    if (d.has_arc(path[i], u) && d.has_arc(u, path[i + 1])) {
      std::vector<int> out(path.begin(), path.begin() + i + 1);
      out.push_back(u);
      out.insert(out.end(), path.begin() + i + 1, path.end());
      return out;
    }
  }
  return std::nullopt;
}

std::optional<std::vector<int>> merge_by_order(const Digraph& d,
                                               std::vector<int> path,
                                               const std::vector<int>& order) {
  for (int z : order) {
    auto next = insert_at_first_slot(d, path, z);
    if (!next) return std::nullopt;
    path = std::move(*next);
  }
  return path;
}

// Most-constrained-first with backtracking over the chosen vertex's slots.
bool merge_backtrack(const Digraph& d, const std::vector<int>& path,
                     std::vector<int> remaining, std::vector<int>& out) {
  if (remaining.empty()) {
    out = path;
    return true;
  }
  int pick = -1, fewest = INT32_MAX;
  for (int z : remaining) {
    int slots = 0;
    for (size_t i = 0; i + 1 < path.size(); ++i)
      if (d.has_arc(path[i], z) && d.has_arc(z, path[i + 1])) ++slots;
    if (slots < fewest) {
      fewest = slots;
      pick = z;
    }
  }
  if (fewest == 0) return false;
  std::vector<int> rest;
  for (int z : remaining)
    if (z != pick) rest.push_back(z);
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    if (!(d.has_arc(path[i], pick) && d.has_arc(pick, path[i + 1]))) continue;
    std::vector<int> next(path.begin(), path.begin() + i + 1);
    next.push_back(pick);
    next.insert(next.end(), path.begin() + i + 1, path.end());
    if (merge_backtrack(d, next, rest, out)) return true;
  }
  return false;
}

}  // namespace

std::vector<int> merge_insertable_set(const Digraph& d,
                                      const std::vector<int>& q,
                                      const std::vector<int>& k_set) {
  if (k_set.empty()) return q;
  if (q.size() < 2) throw PreconditionError("target path needs at least one arc");
  for (int z : k_set) {
    if (std::find(q.begin(), q.end(), z) != q.end())
      throw PreconditionError("set vertex already on the path");
    if (!has_insertion_slot(d, q, z)) {
      std::ostringstream os;
      os << "vertex " << z << " is not insertable into the path";
      throw PreconditionError(os.str());
    }
  }
  std::vector<int> sorted = k_set;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() <= 6) {
    do {
      if (auto merged = merge_by_order(d, q, sorted)) return *merged;
    } while (std::next_permutation(sorted.begin(), sorted.end()));
  } else {
    std::vector<int> out;
    if (merge_backtrack(d, q, sorted, out)) return out;
  }
  throw GuaranteeViolation("no insertion order merges the set: " + seq_text(q) +
                           " + " + seq_text(k_set));
}

namespace {

bool bypass_is_valid(const Digraph& d, const std::vector<char>& on_cycle,
                     const VertexSet& w, const Bypass& t) {
  const auto& p = t.path;
  if (p.size() < 2) return false;
  if (!on_cycle[p.front()] || !on_cycle[p.back()]) return false;
  std::set<int> interior;
  for (size_t i = 1; i + 1 < p.size(); ++i) {
    if (on_cycle[p[i]]) return false;
    if (!interior.insert(p[i]).second) return false;
  }
  if (p.front() == p.back() && p.size() < 3) return false;
  if (p.front() != p.back() && interior.count(p.front())) return false;
  for (size_t i = 0; i + 1 < p.size(); ++i)
    if (!d.has_arc(p[i], p[i + 1])) return false;
  if (t.w_pos <= 0 || t.w_pos + 1 >= static_cast<int>(p.size())) return false;
  return w.contains(p[t.w_pos]);
}

// All trimmed bypass candidates through v anchored at W-vertices of the
// cycle, ranked by (spanned cycle stretch, length, path).
std::vector<Bypass> bypass_candidates(const Digraph& d, const VertexSet& w,
                                      const std::vector<int>& cyc, int v) {
  int n = d.order();
  std::vector<char> on_cycle(n, 0);
  std::vector<int> pos(n, -1);
  for (size_t i = 0; i < cyc.size(); ++i) {
    on_cycle[cyc[i]] = 1;
    pos[cyc[i]] = static_cast<int>(i);
  }
  int len = static_cast<int>(cyc.size());
  auto span = [&](int x, int y) {
    if (x == y) return len - 1;
    return (pos[y] - pos[x] - 1 + len) % len;
  };

  std::vector<Bypass> out;
  for (int u : cyc) {
    if (!w.contains(u)) continue;
    std::pair<std::vector<int>, std::vector<int>> paths;
    try {
      paths = short_connecting_paths(d, w, u, v);
    } catch (const GuaranteeViolation&) {
      continue;
    }
    const auto& p1 = paths.first;   // u .. v
    const auto& p2 = paths.second;  // v .. u
    std::vector<int> t;
    if (p1.size() == 3 && on_cycle[p1[1]])
      t = {p1[1], v};
    else
      t.assign(p1.begin(), p1.end());
    int w_pos = static_cast<int>(t.size()) - 1;
    if (p2.size() == 3 && !on_cycle[p2[1]]) t.push_back(p2[1]);
    t.push_back(p2.size() == 3 && on_cycle[p2[1]] ? p2[1] : u);
    Bypass cand{std::move(t), w_pos};
    if (!bypass_is_valid(d, on_cycle, w, cand)) continue;
    out.push_back(std::move(cand));
  }
  std::sort(out.begin(), out.end(), [&](const Bypass& a, const Bypass& b) {
    return std::make_tuple(span(a.origin(), a.terminus()), a.size(), a.path) <
           std::make_tuple(span(b.origin(), b.terminus()), b.size(), b.path);
  });
  return out;
}

}  // namespace

Bypass find_bypass(const Digraph& d, const VertexSet& w,
                   const std::vector<int>& cycle, int v) {
  if (2 * min_semi_degree(d, w) < d.order())
    throw PreconditionError("semi-degree below n/2");
  int wc = 0;
  for (int x : cycle)
    if (w.contains(x)) ++wc;
  if (wc < 2) throw PreconditionError("cycle carries fewer than 2 W-vertices");
  if (!w.contains(v) ||
      std::find(cycle.begin(), cycle.end(), v) != cycle.end())
    throw PreconditionError("need a W-vertex off the cycle");
  check_simple_cycle(d, cycle);
  auto cands = bypass_candidates(d, w, cycle, v);
  if (cands.empty())
    throw GuaranteeViolation("no bypass despite the degree bound: " +
                             seq_text(cycle));
  return cands.front();
}

namespace {

// One cycle + bypass improvement state and the move catalog derived from
// the bypass relations; every accepted move strictly improves
// (-|W on cycle|, |spanned stretch|, |bypass|).
struct CycEngine {
  const Digraph& d;
  const VertexSet& w;
  std::vector<int> cyc;
  std::vector<char> on_cycle;
  std::vector<int> pos;

  CycEngine(const Digraph& d, const VertexSet& w, std::vector<int> c)
      : d(d), w(w) {
    set_cycle(std::move(c));
  }

  void set_cycle(std::vector<int> c) {
    check_simple_cycle(d, c);
    cyc = std::move(c);
    on_cycle.assign(d.order(), 0);
    pos.assign(d.order(), -1);
    for (size_t i = 0; i < cyc.size(); ++i) {
      on_cycle[cyc[i]] = 1;
      pos[cyc[i]] = static_cast<int>(i);
    }
  }

  int len() const { return static_cast<int>(cyc.size()); }

  std::vector<int> stretch(int x, int y) const {  // cycle vertices x+..y-
    std::vector<int> out;
    if (x == y) {
      for (int k = 1; k < len(); ++k) out.push_back(cyc[(pos[x] + k) % len()]);
      return out;
    }
    for (int i = (pos[x] + 1) % len(); i != pos[y]; i = (i + 1) % len())
      out.push_back(cyc[i]);
    return out;
  }

  std::vector<int> back_path(int y, int x) const {  // cycle vertices y..x
    std::vector<int> out{y};
    if (x == y) return out;
    for (int i = (pos[y] + 1) % len();; i = (i + 1) % len()) {
      out.push_back(cyc[i]);
      if (cyc[i] == x) break;
    }
    return out;
  }

  // Direct insertion of an off-cycle vertex anywhere on the cycle.
  std::optional<std::vector<int>> try_insert(int v) const {
    for (int i = 0; i < len(); ++i) {
      if (d.has_arc(cyc[i], v) && d.has_arc(v, cyc[(i + 1) % len()])) {
        std::vector<int> out(cyc.begin(), cyc.begin() + i + 1);
        out.push_back(v);
        out.insert(out.end(), cyc.begin() + i + 1, cyc.end());
        return out;
      }
    }
    return std::nullopt;
  }
};

struct MoveResult {
  std::vector<int> cycle;          // empty: cycle unchanged
  std::optional<Bypass> bypass;    // replacement bypass, if still pinned
  const char* name;
};

// The move catalog for one pinned bypass, tried in the order the relations
// appear. Returns the first applicable rewrite.
std::optional<MoveResult> try_bypass_moves(const CycEngine& eng, const Bypass& t) {
  const Digraph& d = eng.d;
  const VertexSet& w = eng.w;
  int v = t.through();
  int x = t.origin();
  int y = t.terminus();
  std::vector<int> s_list = eng.stretch(x, y);
  std::vector<int> b_list = eng.back_path(y, x);
  std::vector<int> xs;
  for (int z : s_list)
    if (w.contains(z)) xs.push_back(z);

  std::vector<char> in_p1(d.order(), 0), in_p2(d.order(), 0);
  for (int i = 0; i <= t.w_pos; ++i) in_p1[t.path[i]] = 1;
  for (int i = t.w_pos; i < t.size(); ++i) in_p2[t.path[i]] = 1;
  std::vector<char> off_cycle(d.order(), 0);
  for (int z = 0; z < d.order(); ++z) off_cycle[z] = !eng.on_cycle[z];

  // Re-root the origin deeper into the stretch through an outside witness.
  for (int xi : xs) {
    for (int w1 : d.out_neighbors(xi)) {
      if (!off_cycle[w1] || in_p2[w1] || !d.has_arc(w1, v)) continue;
      Bypass nt;
      nt.path = {xi, w1};
      nt.path.insert(nt.path.end(), t.path.begin() + t.w_pos, t.path.end());
      nt.w_pos = 2;
      if (!bypass_is_valid(d, eng.on_cycle, w, nt)) continue;
      return MoveResult{{}, std::move(nt), "reroot-origin"};
    }
  }
  // Symmetric re-rooting of the terminus.
  for (int xi : xs) {
    for (int w1 : d.in_neighbors(xi)) {
      if (!off_cycle[w1] || in_p1[w1] || !d.has_arc(v, w1)) continue;
      Bypass nt;
      nt.path.assign(t.path.begin(), t.path.begin() + t.w_pos + 1);
      nt.path.push_back(w1);
      nt.path.push_back(xi);
      nt.w_pos = t.w_pos;
      if (!bypass_is_valid(d, eng.on_cycle, w, nt)) continue;
      return MoveResult{{}, std::move(nt), "reroot-terminus"};
    }
  }

  // Witnesses on the bypass legs themselves.
  auto leg2_witness = [&](int xi) -> int {  // arc xi->w2, w2->v, w2 inside leg 2
    for (int i = t.w_pos + 1; i + 1 < t.size(); ++i) {
      int w2 = t.path[i];
      if (d.has_arc(xi, w2) && d.has_arc(w2, v)) return i;
    }
    return -1;
  };
  auto leg1_witness = [&](int xi) -> int {  // arc v->w1, w1->xi, w1 inside leg 1
    for (int i = 1; i < t.w_pos; ++i) {
      int w1 = t.path[i];
      if (d.has_arc(v, w1) && d.has_arc(w1, xi)) return i;
    }
    return -1;
  };

  int t_hi = -1, t_hi_wit = -1;  // last stretch W-vertex with a leg-2 witness
  for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
    int wit = leg2_witness(xs[i]);
    if (wit >= 0) {
      t_hi = i;
      t_hi_wit = wit;
    }
  }
  int t_lo = -1, t_lo_wit = -1;  // first stretch W-vertex with a leg-1 witness
  for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
    int wit = leg1_witness(xs[i]);
    if (wit >= 0) {
      t_lo = i;
      t_lo_wit = wit;
      break;
    }
  }

  // Double jump: both legs reattach strictly inside the stretch.
  if (t_hi >= 0) {
    for (int i = t_hi + 1; i < static_cast<int>(xs.size()); ++i) {
      int wit1 = leg1_witness(xs[i]);
      if (wit1 < 0) continue;
      Bypass nt;
      nt.path = {xs[t_hi], t.path[t_hi_wit], v, t.path[wit1], xs[i]};
      nt.w_pos = 2;
      if (!bypass_is_valid(d, eng.on_cycle, w, nt)) continue;
      return MoveResult{{}, std::move(nt), "double-jump"};
    }
  }

  std::vector<char> in_r = off_cycle;
  auto d_r = [&](int z) { return degree_into_set(d, z, in_r); };
  int r_size = 0;
  for (int z = 0; z < d.order(); ++z) r_size += in_r[z] ? 1 : 0;
  std::vector<char> in_b(d.order(), 0);
  for (int z : b_list) in_b[z] = 1;
  bool v_b_bound = degree_into_set(d, v, in_b) <= static_cast<int>(b_list.size()) + 1;

  auto insertable_all = [&](const std::vector<int>& k_set) {
    if (k_set.empty()) return true;
    if (b_list.size() < 2) return false;
    for (int z : k_set) {
      if (d_r(z) + d_r(v) > 2 * r_size - 2) return false;
      if (!has_insertion_slot(d, b_list, z)) return false;
    }
    return true;
  };
  // Individual insertability does not promise a full merge order, so a
  // failed merge just disables the move.
  auto soft_merge = [&](const std::vector<int>& k_set)
      -> std::optional<std::vector<int>> {
    if (k_set.empty()) return b_list;
    try {
      return merge_insertable_set(d, b_list, k_set);
    } catch (const GuaranteeViolation&) {
      return std::nullopt;
    }
  };

  // Shorten the bypass at its tail: fold the stretch suffix into the back
  // path and ride the tail witness home.
  if (t_hi >= 0 && v_b_bound) {
    std::vector<int> k_set(xs.begin() + t_hi + 1, xs.end());
    if (insertable_all(k_set)) {
      if (auto merged = soft_merge(k_set)) {
        std::vector<int> ncyc = *merged;  // y .. x with insertions
        for (int i = (eng.pos[x] + 1) % eng.len();; i = (i + 1) % eng.len()) {
          ncyc.push_back(eng.cyc[i]);
          if (eng.cyc[i] == xs[t_hi]) break;
        }
        for (int i = t_hi_wit; i + 1 < t.size(); ++i) ncyc.push_back(t.path[i]);
        Bypass nt;
        nt.path.assign(t.path.begin(), t.path.begin() + t_hi_wit + 1);
        nt.w_pos = t.w_pos;
        check_simple_cycle(d, ncyc);
        return MoveResult{std::move(ncyc), std::move(nt), "fold-tail"};
      }
    }
  }
  // Mirror image at the head.
  if (t_lo >= 0 && v_b_bound) {
    std::vector<int> k_set(xs.begin(), xs.begin() + t_lo);
    if (insertable_all(k_set)) {
      if (auto merged = soft_merge(k_set)) {
        std::vector<int> ncyc = *merged;
        for (int i = 1; i <= t_lo_wit; ++i) ncyc.push_back(t.path[i]);
        for (int i = eng.pos[xs[t_lo]];; i = (i + 1) % eng.len()) {
          if (eng.cyc[i] == y) break;
          ncyc.push_back(eng.cyc[i]);
        }
        Bypass nt;
        nt.path.assign(t.path.begin() + t_lo_wit, t.path.end());
        nt.w_pos = t.w_pos - t_lo_wit;
        check_simple_cycle(d, ncyc);
        return MoveResult{std::move(ncyc), std::move(nt), "fold-head"};
      }
    }
  }

  // Full merge: absorb the whole stretch into the back path and splice the
  // bypass in as the new stretch. With coinciding endpoints the bypass
  // alone closes up (the back path is the single shared vertex).
  if (v_b_bound && insertable_all(xs)) {
    if (auto merged = soft_merge(xs)) {
      std::vector<int> ncyc(t.path.begin(), t.path.end());
      ncyc.pop_back();  // terminus reappears as merged->front()
      for (size_t i = 0; i + 1 < merged->size(); ++i) ncyc.push_back((*merged)[i]);
      check_simple_cycle(d, ncyc);
      return MoveResult{std::move(ncyc), std::nullopt, "merge"};
    }
  }
  return std::nullopt;
}

// Exact spanning search: subset dynamic program over (visited set, last).
std::optional<std::vector<int>> complete_w_cycle_search(const Digraph& d,
                                                        const VertexSet& w) {
  int n = d.order();
  if (n > 22)
    throw BudgetExceeded("complete search for a W-spanning cycle capped at order 22");
  int start = w.ids().front();
  uint32_t wmask = 0;
  for (int z : w.ids()) wmask |= uint32_t{1} << z;
  size_t states = size_t{1} << n;
  std::vector<uint32_t> reach(states, 0);
  reach[uint32_t{1} << start] = uint32_t{1} << start;
  for (uint32_t mask = 1; mask < states; ++mask) {
    if (!(mask & (uint32_t{1} << start))) continue;
    uint32_t lasts = reach[mask];
    while (lasts) {
      int last = std::countr_zero(lasts);
      lasts &= lasts - 1;
      for (int nxt : d.out_neighbors(last)) {
        if (mask & (uint32_t{1} << nxt)) continue;
        reach[mask | (uint32_t{1} << nxt)] |= uint32_t{1} << nxt;
      }
    }
  }
  for (uint32_t mask = 1; mask < states; ++mask) {
    if ((mask & wmask) != wmask) continue;
    uint32_t lasts = reach[mask];
    while (lasts) {
      int last = std::countr_zero(lasts);
      lasts &= lasts - 1;
      if (std::popcount(mask) >= 2 && d.has_arc(last, start)) {
        std::vector<int> seq{last};
        uint32_t m = mask;
        int cur = last;
        while (cur != start) {
          m &= ~(uint32_t{1} << cur);
          uint32_t preds = reach[m];
          bool step = false;
          while (preds) {
            int p = std::countr_zero(preds);
            preds &= preds - 1;
            if (d.has_arc(p, cur)) {
              seq.push_back(p);
              cur = p;
              step = true;
              break;
            }
          }
          if (!step)
            throw GuaranteeViolation("spanning-cycle reconstruction lost its witness");
        }
        std::reverse(seq.begin(), seq.end());
        return seq;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

CyclableResult find_w_cycle(const Digraph& d, const VertexSet& w,
                            CyclableOptions opts) {
  if (w.size() < 2) throw PreconditionError("need |W| >= 2");
  int n = d.order();
  int delta = min_semi_degree(d, w);
  bool gate = 2 * delta >= n;
  if (opts.mode == SolveMode::guaranteed && !gate) {
    std::ostringstream os;
    os << "guaranteed mode needs 2*delta >= n; measured delta " << delta
       << " with n = " << n;
    throw PreconditionError(os.str());
  }
  CyclableResult result;
  auto trace = [&](const std::string& line) {
    if (opts.trace) opts.trace(line);
  };

  auto finish = [&](std::vector<int> cyc) {
    for (int z : w.ids())
      if (std::find(cyc.begin(), cyc.end(), z) == cyc.end())
        throw GuaranteeViolation("result cycle misses a W-vertex");
    check_simple_cycle(d, cyc);
    result.cycle = canonical_rotation(cyc);
    return result;
  };

  if (gate) {
    // Seed through the two smallest W-vertices.
    bool seeded = false;
    std::vector<int> cyc;
    try {
      auto [p1, p2] = short_connecting_paths(d, w, w.ids()[0], w.ids()[1]);
      cyc = p1;
      cyc.insert(cyc.end(), p2.begin() + 1, p2.end());
      cyc.pop_back();  // closing vertex is the seed itself
      seeded = true;
    } catch (const GuaranteeViolation&) {
      seeded = false;
    }
    if (seeded) {
      CycEngine eng(d, w, std::move(cyc));
      long long guard = static_cast<long long>(n + 2) * (n + 2) * (n + 2);
      bool stalled = false;
      while (!stalled) {
        std::vector<int> missing;
        for (int z : w.ids())
          if (!eng.on_cycle[z]) missing.push_back(z);
        if (missing.empty()) return finish(eng.cyc);
        if (--guard < 0) {
          stalled = true;
          break;
        }
        bool applied = false;
        for (size_t mi = 0; mi < missing.size() && !applied; ++mi) {
          int v = missing[mi];
          if (auto grown = eng.try_insert(v)) {
            ++result.stats.moves;
            trace("insert");
            eng.set_cycle(std::move(*grown));
            applied = true;
            if (mi > 0) result.stats.used_backtracking = true;
            break;
          }
          auto cands = bypass_candidates(d, w, eng.cyc, v);
          for (size_t ti = 0; ti < cands.size() && !applied; ++ti) {
            // Chain moves while the bypass stays pinned and valid; every
            // accepted move improves (-|W on cycle|, |stretch|, |bypass|).
            std::optional<Bypass> t = cands[ti];
            int inner_guard = 4 * n + 8;
            while (t && inner_guard-- > 0) {
              if (!bypass_is_valid(d, eng.on_cycle, w, *t)) break;
              auto mv = try_bypass_moves(eng, *t);
              if (!mv) break;
              ++result.stats.moves;
              trace(mv->name);
              if (mi > 0 || ti > 0) result.stats.used_backtracking = true;
              if (!mv->cycle.empty()) {
                eng.set_cycle(std::move(mv->cycle));
                applied = true;
              }
              t = std::move(mv->bypass);
            }
            if (applied) break;
          }
        }
        if (!applied) stalled = true;
      }
    }
    result.stats.used_fallback = true;
    trace("fallback complete search");
  }

  auto spanning = complete_w_cycle_search(d, w);
  if (spanning) {
    if (!gate) result.stats.used_fallback = true;
    return finish(std::move(*spanning));
  }
  if (opts.mode == SolveMode::guaranteed)
    throw GuaranteeViolation("degree gate held but no W-spanning cycle exists");
  NoCycleReport rep;
  rep.reason = "complete search exhausted: no cycle through W";
  if (n <= opts.oracle_max_order) rep.oracle = oracle_cyclable(d, w).verdict;
  result.report = std::move(rep);
  return result;
}

CycleFactorCertificate theorem5_factor(const Digraph& d, const VertexSet& w,
                                       const Partition& parts) {
  int n = d.order();
  if (parts.sum() != w.size()) {
    std::ostringstream os;
    os << "partition sums to " << parts.sum() << " but |W| = " << w.size();
    throw PreconditionError(os.str());
  }
  if (n < 2 * w.size()) throw PreconditionError("order below 2|W|");
  int delta = min_semi_degree(d, w);
  if (2 * delta < n + 2 * w.size() - 2) {
    std::ostringstream os;
    os << "semi-degree " << delta << " below n/2 + |W| - 1";
    throw PreconditionError(os.str());
  }

  std::vector<char> used(n, 0);
  for (int z : w.ids()) used[z] = 1;
  CycleFactorCertificate cert;
  size_t at = 0;
  for (int part : parts.parts()) {
    std::vector<int> block(w.ids().begin() + at, w.ids().begin() + at + part);
    at += part;
    std::vector<int> cycle;
    for (int j = 0; j < part; ++j) {
      int a = block[j];
      int b = block[(j + 1) % part];
      cycle.push_back(a);
      if (d.has_arc(a, b)) continue;
      int pick = -1;
      for (int z : d.out_neighbors(a)) {
        if (!used[z] && !w.contains(z) && d.has_arc(z, b)) {
          pick = z;
          break;
        }
      }
      if (pick < 0)
        throw GuaranteeViolation("ran out of linking vertices under the degree bound");
      used[pick] = 1;
      cycle.push_back(pick);
    }
    cert.cycles.push_back(canonical_rotation(cycle));
    cert.w_counts.push_back(part);
  }
  ValidationReport check = validate_certificate(d, w, parts, cert);
  if (!check.pass) {
    std::ostringstream os;
    os << "greedy chaining produced an invalid certificate:";
    for (const auto& v : check.violations) os << "\n  " << v;
    throw GuaranteeViolation(os.str());
  }
  return cert;
}

}  // namespace dcf
