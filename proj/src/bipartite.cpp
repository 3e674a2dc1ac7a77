#include "dcf/bipartite.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <unordered_map>

#include "dcf/errors.hpp"

namespace dcf {

namespace {

int popcount(uint64_t m) { return std::popcount(m); }

std::vector<int> bits_of(uint64_t mask) {
  std::vector<int> out;
  while (mask) {
    int b = std::countr_zero(mask);
    out.push_back(b);
    mask &= mask - 1;
  }
  return out;
}

}  // namespace

BipartiteRep BipartiteRep::from_digraph(const Digraph& d) {
  if (d.order() > kMaxPairs)
    throw PreconditionError("bipartite representation supports at most 64 pairs");
  BipartiteRep rep;
  rep.n_ = d.order();
  rep.row_.assign(rep.n_, 0);
  rep.col_.assign(rep.n_, 0);
  for (auto [u, v] : d.arcs()) {
    rep.row_[u] |= uint64_t{1} << v;
    rep.col_[v] |= uint64_t{1} << u;
  }
  rep.marked_ = rep.n_ == 64 ? ~uint64_t{0} : (uint64_t{1} << rep.n_) - 1;
  return rep;
}

std::vector<int> BipartiteRep::marked_indices() const { return bits_of(marked_); }

int BipartiteRep::marked_count() const { return popcount(marked_); }

int BipartiteRep::x_degree(int u) const { return popcount(row_[u]) + 1; }

int BipartiteRep::y_degree(int v) const { return popcount(col_[v]) + 1; }

int BipartiteRep::min_marked_degree() const {
  int best = n_ + 1;
  for (int i : bits_of(marked_))
    best = std::min(best, std::min(x_degree(i), y_degree(i)));
  return best;
}

BipartiteRep BipartiteRep::with_marks(const VertexSet& w) const {
  if (w.host_order() != n_)
    throw std::invalid_argument("mark set bound to a different order");
  BipartiteRep rep = *this;
  rep.marked_ = 0;
  for (int v : w.ids()) rep.marked_ |= uint64_t{1} << v;
  return rep;
}

BipartiteRep BipartiteRep::fact1_reduced() const {
  BipartiteRep rep = *this;
  uint64_t unmarked = ~marked_ & (n_ == 64 ? ~uint64_t{0} : (uint64_t{1} << n_) - 1);
  for (int u : bits_of(unmarked)) {
    uint64_t removed = rep.row_[u] & unmarked;
    rep.row_[u] &= ~unmarked;
    for (int v : bits_of(removed)) rep.col_[v] &= ~(uint64_t{1} << u);
  }
  return rep;
}

Digraph BipartiteRep::to_digraph() const {
  std::vector<Arc> arcs;
  for (int u = 0; u < n_; ++u)
    for (int v : bits_of(row_[u])) arcs.emplace_back(u, v);
  return Digraph(n_, std::move(arcs));
}

BipartiteRep build_bipartite_rep(const Digraph& d) {
  return BipartiteRep::from_digraph(d);
}

BipartiteRep mark_m0(const BipartiteRep& rep, const VertexSet& w) {
  return rep.with_marks(w);
}

BipartiteRep fact1_reduce(const BipartiteRep& rep) { return rep.fact1_reduced(); }

uint64_t pair_mask(const std::vector<int>& pairs) {
  uint64_t m = 0;
  for (int p : pairs) m |= uint64_t{1} << p;
  return m;
}

namespace {

void check_pairs(const BipartiteRep& rep, const std::vector<int>& pairs) {
  uint64_t seen = 0;
  for (int p : pairs) {
    if (p < 0 || p >= rep.pair_count())
      throw std::invalid_argument("pair index out of range");
    if ((seen >> p) & 1) throw std::invalid_argument("repeated pair index");
    seen |= uint64_t{1} << p;
  }
}

}  // namespace

FeasiblePath make_feasible_path(const BipartiteRep& rep, std::vector<int> pairs) {
  if (pairs.empty()) throw std::invalid_argument("empty path");
  check_pairs(rep, pairs);
  for (size_t i = 0; i + 1 < pairs.size(); ++i) {
    if (!rep.cross(pairs[i], pairs[i + 1])) {
      std::ostringstream os;
      os << "path edge {x" << pairs[i] << ",y" << pairs[i + 1] << "} absent";
      throw std::invalid_argument(os.str());
    }
  }
  if (!rep.is_marked(pairs.front()) || !rep.is_marked(pairs.back()))
    throw std::invalid_argument("path end pair not marked");
  FeasiblePath p;
  p.pairs = std::move(pairs);
  return p;
}

FeasibleCycle make_feasible_cycle(const BipartiteRep& rep, std::vector<int> pairs) {
  if (pairs.size() < 2) throw std::invalid_argument("cycle needs >= 2 pairs");
  check_pairs(rep, pairs);
  for (size_t i = 0; i < pairs.size(); ++i) {
    int u = pairs[i];
    int v = pairs[(i + 1) % pairs.size()];
    if (!rep.cross(u, v)) {
      std::ostringstream os;
      os << "cycle edge {x" << u << ",y" << v << "} absent";
      throw std::invalid_argument(os.str());
    }
  }
  int m0 = 0;
  for (int p : pairs)
    if (rep.is_marked(p)) ++m0;
  if (m0 < 2) throw std::invalid_argument("cycle carries fewer than 2 marked pairs");
  FeasibleCycle c;
  c.pairs = canonical_rotation(pairs);
  return c;
}

int m0_length(const BipartiteRep& rep, const FeasiblePath& p) {
  return popcount(pair_mask(p.pairs) & rep.marked_mask());
}

int m0_length(const BipartiteRep& rep, const FeasibleCycle& c) {
  return popcount(pair_mask(c.pairs) & rep.marked_mask());
}

int degree_into(const BipartiteRep& rep, BipVertex v, uint64_t pairs) {
  uint64_t adj = v.x_side ? rep.cross_row(v.idx) : rep.cross_col(v.idx);
  int d = popcount(adj & pairs);
  if ((pairs >> v.idx) & 1) ++d;  // own matching edge
  return d;
}

int degree_sum_into(const BipartiteRep& rep, const std::vector<BipVertex>& vs,
                    uint64_t pairs) {
  int s = 0;
  for (const auto& v : vs) s += degree_into(rep, v, pairs);
  return s;
}

int path_endpoint_degree(const BipartiteRep& rep, const FeasiblePath& p,
                         uint64_t pairs) {
  return degree_into(rep, {false, p.front()}, pairs) +
         degree_into(rep, {true, p.back()}, pairs);
}

std::vector<int> alt_cycle_to_dicycle(const BipartiteRep& rep,
                                      const FeasibleCycle& c) {
  FeasibleCycle checked = make_feasible_cycle(rep, c.pairs);
  return checked.pairs;
}

FeasibleCycle dicycle_to_alt_cycle(const BipartiteRep& rep,
                                   const std::vector<int>& cycle) {
  return make_feasible_cycle(rep, cycle);
}

namespace {

// Local view of an induced pair set: pair indices compressed to 0..m-1 in
// ascending global order, adjacency restricted to the set.
struct LocalView {
  std::vector<int> glob;
  std::vector<uint64_t> adj;   // adj[i]: locals j with cross(glob[i], glob[j])
  std::vector<uint64_t> radj;  // reverse arcs
  uint64_t marked = 0;
  uint64_t full = 0;

  LocalView(const BipartiteRep& rep, uint64_t mask) {
    glob = bits_of(mask);
    int m = static_cast<int>(glob.size());
    adj.assign(m, 0);
    radj.assign(m, 0);
    full = m == 64 ? ~uint64_t{0} : (uint64_t{1} << m) - 1;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (i != j && rep.cross(glob[i], glob[j])) {
          adj[i] |= uint64_t{1} << j;
          radj[j] |= uint64_t{1} << i;
        }
      }
      if (rep.is_marked(glob[i])) marked |= uint64_t{1} << i;
    }
  }
  int size() const { return static_cast<int>(glob.size()); }
};

// Memoized "can a path visit exactly `rest` after `cur` and stop on a vertex
// of `ends`" test. State count m * 2^m, desk scale only.
struct PathCompleter {
  const LocalView& lv;
  uint64_t ends;
  std::unordered_map<uint64_t, bool> memo;

  PathCompleter(const LocalView& lv, uint64_t ends) : lv(lv), ends(ends) {}

  bool can(int cur, uint64_t rest) {
    if (rest == 0) return (ends >> cur) & 1;
    uint64_t key = (uint64_t)cur << 56 | rest;
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool ok = false;
    uint64_t nxts = lv.adj[cur] & rest;
    while (nxts && !ok) {
      int nxt = std::countr_zero(nxts);
      nxts &= nxts - 1;
      ok = can(nxt, rest & ~(uint64_t{1} << nxt));
    }
    memo[key] = ok;
    return ok;
  }
};

// Greedy lexicographic extraction of a full path from `first` ending in
// `ends`, assuming one exists.
std::vector<int> extract_path(const LocalView& lv, int first, uint64_t ends) {
  PathCompleter pc(lv, ends);
  std::vector<int> seq{first};
  uint64_t rest = lv.full & ~(uint64_t{1} << first);
  int cur = first;
  while (rest) {
    uint64_t nxts = lv.adj[cur] & rest;
    bool advanced = false;
    while (nxts) {
      int nxt = std::countr_zero(nxts);
      nxts &= nxts - 1;
      if (pc.can(nxt, rest & ~(uint64_t{1} << nxt))) {
        seq.push_back(nxt);
        rest &= ~(uint64_t{1} << nxt);
        cur = nxt;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw GuaranteeViolation("path extraction lost its witness");
  }
  std::vector<int> out;
  out.reserve(seq.size());
  for (int i : seq) out.push_back(lv.glob[i]);
  return out;
}

}  // namespace

std::optional<std::vector<int>> find_spanning_alt_path(const BipartiteRep& rep,
                                                       uint64_t mask) {
  LocalView lv(rep, mask);
  if (lv.size() == 0) return std::nullopt;
  if (lv.size() > 20)
    throw PreconditionError("spanning path search capped at 20 pairs");
  uint64_t starts = lv.marked;
  while (starts) {
    int first = std::countr_zero(starts);
    starts &= starts - 1;
    PathCompleter pc(lv, lv.marked);
    if (pc.can(first, lv.full & ~(uint64_t{1} << first)))
      return extract_path(lv, first, lv.marked);
  }
  return std::nullopt;
}

std::optional<std::vector<int>> find_spanning_alt_cycle(const BipartiteRep& rep,
                                                        uint64_t mask) {
  LocalView lv(rep, mask);
  if (lv.size() < 2) return std::nullopt;
  if (lv.size() > 20)
    throw PreconditionError("spanning cycle search capped at 20 pairs");
  // Root the cycle at local 0 (the globally smallest pair).
  uint64_t ends = lv.radj[0];  // last pair must have an arc back to the root
  PathCompleter pc(lv, ends);
  if (!pc.can(0, lv.full & ~uint64_t{1})) return std::nullopt;
  return extract_path(lv, 0, ends);
}

FeasiblePath select_good_feasible_path(const BipartiteRep& rep,
                                       const FeasiblePath& p, int max_pairs) {
  make_feasible_path(rep, p.pairs);  // reject malformed input
  if (p.pair_size() > max_pairs) {
    std::ostringstream os;
    os << "good-path selection capped at " << max_pairs << " pairs, got "
       << p.pair_size();
    throw PreconditionError(os.str());
  }
  uint64_t mask = pair_mask(p.pairs);
  LocalView lv(rep, mask);
  int m = lv.size();

  // Endpoint degree depends only on the (first, last) pair choice; find the
  // achievable minimum over spanning feasible paths, then the lex-least
  // witness sequence.
  auto endpoint_value = [&](int first, int last) {
    return degree_into(rep, {false, lv.glob[first]}, mask) +
           degree_into(rep, {true, lv.glob[last]}, mask);
  };

  int best = -1;
  uint64_t firsts = lv.marked;
  std::vector<uint64_t> reachable_ends(m, 0);
  while (firsts) {
    int first = std::countr_zero(firsts);
    firsts &= firsts - 1;
    // Forward DP: which last pairs complete a spanning path from `first`.
    std::unordered_map<uint64_t, uint64_t> layer;  // visited-mask -> cur set
    layer[uint64_t{1} << first] = uint64_t{1} << first;
    std::vector<std::pair<uint64_t, uint64_t>> frontier(layer.begin(), layer.end());
    for (int step = 1; step < m; ++step) {
      std::unordered_map<uint64_t, uint64_t> next;
      for (auto& [vis, curs] : frontier) {
        uint64_t cs = curs;
        while (cs) {
          int cur = std::countr_zero(cs);
          cs &= cs - 1;
          uint64_t nxts = lv.adj[cur] & ~vis;
          while (nxts) {
            int nxt = std::countr_zero(nxts);
            nxts &= nxts - 1;
            next[vis | (uint64_t{1} << nxt)] |= uint64_t{1} << nxt;
          }
        }
      }
      frontier.assign(next.begin(), next.end());
    }
    for (auto& [vis, curs] : frontier)
      if (vis == lv.full) reachable_ends[first] |= curs & lv.marked;
    uint64_t ends = reachable_ends[first];
    while (ends) {
      int last = std::countr_zero(ends);
      ends &= ends - 1;
      int val = endpoint_value(first, last);
      if (best < 0 || val < best) best = val;
    }
  }
  if (best < 0) throw GuaranteeViolation("no spanning feasible path found where one was given");

  firsts = lv.marked;
  while (firsts) {
    int first = std::countr_zero(firsts);
    firsts &= firsts - 1;
    uint64_t good_ends = 0;
    uint64_t ends = reachable_ends[first];
    while (ends) {
      int last = std::countr_zero(ends);
      ends &= ends - 1;
      if (endpoint_value(first, last) == best) good_ends |= uint64_t{1} << last;
    }
    if (!good_ends) continue;
    PathCompleter pc(lv, good_ends);
    if (!pc.can(first, lv.full & ~(uint64_t{1} << first))) continue;
    return make_feasible_path(rep, extract_path(lv, first, good_ends));
  }
  throw GuaranteeViolation("good-path minimum had no witness");
}

bool has_shorter_same_m0_path(const BipartiteRep& rep, const FeasiblePath& p) {
  uint64_t mask = pair_mask(p.pairs);
  LocalView lv(rep, mask);
  int m = lv.size();
  if (popcount(lv.marked) == m) return false;  // nothing to drop
  // DP over (visited-mask, cur): paths starting at a marked pair. A strictly
  // smaller mask containing all marked pairs, ending marked, is a witness.
  std::unordered_map<uint64_t, uint64_t> reach;  // mask -> set of cur
  uint64_t starts = lv.marked;
  while (starts) {
    int s = std::countr_zero(starts);
    starts &= starts - 1;
    reach[uint64_t{1} << s] |= uint64_t{1} << s;
  }
  std::vector<std::pair<uint64_t, uint64_t>> frontier(reach.begin(), reach.end());
  for (int step = 1; step < m && !frontier.empty(); ++step) {
    std::unordered_map<uint64_t, uint64_t> next;
    for (auto& [vis, curs] : frontier) {
      if ((vis & lv.marked) == lv.marked && (curs & lv.marked) &&
          popcount(vis) < m)
        return true;
      uint64_t cs = curs;
      while (cs) {
        int cur = std::countr_zero(cs);
        cs &= cs - 1;
        uint64_t nxts = lv.adj[cur] & ~vis;
        while (nxts) {
          int nxt = std::countr_zero(nxts);
          nxts &= nxts - 1;
          next[vis | (uint64_t{1} << nxt)] |= uint64_t{1} << nxt;
        }
      }
    }
    for (auto& [vis, curs] : next) {
      if ((vis & lv.marked) == lv.marked && (curs & lv.marked) &&
          popcount(vis) < m)
        return true;
    }
    frontier.assign(next.begin(), next.end());
  }
  return false;
}

std::vector<FeasibleCycle> enumerate_feasible_cycles(const BipartiteRep& rep,
                                                     uint64_t allowed,
                                                     int max_pairs) {
  std::vector<FeasibleCycle> out;
  LocalView lv(rep, allowed);
  int m = lv.size();
  std::vector<int> stack;
  // Each directed cycle is produced once, rooted at its smallest pair.
  auto dfs = [&](auto&& self, int root, int cur, uint64_t vis) -> void {
    if ((lv.adj[cur] >> root) & 1 && stack.size() >= 2) {
      uint64_t sm = 0;
      for (int i : stack) sm |= uint64_t{1} << i;
      if (popcount(sm & lv.marked) >= 2) {
        std::vector<int> pairs;
        pairs.reserve(stack.size());
        for (int i : stack) pairs.push_back(lv.glob[i]);
        out.push_back(make_feasible_cycle(rep, pairs));
      }
    }
    if (static_cast<int>(stack.size()) == max_pairs) return;
    uint64_t nxts = lv.adj[cur] & ~vis;
    while (nxts) {
      int nxt = std::countr_zero(nxts);
      nxts &= nxts - 1;
      if (nxt <= root) continue;
      stack.push_back(nxt);
      self(self, root, nxt, vis | (uint64_t{1} << nxt));
      stack.pop_back();
    }
  };
  for (int root = 0; root < m; ++root) {
    stack.assign(1, root);
    dfs(dfs, root, root, uint64_t{1} << root);
  }
  std::sort(out.begin(), out.end(), [](const FeasibleCycle& a, const FeasibleCycle& b) {
    return a.pairs < b.pairs;
  });
  return out;
}

std::string dump_bipartite(const BipartiteRep& rep) {
  std::ostringstream os;
  os << "bipartite n=" << rep.pair_count() << "\n";
  for (int i = 0; i < rep.pair_count(); ++i)
    os << "matching x" << i << "y" << i << (rep.is_marked(i) ? " M0" : " M1")
       << "\n";
  for (int u = 0; u < rep.pair_count(); ++u)
    for (int v = 0; v < rep.pair_count(); ++v)
      if (u != v && rep.cross(u, v)) os << "edge x" << u << "y" << v << "\n";
  return os.str();
}

}  // namespace dcf
