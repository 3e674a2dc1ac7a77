#include "dcf/exchange.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <sstream>

#include "dcf/errors.hpp"

namespace dcf {

namespace {

std::string pairs_text(const std::vector<int>& pairs) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < pairs.size(); ++i) os << (i ? " " : "") << pairs[i];
  os << "]";
  return os.str();
}

std::string repro_text(const BipartiteRep& rep,
                       const std::vector<std::vector<int>>& structures) {
  std::ostringstream os;
  os << "repro:\n" << dump_bipartite(rep);
  for (const auto& s : structures) os << "structure " << pairs_text(s) << "\n";
  return os.str();
}

uint64_t full_mask(int n) {
  return n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
}

}  // namespace

FeasibleCycle lemma1_insert(const BipartiteRep& rep, const FeasibleCycle& c,
                            int marked_pair) {
  make_feasible_cycle(rep, c.pairs);
  if (marked_pair < 0 || marked_pair >= rep.pair_count())
    throw PreconditionError("pair index out of range");
  if (!rep.is_marked(marked_pair))
    throw PreconditionError("insertion pair is not marked");
  uint64_t cmask = pair_mask(c.pairs);
  if ((cmask >> marked_pair) & 1)
    throw PreconditionError("insertion pair already on the cycle");
  int r = c.pair_size();
  int e = degree_sum_into(
      rep, {{true, marked_pair}, {false, marked_pair}}, cmask);
  if (e < r + 1) {
    std::ostringstream os;
    os << "degree sum " << e << " into the cycle is below " << (r + 1);
    throw PreconditionError(os.str());
  }
  for (int i = 0; i < r; ++i) {
    int a = c.pairs[i];
    int b = c.pairs[(i + 1) % r];
    if (rep.cross(a, marked_pair) && rep.cross(marked_pair, b)) {
      std::vector<int> out(c.pairs.begin(), c.pairs.begin() + i + 1);
      out.push_back(marked_pair);
      out.insert(out.end(), c.pairs.begin() + i + 1, c.pairs.end());
      FeasibleCycle res = make_feasible_cycle(rep, out);
      if (m0_length(rep, res) != m0_length(rep, c) + 1 ||
          res.length() != c.length() + 2)
        throw GuaranteeViolation("insertion produced wrong accounting\n" +
                                 repro_text(rep, {c.pairs, {marked_pair}}));
      return res;
    }
  }
  throw GuaranteeViolation("no insertion slot despite degree bound\n" +
                           repro_text(rep, {c.pairs, {marked_pair}}));
}

ShortenResult lemma2_shorten(const BipartiteRep& rep, const FeasibleCycle& c1,
                             const FeasibleCycle& c2) {
  make_feasible_cycle(rep, c1.pairs);
  make_feasible_cycle(rep, c2.pairs);
  uint64_t m1 = pair_mask(c1.pairs);
  uint64_t m2 = pair_mask(c2.pairs);
  if (m1 & m2) throw PreconditionError("cycles are not disjoint");
  int s = m0_length(rep, c1);
  int t = m0_length(rep, c2);
  if (!(t >= s && s >= 2 && t >= 3)) {
    std::ostringstream os;
    os << "marked lengths s=" << s << " t=" << t
       << " violate t >= s >= 2, t >= 3";
    throw PreconditionError(os.str());
  }
  long long cross_sum = 0;
  for (int f : c2.pairs)
    if (rep.is_marked(f))
      cross_sum += degree_sum_into(rep, {{true, f}, {false, f}}, m1);
  if (4 * cross_sum <= 3LL * t * c1.length()) {
    std::ostringstream os;
    os << "marked edge count " << cross_sum << " into c1 not above (3/4)*"
       << t << "*" << c1.length();
    throw PreconditionError(os.str());
  }

  // All feasible cycles in the union, one lex-least witness per support set;
  // marked count and length depend on the support only.
  uint64_t uni = m1 | m2;
  auto cycles = enumerate_feasible_cycles(rep, uni);
  std::map<uint64_t, std::vector<int>> best_by_support;
  for (const auto& c : cycles) {
    uint64_t sup = pair_mask(c.pairs);
    auto it = best_by_support.find(sup);
    if (it == best_by_support.end() || c.pairs < it->second)
      best_by_support[sup] = c.pairs;
  }
  int total_len = c1.length() + c2.length();
  bool found = false;
  int best_m0 = 0, best_len = 0;
  std::vector<int> best_a, best_b;
  for (auto& [sa, ca] : best_by_support) {
    for (auto& [sb, cb] : best_by_support) {
      if (sa & sb) continue;
      int len = 2 * (std::popcount(sa) + std::popcount(sb));
      if (len >= total_len) continue;
      int m0 = std::popcount(sa & rep.marked_mask()) +
               std::popcount(sb & rep.marked_mask());
      const std::vector<int>& lo = ca < cb ? ca : cb;
      const std::vector<int>& hi = ca < cb ? cb : ca;
      if (!found || std::tie(m0, len, lo, hi) <
                        std::tie(best_m0, best_len, best_a, best_b)) {
        found = true;
        best_m0 = m0;
        best_len = len;
        best_a = lo;
        best_b = hi;
      }
    }
  }
  if (!found)
    throw GuaranteeViolation("no shorter disjoint cycle pair in the union\n" +
                             repro_text(rep, {c1.pairs, c2.pairs}));
  ShortenResult res{make_feasible_cycle(rep, best_a),
                    make_feasible_cycle(rep, best_b),
                    best_m0 == s + t};
  return res;
}

BipOrientedGraph::BipOrientedGraph(int nx, int ny, std::vector<Arc> arcs)
    : nx_(nx), ny_(ny) {
  if (nx < 0 || ny < 0) throw std::invalid_argument("negative side size");
  out_.assign(nx + ny, 0);
  in_.assign(nx + ny, 0);
  std::sort(arcs.begin(), arcs.end());
  std::set<Arc> seen;
  for (auto [u, v] : arcs) {
    if (u < 0 || v < 0 || u >= nx + ny || v >= nx + ny)
      throw std::invalid_argument("arc endpoint out of range");
    bool ux = u < nx, vx = v < nx;
    if (ux == vx) throw std::invalid_argument("arc does not cross the sides");
    if (!seen.insert({u, v}).second) throw std::invalid_argument("duplicate arc");
    if (seen.count({v, u}))
      throw PreconditionError("digon found; graph is not an orientation");
    ++out_[u];
    ++in_[v];
  }
  arcs_ = std::move(arcs);
}

std::optional<Arc> lemma3_find_arc(const BipOrientedGraph& b) {
  int r = b.order();
  for (auto [u, v] : b.arcs())
    if (2 * (b.in_degree(u) + b.out_degree(v)) < r) return Arc{u, v};
  return std::nullopt;
}

namespace {

// Arc positions of a cycle: position i covers the arc pairs[i] -> pairs[i+1].
struct SplitCycles {
  std::vector<int> a;  // prefix cycle, wrap arc a.back() -> a.front()
  std::vector<int> b;
};

std::optional<std::vector<int>> try_merge(const BipartiteRep& rep,
                                          const SplitCycles& sc) {
  int an = static_cast<int>(sc.a.size());
  int bn = static_cast<int>(sc.b.size());
  for (int i = 0; i < an; ++i) {
    int u = sc.a[i];
    int usucc = sc.a[(i + 1) % an];
    for (int j = 0; j < bn; ++j) {
      int w = sc.b[j];
      int wsucc = sc.b[(j + 1) % bn];
      if (rep.cross(u, wsucc) && rep.cross(w, usucc)) {
        std::vector<int> merged;
        merged.reserve(an + bn);
        for (int k = 0; k < an; ++k) merged.push_back(sc.a[(i + 1 + k) % an]);
        for (int k = 0; k < bn; ++k) merged.push_back(sc.b[(j + 1 + k) % bn]);
        return merged;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

FeasibleCycle lemma4_close_path(const BipartiteRep& rep, const FeasiblePath& p,
                                int max_pairs) {
  make_feasible_path(rep, p.pairs);
  int r = p.pair_size();
  if (r < 2) throw PreconditionError("path too short to close");
  if (r > max_pairs) {
    std::ostringstream os;
    os << "path closure capped at " << max_pairs << " pairs, got " << r;
    throw PreconditionError(os.str());
  }
  uint64_t mask = pair_mask(p.pairs);
  int e = path_endpoint_degree(rep, p, mask);
  if (2 * e < 3 * r) {
    std::ostringstream os;
    os << "endpoint degree sum " << e << " below (3/2)*" << r;
    throw PreconditionError(os.str());
  }
  FeasiblePath good = select_good_feasible_path(rep, p, max_pairs);
  if (path_endpoint_degree(rep, good, mask) < e)
    throw PreconditionError("path is not a good feasible path");
  if (has_shorter_same_m0_path(rep, p))
    throw PreconditionError("a shorter feasible path with the same marked set exists");

  std::set<std::vector<int>> seen;
  std::vector<int> cur = p.pairs;
  int iterations = 4 * r * r + 8;
  while (iterations-- > 0 && seen.insert(cur).second) {
    if (rep.cross(cur.back(), cur.front()))
      return make_feasible_cycle(rep, cur);

    // Crossing split: a prefix cycle and a suffix cycle, then a two-arc merge.
    std::optional<SplitCycles> split;
    for (int a = 2; a + 2 <= r && !split; ++a) {
      if (rep.cross(cur[a - 1], cur[0]) && rep.cross(cur[r - 1], cur[a])) {
        split = SplitCycles{{cur.begin(), cur.begin() + a},
                            {cur.begin() + a, cur.end()}};
      }
    }
    if (!split) break;
    if (auto merged = try_merge(rep, *split))
      return make_feasible_cycle(rep, *merged);

    // No direct merge: orient the between-cycle edges, take a low-degree arc
    // and re-root the spanning path through it.
    int an = static_cast<int>(split->a.size());
    int bn = static_cast<int>(split->b.size());
    std::vector<Arc> arcs;
    for (int i = 0; i < an; ++i) {
      int u = split->a[i];
      int usucc = split->a[(i + 1) % an];
      for (int j = 0; j < bn; ++j) {
        int w = split->b[j];
        int wsucc = split->b[(j + 1) % bn];
        if (rep.cross(u, wsucc)) arcs.emplace_back(i, an + j);
        if (rep.cross(w, usucc)) arcs.emplace_back(an + j, i);
      }
    }
    BipOrientedGraph big(an, bn, std::move(arcs));
    auto arc = lemma3_find_arc(big);
    if (!arc) break;
    auto [from, to] = *arc;
    std::vector<int> next;
    next.reserve(r);
    if (from < an) {
      int i = from, j = to - an;
      for (int k = 0; k < an; ++k) next.push_back(split->a[(i + 1 + k) % an]);
      for (int k = 0; k < bn; ++k) next.push_back(split->b[(j + 1 + k) % bn]);
    } else {
      int j = from - an, i = to;
      for (int k = 0; k < bn; ++k) next.push_back(split->b[(j + 1 + k) % bn]);
      for (int k = 0; k < an; ++k) next.push_back(split->a[(i + 1 + k) % an]);
    }
    if (!rep.is_marked(next.front()) || !rep.is_marked(next.back()))
      throw GuaranteeViolation(
          "re-rooted spanning path has an unmarked end\n" +
          repro_text(rep, {p.pairs, next}));
    cur = std::move(next);
  }

  if (auto cyc = find_spanning_alt_cycle(rep, mask))
    return make_feasible_cycle(rep, *cyc);
  throw GuaranteeViolation("no spanning feasible cycle exists for this path\n" +
                           repro_text(rep, {p.pairs}));
}

namespace {

// Small-cycle search used by the base packing: cycles through `m` of at most
// four pairs carrying exactly the marked pairs {m, partner}. Candidates come
// out in (size, filler) lexicographic order; `variant` selects the n-th.
struct SmallCycleFinder {
  const BipartiteRep& rep;
  uint64_t free;  // usable pair indices

  std::optional<std::vector<int>> nth(int m, int partner, int variant) const {
    int count = 0;
    std::optional<std::vector<int>> res;
    auto consider = [&](std::vector<int> cyc) {
      if (res) return;
      if (count == variant)
        res = std::move(cyc);
      else
        ++count;
    };
    std::vector<int> ws;
    uint64_t fillers = free & ~rep.marked_mask();
    while (fillers) {
      ws.push_back(std::countr_zero(fillers));
      fillers &= fillers - 1;
    }
    if (rep.cross(m, partner) && rep.cross(partner, m))
      consider({m, partner});
    for (int w : ws) {
      if (res) break;
      if (rep.cross(m, partner) && rep.cross(partner, w) && rep.cross(w, m))
        consider({m, partner, w});
      if (rep.cross(m, w) && rep.cross(w, partner) && rep.cross(partner, m))
        consider({m, w, partner});
    }
    for (int w1 : ws) {
      if (res) break;
      for (int w2 : ws) {
        if (res) break;
        if (w1 == w2) continue;
        if (rep.cross(m, partner) && rep.cross(partner, w1) &&
            rep.cross(w1, w2) && rep.cross(w2, m))
          consider({m, partner, w1, w2});
        if (rep.cross(m, w1) && rep.cross(w1, partner) &&
            rep.cross(partner, w2) && rep.cross(w2, m))
          consider({m, w1, partner, w2});
        if (rep.cross(m, w1) && rep.cross(w1, w2) && rep.cross(w2, partner) &&
            rep.cross(partner, m))
          consider({m, w1, w2, partner});
      }
    }
    return res;
  }

  std::optional<std::vector<int>> find(int m, int partner) const {
    return nth(m, partner, 0);
  }
};

struct Packer {
  const BipartiteRep& rep;
  long long budget;
  long long nodes = 0;

  // Complete search: the lowest unused marked pair is either covered next or
  // (once, when the marked count is odd) skipped.
  bool solve(uint64_t used, uint64_t skipped, int remaining,
             std::vector<std::vector<int>>& out) {
    if (remaining == 0) return true;
    if (++nodes > budget) throw BudgetExceeded("base packing budget exhausted");
    uint64_t marked_left = rep.marked_mask() & ~used & ~skipped;
    if (!marked_left) return false;
    int m = std::countr_zero(marked_left);
    SmallCycleFinder finder{rep, ~used & full_mask(rep.pair_count())};
    uint64_t partners = marked_left & ~(uint64_t{1} << m);
    while (partners) {
      int partner = std::countr_zero(partners);
      partners &= partners - 1;
      // Every viable small cycle for this pair, not just the first.
      for (int variant = 0;; ++variant) {
        auto cyc = finder.nth(m, partner, variant);
        if (!cyc) break;
        out.push_back(*cyc);
        if (solve(used | pair_mask(*cyc), skipped, remaining - 1, out))
          return true;
        out.pop_back();
      }
    }
    int allowed_skips = rep.marked_count() % 2;
    if (std::popcount(skipped) < allowed_skips &&
        solve(used, skipped | (uint64_t{1} << m), remaining, out))
      return true;
    return false;
  }
};

}  // namespace

std::vector<FeasibleCycle> claim1_base_packing(const BipartiteRep& rep,
                                               long long node_budget) {
  int n = rep.pair_count();
  if (4 * rep.min_marked_degree() < 3 * n + 1) {
    std::ostringstream os;
    os << "marked degree " << rep.min_marked_degree() << " below (3n+1)/4 for n="
       << n;
    throw PreconditionError(os.str());
  }
  int target = rep.marked_count() / 2;
  std::vector<std::vector<int>> packed;

  // Greedy seeding: pair up marked edges with the shortest available cycles.
  uint64_t used = 0;
  {
    uint64_t left = rep.marked_mask();
    while (std::popcount(left) >= 2) {
      int m = std::countr_zero(left);
      SmallCycleFinder finder{rep, ~used & full_mask(n)};
      std::optional<std::vector<int>> got;
      uint64_t partners = left & ~(uint64_t{1} << m);
      while (partners && !got) {
        int partner = std::countr_zero(partners);
        partners &= partners - 1;
        got = finder.find(m, partner);
      }
      if (!got) break;
      used |= pair_mask(*got);
      left &= ~pair_mask(*got);
      packed.push_back(std::move(*got));
    }
  }

  // Local augmentation: break one packed cycle and re-pair its marked edges
  // with two of the still-unpacked ones.
  auto unpacked_marked = [&]() {
    std::vector<int> out;
    uint64_t left = rep.marked_mask() & ~used;
    while (left) {
      out.push_back(std::countr_zero(left));
      left &= left - 1;
    }
    return out;
  };
  bool progress = true;
  while (static_cast<int>(packed.size()) < target && progress) {
    progress = false;
    auto free_marked = unpacked_marked();
    if (free_marked.size() < 2) break;
    int f1 = free_marked[0], f2 = free_marked[1];
    for (size_t ki = 0; ki < packed.size() && !progress; ++ki) {
      std::vector<int> k = packed[ki];
      uint64_t kmask = pair_mask(k);
      std::vector<int> gs;
      for (int pidx : k)
        if (rep.is_marked(pidx)) gs.push_back(pidx);
      uint64_t base_free = (~used | kmask) & full_mask(n);
      for (int flip = 0; flip < 2 && !progress; ++flip) {
        int g1 = gs[flip], g2 = gs[1 - flip];
        SmallCycleFinder fa{rep, base_free};
        auto ca = fa.find(std::min(f1, g1), std::max(f1, g1));
        if (!ca) continue;
        SmallCycleFinder fb{rep, base_free & ~pair_mask(*ca)};
        auto cb = fb.find(std::min(f2, g2), std::max(f2, g2));
        if (!cb) continue;
        used = (used & ~kmask) | pair_mask(*ca) | pair_mask(*cb);
        packed.erase(packed.begin() + ki);
        packed.push_back(std::move(*ca));
        packed.push_back(std::move(*cb));
        progress = true;
      }
    }
  }

  if (static_cast<int>(packed.size()) < target) {
    // Complete bounded backtracking from scratch.
    Packer packer{rep, node_budget};
    std::vector<std::vector<int>> out;
    bool ok = packer.solve(0, 0, target, out);
    if (!ok)
      throw GuaranteeViolation("no base packing exists under the degree bound\n" +
                               repro_text(rep, {}));
    packed = std::move(out);
  }

  std::vector<FeasibleCycle> result;
  result.reserve(packed.size());
  for (auto& pairs : packed) {
    FeasibleCycle c = make_feasible_cycle(rep, pairs);
    if (m0_length(rep, c) != 2 || c.pair_size() > 4)
      throw GuaranteeViolation("base packing produced a malformed cycle\n" +
                               repro_text(rep, {pairs}));
    result.push_back(std::move(c));
  }
  std::sort(result.begin(), result.end(),
            [](const FeasibleCycle& a, const FeasibleCycle& b) {
              return a.pairs < b.pairs;
            });
  return result;
}

}  // namespace dcf
