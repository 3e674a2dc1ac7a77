#include "dcf/generators.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "dcf/errors.hpp"

namespace dcf {

namespace {

struct Block {
  std::string name;
  int begin;
  int size;
  bool complete;  // internal complete symmetric vs independent
};

Digraph build_blocks(const std::vector<Block>& blocks,
                     const OrientationTable& table) {
  std::map<std::string, const Block*> by_name;
  int n = 0;
  for (const auto& b : blocks) {
    by_name[b.name] = &b;
    n += b.size;
  }
  std::vector<Arc> arcs;
  for (const auto& b : blocks) {
    if (!b.complete) continue;
    for (int u = b.begin; u < b.begin + b.size; ++u)
      for (int v = b.begin; v < b.begin + b.size; ++v)
        if (u != v) arcs.emplace_back(u, v);
  }
  for (const auto& rel : table.relations) {
    auto fi = by_name.find(rel.from);
    auto ti = by_name.find(rel.to);
    if (fi == by_name.end() || ti == by_name.end())
      throw std::invalid_argument("orientation table names an unknown block: " +
                                  rel.from + "/" + rel.to);
    const Block* f = fi->second;
    const Block* t = ti->second;
    if (f == t) throw std::invalid_argument("orientation table joins a block to itself");
    for (int u = f->begin; u < f->begin + f->size; ++u) {
      for (int v = t->begin; v < t->begin + t->size; ++v) {
        arcs.emplace_back(u, v);
        if (rel.symmetric) arcs.emplace_back(v, u);
      }
    }
  }
  return Digraph(n, std::move(arcs));
}

}  // namespace

OrientationTable default_d1_table() {
  return {{{"U", "Y", true},
           {"X", "Z", true},
           {"U", "X", false},
           {"X", "Y", false},
           {"Y", "Z", false},
           {"Z", "U", false}}};
}

OrientationTable default_d2_table() { return {{{"X", "Y", true}}}; }

OrientationTable parse_orientation_table(const std::string& text) {
  OrientationTable table;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string from, arrow, to, extra;
    if (!(ls >> from >> arrow >> to) || (ls >> extra) ||
        (arrow != "->" && arrow != "<->"))
      throw ParseError("expected 'A -> B' or 'A <-> B'", lineno, 1);
    table.relations.push_back({from, to, arrow == "<->"});
  }
  return table;
}

Digraph gen_d1(int k) { return gen_d1(k, default_d1_table()); }

Digraph gen_d1(int k, const OrientationTable& table) {
  if (k < 1) throw PreconditionError("k must be >= 1");
  int a = 4 * k - 1, b = 4 * k;
  Digraph d = build_blocks({{"U", 0, a, true},
                            {"X", a, a, true},
                            {"Y", 2 * a, b, true},
                            {"Z", 2 * a + b, b, true}},
                           table);
  int delta = min_semi_degree(d, VertexSet::all(d.order()));
  if (delta != 12 * k - 3) {
    std::ostringstream os;
    os << "orientation table gives semi-degree " << delta << ", expected "
       << (12 * k - 3);
    throw std::invalid_argument(os.str());
  }
  return d;
}

Digraph gen_d2(int k) { return gen_d2(k, default_d2_table()); }

Digraph gen_d2(int k, const OrientationTable& table) {
  if (k < 1) throw PreconditionError("k must be >= 1");
  Digraph d = build_blocks(
      {{"X", 0, 2 * k - 1, true}, {"Y", 2 * k - 1, k + 1, false}}, table);
  int delta = min_semi_degree(d, VertexSet::all(d.order()));
  if (delta != 2 * k - 1) {
    std::ostringstream os;
    os << "orientation table gives semi-degree " << delta << ", expected "
       << (2 * k - 1);
    throw std::invalid_argument(os.str());
  }
  for (int u = 2 * k - 1; u < d.order(); ++u)
    for (int v = 2 * k - 1; v < d.order(); ++v)
      if (u != v && d.has_arc(u, v))
        throw std::invalid_argument("orientation table breaks the independent block");
  return d;
}

Digraph gen_complete_bipartite_sym(int a, int b) {
  if (a < 1 || b < 1) throw PreconditionError("both sides need >= 1 vertex");
  std::vector<Arc> arcs;
  for (int u = 0; u < a; ++u) {
    for (int v = a; v < a + b; ++v) {
      arcs.emplace_back(u, v);
      arcs.emplace_back(v, u);
    }
  }
  return Digraph(a + b, std::move(arcs));
}

namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Digraph sample_digraph(int n, double p, std::mt19937_64& rng) {
  std::vector<Arc> arcs;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && unit_draw(rng) < p) arcs.emplace_back(u, v);
  return Digraph(n, std::move(arcs));
}

}  // namespace

Digraph gen_random(int n, double arc_probability, uint64_t seed) {
  if (n < 0) throw PreconditionError("negative order");
  if (arc_probability < 0.0 || arc_probability > 1.0)
    throw PreconditionError("arc probability outside [0,1]");
  std::mt19937_64 rng(seed);
  return sample_digraph(n, arc_probability, rng);
}

std::pair<Digraph, VertexSet> gen_random_min_semidegree(int n, int w_size,
                                                        int target,
                                                        uint64_t seed,
                                                        int max_tries) {
  if (w_size < 1 || w_size > n) throw PreconditionError("bad W size");
  if (target < 0 || target > n - 1)
    throw PreconditionError("semi-degree target unachievable for this order");
  std::mt19937_64 rng(seed);
  double p = std::min(1.0, (target + 1.0) / std::max(1, n - 1));
  for (int attempt = 1; attempt <= max_tries; ++attempt) {
    Digraph d = sample_digraph(n, p, rng);
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    for (int i = 0; i < w_size; ++i) {
      int j = i + static_cast<int>(rng() % (n - i));
      std::swap(ids[i], ids[j]);
    }
    VertexSet w = VertexSet::of(n, {ids.begin(), ids.begin() + w_size});
    if (min_semi_degree(d, w) >= target) return {std::move(d), std::move(w)};
    if (attempt % 8 == 0) p = p + (1.0 - p) * 0.25;
  }
  throw BudgetExceeded("retry cap exceeded while sampling for the degree target");
}

namespace {

std::vector<Arc> arc_slots(int n) {
  std::vector<Arc> slots;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v) slots.emplace_back(u, v);
  return slots;
}

}  // namespace

void enumerate_digraphs(int n, bool huge,
                        const std::function<void(const Digraph&)>& fn) {
  if (n < 0 || n > 5 || (n == 5 && !huge))
    throw PreconditionError(
        "exhaustive enumeration supports n <= 4, or n = 5 behind the huge flag");
  std::vector<Arc> slots = arc_slots(n);
  uint64_t total = uint64_t{1} << slots.size();
  std::vector<Arc> arcs;
  for (uint64_t mask = 0; mask < total; ++mask) {
    arcs.clear();
    for (size_t i = 0; i < slots.size(); ++i)
      if ((mask >> i) & 1) arcs.push_back(slots[i]);
    fn(Digraph(n, arcs));
  }
}

Digraph digraph_from_arc_mask(int n, uint64_t mask) {
  std::vector<Arc> slots = arc_slots(n);
  if (slots.size() < 64 && mask >> slots.size())
    throw PreconditionError("arc mask has bits beyond the slot count");
  std::vector<Arc> arcs;
  for (size_t i = 0; i < slots.size(); ++i)
    if ((mask >> i) & 1) arcs.push_back(slots[i]);
  return Digraph(n, std::move(arcs));
}

uint64_t labeled_digraph_count(int n) {
  return uint64_t{1} << (static_cast<uint64_t>(n) * (n - 1));
}

}  // namespace dcf
