#include "dcf/digraph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "dcf/errors.hpp"

namespace dcf {

Digraph::Digraph(int n, std::vector<Arc> arcs) : n_(n) {
  if (n < 0) throw std::invalid_argument("digraph order must be >= 0");
  std::sort(arcs.begin(), arcs.end());
  out_.resize(n);
  in_.resize(n);
  adj_.assign(static_cast<size_t>(n) * n, false);
  for (size_t i = 0; i < arcs.size(); ++i) {
    auto [u, v] = arcs[i];
    if (u < 0 || u >= n || v < 0 || v >= n) {
      std::ostringstream os;
      os << "arc (" << u << "," << v << ") out of range for order " << n;
      throw std::invalid_argument(os.str());
    }
    if (u == v) {
      std::ostringstream os;
      os << "loop (" << u << "," << v << ") not allowed";
      throw std::invalid_argument(os.str());
    }
    if (i > 0 && arcs[i] == arcs[i - 1]) {
      std::ostringstream os;
      os << "duplicate arc (" << u << "," << v << ")";
      throw std::invalid_argument(os.str());
    }
    out_[u].push_back(v);
    in_[v].push_back(u);
    adj_[static_cast<size_t>(u) * n + v] = true;
  }
  arcs_ = std::move(arcs);
}

void Digraph::check_vertex(int v) const {
  if (v < 0 || v >= n_) {
    std::ostringstream os;
    os << "vertex " << v << " out of range for order " << n_;
    throw std::invalid_argument(os.str());
  }
}

bool Digraph::has_arc(int u, int v) const {
  check_vertex(u);
  check_vertex(v);
  return adj_[static_cast<size_t>(u) * n_ + v];
}

const std::vector<int>& Digraph::out_neighbors(int v) const {
  check_vertex(v);
  return out_[v];
}

const std::vector<int>& Digraph::in_neighbors(int v) const {
  check_vertex(v);
  return in_[v];
}

int Digraph::out_degree(int v) const {
  check_vertex(v);
  return static_cast<int>(out_[v].size());
}

int Digraph::in_degree(int v) const {
  check_vertex(v);
  return static_cast<int>(in_[v].size());
}

VertexSet VertexSet::of(int host_order, std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= host_order) {
      std::ostringstream os;
      os << "vertex " << ids[i] << " out of range for order " << host_order;
      throw std::invalid_argument(os.str());
    }
    if (i > 0 && ids[i] == ids[i - 1]) {
      std::ostringstream os;
      os << "duplicate vertex " << ids[i] << " in set";
      throw std::invalid_argument(os.str());
    }
  }
  VertexSet s;
  s.n_ = host_order;
  s.ids_ = std::move(ids);
  return s;
}

VertexSet VertexSet::all(int host_order) {
  std::vector<int> ids(host_order);
  for (int i = 0; i < host_order; ++i) ids[i] = i;
  return of(host_order, std::move(ids));
}

bool VertexSet::contains(int v) const {
  return std::binary_search(ids_.begin(), ids_.end(), v);
}

Partition Partition::of(std::vector<int> parts) {
  if (parts.empty()) throw std::invalid_argument("partition needs >= 1 part");
  for (int p : parts) {
    if (p < 2) {
      std::ostringstream os;
      os << "partition part " << p << " below the minimum of 2";
      throw std::invalid_argument(os.str());
    }
  }
  Partition out;
  out.parts_ = std::move(parts);
  return out;
}

int Partition::sum() const {
  int s = 0;
  for (int p : parts_) s += p;
  return s;
}

UndirectedGraph UndirectedGraph::of(int n, std::vector<std::pair<int, int>> edges) {
  for (auto& [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (u == v) throw std::invalid_argument("loop edge not allowed");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("duplicate edge");
  UndirectedGraph g;
  g.n_ = n;
  g.edges_ = std::move(edges);
  return g;
}

int min_semi_degree(const Digraph& d, const VertexSet& w) {
  if (w.empty()) throw PreconditionError("min_semi_degree over an empty set");
  if (w.host_order() != d.order())
    throw std::invalid_argument("vertex set bound to a different order");
  int best = d.order();
  for (int v : w.ids())
    best = std::min(best, std::min(d.out_degree(v), d.in_degree(v)));
  return best;
}

Digraph build_symmetric(const UndirectedGraph& g) {
  std::vector<Arc> arcs;
  arcs.reserve(2 * g.edges().size());
  for (auto [u, v] : g.edges()) {
    arcs.emplace_back(u, v);
    arcs.emplace_back(v, u);
  }
  return Digraph(g.order(), std::move(arcs));
}

UndirectedGraph collapse_symmetric(const Digraph& d) {
  std::vector<std::pair<int, int>> edges;
  for (auto [u, v] : d.arcs()) {
    if (!d.has_arc(v, u)) {
      std::ostringstream os;
      os << "arc (" << u << "," << v << ") has no reverse; digraph is not symmetric";
      throw std::invalid_argument(os.str());
    }
    if (u < v) edges.emplace_back(u, v);
  }
  return UndirectedGraph::of(d.order(), std::move(edges));
}

std::vector<int> canonical_rotation(const std::vector<int>& cycle) {
  if (cycle.empty()) return cycle;
  size_t pos = std::min_element(cycle.begin(), cycle.end()) - cycle.begin();
  std::vector<int> out;
  out.reserve(cycle.size());
  for (size_t i = 0; i < cycle.size(); ++i)
    out.push_back(cycle[(pos + i) % cycle.size()]);
  return out;
}

ValidationReport validate_certificate(const Digraph& d, const VertexSet& w,
                                      const Partition& parts,
                                      const CycleFactorCertificate& cert) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.pass = false;
    rep.violations.push_back(msg);
  };

  if (cert.cycles.size() != cert.w_counts.size())
    fail("w_counts size differs from cycle count");

  std::map<int, int> seen;  // vertex -> first cycle index
  for (size_t ci = 0; ci < cert.cycles.size(); ++ci) {
    const auto& cyc = cert.cycles[ci];
    std::ostringstream tag;
    tag << "cycle " << ci;
    if (cyc.size() < 2) {
      fail(tag.str() + ": length below 2");
      continue;
    }
    bool in_range = true;
    for (int v : cyc) {
      if (v < 0 || v >= d.order()) {
        std::ostringstream os;
        os << tag.str() << ": vertex " << v << " out of range";
        fail(os.str());
        in_range = false;
      }
    }
    if (!in_range) continue;
    std::set<int> local(cyc.begin(), cyc.end());
    if (local.size() != cyc.size())
      fail(tag.str() + ": repeated vertex within cycle");
    for (int v : cyc) {
      auto [it, fresh] = seen.emplace(v, static_cast<int>(ci));
      if (!fresh && it->second != static_cast<int>(ci)) {
        std::ostringstream os;
        os << "cycles " << it->second << " and " << ci << " share vertex " << v;
        fail(os.str());
      }
    }
    for (size_t i = 0; i < cyc.size(); ++i) {
      int u = cyc[i];
      int v = cyc[(i + 1) % cyc.size()];
      if (!d.has_arc(u, v)) {
        std::ostringstream os;
        os << tag.str() << ": missing arc (" << u << "," << v << ")";
        fail(os.str());
      }
    }
    int wc = 0;
    for (int v : cyc)
      if (w.contains(v)) ++wc;
    if (ci < cert.w_counts.size() && wc != cert.w_counts[ci]) {
      std::ostringstream os;
      os << tag.str() << ": stored w_count " << cert.w_counts[ci]
         << " but actual " << wc;
      fail(os.str());
    }
  }

  std::vector<int> counts = cert.w_counts;
  std::vector<int> want = parts.parts();
  std::sort(counts.begin(), counts.end());
  std::sort(want.begin(), want.end());
  if (counts != want) {
    std::ostringstream os;
    os << "w_count multiset {";
    for (size_t i = 0; i < counts.size(); ++i)
      os << (i ? "," : "") << counts[i];
    os << "} differs from partition {";
    for (size_t i = 0; i < want.size(); ++i) os << (i ? "," : "") << want[i];
    os << "}";
    fail(os.str());
  }
  return rep;
}

}  // namespace dcf
