#include "dcf/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dcf/errors.hpp"

namespace dcf {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Splits into lines, reporting 1-based positions.
struct LineReader {
  std::istringstream is;
  int lineno = 0;
  explicit LineReader(const std::string& text) : is(text) {}
  bool next(std::string& line) {
    if (!std::getline(is, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
};

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

long parse_int(const std::string& tok, int lineno, int col) {
  size_t used = 0;
  long val = 0;
  try {
    val = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + tok + "'", lineno, col);
  }
  if (used != tok.size())
    throw ParseError("trailing characters in integer '" + tok + "'", lineno, col);
  return val;
}

}  // namespace

Digraph parse_digraph_text(const std::string& text) {
  LineReader reader(text);
  std::string line;
  long n = -1;
  std::vector<Arc> arcs;
  std::set<Arc> seen;
  while (reader.next(line)) {
    if (blank(line) || line[0] == '#') continue;
    std::istringstream ls(line);
    if (n < 0) {
      std::string tag, val, extra;
      if (!(ls >> tag >> val) || tag != "n" || (ls >> extra))
        throw ParseError("expected header 'n <N>'", reader.lineno, 1);
      n = parse_int(val, reader.lineno, 3);
      if (n < 0 || n > 1'000'000)
        throw ParseError("unreasonable order", reader.lineno, 3);
      continue;
    }
    std::string us, vs, extra;
    if (!(ls >> us >> vs) || (ls >> extra))
      throw ParseError("expected arc line 'u v'", reader.lineno, 1);
    long u = parse_int(us, reader.lineno, 1);
    long v = parse_int(vs, reader.lineno, static_cast<int>(us.size()) + 2);
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw ParseError("arc endpoint out of range", reader.lineno, 1);
    if (u == v) throw ParseError("loop arc not allowed", reader.lineno, 1);
    Arc a{static_cast<int>(u), static_cast<int>(v)};
    if (!seen.insert(a).second)
      throw ParseError("duplicate arc line", reader.lineno, 1);
    arcs.push_back(a);
  }
  if (n < 0) throw ParseError("missing 'n <N>' header", reader.lineno, 1);
  return Digraph(static_cast<int>(n), std::move(arcs));
}

Digraph parse_digraph_file(const std::string& path) {
  return parse_digraph_text(read_file(path));
}

VertexSet parse_w_text(const std::string& text, int host_order) {
  std::istringstream is(text);
  std::vector<int> ids;
  std::string tok;
  while (is >> tok) {
    long v = parse_int(tok, 1, 1);
    if (v < 0 || v >= host_order)
      throw ParseError("W vertex out of range: " + tok, 1, 1);
    ids.push_back(static_cast<int>(v));
  }
  try {
    return VertexSet::of(host_order, std::move(ids));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 1, 1);
  }
}

VertexSet parse_w_file(const std::string& path, int host_order) {
  return parse_w_text(read_file(path), host_order);
}

Partition parse_partition_text(const std::string& csv) {
  std::vector<int> parts;
  std::string tok;
  std::istringstream is(csv);
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) throw ParseError("empty partition part", 1, 1);
    parts.push_back(static_cast<int>(parse_int(tok, 1, 1)));
  }
  try {
    return Partition::of(std::move(parts));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 1, 1);
  }
}

std::string write_digraph_text(const Digraph& d) {
  std::ostringstream os;
  os << "n " << d.order() << "\n";
  for (auto [u, v] : d.arcs()) os << u << " " << v << "\n";
  return os.str();
}

std::string write_w_text(const VertexSet& w) {
  std::ostringstream os;
  for (size_t i = 0; i < w.ids().size(); ++i) os << (i ? " " : "") << w.ids()[i];
  os << "\n";
  return os.str();
}

namespace {

CycleFactorCertificate sorted_certificate(const CycleFactorCertificate& cert) {
  CycleFactorCertificate out;
  std::vector<size_t> order(cert.cycles.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::vector<int>> canon;
  canon.reserve(cert.cycles.size());
  for (const auto& c : cert.cycles) canon.push_back(canonical_rotation(c));
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return canon[a] < canon[b]; });
  for (size_t i : order) {
    out.cycles.push_back(canon[i]);
    out.w_counts.push_back(cert.w_counts[i]);
  }
  return out;
}

void check_certificate_or_throw(const Digraph& d, const VertexSet& w,
                                const CycleFactorCertificate& cert) {
  std::vector<int> counts = cert.w_counts;
  for (int c : counts)
    if (c < 2) throw PreconditionError("unvalidated certificate rejected");
  Partition parts = Partition::of(std::move(counts));
  ValidationReport rep = validate_certificate(d, w, parts, cert);
  if (!rep.pass) throw PreconditionError("unvalidated certificate rejected");
}

const char* kCycleColors[] = {"blue",   "red",    "darkgreen", "purple",
                              "orange", "brown",  "magenta",   "cadetblue"};

}  // namespace

std::string emit_certificate(const Digraph& d, const VertexSet& w,
                             const CycleFactorCertificate& cert, EmitFormat f) {
  check_certificate_or_throw(d, w, cert);
  CycleFactorCertificate sorted = sorted_certificate(cert);
  if (f == EmitFormat::json) {
    nlohmann::ordered_json j;
    j["n"] = d.order();
    j["w"] = w.ids();
    j["cycles"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < sorted.cycles.size(); ++i) {
      nlohmann::ordered_json c;
      c["vertices"] = sorted.cycles[i];
      c["w_count"] = sorted.w_counts[i];
      j["cycles"].push_back(std::move(c));
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "digraph cycle_factor {\n";
  for (int v : w.ids())
    os << "  " << v << " [style=filled, fillcolor=gold];\n";
  for (size_t i = 0; i < sorted.cycles.size(); ++i) {
    const auto& cyc = sorted.cycles[i];
    const char* color = kCycleColors[i % (sizeof(kCycleColors) / sizeof(char*))];
    for (size_t j = 0; j < cyc.size(); ++j)
      os << "  " << cyc[j] << " -> " << cyc[(j + 1) % cyc.size()] << " [color="
         << color << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string emit_cycle(const Digraph& d, const VertexSet& w,
                       const std::vector<int>& cycle, EmitFormat f) {
  std::vector<int> canon = canonical_rotation(cycle);
  for (size_t i = 0; i < canon.size(); ++i)
    if (!d.has_arc(canon[i], canon[(i + 1) % canon.size()]))
      throw PreconditionError("cycle does not lie in the digraph");
  if (f == EmitFormat::json) {
    nlohmann::ordered_json j;
    j["n"] = d.order();
    j["w"] = w.ids();
    j["cycle"] = canon;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "digraph w_cycle {\n";
  for (int v : w.ids())
    os << "  " << v << " [style=filled, fillcolor=gold];\n";
  for (size_t j = 0; j < canon.size(); ++j)
    os << "  " << canon[j] << " -> " << canon[(j + 1) % canon.size()]
       << " [color=blue];\n";
  os << "}\n";
  return os.str();
}

}  // namespace dcf
