#pragma once

#include <string>
#include <vector>

#include "dcf/digraph.hpp"

namespace dcf {

/// Edge-list text: optional '#' comment lines, a "n <N>" header, then one
/// "u v" arc per line. Duplicate arcs, loops and out-of-range ids are
/// parse errors with line/column positions.
Digraph parse_digraph_text(const std::string& text);
Digraph parse_digraph_file(const std::string& path);

/// Whitespace-separated vertex ids.
VertexSet parse_w_text(const std::string& text, int host_order);
VertexSet parse_w_file(const std::string& path, int host_order);

/// Comma-separated integer parts.
Partition parse_partition_text(const std::string& csv);

std::string write_digraph_text(const Digraph& d);
std::string write_w_text(const VertexSet& w);

enum class EmitFormat { json, dot };

/// Deterministic certificate rendering; the certificate is re-checked and
/// rejected if it does not validate against d, w and its own counts.
std::string emit_certificate(const Digraph& d, const VertexSet& w,
                             const CycleFactorCertificate& cert, EmitFormat f);

std::string emit_cycle(const Digraph& d, const VertexSet& w,
                       const std::vector<int>& cycle, EmitFormat f);

}  // namespace dcf
