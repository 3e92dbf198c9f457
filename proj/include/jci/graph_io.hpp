#pragma once

#include <iosfwd>

#include "jci/graph.hpp"

namespace jci {

/// Graph file: {"variables":[{"id","name","kind"}], "edges":[[parent,child]],
/// "det":[{"from":[ids],"to":id}], "jci": bool}. "det" and "jci" are optional.
struct GraphFile {
  CausalGraph graph;
  DetRelationSet det;
};

GraphFile read_graph_json(std::istream& in);
void write_graph_json(std::ostream& out, const CausalGraph& g, const DetRelationSet& det);

}  // namespace jci
