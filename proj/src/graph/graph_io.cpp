#include "jci/graph_io.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "jci/errors.hpp"

namespace jci {

using nlohmann::json;

GraphFile read_graph_json(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(std::string("graph file is not valid JSON: ") + e.what());
  }
  try {
    std::vector<Variable> vars;
    for (const auto& v : j.at("variables")) {
      vars.push_back({v.at("id").get<VarId>(), v.at("name").get<std::string>(),
                      parse_var_kind(v.at("kind").get<std::string>())});
    }
    GraphFile out{CausalGraph(std::move(vars), j.value("jci", false)), {}};
    for (const auto& e : j.value("edges", json::array())) {
      if (!e.is_array() || e.size() != 2) throw InputError("edges must be [parent, child] pairs");
      out.graph.add_edge(e[0].get<VarId>(), e[1].get<VarId>());
    }
    for (const auto& d : j.value("det", json::array())) {
      DetRelation r;
      for (const auto& id : d.at("from")) r.determiners.insert(id.get<VarId>());
      r.determined = d.at("to").get<VarId>();
      out.graph.check_ids(r.determiners | VarSet::single(r.determined));
      out.det.add(r);
    }
    return out;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed graph file: ") + e.what());
  }
}

void write_graph_json(std::ostream& out, const CausalGraph& g, const DetRelationSet& det) {
  json j;
  j["jci"] = g.is_jci();
  j["variables"] = json::array();
  for (const auto& v : g.variables()) {
    j["variables"].push_back({{"id", v.id}, {"name", v.name}, {"kind", std::string(to_string(v.kind))}});
  }
  j["edges"] = json::array();
  for (const auto& [p, c] : g.edges()) j["edges"].push_back({p, c});
  j["det"] = json::array();
  for (const auto& r : det.relations()) {
    j["det"].push_back({{"from", r.determiners.to_vector()}, {"to", r.determined}});
  }
  out << j.dump(2) << '\n';
}

}  // namespace jci
