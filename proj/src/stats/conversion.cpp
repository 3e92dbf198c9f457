#include <algorithm>
#include <map>
#include <utility>

#include "jci/independence.hpp"

namespace jci {

Conversion statements_to_dstatements(const std::vector<WeightedStatement>& stmts, const DetRelationSet& d) {
  Conversion out;
  std::map<std::pair<StatementKey, bool>, double> best;
  for (WeightedStatement s : stmts) {
    normalize(s);
    VarSet w = s.w;
    if (s.independent()) {
      w = det_closure(d, s.w);
      if (w.contains(s.x) || w.contains(s.y)) {
        ++out.dropped;
        continue;
      }
    }
    auto [it, fresh] = best.emplace(std::pair{make_key(s.x, s.y, w), s.independent()}, s.weight);
    if (!fresh) it->second = std::max(it->second, s.weight);
  }
  for (const auto& [k, weight] : best) {
    out.statements.push_back({k.second ? DStatement::Kind::DSeparated : DStatement::Kind::DConnected,
                              k.first.x, k.first.y, k.first.w, weight});
  }
  sort_statements(out.statements);
  return out;
}

}  // namespace jci
