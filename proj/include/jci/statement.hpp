#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jci/varset.hpp"

namespace jci {

inline constexpr double kInfiniteWeight = std::numeric_limits<double>::infinity();

/// Result of one conditional independence test, X _||_ Y | W or its negation.
struct WeightedStatement {
  enum class Kind { Independent, Dependent };
  Kind kind = Kind::Independent;
  VarId x = 0;
  VarId y = 0;
  VarSet w;
  double weight = 0.0;
  std::optional<double> p_value;

  bool independent() const { return kind == Kind::Independent; }
};

/// A d-separation or d-connection statement in the causal graph.
struct DStatement {
  enum class Kind { DSeparated, DConnected };
  Kind kind = Kind::DSeparated;
  VarId x = 0;
  VarId y = 0;
  VarSet w;
  double weight = kInfiniteWeight;

  bool separated() const { return kind == Kind::DSeparated; }
};

/// Identity of a statement independent of its polarity and weight:
/// x < y and the conditioning set as a mask.
struct StatementKey {
  VarId x = 0;
  VarId y = 0;
  VarSet w;

  auto operator<=>(const StatementKey&) const = default;
};

inline StatementKey make_key(VarId a, VarId b, VarSet w) {
  return a < b ? StatementKey{a, b, w} : StatementKey{b, a, w};
}
inline StatementKey key_of(const DStatement& s) { return make_key(s.x, s.y, s.w); }
inline StatementKey key_of(const WeightedStatement& s) { return make_key(s.x, s.y, s.w); }

/// Puts x < y. Throws InputError when x == y or an endpoint is in w.
void normalize(DStatement& s);
void normalize(WeightedStatement& s);

/// Sorts by key, then polarity (separated first).
void sort_statements(std::vector<DStatement>& stmts);

// ---------------------------------------------------------------------------
// Statement file: one statement per line
//
//   sep X Y | W1 W2 ... : weight
//   con X Y | : inf
//
// Tokens are variable names. Writers emit a leading `# variables: ...` line
// fixing the id order; readers honour it when present and otherwise assign ids
// by first appearance. Blank lines and other `#` lines are ignored.
// ---------------------------------------------------------------------------

struct StatementFile {
  std::vector<std::string> names;  // id -> name
  std::vector<DStatement> statements;
};

void write_statements(std::ostream& out, const std::vector<DStatement>& stmts,
                      const std::vector<std::string>& names);
StatementFile read_statements(std::istream& in);
/// Reads with a fixed name table; unknown names are an InputError.
std::vector<DStatement> read_statements(std::istream& in, const std::vector<std::string>& names);

std::string format_weight(double w);
std::string to_string(const DStatement& s, const std::vector<std::string>& names);

}  // namespace jci
