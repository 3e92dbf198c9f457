#include "jci/statement.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "jci/errors.hpp"

namespace jci {

namespace {

template <class S>
void normalize_impl(S& s) {
  if (s.x == s.y) throw InputError("statement endpoints must differ");
  if (s.w.contains(s.x) || s.w.contains(s.y)) {
    throw InputError("statement endpoint inside its conditioning set");
  }
  if (s.y < s.x) std::swap(s.x, s.y);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_weight(const std::string& tok) {
  if (tok == "inf" || tok == "+inf") return kInfiniteWeight;
  double w = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), w);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !(w >= 0)) {
    throw InputError("bad statement weight '" + tok + "'");
  }
  return w;
}

/// Parses one statement line; `resolve` maps a name to an id.
template <class Resolve>
DStatement parse_line(const std::string& line, Resolve&& resolve) {
  const auto bar = line.find('|');
  const auto colon = line.rfind(':');
  if (bar == std::string::npos || colon == std::string::npos || colon < bar) {
    throw InputError("malformed statement line: " + line);
  }
  const auto head = split_ws(line.substr(0, bar));
  const auto cond = split_ws(line.substr(bar + 1, colon - bar - 1));
  const auto tail = split_ws(line.substr(colon + 1));
  if (head.size() != 3 || tail.size() != 1) throw InputError("malformed statement line: " + line);
  DStatement s;
  if (head[0] == "sep") {
    s.kind = DStatement::Kind::DSeparated;
  } else if (head[0] == "con") {
    s.kind = DStatement::Kind::DConnected;
  } else {
    throw InputError("statement must start with sep or con: " + line);
  }
  s.x = resolve(head[1]);
  s.y = resolve(head[2]);
  for (const auto& t : cond) s.w.insert(resolve(t));
  s.weight = parse_weight(tail[0]);
  normalize(s);
  return s;
}

constexpr std::string_view kVariablesPrefix = "# variables:";

}  // namespace

void normalize(DStatement& s) { normalize_impl(s); }
void normalize(WeightedStatement& s) { normalize_impl(s); }

void sort_statements(std::vector<DStatement>& stmts) {
  std::sort(stmts.begin(), stmts.end(), [](const DStatement& a, const DStatement& b) {
    const auto ka = key_of(a);
    const auto kb = key_of(b);
    if (ka.w.size() != kb.w.size()) return ka.w.size() < kb.w.size();
    if (ka != kb) return ka < kb;
    return a.separated() && !b.separated();
  });
}

std::string format_weight(double w) {
  if (std::isinf(w)) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << w;
  return os.str();
}

std::string to_string(const DStatement& s, const std::vector<std::string>& names) {
  auto name = [&](VarId v) {
    return v < static_cast<VarId>(names.size()) ? names[v] : std::to_string(v);
  };
  std::string out = s.separated() ? "sep " : "con ";
  out += name(s.x) + " " + name(s.y) + " |";
  s.w.for_each([&](VarId v) { out += " " + name(v); });
  out += " : " + format_weight(s.weight);
  return out;
}

void write_statements(std::ostream& out, const std::vector<DStatement>& stmts,
                      const std::vector<std::string>& names) {
  out << kVariablesPrefix;
  for (const auto& n : names) out << ' ' << n;
  out << '\n';
  for (const auto& s : stmts) out << to_string(s, names) << '\n';
}

StatementFile read_statements(std::istream& in) {
  StatementFile file;
  std::map<std::string, VarId, std::less<>> ids;
  bool fixed = false;
  auto resolve = [&](const std::string& name) -> VarId {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    if (fixed) throw InputError("statement names undeclared variable '" + name + "'");
    const auto id = static_cast<VarId>(file.names.size());
    if (id >= kMaxVariables) throw InputError("too many variables in statement file");
    ids.emplace(name, id);
    file.names.push_back(name);
    return id;
  };
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.rfind(kVariablesPrefix, 0) == 0) {
      if (!file.names.empty()) throw InputError("variables header must come first");
      for (const auto& n : split_ws(t.substr(kVariablesPrefix.size()))) resolve(n);
      fixed = true;
      continue;
    }
    if (t[0] == '#') continue;
    file.statements.push_back(parse_line(t, resolve));
  }
  return file;
}

std::vector<DStatement> read_statements(std::istream& in, const std::vector<std::string>& names) {
  StatementFile file = read_statements(in);
  std::vector<VarId> remap(file.names.size());
  for (std::size_t i = 0; i < file.names.size(); ++i) {
    auto it = std::find(names.begin(), names.end(), file.names[i]);
    if (it == names.end()) throw InputError("unknown variable '" + file.names[i] + "'");
    remap[i] = static_cast<VarId>(it - names.begin());
  }
  for (auto& s : file.statements) {
    s.x = remap[s.x];
    s.y = remap[s.y];
    VarSet w;
    s.w.for_each([&](VarId v) { w.insert(remap[v]); });
    s.w = w;
    normalize(s);
  }
  return file.statements;
}

}  // namespace jci
