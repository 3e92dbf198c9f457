#include "jci/dataset.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "jci/errors.hpp"

namespace jci {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r' && ch != ' ') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

bool is_intervention_name(const std::string& n) {
  if (n.size() < 2 || n[0] != 'I') return false;
  for (std::size_t i = 1; i < n.size(); ++i) {
    if (n[i] < '0' || n[i] > '9') return false;
  }
  return true;
}

double parse_double(const std::string& tok, std::size_t line_no) {
  double v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw InputError("line " + std::to_string(line_no) + ": bad number '" + tok + "'");
  }
  return v;
}

}  // namespace

VarSet PooledDataset::of_kind(VarKind k) const {
  VarSet s;
  for (int c = 0; c < cols(); ++c) {
    if (kinds[c] == k) s.insert(c);
  }
  return s;
}

std::vector<int> PooledDataset::regime_counts() const {
  std::vector<int> counts(n_regimes, 0);
  for (int r : regime) ++counts.at(r);
  return counts;
}

PooledDataset PooledDataset::filter_regime(int r, bool system_only) const {
  PooledDataset out;
  std::vector<int> keep;
  for (int c = 0; c < cols(); ++c) {
    if (!system_only || kinds[c] == VarKind::System) keep.push_back(c);
  }
  for (int c : keep) {
    out.names.push_back(names[c]);
    out.kinds.push_back(kinds[c]);
    out.columns.emplace_back();
  }
  for (std::size_t row = 0; row < rows(); ++row) {
    if (regime[row] != r) continue;
    for (std::size_t k = 0; k < keep.size(); ++k) out.columns[k].push_back(columns[keep[k]][row]);
    out.regime.push_back(0);
  }
  out.n_regimes = 1;
  return out;
}

void write_dataset_csv(std::ostream& out, const PooledDataset& data) {
  for (int c = 0; c < data.cols(); ++c) out << (c ? "," : "") << data.names[c];
  out << '\n';
  char buf[64];
  for (std::size_t row = 0; row < data.rows(); ++row) {
    for (int c = 0; c < data.cols(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof buf, data.columns[c][row]);
      if (c) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

PooledDataset read_dataset_csv(std::istream& in) {
  PooledDataset data;
  std::string line;
  if (!std::getline(in, line)) throw InputError("dataset CSV is empty");
  data.names = split_csv(line);
  int regime_col = -1;
  for (std::size_t c = 0; c < data.names.size(); ++c) {
    const auto& n = data.names[c];
    if (n.empty()) throw InputError("dataset CSV has an empty column name");
    if (n == "R") {
      if (regime_col >= 0) throw InputError("dataset CSV has two R columns");
      regime_col = static_cast<int>(c);
      data.kinds.push_back(VarKind::Regime);
    } else {
      data.kinds.push_back(is_intervention_name(n) ? VarKind::Intervention : VarKind::System);
    }
  }
  data.columns.resize(data.names.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto toks = split_csv(line);
    if (toks.size() != data.names.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(data.names.size()) + " fields");
    }
    for (std::size_t c = 0; c < toks.size(); ++c) data.columns[c].push_back(parse_double(toks[c], line_no));
  }
  const std::size_t n = data.columns.empty() ? 0 : data.columns[0].size();
  data.regime.assign(n, 0);
  data.n_regimes = n > 0 ? 1 : 0;
  if (regime_col >= 0) {
    int max_r = -1;
    for (std::size_t row = 0; row < n; ++row) {
      const double v = data.columns[regime_col][row];
      if (v < 0 || v != std::floor(v)) {
        throw InputError("regime column must hold nonnegative integers");
      }
      data.regime[row] = static_cast<int>(v);
      max_r = std::max(max_r, data.regime[row]);
    }
    data.n_regimes = max_r + 1;
  }
  return data;
}

}  // namespace jci
