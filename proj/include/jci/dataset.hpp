#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "jci/graph.hpp"

namespace jci {

/// Observational and experimental samples pooled into one table. Column order
/// is R, I1..Im, then the observed system variables; column i is variable id i
/// of the generating graph. Stored column-major.
struct PooledDataset {
  std::vector<std::string> names;
  std::vector<VarKind> kinds;
  std::vector<std::vector<double>> columns;
  std::vector<int> regime;  // per row, 0-based
  int n_regimes = 0;
  std::vector<std::string> warnings;

  std::size_t rows() const { return regime.size(); }
  int cols() const { return static_cast<int>(columns.size()); }
  std::span<const double> column(int c) const { return columns.at(c); }
  VarSet of_kind(VarKind k) const;
  std::vector<int> regime_counts() const;

  /// Rows of one regime. With `system_only` the dummy columns are dropped
  /// (they are constant within a regime).
  PooledDataset filter_regime(int r, bool system_only) const;
};

/// CSV with a header line of column names. On reading, a column named R is the
/// regime, names of the form I<digits> are intervention variables and every
/// other column is a system variable. Without an R column all rows belong to
/// regime 0.
void write_dataset_csv(std::ostream& out, const PooledDataset& data);
PooledDataset read_dataset_csv(std::istream& in);

}  // namespace jci
