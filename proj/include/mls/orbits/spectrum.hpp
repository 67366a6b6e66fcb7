#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mls/geometry/table.hpp"

namespace mls {

/// Perimeters l_{m,n} of the cyclicity-2 orbits over a grid.
struct SpectrumTable {
  int precision = 0;
  std::map<std::pair<int, int>, BigFloat> values;

  bool has(int m, int n) const { return values.count({m, n}) > 0; }
  const BigFloat& at(int m, int n) const;
  void set(int m, int n, BigFloat v) { values[{m, n}] = std::move(v); }
  int m_min() const;
  int m_max() const;
  /// max |l_{m,n} - l_{n,m}| over pairs present in both orders
  BigFloat asymmetry() const;
};

/// Columns m, n, l_{m,n}; values as decimal strings at full precision.
void write_spectrum_csv(std::ostream& out, const SpectrumTable& table);
SpectrumTable read_spectrum_csv(std::istream& in);

struct SpectrumFailure {
  int m, n;
  std::string what;
};

struct SpectrumRun {
  SpectrumTable table;
  std::vector<SpectrumFailure> failures;
};

/// All cells (m, n) in [m_lo, m_hi] x [n_lo, n_hi], each solved independently,
/// spread over up to jobs threads.
SpectrumRun compute_spectrum(const BilliardTable& table, int m_lo, int m_hi, int n_lo, int n_hi, int jobs = 1);

}  // namespace mls
