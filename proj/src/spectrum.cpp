#include "mls/orbits/spectrum.hpp"

#include <atomic>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "mls/errors.hpp"
#include "mls/orbits/orbits.hpp"

namespace mls {

const BigFloat& SpectrumTable::at(int m, int n) const {
  auto it = values.find({m, n});
  if (it == values.end()) throw Error("spectrum has no entry for (" + std::to_string(m) + ", " + std::to_string(n) + ")");
  return it->second;
}

int SpectrumTable::m_min() const {
  int v = values.empty() ? 0 : values.begin()->first.first;
  for (const auto& [k, x] : values) v = std::min({v, k.first, k.second});
  return v;
}

int SpectrumTable::m_max() const {
  int v = 0;
  for (const auto& [k, x] : values) v = std::max({v, k.first, k.second});
  return v;
}

BigFloat SpectrumTable::asymmetry() const {
  BigFloat worst = 0;
  for (const auto& [k, x] : values) {
    auto it = values.find({k.second, k.first});
    if (it != values.end()) worst = max(worst, BigFloat(abs(x - it->second)));
  }
  return worst;
}

void write_spectrum_csv(std::ostream& out, const SpectrumTable& t) {
  out << "m,n,ell\n";
  for (const auto& [k, v] : t.values) out << k.first << ',' << k.second << ',' << to_decimal(v) << '\n';
}

SpectrumTable read_spectrum_csv(std::istream& in) {
  SpectrumTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("m,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ','))
      throw Error("spectrum CSV: malformed line " + std::to_string(lineno));
    int digits = 0;
    for (char ch : c) {
      if (ch == 'e' || ch == 'E') break;
      if (ch >= '0' && ch <= '9') ++digits;
    }
    t.precision = std::max(t.precision, digits);
    t.set(std::stoi(a), std::stoi(b), parse_decimal(c));
  }
  return t;
}

SpectrumRun compute_spectrum(const BilliardTable& table, int m_lo, int m_hi, int n_lo, int n_hi, int jobs) {
  std::vector<std::pair<int, int>> cells;
  for (int m = m_lo; m <= m_hi; ++m)
    for (int n = n_lo; n <= n_hi; ++n) cells.push_back({m, n});
  SpectrumRun run;
  run.table.precision = static_cast<int>(working_precision());
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  // the mpfr default precision is process-wide, so workers share the caller's
  auto worker = [&]() {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      auto [m, n] = cells[c];
      try {
        PeriodicOrbit o = cyclicity2_orbit(table, m, n);
        std::lock_guard<std::mutex> lock(mu);
        run.table.set(m, n, o.perimeter);
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(mu);
        run.failures.push_back({m, n, e.what()});
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::sort(run.failures.begin(), run.failures.end(),
            [](const SpectrumFailure& a, const SpectrumFailure& b) { return std::pair(a.m, a.n) < std::pair(b.m, b.n); });
  return run;
}

}  // namespace mls
