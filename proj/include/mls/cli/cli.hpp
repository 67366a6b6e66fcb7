#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "mls/geometry/table.hpp"
#include "mls/series/series.hpp"

namespace mls::cli {

enum ExitCode { kOk = 0, kUsage = 1, kTolerance = 2, kSolver = 3 };

/// Inclusive integer range written "lo:hi".
struct Range {
  int lo = 0, hi = -1;
};
Range parse_range(const std::string& text);

/// Exact rational from "p/q", an integer, or a decimal such as "-0.125".
Rational parse_rational(const std::string& text);

/// INI configuration. Numbers stay as strings until a precision is set.
///
///   [scatterer.1]  kind = circle | ellipse | fourier
///                  center = x y; radius; a; b; angle; cos = c2 c3 ..; sin = s2 s3 ..
///   [run]          precision, order, m_range, n_range, jobs
struct Config {
  std::array<std::map<std::string, std::string>, 3> scatterer;
  std::map<std::string, std::string> run;
};

Config read_config(std::istream& in);
Config read_config_file(const std::string& path);
/// Scatterers at the current working precision.
std::array<Scatterer, 3> build_scatterers(const Config& config);

/// Seed file for the round trip: [seed] with lambda, xi_inf, l0, L_inf,
/// delta = "d1 d2 ..", and a_pq = value for p >= q.
SeriesModel<Rational> read_seed(std::istream& in, int nu);

/// Entry point of mls-lab; output and diagnostics go to the given streams.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mls::cli
