#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mls/cli/cli.hpp"
#include "mls/errors.hpp"
#include "mls/orbits/spectrum.hpp"
#include "mls/recovery/recovery.hpp"

using namespace mls;
namespace fs = std::filesystem;

namespace {

const char* kReference = R"(
[scatterer.1]
kind = circle
center = 0 2
radius = 1
[scatterer.2]
kind = circle
center = 0 -2
radius = 1
[scatterer.3]
kind = circle
center = 6 0
radius = 1
[run]
precision = 40
)";

struct Result {
  int code;
  std::string out, err;
};

Result lab(std::vector<std::string> args) {
  args.insert(args.begin(), "mls-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mls_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

SpectrumTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  return read_spectrum_csv(in);
}

}  // namespace

TEST_CASE("ranges and rationals") {
  CHECK(cli::parse_range("3:10").lo == 3);
  CHECK(cli::parse_range("3:10").hi == 10);
  CHECK(cli::parse_range("7").hi == 7);
  CHECK_THROWS_AS(cli::parse_range("9:3"), Error);
  CHECK_THROWS_AS(cli::parse_range("a:b"), Error);
  CHECK(cli::parse_rational("3/4") == Rational(3, 4));
  CHECK(cli::parse_rational("-0.125") == Rational(-1, 8));
  CHECK(cli::parse_rational(".5") == Rational(1, 2));
  CHECK(cli::parse_rational("12") == 12);
  CHECK_THROWS_AS(cli::parse_rational("x"), Error);
}

TEST_CASE("config parsing keeps decimal inputs exact") {
  PrecisionScope scope(60);
  std::istringstream in(R"(
[scatterer.1]
kind = ellipse
center = 0.1 2
a = 1.2
b = 0.8
angle = 0.3
[scatterer.2]
kind = fourier
center = 0 -2
radius = 1
cos = 0.01 0
sin = 0 0.002
[scatterer.3]
kind = circle
center = 6 0
radius = 1
)");
  const cli::Config c = cli::read_config(in);
  const auto sc = cli::build_scatterers(c);
  CHECK(sc[0].kind() == ScattererKind::Ellipse);
  CHECK(sc[1].kind() == ScattererKind::Fourier);
  CHECK(sc[0].center().x == BigFloat(1) / 10);
  CHECK(sc[0].semi_a() == BigFloat(12) / 10);

  std::istringstream missing("[scatterer.1]\nkind = circle\n");
  CHECK_THROWS_AS(cli::read_config(missing), Error);
  std::istringstream unknown(std::string(kReference) + "[extra]\nx = 1\n");
  CHECK_THROWS_AS(cli::read_config(unknown), Error);
}

TEST_CASE("spectrum command: symmetric grid and cyclicity-1 column") {
  const fs::path cfg = write_file("ref.ini", kReference);
  const Result r = lab({"spectrum", "--config", cfg.string(), "--m-range", "3:10", "--n-range", "3:10"});
  REQUIRE(r.code == cli::kOk);
  PrecisionScope scope(40);
  const SpectrumTable t = parse_csv(r.out);
  CHECK(t.values.size() == 64);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 65);
  CHECK(t.asymmetry() < pow10_neg(25));

  const Result c1 = lab({"spectrum", "--config", cfg.string(), "--cyclicity1", "--n-range", "3:10"});
  REQUIRE(c1.code == cli::kOk);
  std::istringstream in(c1.out);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const int n = std::stoi(line.substr(0, comma));
    CHECK(abs(t.at(n, n) - 2 * BigFloat(line.substr(comma + 1))) < pow10_neg(25));
    ++rows;
  }
  CHECK(rows == 8);
}

TEST_CASE("higher precision agrees with the previous run") {
  const fs::path cfg = write_file("ref.ini", kReference);
  const Result lo = lab({"spectrum", "--config", cfg.string(), "--m-range", "4:6", "--n-range", "5:6"});
  const Result hi = lab({"spectrum", "--config", cfg.string(), "--m-range", "4:6", "--n-range", "5:6", "--precision", "70"});
  REQUIRE(lo.code == cli::kOk);
  REQUIRE(hi.code == cli::kOk);
  PrecisionScope scope(70);
  const SpectrumTable a = parse_csv(lo.out), b = parse_csv(hi.out);
  REQUIRE(a.values.size() == b.values.size());
  for (const auto& [mn, v] : a.values) CHECK(abs(v - b.at(mn.first, mn.second)) < pow10_neg(35));
}

TEST_CASE("outputs are deterministic") {
  const fs::path cfg = write_file("ref.ini", kReference);
  const std::vector<std::string> args{"spectrum", "--config", cfg.string(), "--m-range", "3:6", "--n-range", "3:6", "--jobs", "3"};
  const Result a = lab(args), b = lab(args);
  CHECK(a.code == cli::kOk);
  CHECK(a.out == b.out);
  const fs::path f1 = scratch("s1.csv"), f2 = scratch("s2.csv");
  std::vector<std::string> to_file = args;
  to_file.insert(to_file.end(), {"--out", f1.string()});
  CHECK(lab(to_file).code == cli::kOk);
  std::ifstream in(f1);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == a.out);
}

TEST_CASE("roundtrip command") {
  const fs::path zero = write_file("zero.ini", "[seed]\n");
  Result r = lab({"roundtrip", "--seed-file", zero.string(), "--order", "3"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.rfind("PASS", 0) == 0);

  const fs::path seed = write_file("seed.ini", "[seed]\nL_inf = 5/4\ndelta = 3/4 -2/3\na_20 = 1/3\na_11 = -0.5\na_30 = 2/5\na_21 = 1/7\n");
  std::istringstream in("[seed]\nL_inf = 5/4\ndelta = 3/4 -2/3\na_20 = 1/3\na_11 = -0.5\n");
  const SeriesModel<Rational> md = cli::read_seed(in, 3);
  CHECK(md.delta.size() == 2);
  CHECK(md.a.coeff({1, 1}) == Rational(-1, 2));
  CHECK(md.a.coeff({0, 2}) == Rational(1, 3));
  r = lab({"roundtrip", "--seed-file", seed.string(), "--order", "3"});
  CHECK(r.code == cli::kOk);
  r = lab({"roundtrip", "--seed", "9"});
  CHECK(r.code == cli::kOk);
}

TEST_CASE("recover command and its tolerance exit code") {
  PrecisionScope scope(120);
  SeriesModel<BigFloat> md;
  md.lambda = BigFloat(1) / 5;
  md.xi_inf = 2;
  md.l0 = BigFloat(3) / 2;
  md.L_inf = BigFloat(1) / 3;
  md.delta = {BigFloat(1) / 4};
  md.a = symmetric_jet<BigFloat>(2, {{{2, 0}, BigFloat(-1) / 10}, {{1, 1}, BigFloat(1) / 7}});
  GridValues<BigFloat> g = synthetic_grid(md, 2, 1, 30);
  SpectrumTable t;
  for (const auto& [mn, v] : g) t.set(mn.first, mn.second, v);
  std::ostringstream csv;
  write_spectrum_csv(csv, t);
  const fs::path good = write_file("good.csv", csv.str());
  const fs::path lc = scratch("lc.csv");
  Result r = lab({"recover", "--spectrum", good.string(), "--order", "2", "--lc-out", lc.string()});
  CHECK(r.code == cli::kOk);
  const auto at = r.out.find("delta_1 = ");
  REQUIRE(at != std::string::npos);
  const std::string value = r.out.substr(at + 10, r.out.find('\n', at) - at - 10);
  CHECK(abs(BigFloat(value) - BigFloat(1) / 4) < pow10_neg(60));
  CHECK(fs::file_size(lc) > 0);

  // l^00_20 and l^00_02 made to disagree
  for (auto& [mn, v] : t.values) {
    const BigFloat za = md.xi_inf * md.xi_inf * pow(md.lambda, 2 * mn.first);
    const BigFloat zb = md.xi_inf * md.xi_inf * pow(md.lambda, 2 * mn.second);
    v += (za * za - zb * zb) / 1000;
  }
  std::ostringstream bad_csv;
  write_spectrum_csv(bad_csv, t);
  const fs::path bad = write_file("bad.csv", bad_csv.str());
  r = lab({"recover", "--spectrum", bad.string(), "--order", "2"});
  CHECK(r.code == cli::kTolerance);
  CHECK(r.err.find("tolerance failure") != std::string::npos);
}

TEST_CASE("reconstruct command") {
  const fs::path cfg = write_file("ref.ini", kReference);
  const Result r = lab({"reconstruct", "--config", cfg.string(), "--n-range", "4:9"});
  CHECK(r.code == cli::kOk);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 7);
  CHECK(r.err.find("arc fit") != std::string::npos);
}

TEST_CASE("usage and solver errors") {
  CHECK(lab({}).code == cli::kUsage);
  CHECK(lab({"spectrum", "--bogus"}).code == cli::kUsage);
  CHECK(lab({"recover"}).code == cli::kUsage);
  CHECK(lab({"spectrum", "--config", scratch("missing.ini").string()}).code == cli::kSolver);
  CHECK(lab({"--help"}).code == cli::kOk);
  // a line through all three scatterers
  const fs::path eclipse = write_file("eclipse.ini", R"(
[scatterer.1]
kind = circle
center = 0 2
radius = 1
[scatterer.2]
kind = circle
center = 0 -2
radius = 1
[scatterer.3]
kind = circle
center = 0 6
radius = 1
)");
  const Result r = lab({"spectrum", "--config", eclipse.string(), "--m-range", "3:3", "--n-range", "3:3"});
  CHECK(r.code == cli::kSolver);
  CHECK(r.err.find("non-eclipse") != std::string::npos);
}
