#include "mls/cli/cli.hpp"

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "mls/errors.hpp"
#include "mls/normal_form/normal_form.hpp"
#include "mls/orbits/orbits.hpp"
#include "mls/orbits/spectrum.hpp"
#include "mls/reconstruction/reconstruction.hpp"
#include "mls/recovery/recovery.hpp"

namespace mls::cli {

Range parse_range(const std::string& text) {
  const auto colon = text.find(':');
  Range r;
  try {
    if (colon == std::string::npos) {
      r.lo = r.hi = std::stoi(text);
    } else {
      r.lo = std::stoi(text.substr(0, colon));
      r.hi = std::stoi(text.substr(colon + 1));
    }
  } catch (const std::exception&) {
    throw Error("bad range '" + text + "', expected lo:hi");
  }
  if (r.hi < r.lo) throw Error("empty range '" + text + "'");
  return r;
}

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  if (text.empty()) throw Error("empty rational");
  try {
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(text);
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t scale = text.size() - dot - 1;
    if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
    if (digits[0] == '+') digits.erase(0, 1);
    return Rational(digits) / Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale)));
  } catch (const std::runtime_error&) {
    throw Error("bad rational '" + raw + "'");
  }
}

namespace {

BigFloat number(const std::map<std::string, std::string>& sec, const std::string& key, const std::string& where) {
  auto it = sec.find(key);
  if (it == sec.end()) throw Error(where + ": missing '" + key + "'");
  const Rational q = parse_rational(it->second);
  return to_bigfloat(q);
}

std::vector<BigFloat> numbers(const std::string& text) {
  std::vector<BigFloat> v;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) v.push_back(to_bigfloat(parse_rational(tok)));
  return v;
}

}  // namespace

Config read_config(std::istream& in) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(std::string("config: ") + e.what());
  }
  Config c;
  for (const auto& [name, sec] : pt) {
    std::map<std::string, std::string> kv;
    for (const auto& [k, v] : sec) kv[k] = v.get_value<std::string>();
    if (name == "run") {
      c.run = kv;
    } else if (name.rfind("scatterer.", 0) == 0) {
      const std::string idx = name.substr(10);
      if (idx != "1" && idx != "2" && idx != "3") throw Error("config: unknown section [" + name + "]");
      c.scatterer[std::stoi(idx) - 1] = kv;
    } else {
      throw Error("config: unknown section [" + name + "]");
    }
  }
  for (int i = 0; i < 3; ++i)
    if (c.scatterer[i].empty()) throw Error("config: missing [scatterer." + std::to_string(i + 1) + "]");
  return c;
}

Config read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  return read_config(in);
}

std::array<Scatterer, 3> build_scatterers(const Config& config) {
  std::array<Scatterer, 3> out;
  for (int i = 0; i < 3; ++i) {
    const auto& s = config.scatterer[i];
    const std::string where = "[scatterer." + std::to_string(i + 1) + "]";
    auto kind = s.find("kind");
    if (kind == s.end()) throw Error(where + ": missing 'kind'");
    auto center = s.find("center");
    if (center == s.end()) throw Error(where + ": missing 'center'");
    const std::vector<BigFloat> c = numbers(center->second);
    if (c.size() != 2) throw Error(where + ": center needs two numbers");
    const Vec2 p{c[0], c[1]};
    if (kind->second == "circle") {
      out[i] = Scatterer::circle(p, number(s, "radius", where));
    } else if (kind->second == "ellipse") {
      const BigFloat angle = s.count("angle") ? number(s, "angle", where) : BigFloat(0);
      out[i] = Scatterer::ellipse(p, number(s, "a", where), number(s, "b", where), angle);
    } else if (kind->second == "fourier") {
      // harmonics start at k = 2
      std::vector<BigFloat> ck{0, 0}, sk{0, 0};
      for (const BigFloat& x : numbers(s.count("cos") ? s.at("cos") : "")) ck.push_back(x);
      for (const BigFloat& x : numbers(s.count("sin") ? s.at("sin") : "")) sk.push_back(x);
      const std::size_t n = std::max(ck.size(), sk.size());
      ck.resize(n, BigFloat(0));
      sk.resize(n, BigFloat(0));
      out[i] = Scatterer::fourier(p, number(s, "radius", where), ck, sk);
    } else {
      throw Error(where + ": unknown kind '" + kind->second + "'");
    }
  }
  return out;
}

SeriesModel<Rational> read_seed(std::istream& in, int nu) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(std::string("seed file: ") + e.what());
  }
  const boost::property_tree::ptree sec = pt.get_child("seed", boost::property_tree::ptree());
  auto get = [&](const std::string& k, const std::string& def) { return parse_rational(sec.get<std::string>(k, def)); };
  SeriesModel<Rational> md;
  md.lambda = get("lambda", "1/5");
  md.xi_inf = get("xi_inf", "2");
  md.l0 = get("l0", "3/2");
  md.L_inf = get("L_inf", "0");
  std::istringstream ds(sec.get<std::string>("delta", ""));
  std::string tok;
  while (ds >> tok) md.delta.push_back(parse_rational(tok));
  md.delta.resize(std::max(nu - 1, 0), Rational(0));
  std::vector<std::pair<std::array<int, 2>, Rational>> entries;
  for (const auto& [k, v] : sec) {
    if (k.size() == 4 && k[0] == 'a' && k[1] == '_' && std::isdigit(static_cast<unsigned char>(k[2])) &&
        std::isdigit(static_cast<unsigned char>(k[3]))) {
      const int p = k[2] - '0', q = k[3] - '0';
      if (p < q) throw Error("seed file: give a_pq with p >= q (" + k + ")");
      if (p + q >= 2) entries.push_back({{p, q}, parse_rational(v.get_value<std::string>())});
    }
  }
  md.a = symmetric_jet<Rational>(std::max(nu, 1), entries);
  return md;
}

namespace {

struct Options {
  std::string config, out = "-", spectrum, seed_file, lc_out;
  int precision = 0, order = 0, jobs = 0;
  unsigned seed = 1;
  std::string m_range, n_range;
  bool strict = false, cyclicity1 = false;
};

// an output file or the given stream for "-"
struct Sink {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os;
  Sink(const std::string& path, std::ostream& fallback) : os(&fallback) {
    if (path != "-") {
      file = std::make_unique<std::ofstream>(path);
      if (!*file) throw Error("cannot write " + path);
      os = file.get();
    }
  }
  std::ostream& operator*() { return *os; }
};

struct Context {
  Options opt;
  Config config;
  bool have_config = false;
  std::ostream& out;
  std::ostream& err;

  void load() {
    if (!opt.config.empty()) {
      config = read_config_file(opt.config);
      have_config = true;
    }
  }
  std::string run_value(const std::string& key, const std::string& def) const {
    auto it = config.run.find(key);
    return it == config.run.end() ? def : it->second;
  }
  int precision() const { return opt.precision > 0 ? opt.precision : std::stoi(run_value("precision", "80")); }
  int order(int def) const { return opt.order > 0 ? opt.order : std::stoi(run_value("order", std::to_string(def))); }
  int jobs() const { return opt.jobs > 0 ? opt.jobs : std::stoi(run_value("jobs", "1")); }
  Range m_range(const std::string& def) const { return parse_range(!opt.m_range.empty() ? opt.m_range : run_value("m_range", def)); }
  Range n_range(const std::string& def) const { return parse_range(!opt.n_range.empty() ? opt.n_range : run_value("n_range", def)); }
  BilliardTable table() const {
    if (!have_config) throw Error("--config is required");
    const auto sc = build_scatterers(config);
    const NonEclipseReport ne = check_non_eclipse(sc);
    if (!ne.ok) throw GeometryError("configuration violates the non-eclipse condition");
    return normalize_frame(sc);
  }
};

int cmd_spectrum(Context& c) {
  PrecisionScope scope(c.precision());
  const BilliardTable table = c.table();
  Sink sink(c.opt.out, c.out);
  if (c.opt.cyclicity1) {
    const Range n = c.n_range("3:10");
    *sink << "n,ell\n";
    for (int k = n.lo; k <= n.hi; ++k) *sink << k << ',' << to_decimal(cyclicity1_orbit(table, k).perimeter) << '\n';
    return kOk;
  }
  const Range m = c.m_range("3:10"), n = c.n_range("3:10");
  const SpectrumRun run = compute_spectrum(table, m.lo, m.hi, n.lo, n.hi, c.jobs());
  for (const SpectrumFailure& f : run.failures)
    c.err << "cell (" << f.m << ", " << f.n << ") failed: " << f.what << "\n";
  if (!run.failures.empty() && c.opt.strict) return kSolver;
  write_spectrum_csv(*sink, run.table);
  const BigFloat asym = run.table.asymmetry();
  if (asym > pow10_neg(c.precision() - 15)) {
    c.err << "spectrum asymmetry " << to_decimal(asym, 3) << "\n";
    return kTolerance;
  }
  return run.failures.empty() ? kOk : kSolver;
}

int cmd_normalform(Context& c) {
  PrecisionScope scope(c.precision());
  const BilliardTable table = c.table();
  const int order = c.order(4);
  const GluingData glue = extend_and_glue(table, order);
  Sink sink(c.opt.out, c.out);
  write_normal_form_report(*sink, glue);
  const BigFloat tol = pow10_neg(c.precision() / 2);
  if (glue.nf.conjugacy_residual > tol || glue.nf.involution_residual > tol || glue.involution_residual > tol) {
    c.err << "normal form residuals exceed " << to_decimal(tol, 3) << "\n";
    return kTolerance;
  }
  return kOk;
}

SpectrumTable load_spectrum(const std::string& path, int precision) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open spectrum " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (precision <= 0) {
    PrecisionScope probe(20);
    std::istringstream s(buf.str());
    precision = std::max(20, read_spectrum_csv(s).precision);
  }
  BigFloat::default_precision(precision);
  std::istringstream s(buf.str());
  SpectrumTable t = read_spectrum_csv(s);
  t.precision = precision;
  return t;
}

int cmd_recover(Context& c) {
  if (c.opt.spectrum.empty()) throw Error("--spectrum is required");
  // load_spectrum picks the precision of the file unless --precision is given
  PrecisionScope scope(working_precision());
  const SpectrumTable t = load_spectrum(c.opt.spectrum, c.opt.precision);
  const int nu = c.order(3);
  const RecoveryReport r = recover(t, nu);
  Sink sink(c.opt.out, c.out);
  write_recovery_report(*sink, r);
  if (!c.opt.lc_out.empty()) {
    Sink lc(c.opt.lc_out, c.out);
    write_lc_csv(*lc, r.fit);
  }
  // a10 = a01 = 1 within the fit errors
  const BigFloat floor = pow10_neg(t.precision / 2);
  const bool have = !r.fit.check_cells.empty();
  const BigFloat e10 = have ? BigFloat(10 * r.fit.error.get(1, 0, 0, 0)) : floor;
  const BigFloat e01 = have ? BigFloat(10 * r.fit.error.get(0, 1, 0, 0)) : floor;
  if (nu >= 1 && (abs(r.invariants.a10 - 1) > max(e10, floor) || abs(r.invariants.a01 - 1) > max(e01, floor))) {
    c.err << "a10/a01 differ from 1 beyond the fit error\n";
    return kTolerance;
  }
  return kOk;
}

int cmd_reconstruct(Context& c) {
  PrecisionScope scope(c.precision());
  const BilliardTable table = c.table();
  const Range n = c.n_range("4:12");
  // the orbit solver stands in for the spectral recovery of the interior points
  const std::vector<OrbitData> data = cyclicity1_data(table, n.lo, n.hi);
  const std::vector<ReconstructedPoint> pts = reconstruct_d3_points(known_pair(table), data);
  Sink sink(c.opt.out, c.out);
  write_points_csv(*sink, pts);

  // validation against the true third scatterer
  BigFloat dev = 0, closure = 0;
  for (const ReconstructedPoint& p : pts) {
    const PeriodicOrbit o = cyclicity1_orbit(table, p.n);
    dev = max(dev, norm(p.point - table.eval(3, o.points[0].s).point));
    closure = max(closure, p.closure);
  }
  c.err << "max distance to the true boundary point " << to_decimal(dev, 3) << "\n";
  c.err << "max closure defect " << to_decimal(closure, 3) << "\n";
  if (pts.size() >= 6) {
    std::vector<Vec2> v;
    std::vector<BigFloat> e;
    for (const ReconstructedPoint& p : pts) {
      v.push_back(p.point);
      e.push_back(p.error);
    }
    const ArcFit fit = fit_boundary_arc(v, ArcModel::Circle, e, BigFloat(1e6));
    c.err << "arc fit: center " << to_decimal(fit.center.x, 20) << " " << to_decimal(fit.center.y, 20) << " radius "
          << to_decimal(fit.radius, 20) << " max residual " << to_decimal(fit.max_residual, 3)
          << (fit.flagged ? " (flagged)" : "") << "\n";
  }
  if (dev > pow10_neg(c.precision() / 2) || closure > pow10_neg(c.precision() - 20)) return kTolerance;
  return kOk;
}

int cmd_roundtrip(Context& c) {
  PrecisionScope scope(c.precision());
  const int nu = c.order(4);
  SeriesModel<Rational> seed;
  if (!c.opt.seed_file.empty()) {
    std::ifstream in(c.opt.seed_file);
    if (!in) throw Error("cannot open seed file " + c.opt.seed_file);
    seed = read_seed(in, nu);
  } else {
    seed = random_rational_model(c.opt.seed, nu);
  }
  const Range g = c.m_range("1:12");
  const RoundTrip rt = rational_roundtrip(seed, nu, g.lo, g.hi);
  Sink sink(c.opt.out, c.out);
  *sink << (rt.exact ? "PASS" : "FAIL") << " order " << nu << " cells " << rt.cells;
  if (!rt.exact) *sink << " first mismatch " << rt.mismatch;
  *sink << "\n";
  return rt.exact ? kOk : kTolerance;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"marked length spectrum laboratory for three-scatterer billiards"};
  app.require_subcommand(1);
  Context ctx{Options{}, Config{}, false, out, err};
  Options& o = ctx.opt;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", o.config, "INI configuration");
    s->add_option("--precision", o.precision, "working precision in decimal digits");
    s->add_option("--out", o.out, "output file, - for stdout");
    s->add_option("--jobs", o.jobs, "worker threads");
    s->add_flag("--strict", o.strict, "fail on any solver failure");
  };
  CLI::App* spectrum = app.add_subcommand("spectrum", "perimeters l_{m,n} of cyclicity-2 orbits");
  common(spectrum);
  spectrum->add_option("--m-range", o.m_range, "lo:hi");
  spectrum->add_option("--n-range", o.n_range, "lo:hi");
  spectrum->add_flag("--cyclicity1", o.cyclicity1, "perimeters l_n of the cyclicity-1 orbits over --n-range");

  CLI::App* normalform = app.add_subcommand("normalform", "Birkhoff normal form and gluing map");
  common(normalform);
  normalform->add_option("--order", o.order, "order of the gluing jets");

  CLI::App* rec = app.add_subcommand("recover", "normal form data from a spectrum CSV");
  common(rec);
  rec->add_option("--spectrum", o.spectrum, "spectrum CSV")->required();
  rec->add_option("--order", o.order, "series order nu");
  rec->add_option("--lc-out", o.lc_out, "CSV of the extracted coefficients");

  CLI::App* recon = app.add_subcommand("reconstruct", "points of the third scatterer");
  common(recon);
  recon->add_option("--n-range", o.n_range, "lo:hi");

  CLI::App* rt = app.add_subcommand("roundtrip", "exact synthetic round trip");
  common(rt);
  rt->add_option("--order", o.order, "series order nu");
  rt->add_option("--seed-file", o.seed_file, "INI with a [seed] section");
  rt->add_option("--seed", o.seed, "random seed when no seed file is given");
  rt->add_option("--m-range", o.m_range, "grid lo:hi for both m and n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    ctx.load();
    if (*spectrum) return cmd_spectrum(ctx);
    if (*normalform) return cmd_normalform(ctx);
    if (*rec) return cmd_recover(ctx);
    if (*recon) return cmd_reconstruct(ctx);
    if (*rt) return cmd_roundtrip(ctx);
  } catch (const ToleranceError& e) {
    err << "tolerance failure: " << e.what() << "\n";
    return kTolerance;
  } catch (const SingularLinearPart& e) {
    err << "tolerance failure: " << e.what() << "\n";
    return kTolerance;
  } catch (const ConvergenceError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const TangencyError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kSolver;
  }
  return kUsage;
}

}  // namespace mls::cli
