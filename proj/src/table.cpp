#include "mls/geometry/table.hpp"

#include <algorithm>
#include <vector>

#include "mls/errors.hpp"

namespace mls {

namespace {

constexpr int kSeparationSamples = 1024;
constexpr int kEclipseSamples = 4096;

// Golden-section search for the maximum of f on [lo, hi].
template <class F>
BigFloat golden_max(const F& f, BigFloat lo, BigFloat hi, int iterations) {
  const BigFloat g = (sqrt(BigFloat(5)) - 1) / 2;
  BigFloat x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  BigFloat f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iterations; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return (lo + hi) / 2;
}

struct Peak {
  BigFloat theta;
  BigFloat value;
};

// Local maxima of -h_a(theta) - h_b(theta + pi), polished by Newton.
std::vector<Peak> separation_peaks(const Scatterer& a, const Scatterer& b) {
  const BigFloat p = pi();
  auto gap = [&](const BigFloat& t) { return BigFloat(-a.support(t) - b.support(t + p)); };
  const BigFloat step = 2 * p / kSeparationSamples;
  std::vector<BigFloat> vals(kSeparationSamples);
  for (int i = 0; i < kSeparationSamples; ++i) vals[i] = gap(step * i);
  std::vector<Peak> peaks;
  const BigFloat tol = pow10_neg(static_cast<int>(working_precision()) - 5);
  for (int i = 0; i < kSeparationSamples; ++i) {
    const BigFloat& prev = vals[(i + kSeparationSamples - 1) % kSeparationSamples];
    const BigFloat& next = vals[(i + 1) % kSeparationSamples];
    if (vals[i] < prev || vals[i] < next) continue;
    BigFloat t = golden_max(gap, step * (i - 1), step * (i + 1), 60);
    for (int it = 0; it < 60; ++it) {
      Jet1<BigFloat> ja = a.support_jet(t, 2), jb = b.support_jet(t + p, 2);
      BigFloat d1 = -ja[1] - jb[1];
      BigFloat d2 = -2 * (ja[2] + jb[2]);
      if (!(d2 < 0)) break;
      BigFloat dt = d1 / d2;
      t -= dt;
      if (abs(dt) < tol) break;
    }
    peaks.push_back({t, gap(t)});
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& x, const Peak& y) { return x.value > y.value; });
  return peaks;
}

BigFloat wrap_angle(const BigFloat& t) {
  const BigFloat two_pi = 2 * pi();
  BigFloat r = t - floor((t + pi()) / two_pi) * two_pi;
  return r;
}

}  // namespace

Separation separation(const Scatterer& a, const Scatterer& b) {
  auto peaks = separation_peaks(a, b);
  if (peaks.empty()) throw GeometryError("separation: no maximum found");
  return {peaks.front().value, wrap_angle(peaks.front().theta)};
}

NonEclipseReport check_non_eclipse(const std::array<Scatterer, 3>& sc) {
  const BigFloat p = pi();
  auto slab = [&](const BigFloat& psi, BigFloat& lo, BigFloat& hi) {
    for (int k = 0; k < 3; ++k) {
      BigFloat l = -sc[k].support(psi + p), h = sc[k].support(psi);
      if (k == 0 || l > lo) lo = l;
      if (k == 0 || h < hi) hi = h;
    }
  };
  auto gap = [&](const BigFloat& psi) {
    BigFloat lo, hi;
    slab(psi, lo, hi);
    return BigFloat(lo - hi);
  };
  const BigFloat step = p / kEclipseSamples;
  std::vector<BigFloat> vals(kEclipseSamples);
  for (int i = 0; i < kEclipseSamples; ++i) vals[i] = gap(step * i);
  std::vector<int> order(kEclipseSamples);
  for (int i = 0; i < kEclipseSamples; ++i) order[i] = i;
  std::partial_sort(order.begin(), order.begin() + 4, order.end(), [&](int x, int y) { return vals[x] < vals[y]; });
  NonEclipseReport rep;
  BigFloat best_psi = step * order[0];
  rep.margin = vals[order[0]];
  auto neg_gap = [&](const BigFloat& psi) { return BigFloat(-gap(psi)); };
  for (int c = 0; c < 4; ++c) {
    BigFloat psi = golden_max(neg_gap, step * (order[c] - 1), step * (order[c] + 1), 120);
    BigFloat v = gap(psi);
    if (v < rep.margin) {
      rep.margin = v;
      best_psi = psi;
    }
  }
  rep.ok = rep.margin > 0;
  if (!rep.ok) {
    BigFloat lo, hi;
    slab(best_psi, lo, hi);
    rep.witness = Line{unit_at(best_psi), (lo + hi) / 2};
  }
  return rep;
}

BilliardTable normalize_frame(const std::array<Scatterer, 3>& input) {
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (!(separation(input[i], input[j]).distance > 0))
        throw GeometryError("scatterers " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " intersect");
  if (!check_non_eclipse(input).ok) throw GeometryError("non-eclipse condition violated");

  auto peaks = separation_peaks(input[0], input[1]);
  const BigFloat tie_tol = pow10_neg(static_cast<int>(working_precision()) - 20);
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    BigFloat dtheta = abs(wrap_angle(peaks[k].theta - peaks[0].theta));
    if (dtheta > BigFloat("1e-6") && peaks[0].value - peaks[k].value < tie_tol)
      throw GeometryError("closest pair between scatterers 1 and 2 is not unique");
  }
  const BigFloat theta = peaks[0].theta;
  const BigFloat p = pi();
  Vec2 p1 = input[0].at_angle(theta).point;
  Vec2 p2 = input[1].at_angle(theta + p).point;
  Vec2 mid = (p1 + p2) / BigFloat(2);

  Isometry g;
  g.angle = wrap_angle(-p / 2 - theta);
  g.shift = -g.apply_linear(mid);

  Scatterer d3 = input[2].transformed(g);
  if (!(-d3.support(p) > 0)) {
    if (d3.support(BigFloat(0)) < 0) {
      Isometry flip;
      flip.reflect = true;
      g = flip.after(g);
    } else {
      throw GeometryError("scatterer 3 meets the line through the closest points of 1 and 2");
    }
  }

  BilliardTable t;
  t.sc_[0] = input[0].transformed(g).with_origin(-p / 2);
  t.sc_[1] = input[1].transformed(g).with_origin(p / 2);
  t.sc_[2] = input[2].transformed(g).with_origin(p);
  t.l0_ = peaks[0].value;
  t.frame_ = g;
  return t;
}

BigFloat chord_length(const BilliardTable& table, int i, const BigFloat& s, int j, const BigFloat& s2) {
  return norm(table.eval(i, s).point - table.eval(j, s2).point);
}

BilliardTable reference_table() {
  return normalize_frame({Scatterer::circle({BigFloat(0), BigFloat(2)}, BigFloat(1)),
                          Scatterer::circle({BigFloat(0), BigFloat(-2)}, BigFloat(1)),
                          Scatterer::circle({BigFloat(6), BigFloat(0)}, BigFloat(1))});
}

}  // namespace mls
