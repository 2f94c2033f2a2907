#include "prodprice/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "prodprice/errors.hpp"

namespace prodprice {

namespace {

constexpr int kRefineRounds = 6;
constexpr int kRefinePoints = 16;
constexpr std::size_t kNpos = std::numeric_limits<std::size_t>::max();

double cross(double ox, double oy, double ax, double ay, double bx, double by) {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

}  // namespace

void Envelope::build_lower_hull() {
  vertices_.clear();
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    while (vertices_.size() >= 2) {
      const std::size_t o = vertices_[vertices_.size() - 2];
      const std::size_t a = vertices_.back();
      if (cross(xs_[o], g_at(o), xs_[a], g_at(a), xs_[i], g_at(i)) <= 0.0) {
        vertices_.pop_back();
      } else {
        break;
      }
    }
    vertices_.push_back(i);
  }
}

Envelope make_envelope(std::vector<double> xs, std::vector<double> fs, HullKind kind,
                       Envelope::Evaluator eval) {
  if (xs.size() < 2 || xs.size() != fs.size()) {
    throw DegenerateGrid("hull needs at least two (x, f) samples");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw DegenerateGrid("hull abscissae must be strictly increasing");
  }
  Envelope env;
  env.kind_ = kind;
  env.xs_ = std::move(xs);
  env.f_ = std::move(fs);
  env.eval_ = std::move(eval);

  for (int round = 0;; ++round) {
    env.build_lower_hull();
    if (!env.eval_ || round == kRefineRounds) break;
    // Localize vertices that bound a nontrivial affine piece.
    std::vector<double> extra;
    const auto& v = env.vertices_;
    for (std::size_t j = 1; j + 1 < v.size(); ++j) {
      const std::size_t k = v[j];
      if (k - v[j - 1] <= 1 && v[j + 1] - k <= 1) continue;
      for (const std::size_t left : {k - 1, k}) {
        const double a = env.xs_[left];
        const double b = env.xs_[left + 1];
        for (int m = 1; m <= kRefinePoints; ++m) {
          const double x = a + (b - a) * m / (kRefinePoints + 1.0);
          if (x > a && x < b) extra.push_back(x);
        }
      }
    }
    if (extra.empty()) break;
    std::vector<double> nx;
    std::vector<double> nf;
    nx.reserve(env.xs_.size() + extra.size());
    std::sort(extra.begin(), extra.end());
    std::size_t e = 0;
    for (std::size_t i = 0; i < env.xs_.size(); ++i) {
      while (e < extra.size() && extra[e] < env.xs_[i]) {
        if (nx.empty() || extra[e] > nx.back()) {
          nx.push_back(extra[e]);
          nf.push_back(env.eval_(extra[e]));
        }
        ++e;
      }
      if (nx.empty() || env.xs_[i] > nx.back()) {
        nx.push_back(env.xs_[i]);
        nf.push_back(env.f_[i]);
      }
    }
    env.xs_ = std::move(nx);
    env.f_ = std::move(nf);
  }

  const std::size_t n = env.xs_.size();
  const auto [fmin, fmax] = std::minmax_element(env.f_.begin(), env.f_.end());
  env.range_ = *fmax - *fmin;
  env.tol_ = 1e-9 * std::max(env.range_, std::numeric_limits<double>::min());

  env.hull_.assign(n, 0.0);
  const auto& v = env.vertices_;
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    const std::size_t a = v[j];
    const std::size_t b = v[j + 1];
    env.hull_[a] = env.f_[a];
    for (std::size_t i = a + 1; i < b; ++i) {
      const double w = (env.xs_[i] - env.xs_[a]) / (env.xs_[b] - env.xs_[a]);
      env.hull_[i] = env.f_[a] + w * (env.f_[b] - env.f_[a]);
    }
  }
  env.hull_[v.back()] = env.f_[v.back()];

  env.contact_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    env.contact_[i] = std::abs(env.hull_[i] - env.f_[i]) <= env.tol_;
  }

  env.vertex_slopes_.clear();
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    env.vertex_slopes_.push_back((env.g_at(v[j + 1]) - env.g_at(v[j])) /
                                 (env.xs_[v[j + 1]] - env.xs_[v[j]]));
  }

  // Maximal affine pieces in the curve's own orientation.
  const double slope_scale = env.range_ / (env.xs_.back() - env.xs_.front());
  env.segments_.clear();
  // Round-off in a slope taken over a (possibly tiny, refined) cell.
  auto slope_noise = [&](std::size_t j) {
    return 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(env.f_[v[j]]) + std::abs(env.f_[v[j + 1]])) /
           (env.xs_[v[j + 1]] - env.xs_[v[j]]);
  };
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    const double s = env.sign() * env.vertex_slopes_[j];
    if (!env.segments_.empty()) {
      Segment& last = env.segments_.back();
      const double tol = 1e-12 * (std::abs(last.slope) + std::abs(s)) + 1e-14 * slope_scale + slope_noise(j) +
                         slope_noise(j - 1);
      if (std::abs(last.slope - s) <= tol) {
        last.x_hi = env.xs_[v[j + 1]];
        last.i_hi = v[j + 1];
        last.slope = env.sign() * (env.g_at(last.i_hi) - env.g_at(last.i_lo)) / (last.x_hi - last.x_lo);
        continue;
      }
    }
    env.segments_.push_back(Segment{env.xs_[v[j]], env.xs_[v[j + 1]], s, v[j], v[j + 1]});
  }
  return env;
}

Envelope convex_hull(std::vector<double> xs, std::vector<double> fs, Envelope::Evaluator eval) {
  return make_envelope(std::move(xs), std::move(fs), HullKind::kConvex, std::move(eval));
}

Envelope concave_hull(std::vector<double> xs, std::vector<double> fs, Envelope::Evaluator eval) {
  return make_envelope(std::move(xs), std::move(fs), HullKind::kConcave, std::move(eval));
}

// ---------------------------------------------------------------------------

std::size_t Envelope::knot_index(double x) const {
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
  if (it != xs_.end() && *it == x) return static_cast<std::size_t>(it - xs_.begin());
  return kNpos;
}

double Envelope::hull_at(double x) const {
  const double slack = 1e-12 * (hi() - lo());
  if (x < lo() - slack || x > hi() + slack) throw OutOfDomain("hull evaluated outside its domain");
  x = std::clamp(x, lo(), hi());
  auto it = std::upper_bound(vertices_.begin(), vertices_.end(), x,
                             [&](double val, std::size_t idx) { return val < xs_[idx]; });
  if (it == vertices_.begin()) return f_[vertices_.front()];
  if (it == vertices_.end()) return f_[vertices_.back()];
  const std::size_t b = *it;
  const std::size_t a = *(it - 1);
  if (xs_[a] == x) return f_[a];
  if (b - a == 1 && eval_) return eval_(x);
  const double w = (x - xs_[a]) / (xs_[b] - xs_[a]);
  return f_[a] + w * (f_[b] - f_[a]);
}

double Envelope::curve_at(double x) const {
  const std::size_t k = knot_index(x);
  if (k != kNpos) return f_[k];
  if (eval_) return eval_(x);
  return std::numeric_limits<double>::quiet_NaN();
}

bool Envelope::is_contact(double x) const {
  const std::size_t k = knot_index(x);
  if (k != kNpos) return contact_[k] != 0;
  if (!eval_) return false;
  return std::abs(eval_(x) - hull_at(x)) <= tol_;
}

std::vector<double> Envelope::kink_slopes() const {
  std::vector<double> out;
  for (const Segment& s : segments_) {
    if (!eval_ || s.i_hi - s.i_lo >= 2) out.push_back(s.slope);
  }
  return out;
}

double Envelope::tie_tol(double s, std::size_t i) const {
  return 1e-12 * (std::abs(s * xs_[i]) + std::abs(g_at(i))) + std::numeric_limits<double>::min();
}

std::pair<double, double> Envelope::polish(std::size_t k, double s) const {
  const std::size_t n = xs_.size();
  const double a = xs_[k == 0 ? 0 : k - 1];
  const double b = xs_[std::min(k + 1, n - 1)];
  const double knot_val = s * xs_[k] - g_at(k);
  if (!eval_) return {xs_[k], knot_val};
  auto phi = [&](double x) { return s * x - g_eval(x); };
  boost::uintmax_t iters = 200;
  const auto res = boost::math::tools::brent_find_minima([&](double x) { return -phi(x); }, a, b,
                                                         std::numeric_limits<double>::digits / 2, iters);
  double x_best = res.first;
  double val = -res.second;

  // Brent stalls near sqrt(eps) in x; sharpen with a root of the central-difference slope.
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x_best));
  const double w = 64.0 * std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x_best));
  const double l = std::max(a, x_best - w);
  const double r = std::min(b, x_best + w);
  if (r > l && hi() - lo() > 4.0 * h) {
    auto slope = [&](double x) {
      if (x - h < lo()) return s - (-3.0 * g_eval(x) + 4.0 * g_eval(x + h) - g_eval(x + 2.0 * h)) / (2.0 * h);
      if (x + h > hi()) return s - (3.0 * g_eval(x) - 4.0 * g_eval(x - h) + g_eval(x - 2.0 * h)) / (2.0 * h);
      return s - (g_eval(x + h) - g_eval(x - h)) / (2.0 * h);
    };
    const double sl = slope(l);
    const double sr = slope(r);
    if (sl > 0.0 && sr < 0.0) {
      boost::uintmax_t it = 100;
      const auto root = boost::math::tools::toms748_solve(slope, l, r, sl, sr,
                                                          boost::math::tools::eps_tolerance<double>(50), it);
      const double xr = 0.5 * (root.first + root.second);
      const double vr = phi(xr);
      if (vr >= val - 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(s * xr) + std::abs(vr))) {
        x_best = xr;
        val = std::max(val, vr);
      }
    }
  }
  if (val > knot_val) return {x_best, val};
  return {xs_[k], knot_val};
}

ConjugateValue Envelope::lower_conjugate(double s) const {
  auto obj = [&](std::size_t j) { return s * xs_[vertices_[j]] - g_at(vertices_[j]); };
  const std::size_t nv = vertices_.size();
  std::size_t j = static_cast<std::size_t>(
      std::lower_bound(vertex_slopes_.begin(), vertex_slopes_.end(), s) - vertex_slopes_.begin());
  auto tt = [&](std::size_t a, std::size_t b) { return tie_tol(s, vertices_[a]) + tie_tol(s, vertices_[b]); };
  double best = obj(j);
  std::size_t lo = j;
  std::size_t hi = j;
  while (lo > 0 && obj(lo - 1) >= best - tt(lo - 1, j)) {
    --lo;
    best = std::max(best, obj(lo));
  }
  while (hi + 1 < nv && obj(hi + 1) >= best - tt(hi + 1, j)) {
    ++hi;
    best = std::max(best, obj(hi));
  }
  // The band also admits vertices on the flat top of a smooth maximum; pull
  // each end inward across contact-only gaps while the objective still rises
  // above round-off.
  auto noise = [&](std::size_t j) {
    return 4.0 * std::numeric_limits<double>::epsilon() *
           (std::abs(s * xs_[vertices_[j]]) + std::abs(g_at(vertices_[j])));
  };
  auto adjacent = [&](std::size_t j) {
    for (std::size_t i = vertices_[j] + 1; i < vertices_[j + 1]; ++i) {
      if (!contact_[i]) return false;
    }
    return true;
  };
  while (hi > lo && adjacent(hi - 1) && obj(hi - 1) > obj(hi) + noise(hi)) --hi;
  while (lo < hi && adjacent(lo) && obj(lo + 1) > obj(lo) + noise(lo)) ++lo;
  auto [x_lo, v_lo] = polish(vertices_[lo], s);
  if (lo == hi) return {v_lo, x_lo, x_lo};
  auto [x_hi, v_hi] = polish(vertices_[hi], s);
  const double value = std::max(v_lo, v_hi);
  if (v_lo < value - tt(lo, hi)) return {value, x_hi, x_hi};
  if (v_hi < value - tt(lo, hi)) return {value, x_lo, x_lo};
  return {value, x_lo, x_hi};
}

std::vector<std::pair<double, double>> Envelope::lower_argmax_runs(double s) const {
  const ConjugateValue cv = lower_conjugate(s);
  if (cv.argmax_lo == cv.argmax_hi) return {{cv.argmax_lo, cv.argmax_lo}};
  std::vector<std::pair<double, double>> runs;
  double start = cv.argmax_lo;
  double last = cv.argmax_lo;
  bool open = true;
  auto first = std::upper_bound(xs_.begin(), xs_.end(), cv.argmax_lo);
  for (auto it = first; it != xs_.end() && *it < cv.argmax_hi; ++it) {
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    const bool in = s * xs_[i] - g_at(i) >= cv.value - 2.0 * tie_tol(s, i);
    if (in) {
      if (!open) {
        start = xs_[i];
        open = true;
      }
      last = xs_[i];
    } else if (open) {
      runs.emplace_back(start, last);
      open = false;
    }
  }
  if (open) {
    runs.emplace_back(start, cv.argmax_hi);
  } else {
    runs.emplace_back(cv.argmax_hi, cv.argmax_hi);
  }
  return runs;
}

// ---------------------------------------------------------------------------

ConjugateValue fenchel_cost(const Envelope& cost_hull, double z) {
  if (cost_hull.kind() != HullKind::kConvex) {
    throw InvalidParameter("fenchel_cost needs a convex-hull envelope");
  }
  return cost_hull.lower_conjugate(z);
}

ConjugateValue fenchel_revenue(const Envelope& revenue_hull, double z) {
  if (revenue_hull.kind() != HullKind::kConcave) {
    throw InvalidParameter("fenchel_revenue needs a concave-hull envelope");
  }
  return revenue_hull.lower_conjugate(-z);
}

std::vector<std::pair<double, double>> argmax_runs(const Envelope& env, double z) {
  return env.lower_argmax_runs(env.kind() == HullKind::kConvex ? z : -z);
}

Decomposition hull_decompose(const Envelope& env, double x) {
  const double slack = 1e-12 * (env.hi() - env.lo());
  if (!(x >= env.lo() - slack && x <= env.hi() + slack)) {
    throw OutOfDomain("hull_decompose outside the hull domain");
  }
  x = std::clamp(x, env.lo(), env.hi());
  if (env.is_contact(x)) return {x, x, 1.0};
  const auto& xs = env.xs();
  const auto& v = env.vertices();
  auto it = std::upper_bound(v.begin(), v.end(), x,
                             [&](double val, std::size_t idx) { return val < xs[idx]; });
  // A non-contact point is strictly inside some hull segment.
  const double x1 = xs[*(it - 1)];
  const double x2 = xs[*it];
  return {x1, x2, (x2 - x) / (x2 - x1)};
}

}  // namespace prodprice
