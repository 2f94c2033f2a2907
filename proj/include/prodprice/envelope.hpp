#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace prodprice {

enum class HullKind { kConvex, kConcave };

/// Maximal affine piece of a hull, in the curve's own orientation.
struct Segment {
  double x_lo;
  double x_hi;
  double slope;
  std::size_t i_lo;  ///< knot index of x_lo
  std::size_t i_hi;  ///< knot index of x_hi
};

/// Value of a conjugate together with the endpoints of its maximizer set.
struct ConjugateValue {
  double value;
  double argmax_lo;
  double argmax_hi;
};

/// x = delta * x1 + (1 - delta) * x2, hull(x) = delta f(x1) + (1 - delta) f(x2).
struct Decomposition {
  double x1;
  double x2;
  double delta;
};

/// A sampled curve together with its convex (or concave) hull.
///
/// Contacts are restricted to sample knots. When a pointwise evaluator is
/// supplied (continuous domains), hull vertices that bound a nontrivial affine
/// piece are localized by inserting extra knots around them, and conjugate
/// maximizers are polished between neighbouring knots.
class Envelope {
 public:
  using Evaluator = std::function<double(double)>;

  HullKind kind() const { return kind_; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& f() const { return f_; }
  const std::vector<double>& hull() const { return hull_; }
  const std::vector<char>& contact() const { return contact_; }
  const std::vector<Segment>& segments() const { return segments_; }
  /// Knot indices of the hull's extreme points.
  const std::vector<std::size_t>& vertices() const { return vertices_; }

  double lo() const { return xs_.front(); }
  double hi() const { return xs_.back(); }
  /// Contact tolerance: 1e-9 times the value range.
  double tol() const { return tol_; }
  double value_range() const { return range_; }
  bool has_evaluator() const { return static_cast<bool>(eval_); }

  /// Hull value anywhere in [lo, hi].
  double hull_at(double x) const;
  /// Original curve at x: the evaluator if present, else the knot value
  /// (NaN between knots).
  double curve_at(double x) const;
  bool is_contact(double x) const;

  /// Slopes at which the conjugate's maximizer jumps: slopes of affine
  /// pieces wider than one knot cell (every piece on a finite domain).
  std::vector<double> kink_slopes() const;

  /// Largest objective s*x - g(x) over the lower hull of g = sign*f.
  ConjugateValue lower_conjugate(double s) const;
  /// Runs of knots whose objective is within the tie tolerance of the
  /// maximum, i.e. the sampled maximizer set.
  std::vector<std::pair<double, double>> lower_argmax_runs(double s) const;

 private:
  friend Envelope make_envelope(std::vector<double>, std::vector<double>, HullKind, Evaluator);

  double sign() const { return kind_ == HullKind::kConvex ? 1.0 : -1.0; }
  double g_at(std::size_t i) const { return sign() * f_[i]; }
  double g_eval(double x) const { return sign() * eval_(x); }
  void build_lower_hull();
  /// Round-off allowance for the conjugate objective at knot i.
  double tie_tol(double s, std::size_t i) const;
  std::size_t knot_index(double x) const;
  std::pair<double, double> polish(std::size_t k, double s) const;

  HullKind kind_ = HullKind::kConvex;
  std::vector<double> xs_;
  std::vector<double> f_;
  std::vector<double> hull_;
  std::vector<char> contact_;
  std::vector<std::size_t> vertices_;
  std::vector<double> vertex_slopes_;  ///< slopes of g between consecutive vertices
  std::vector<Segment> segments_;
  double tol_ = 0.0;
  double range_ = 0.0;
  Evaluator eval_;
};

Envelope make_envelope(std::vector<double> xs, std::vector<double> fs, HullKind kind,
                       Envelope::Evaluator eval = {});

/// Lower convex hull of (xs, fs). Throws DegenerateGrid for < 2 points.
Envelope convex_hull(std::vector<double> xs, std::vector<double> fs, Envelope::Evaluator eval = {});
/// Upper concave hull of (xs, fs).
Envelope concave_hull(std::vector<double> xs, std::vector<double> fs, Envelope::Evaluator eval = {});

/// sup over the domain of alpha*z - C(alpha), with its maximizer endpoints.
ConjugateValue fenchel_cost(const Envelope& cost_hull, double z);
/// sup over the domain of R(q) - q*z, with its maximizer endpoints.
ConjugateValue fenchel_revenue(const Envelope& revenue_hull, double z);

/// Splits x into two contact points of the hull (x, x, 1 at a contact point).
/// Throws OutOfDomain outside [lo, hi].
Decomposition hull_decompose(const Envelope& env, double x);

/// Maximizer set of the conjugate at z as closed runs [a, b] of contact points.
std::vector<std::pair<double, double>> argmax_runs(const Envelope& env, double z);

}  // namespace prodprice
