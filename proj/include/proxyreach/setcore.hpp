// Axis-aligned boxes, zonotopes and the set algebra used by reachability.
#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "proxyreach/interval.hpp"

namespace proxyreach {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Operands whose dimensions do not agree.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Axis-aligned box, lo <= hi component-wise, dimension >= 1.
class Box {
 public:
  Box(Vector lo, Vector hi);
  explicit Box(const IntervalVector& iv);

  static Box point(const Vector& x) { return Box(x, x); }
  /// Symmetric hypercube [-r, r]^n.
  static Box cube(std::size_t n, double r);

  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  std::size_t dim() const { return static_cast<std::size_t>(lo_.size()); }

  Vector mid() const { return 0.5 * (lo_ + hi_); }
  Vector radius() const { return 0.5 * (hi_ - lo_); }
  Vector width() const { return hi_ - lo_; }
  Interval operator[](std::size_t i) const { return {lo_[i], hi_[i]}; }
  IntervalVector intervals() const;

  bool contains(const Vector& x) const;
  /// max_i max(|lo_i|, |hi_i|).
  double inf_norm() const;
  /// Product of widths; zero for degenerate boxes.
  double volume() const;

  friend bool operator==(const Box& a, const Box& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  Vector lo_;
  Vector hi_;
};

/// {center + G·xi : xi in [-1, 1]^g}; g = 0 is a single point.
class Zonotope {
 public:
  Zonotope(Vector center, Matrix generators);
  explicit Zonotope(const Vector& point);

  const Vector& center() const { return center_; }
  const Matrix& generators() const { return generators_; }
  std::size_t dim() const { return static_cast<std::size_t>(center_.size()); }
  std::size_t num_generators() const { return static_cast<std::size_t>(generators_.cols()); }

 private:
  Vector center_;
  Matrix generators_;
};

// Box algebra.
bool contains_box(const Box& outer, const Box& inner);
Box box_union(const Box& a, const Box& b);
/// Throws std::domain_error if the boxes are disjoint.
Box box_intersection(const Box& a, const Box& b);
Box negate(const Box& b);
/// Outward margin of rel·|bound| + abs on every face.
Box inflate(const Box& b, double rel, double abs);
/// Keeps the listed coordinates (0-based), in order.
Box project(const Box& b, std::span<const std::size_t> dims);

// Zonotope algebra.
Zonotope zono_from_box(const Box& b);
Zonotope linear_map(const Matrix& m, const Zonotope& z);
Zonotope translate(const Zonotope& z, const Vector& offset);
Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b);
Zonotope negate(const Zonotope& z);
Box interval_hull(const Zonotope& z);
Zonotope project(const Zonotope& z, std::span<const std::size_t> dims);

/// Sound enclosure of {M·x : M in m, x in z}.
///
/// The midpoint of m acts as an exact linear map; the radius part is bounded
/// by rad(m)·|hull(z)| and appended as axis-aligned generators. Tightest when
/// z is centred at the origin.
Zonotope interval_map(const IntervalMatrix& m, const Zonotope& z);

/// Box-reduction: keeps the max_gens - n longest generators (2-norm) and
/// replaces the rest by their interval hull. Throws std::invalid_argument if
/// max_gens < n.
Zonotope reduce_order(const Zonotope& z, std::size_t max_gens);

/// Default generator budget for an n-dimensional state.
inline std::size_t default_max_gens(std::size_t n) { return 10 * n; }

void to_json(nlohmann::json& j, const Box& b);
void to_json(nlohmann::json& j, const Zonotope& z);
Box box_from_json(const nlohmann::json& j);
Zonotope zonotope_from_json(const nlohmann::json& j);

}  // namespace proxyreach
