// Closed real intervals and the Eigen glue needed to put them in matrices.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <stdexcept>

namespace proxyreach {

/// Closed interval [lo, hi] over doubles.
///
/// Arithmetic is the textbook natural extension without directed rounding;
/// callers that need outward margins apply them explicitly with widen().
class Interval {
 public:
  Interval() = default;
  // Implicit on purpose: lets Eigen build Interval matrices from double ones.
  Interval(double v) : lo_(v), hi_(v) {}  // NOLINT
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw std::invalid_argument("Interval: lo > hi or NaN bound");
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const { return 0.5 * (lo_ + hi_); }
  double rad() const { return 0.5 * (hi_ - lo_); }
  double width() const { return hi_ - lo_; }
  /// Largest absolute value attained.
  double mag() const { return std::max(std::abs(lo_), std::abs(hi_)); }

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool is_point() const { return lo_ == hi_; }

  Interval& operator+=(const Interval& o) {
    lo_ += o.lo_;
    hi_ += o.hi_;
    return *this;
  }
  Interval& operator-=(const Interval& o) {
    const double l = lo_ - o.hi_;
    hi_ = hi_ - o.lo_;
    lo_ = l;
    return *this;
  }
  Interval& operator*=(const Interval& o);

  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
  friend Interval operator-(const Interval& a) { return {-a.hi_, -a.lo_}; }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Smallest interval containing both.
Interval hull(const Interval& a, const Interval& b);
/// Throws std::domain_error when the intersection is empty.
Interval intersect(const Interval& a, const Interval& b);
/// Outward margin of `rel`·|bound| + `abs` on each side.
Interval widen(const Interval& x, double rel, double abs = 0.0);

std::ostream& operator<<(std::ostream& os, const Interval& x);

// Exact images of tanh and its first two derivatives over an interval.
Interval tanh(const Interval& x);
Interval dtanh(const Interval& x);
Interval d2tanh(const Interval& x);

}  // namespace proxyreach

namespace Eigen {

template <>
struct NumTraits<proxyreach::Interval> : GenericNumTraits<proxyreach::Interval> {
  using Real = proxyreach::Interval;
  using NonInteger = proxyreach::Interval;
  using Nested = proxyreach::Interval;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 2,
    MulCost = 8
  };
};

}  // namespace Eigen

namespace proxyreach {

using IntervalVector = Eigen::Matrix<Interval, Eigen::Dynamic, 1>;
using IntervalMatrix = Eigen::Matrix<Interval, Eigen::Dynamic, Eigen::Dynamic>;

/// Entry-wise lower/upper bound matrices of an interval matrix.
Eigen::MatrixXd lower(const IntervalMatrix& m);
Eigen::MatrixXd upper(const IntervalMatrix& m);
Eigen::MatrixXd midpoint(const IntervalMatrix& m);
Eigen::MatrixXd radius(const IntervalMatrix& m);
/// Entry-wise magnitude max(|lo|, |hi|).
Eigen::MatrixXd magnitude(const IntervalMatrix& m);

}  // namespace proxyreach
