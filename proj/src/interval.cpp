#include "proxyreach/interval.hpp"

#include <array>
#include <ostream>

namespace proxyreach {

Interval& Interval::operator*=(const Interval& o) {
  if (is_point() && o.is_point()) {
    lo_ = hi_ = lo_ * o.lo_;
    return *this;
  }
  // 0·x must stay 0 even for huge bounds, so skip the four-product rule.
  if (is_point() && lo_ == 0.0) return *this;
  if (o.is_point() && o.lo_ == 0.0) {
    lo_ = hi_ = 0.0;
    return *this;
  }
  const std::array<double, 4> p{lo_ * o.lo_, lo_ * o.hi_, hi_ * o.lo_, hi_ * o.hi_};
  const auto [mn, mx] = std::minmax_element(p.begin(), p.end());
  lo_ = *mn;
  hi_ = *mx;
  return *this;
}

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

Interval intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (lo > hi) throw std::domain_error("intersect: disjoint intervals");
  return {lo, hi};
}

Interval widen(const Interval& x, double rel, double abs) {
  return {x.lo() - rel * std::abs(x.lo()) - abs, x.hi() + rel * std::abs(x.hi()) + abs};
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  return os << '[' << x.lo() << ", " << x.hi() << ']';
}

Interval tanh(const Interval& x) { return {std::tanh(x.lo()), std::tanh(x.hi())}; }

Interval dtanh(const Interval& x) {
  const auto d = [](double v) {
    const double t = std::tanh(v);
    return 1.0 - t * t;
  };
  const double a = d(x.lo());
  const double b = d(x.hi());
  if (x.contains(0.0)) return {std::min(a, b), 1.0};
  return {std::min(a, b), std::max(a, b)};
}

Interval d2tanh(const Interval& x) {
  // tanh'' = p(tanh x) with p(t) = -2t(1 - t^2); tanh is monotone so it is
  // enough to range p over [tanh lo, tanh hi], whose stationary points are
  // t = ±1/sqrt(3).
  const auto p = [](double t) { return -2.0 * t * (1.0 - t * t); };
  const Interval t = tanh(x);
  double lo = std::min(p(t.lo()), p(t.hi()));
  double hi = std::max(p(t.lo()), p(t.hi()));
  const double crit = 1.0 / std::sqrt(3.0);
  for (double c : {-crit, crit}) {
    if (t.contains(c)) {
      lo = std::min(lo, p(c));
      hi = std::max(hi, p(c));
    }
  }
  return {lo, hi};
}

namespace {

template <class Fn>
Eigen::MatrixXd map_entries(const IntervalMatrix& m, Fn fn) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = fn(m(i, j));
  return out;
}

}  // namespace

Eigen::MatrixXd lower(const IntervalMatrix& m) {
  return map_entries(m, [](const Interval& x) { return x.lo(); });
}
Eigen::MatrixXd upper(const IntervalMatrix& m) {
  return map_entries(m, [](const Interval& x) { return x.hi(); });
}
Eigen::MatrixXd midpoint(const IntervalMatrix& m) {
  return map_entries(m, [](const Interval& x) { return x.mid(); });
}
Eigen::MatrixXd radius(const IntervalMatrix& m) {
  return map_entries(m, [](const Interval& x) { return x.rad(); });
}
Eigen::MatrixXd magnitude(const IntervalMatrix& m) {
  return map_entries(m, [](const Interval& x) { return x.mag(); });
}

}  // namespace proxyreach
