#include "proxyreach/errorbound.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace proxyreach {

std::string to_string(ErrorMethod m) {
  return m == ErrorMethod::IntervalExtension ? "interval" : "meanvalue";
}

ErrorMethod error_method_from_string(const std::string& s) {
  if (s == "interval") return ErrorMethod::IntervalExtension;
  if (s == "meanvalue") return ErrorMethod::MeanValue;
  throw std::invalid_argument("unknown error method \"" + s + "\" (expected interval|meanvalue)");
}

Vector error_map_eval(const VectorField& f, const Vector& x) {
  return 0.5 * jacobian(f, x) * eval(f, x);
}

Box error_image_interval(const VectorField& f, const Box& b) {
  const IntervalVector image = interval_jacobian(f, b) * interval_eval(f, b).intervals();
  return Box(IntervalVector(image * Interval(0.5)));
}

Zonotope error_image_meanvalue(const VectorField& f, const Zonotope& z, const Box& enclosure) {
  Box region = enclosure;
  try {
    region = box_intersection(interval_hull(z), inflate(enclosure, 1e-9, 1e-12));
  } catch (const std::domain_error&) {
    throw std::invalid_argument("error_image_meanvalue: zonotope misses the enclosure");
  }
  // Every x in z and the box shares the segment [c, x] with this box.
  region = box_union(region, Box::point(z.center()));
  const IntervalMatrix jac = interval_jacobian(f, region);
  const IntervalVector value = interval_eval(f, region).intervals();
  const IntervalMatrix slope =
      (interval_hessian_apply(f, region, value) + jac * jac) * Interval(0.5);
  const Zonotope offset(Vector::Zero(static_cast<Eigen::Index>(z.dim())), z.generators());
  return translate(interval_map(slope, offset), error_map_eval(f, z.center()));
}

Box error_image_subdivided(const VectorField& f, const Zonotope& z, const Box& enclosure, std::size_t pieces) {
  if (pieces < 1) throw std::invalid_argument("error_image_subdivided: pieces must be at least 1");
  const auto n = static_cast<Eigen::Index>(z.dim());
  const Matrix& gens = z.generators();
  const auto m = static_cast<std::size_t>(gens.cols());
  const Vector norms = gens.colwise().norm().transpose();

  // splits[j] equal parts along generator j; the longest parts are split first.
  std::vector<std::size_t> splits(m, 1);
  std::size_t total = 1;
  for (;;) {
    std::size_t best = m;
    double best_len = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double len = norms[static_cast<Eigen::Index>(j)] / static_cast<double>(splits[j]);
      if (len > best_len) {
        best_len = len;
        best = j;
      }
    }
    if (best == m) break;
    const std::size_t k = splits[best];
    if (total / k * (k + 1) > pieces) break;
    total = total / k * (k + 1);
    splits[best] = k + 1;
  }

  Vector lo = Vector::Constant(n, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  const Box outer = inflate(enclosure, 1e-9, 1e-12);
  std::vector<std::size_t> idx(m, 0);
  for (std::size_t cell = 0; cell < total; ++cell) {
    // Piece: coefficient j restricted to [-1 + 2 i / k, -1 + 2 (i + 1) / k].
    Vector c = z.center();
    Matrix g = gens;
    for (std::size_t j = 0; j < m; ++j) {
      if (splits[j] == 1) continue;
      const double k = static_cast<double>(splits[j]);
      const auto col = static_cast<Eigen::Index>(j);
      c += gens.col(col) * (-1.0 + (2.0 * static_cast<double>(idx[j]) + 1.0) / k);
      g.col(col) /= k;
    }
    const Zonotope piece(std::move(c), std::move(g));
    Box region = outer;
    try {
      region = box_intersection(interval_hull(piece), outer);
    } catch (const std::domain_error&) {
      for (std::size_t j = 0; j < m && ++idx[j] == splits[j]; ++j) idx[j] = 0;
      continue;  // no state of the enclosure lies in this piece
    }
    region = box_union(region, Box::point(piece.center()));
    const IntervalMatrix jac = interval_jacobian(f, region);
    const IntervalVector value = interval_eval(f, region).intervals();
    const IntervalMatrix slope = (interval_hessian_apply(f, region, value) + jac * jac) * Interval(0.5);
    const Zonotope offset(Vector::Zero(n), piece.generators());
    const Box mean_value = interval_hull(translate(interval_map(slope, offset), error_map_eval(f, piece.center())));
    const IntervalVector natural = jac * value * Interval(0.5);
    for (Eigen::Index i = 0; i < n; ++i) {
      lo[i] = std::min(lo[i], std::max(mean_value.lo()[i], natural[i].lo()));
      hi[i] = std::max(hi[i], std::min(mean_value.hi()[i], natural[i].hi()));
    }
    for (std::size_t j = 0; j < m && ++idx[j] == splits[j]; ++j) idx[j] = 0;
  }
  if (!(lo.array() <= hi.array()).all()) {
    throw std::invalid_argument("error_image_subdivided: zonotope misses the enclosure");
  }
  return Box(std::move(lo), std::move(hi));
}

ErrorBound error_set(const VectorField& f, const Tube& tube, ErrorMethod method, std::size_t pieces) {
  if (tube.segments.empty()) throw std::invalid_argument("error_set: empty tube");
  std::vector<Box> per_segment;
  per_segment.reserve(tube.segments.size());
  for (const Segment& s : tube.segments) {
    Box image = error_image_interval(f, s.enclosure);
    if (method == ErrorMethod::MeanValue) {
      const Box whole = interval_hull(error_image_meanvalue(f, s.sweep, s.enclosure));
      const Box cells = error_image_subdivided(f, s.sweep, s.enclosure, pieces);
      // All three enclose the same image, so they overlap up to rounding.
      for (const Box& other : {whole, cells}) {
        try {
          image = box_intersection(image, other);
        } catch (const std::domain_error&) {
        }
      }
    }
    per_segment.push_back(inflate(image, kRoundingSlack, 0.0));
  }
  Box omega = per_segment.front();
  for (const Box& b : per_segment) omega = box_union(omega, b);
  return ErrorBound{std::move(omega), std::move(per_segment), method};
}

ErrorBound negate_error_set(const ErrorBound& e) {
  std::vector<Box> per_segment;
  per_segment.reserve(e.per_segment.size());
  for (const Box& b : e.per_segment) per_segment.push_back(negate(b));
  return ErrorBound{negate(e.omega_eps), std::move(per_segment), e.method};
}

double growth_factor(double L) {
  if (L == 0.0) return 1.0;
  return std::expm1(L) / L;
}

BoundComparison sander_bound(const VectorField& f, const Tube& tube, const ErrorBound& bound,
                             LipschitzSource source) {
  BoundComparison c;
  c.set_inf_norm = bound.omega_eps.inf_norm();
  c.lipschitz_local = lipschitz_bound(f, tube.hull());
  c.lipschitz_L = source == LipschitzSource::Global ? weight_norm_bound(f) : c.lipschitz_local;
  c.width_ratio = growth_factor(c.lipschitz_L);
  c.sander_scalar = c.width_ratio * c.set_inf_norm;
  const double vol = bound.omega_eps.volume();
  if (vol > 0.0) {
    c.volume_ratio = std::pow(2.0 * c.sander_scalar, static_cast<double>(bound.omega_eps.dim())) / vol;
  } else {
    c.degenerate_volume = true;
  }
  return c;
}

void to_json(nlohmann::json& j, const ErrorBound& e) {
  j = nlohmann::json{{"method", to_string(e.method)},
                     {"omega_eps", e.omega_eps},
                     {"inf_norm", e.omega_eps.inf_norm()},
                     {"per_segment", e.per_segment}};
}

void to_json(nlohmann::json& j, const BoundComparison& c) {
  j = nlohmann::json{{"set_inf_norm", c.set_inf_norm},
                     {"lipschitz_L", c.lipschitz_L},
                     {"lipschitz_local", c.lipschitz_local},
                     {"sander_scalar", c.sander_scalar},
                     {"width_ratio", c.width_ratio},
                     {"degenerate_volume", c.degenerate_volume}};
  if (c.degenerate_volume) {
    j["volume_ratio"] = nullptr;
  } else {
    j["volume_ratio"] = c.volume_ratio;
  }
}

}  // namespace proxyreach
