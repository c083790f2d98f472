#include "proxyreach/odereach.hpp"

#include <cmath>

namespace proxyreach {

namespace {

Box picard_image(const VectorField& f, const Box& x0, const Box& e, double dt) {
  const Box fe = interval_eval(f, e);
  const double grow = dt * (1.0 + kRoundingSlack);
  return Box(x0.lo() + (grow * fe.lo()).cwiseMin(0.0), x0.hi() + (grow * fe.hi()).cwiseMax(0.0));
}

Box bloat(const Box& b, double factor, double abs) {
  const Vector r = factor * b.radius() + Vector::Constant(b.lo().size(), abs);
  return Box(b.mid() - r, b.mid() + r);
}


double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

/// Truncated Taylor data for e^{J s}, s in [0, dt].
struct ExpTerms {
  Matrix phi;              // sum_{k<=p} (J dt)^k / k!
  Matrix gamma;            // dt sum_{k<=p} (J dt)^k / (k+1)!  ~ int_0^dt e^{J s} ds
  IntervalMatrix sweep;    // encloses e^{J s} for every s in [0, dt]
  double phi_rem = 0.0;    // ||e^{J dt} - phi||_inf bound
  double gamma_rem = 0.0;  // ||int e^{J s} ds - gamma||_inf bound
};

ExpTerms exp_terms(const Matrix& jac, double dt, int order) {
  const Matrix a = jac * dt;
  const double na = inf_norm(a);
  if (!(na < order + 2)) {
    throw NoEnclosure("matrix exponential guard failed: ||J dt|| = " + std::to_string(na));
  }
  const auto n = a.rows();
  ExpTerms out;
  out.phi = Matrix::Identity(n, n);
  out.gamma = Matrix::Identity(n, n);
  out.sweep = Matrix::Identity(n, n).cast<Interval>();
  Matrix power = Matrix::Identity(n, n);
  double fact = 1.0;
  for (int k = 1; k <= order; ++k) {
    power = (power * a).eval();
    fact *= k;
    const Matrix term = power / fact;
    out.phi += term;
    out.gamma += term / (k + 1);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        out.sweep(i, j) += Interval(std::min(0.0, term(i, j)), std::max(0.0, term(i, j)));
  }
  out.gamma *= dt;
  // Tail of the exponential series: ||A||^{p+1}/(p+1)! / (1 - ||A||/(p+2)).
  double tail = std::pow(na, order + 1) / (fact * (order + 1));
  tail /= 1.0 - na / (order + 2);
  out.phi_rem = tail * (1.0 + kRoundingSlack);
  out.gamma_rem = dt * out.phi_rem;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out.sweep(i, j) += Interval(-out.phi_rem, out.phi_rem);
  return out;
}

}  // namespace

Box Tube::hull() const {
  Box h = segments.front().enclosure;
  for (const Segment& s : segments) h = box_union(h, s.enclosure);
  return h;
}

std::size_t Tube::segment_at(double t) const {
  for (std::size_t k = 0; k < segments.size(); ++k) {
    if (t <= segments[k].t_hi) return k;
  }
  return segments.size() - 1;
}

Box apriori_enclosure(const VectorField& f, const Box& x0, double dt, const ReachOptions& opts) {
  if (!(dt > 0.0)) throw std::invalid_argument("apriori_enclosure: dt must be positive");
  Box e = x0;
  for (int iter = 0; iter < opts.picard_max_iter; ++iter) {
    Box image = picard_image(f, x0, e, dt);
    if (contains_box(e, image)) {
      // The image of a certified box is certified again whenever it maps into
      // itself; a few rounds shave off the inflation overshoot.
      for (int k = 0; k < 4; ++k) {
        Box next = picard_image(f, x0, image, dt);
        if (!contains_box(image, next)) break;
        e = std::move(image);
        image = std::move(next);
      }
      return e;
    }
    e = bloat(image, opts.picard_bloat, opts.picard_abs);
  }
  throw NoEnclosure("no a priori enclosure after " + std::to_string(opts.picard_max_iter) +
                    " Picard iterations (dt = " + std::to_string(dt) + ")");
}

namespace {

/// Bounds used when the flow over [0, dt] is replaced by linear
/// interpolation between its end points (lambda = s / dt):
///   ||e^{Js} - (1 - lambda) I - lambda e^{J dt}||  <= state_gap
///   ||int_0^s e^{Jq} dq - lambda int_0^dt e^{Jq} dq|| <= input_gap
struct InterpolationGap {
  double state_gap;
  double input_gap;
};

InterpolationGap interpolation_gap(double a, double dt) {
  // sum_k a^k/k! · max_lambda |lambda^k - lambda|, with max = 1/4 at k = 2
  // and bounded by 1 above.
  const double tail3 = std::expm1(a) - a - 0.5 * a * a;
  InterpolationGap g;
  g.state_gap = 0.125 * a * a + tail3;
  // sum_{k>=1} a^k/(k+1)! · max |lambda^{k+1} - lambda|, 1/4 at k = 1.
  g.input_gap = dt * (0.125 * a + (a > 0.0 ? tail3 / a : 0.0));
  return g;
}

Zonotope with_box(const Zonotope& z, const Vector& mid, const Vector& rad) {
  Matrix gens(z.dim(), z.generators().cols() + rad.size());
  gens << z.generators(), Matrix(rad.asDiagonal());
  return Zonotope(z.center() + mid, std::move(gens));
}

Vector magnitude_of(const Zonotope& z) {
  return z.center().cwiseAbs() + z.generators().cwiseAbs().rowwise().sum();
}

}  // namespace

StepResult reach_step(const VectorField& f, const Zonotope& z, double dt, const ReachOptions& opts) {
  if (!(dt > 0.0)) throw std::invalid_argument("reach_step: dt must be positive");
  const Box enclosure = apriori_enclosure(f, interval_hull(z), dt, opts);
  const std::size_t budget = opts.max_gens == 0 ? default_max_gens(z.dim()) : opts.max_gens;
  const auto n = static_cast<Eigen::Index>(z.dim());

  // Linearize at the predicted mid-step state p (inside the enclosure):
  //   x' = f(p) + J (x - p) + r(t),  r(t) in rem while x(t) stays in E.
  const Vector p = z.center() + 0.5 * dt * eval(f, z.center());
  const Vector fp = eval(f, p);
  const Matrix jac = jacobian(f, p);
  const IntervalVector rem = linearization_remainder(f, enclosure, p);
  const ExpTerms ex = exp_terms(jac, dt, opts.exp_order);

  // x(s) = p + e^{Js}(x0 - p) + int_0^s e^{Jq} dq f(p) + int_0^s e^{J(s-q)} r(q) dq
  const Zonotope offset(z.center() - p, z.generators());
  const double offset_mag = magnitude_of(offset).maxCoeff();
  const double fp_mag = fp.cwiseAbs().maxCoeff();
  const IntervalVector forced = (ex.sweep * rem) * Interval(dt);

  Vector forced_mid(n), forced_rad(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    forced_mid[i] = forced[i].mid();
    forced_rad[i] = forced[i].rad();
  }

  // End point (s = dt) without the remainder: p + Phi (x0 - p) + Gamma f(p).
  const Zonotope linear_end = translate(linear_map(ex.phi, offset), p + ex.gamma * fp);
  const Vector trunc = Vector::Constant(n, ex.phi_rem * offset_mag + ex.gamma_rem * fp_mag);
  Zonotope reach = with_box(linear_end, forced_mid, forced_rad + trunc);
  reach = with_box(reach, Vector::Zero(n), kRoundingSlack * magnitude_of(reach));

  // Over s in [0, dt]: interpolate between z and linear_end, pay the
  // interpolation gap, and cover the remainder integral by hull(0, forced).
  const Vector& c0 = z.center();
  const Vector& c1 = linear_end.center();
  const Matrix& g0 = z.generators();
  const Matrix& g1 = linear_end.generators();
  Matrix sweep_gens(n, 2 * g0.cols() + 1);
  sweep_gens << 0.5 * (g0 + g1), 0.5 * (c1 - c0), 0.5 * (g0 - g1);
  const InterpolationGap gap = interpolation_gap(inf_norm(jac) * dt, dt);
  Vector sweep_lo(n), sweep_hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sweep_lo[i] = std::min(0.0, forced[i].lo());
    sweep_hi[i] = std::max(0.0, forced[i].hi());
  }
  const Vector sweep_rad = 0.5 * (sweep_hi - sweep_lo) +
                           Vector::Constant(n, (gap.state_gap + ex.phi_rem) * offset_mag +
                                                   (gap.input_gap + ex.gamma_rem) * fp_mag);
  Zonotope sweep = with_box(Zonotope(0.5 * (c0 + c1), std::move(sweep_gens)), 0.5 * (sweep_lo + sweep_hi),
                            sweep_rad);
  sweep = with_box(sweep, Vector::Zero(n), kRoundingSlack * magnitude_of(sweep));

  Box tight = enclosure;
  try {
    tight = box_intersection(enclosure, interval_hull(sweep));
  } catch (const std::domain_error&) {
    // Disjoint only through rounding; keep the Picard box.
  }
  return {reduce_order(reach, budget), std::move(tight), reduce_order(sweep, budget)};
}

Tube reach_tube(const VectorField& f, const Box& x_in, double horizon, std::size_t n_segments,
                const ReachOptions& opts) {
  if (n_segments < 1) throw std::invalid_argument("reach_tube: n_segments must be at least 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("reach_tube: horizon must be positive");
  const double dt = horizon / static_cast<double>(n_segments);
  std::vector<Segment> segments;
  segments.reserve(n_segments);
  Zonotope current = zono_from_box(x_in);
  for (std::size_t k = 0; k < n_segments; ++k) {
    const double t_lo = horizon * static_cast<double>(k) / static_cast<double>(n_segments);
    const double t_hi = horizon * static_cast<double>(k + 1) / static_cast<double>(n_segments);
    try {
      StepResult step = reach_step(f, current, dt, opts);
      segments.push_back(
          Segment{t_lo, t_hi, std::move(step.enclosure), std::move(current), std::move(step.sweep)});
      current = std::move(step.reach);
    } catch (const NoEnclosure& e) {
      throw NoEnclosure(std::string(e.what()) + " in segment " + std::to_string(k), k);
    }
  }
  return Tube{std::move(segments), std::move(current)};
}

Vector simulate(const VectorField& f, const Vector& u, double horizon, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("simulate: step must be positive");
  if (horizon <= 0.0) return u;
  const auto steps = static_cast<long>(std::ceil(horizon / h - 1e-9));
  const double step = horizon / static_cast<double>(steps);
  Vector x = u;
  for (long i = 0; i < steps; ++i) {
    const Vector k1 = eval(f, x);
    const Vector k2 = eval(f, x + 0.5 * step * k1);
    const Vector k3 = eval(f, x + 0.5 * step * k2);
    const Vector k4 = eval(f, x + step * k3);
    x += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

void to_json(nlohmann::json& j, const Tube& tube) {
  nlohmann::json segs = nlohmann::json::array();
  for (const Segment& s : tube.segments) {
    segs.push_back({{"t_lo", s.t_lo}, {"t_hi", s.t_hi}, {"box", s.enclosure}, {"zonotope", s.reach_start}});
  }
  j = nlohmann::json{{"segments", segs}, {"final", tube.final}};
}

}  // namespace proxyreach
