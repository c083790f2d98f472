#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "proxyreach/errorbound.hpp"

using namespace proxyreach;

namespace {

const Box kFpaInput(Vector{{0.45, 0.72, 0.47, 0.19, -0.64}}, Vector{{0.55, 0.88, 0.58, 0.24, -0.53}});

VectorField scalar(double a) { return oracle::linear_field(Matrix::Constant(1, 1, a)); }

Box interval1(double lo, double hi) { return Box(Vector::Constant(1, lo), Vector::Constant(1, hi)); }

/// g(x) = 1/2 f'(x) f(x) for FPA, from the independent field and finite differences.
Vector g_oracle(const Vector& x) {
  return 0.5 * oracle::fd_jacobian(oracle::fpa_field, x, 1e-6) * oracle::fpa_field(x);
}

const Tube& fpa_tube() {
  static const Tube t = reach_tube(fpa_model(), kFpaInput, 1.0, 20);
  return t;
}

}  // namespace

TEST_CASE("error_map_eval") {
  CHECK(error_map_eval(oracle::zero_field(2), Vector::Ones(2)) == Vector::Zero(2));
  CHECK(error_map_eval(scalar(1.0), Vector::Constant(1, 1.0))[0] == 0.5);
  CHECK(error_map_eval(fpa_model(), Vector::Zero(5)) == Vector::Zero(5));
  const Vector x{{0.5, 0.8, 0.5, 0.2, -0.6}};
  CHECK((error_map_eval(fpa_model(), x) - g_oracle(x)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("error_image_interval") {
  const Vector x{{0.5, 0.8, 0.5, 0.2, -0.6}};
  const Box at = error_image_interval(fpa_model(), Box::point(x));
  CHECK(at.width().maxCoeff() < 1e-14);
  CHECK(oracle::excess(at, error_map_eval(fpa_model(), x)) < 1e-14);

  const Box e = error_image_interval(scalar(1.0), interval1(1.0, std::exp(1.0)));
  CHECK(e.lo()[0] == doctest::Approx(0.5));
  CHECK(e.hi()[0] == doctest::Approx(std::exp(1.0) / 2));

  oracle::Sampler rng(41);
  for (int k = 0; k < 20; ++k) {
    const Box b = rng.random_box(5, 1.0, 0.2);
    const Box img = error_image_interval(fpa_model(), b);
    for (int s = 0; s < 500; ++s) REQUIRE(oracle::excess(img, g_oracle(rng.in_box(b))) <= 1e-7);
  }
}

TEST_CASE("error_image_meanvalue") {
  Matrix m(2, 2);
  m << 0.3, -1.0, 0.5, 0.2;
  oracle::Sampler rng(42);
  const Zonotope z = rng.random_zonotope(2, 3, 1.0);
  const Box lin = interval_hull(error_image_meanvalue(oracle::linear_field(m), z, interval_hull(z)));
  const Box exact = interval_hull(linear_map(0.5 * m * m, z));
  CHECK((lin.lo() - exact.lo()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((lin.hi() - exact.hi()).cwiseAbs().maxCoeff() < 1e-14);

  const Box s = interval_hull(error_image_meanvalue(scalar(1.0), zono_from_box(interval1(1.0, 2.0)), interval1(1.0, 2.0)));
  CHECK(s.lo()[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.hi()[0] == doctest::Approx(1.0).epsilon(1e-14));

  const VectorField f = fpa_model();
  for (const Segment& seg : fpa_tube().segments) {
    const Box mv = interval_hull(error_image_meanvalue(f, seg.sweep, seg.enclosure));
    CHECK(contains_box(inflate(error_image_interval(f, seg.enclosure), 0.0, 1e-12), mv));
  }
}

TEST_CASE("error_image_subdivided is sound on the segment states") {
  const VectorField f = fpa_model();
  const Segment& seg = fpa_tube().segments[10];
  const Box cells = error_image_subdivided(f, seg.sweep, seg.enclosure, 64);
  const Box one = error_image_subdivided(f, seg.sweep, seg.enclosure, 1);
  CHECK(cells.inf_norm() <= one.inf_norm() + 1e-12);
  oracle::Sampler rng(43);
  int tested = 0;
  for (int k = 0; k < 20000; ++k) {
    const Vector x = rng.in_zonotope(seg.sweep);
    if (!seg.enclosure.contains(x)) continue;
    ++tested;
    REQUIRE(oracle::excess(cells, error_map_eval(f, x)) <= 1e-12);
  }
  CHECK(tested > 1000);
  CHECK_THROWS_AS(error_image_subdivided(f, seg.sweep, seg.enclosure, 0), std::invalid_argument);
}

TEST_CASE("error_set") {
  const Tube still = reach_tube(oracle::zero_field(2), Box::cube(2, 1.0), 1.0, 4);
  const ErrorBound zero = error_set(oracle::zero_field(2), still);
  CHECK(zero.omega_eps == Box::point(Vector::Zero(2)));

  const Tube grow = reach_tube(scalar(1.0), interval1(1.0, 1.0), 1.0, 20);
  for (ErrorMethod m : {ErrorMethod::IntervalExtension, ErrorMethod::MeanValue}) {
    const ErrorBound e = error_set(scalar(1.0), grow, m);
    CHECK(contains_box(e.omega_eps, interval1(0.5, std::exp(1.0) / 2)));
    CHECK(e.omega_eps.contains(Vector::Constant(1, std::exp(1.0) - 2.0)));
    CHECK(e.per_segment.size() == 20);
    CHECK(e.method == m);
  }

  const ErrorBound fpa = error_set(fpa_model(), fpa_tube());
  CHECK(fpa.omega_eps.inf_norm() >= 0.03);
  CHECK(fpa.omega_eps.inf_norm() <= 0.15);
}

TEST_CASE("error_set invariants on FPA") {
  const VectorField f = fpa_model();
  const ErrorBound mv = error_set(f, fpa_tube(), ErrorMethod::MeanValue);
  const ErrorBound ie = error_set(f, fpa_tube(), ErrorMethod::IntervalExtension);
  CHECK(mv.omega_eps.inf_norm() <= ie.omega_eps.inf_norm());

  for (const ErrorBound* e : {&mv, &ie}) {
    Vector lo = e->per_segment.front().lo(), hi = e->per_segment.front().hi();
    for (const Box& b : e->per_segment) {
      lo = lo.cwiseMin(b.lo());
      hi = hi.cwiseMax(b.hi());
    }
    CHECK(e->omega_eps == Box(lo, hi));
  }

  // Theorem 1 on a smaller sample; the acceptance run uses 10^4.
  oracle::Sampler rng(44);
  for (int k = 0; k < 1000; ++k) {
    const Vector u = rng.in_box(kFpaInput);
    const Vector err = oracle::rk4(oracle::fpa_field, u, 1.0, 200) - (u + oracle::fpa_field(u));
    REQUIRE(oracle::excess(mv.omega_eps, err) <= 1e-6);
    REQUIRE(oracle::excess(negate_error_set(mv).omega_eps, Vector(-err)) <= 1e-6);
  }
}

TEST_CASE("negate_error_set") {
  const ErrorBound zero{Box::point(Vector::Zero(1)), {Box::point(Vector::Zero(1))}, ErrorMethod::MeanValue};
  CHECK(negate_error_set(zero).omega_eps == zero.omega_eps);

  const ErrorBound e{interval1(0.5, 1.36), {interval1(0.5, 1.0), interval1(0.9, 1.36)}, ErrorMethod::MeanValue};
  const ErrorBound n = negate_error_set(e);
  CHECK(n.omega_eps == interval1(-1.36, -0.5));
  CHECK(n.per_segment[1] == interval1(-1.36, -0.9));
  const ErrorBound nn = negate_error_set(n);
  CHECK(nn.omega_eps == e.omega_eps);
  CHECK(nn.per_segment == e.per_segment);
}

TEST_CASE("sander_bound") {
  const VectorField f = fpa_model();
  const ErrorBound e = error_set(f, fpa_tube());
  const BoundComparison c = sander_bound(f, fpa_tube(), e);
  CHECK(std::abs(c.lipschitz_L - 3.62) <= 0.01);
  CHECK(c.width_ratio == doctest::Approx(std::expm1(c.lipschitz_L) / c.lipschitz_L));
  CHECK(c.width_ratio >= 9.5);
  CHECK(c.width_ratio <= 10.5);
  CHECK(c.sander_scalar == doctest::Approx(c.width_ratio * c.set_inf_norm));
  CHECK(c.volume_ratio >= 1e6);
  CHECK_FALSE(c.degenerate_volume);
  CHECK(growth_factor(c.lipschitz_L) * 0.064 == doctest::Approx(0.64).epsilon(0.02));

  // Dominance: omega_eps inside the inf-norm cube inside the Sander cube.
  const Box norm_cube = Box::cube(5, c.set_inf_norm);
  CHECK(contains_box(norm_cube, e.omega_eps));
  CHECK(contains_box(Box::cube(5, c.sander_scalar), norm_cube));
  CHECK(c.sander_scalar > c.set_inf_norm);

  const BoundComparison local = sander_bound(f, fpa_tube(), e, LipschitzSource::TubeLocal);
  CHECK(local.lipschitz_L == c.lipschitz_local);
  CHECK(local.lipschitz_L <= c.lipschitz_L);

  CHECK(growth_factor(0.0) == 1.0);
  const VectorField constant(1, {Layer{Linear{Matrix::Zero(1, 1), Vector::Constant(1, 0.3)}}});
  const Tube t = reach_tube(constant, interval1(0.0, 1.0), 1.0, 4);
  const ErrorBound flat = error_set(constant, t);
  const BoundComparison cc = sander_bound(constant, t, flat);
  CHECK(cc.width_ratio == 1.0);
  CHECK(cc.sander_scalar == cc.set_inf_norm);
  CHECK(cc.degenerate_volume);
  nlohmann::json j = cc;
  CHECK(j["volume_ratio"].is_null());
}

TEST_CASE("error method names") {
  CHECK(error_method_from_string("interval") == ErrorMethod::IntervalExtension);
  CHECK(to_string(ErrorMethod::MeanValue) == "meanvalue");
  CHECK_THROWS_AS(error_method_from_string("taylor"), std::invalid_argument);
}
