#include <array>

#include "doctest.h"
#include "oracles.hpp"
#include "proxyreach/setcore.hpp"

using namespace proxyreach;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

bool same_box(const Box& a, const Box& b, double tol) {
  return (a.lo() - b.lo()).cwiseAbs().maxCoeff() <= tol && (a.hi() - b.hi()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

TEST_CASE("interval arithmetic") {
  const Interval a(-1.0, 2.0), b(3.0, 4.0);
  CHECK(a + b == Interval(2.0, 6.0));
  CHECK(a - b == Interval(-5.0, -1.0));
  CHECK(a * b == Interval(-4.0, 8.0));
  CHECK(-a == Interval(-2.0, 1.0));
  CHECK(hull(a, b) == Interval(-1.0, 4.0));
  CHECK_THROWS_AS(intersect(a, b), std::domain_error);
  CHECK_THROWS_AS(Interval(1.0, 0.0), std::invalid_argument);

  // tanh' peaks at 0, tanh'' has extrema at tanh = +-1/sqrt(3).
  CHECK(dtanh(Interval(-0.5, 0.2)).hi() == doctest::Approx(1.0));
  const double t = 1.0 / std::sqrt(3.0);
  const double peak = 2.0 * t * (1.0 - t * t);
  CHECK(d2tanh(Interval(-2.0, 2.0)).hi() >= peak - 1e-15);
  CHECK(d2tanh(Interval(-2.0, 2.0)).lo() <= -peak + 1e-15);

  oracle::Sampler rng(7);
  for (int k = 0; k < 2000; ++k) {
    const double lo = rng.uniform(-3.0, 3.0);
    const Interval x(lo, lo + rng.uniform(0.0, 2.0));
    const double p = rng.uniform(x.lo(), x.hi());
    const double th = std::tanh(p);
    REQUIRE(tanh(x).contains(th));
    REQUIRE(dtanh(x).contains(1.0 - th * th));
    REQUIRE(d2tanh(x).contains(-2.0 * th * (1.0 - th * th)));
  }
}

TEST_CASE("box validation and norms") {
  CHECK_THROWS_AS(Box(vec({1.0}), vec({0.0})), std::invalid_argument);
  CHECK_THROWS_AS(Box(vec({0.0, 1.0}), vec({1.0})), DimensionError);
  const Box b(vec({-3.0, 0.5}), vec({1.0, 2.0}));
  CHECK(b.inf_norm() == 3.0);
  CHECK(b.volume() == doctest::Approx(6.0));
  CHECK(contains_box(b, b));
  CHECK_FALSE(contains_box(Box(vec({0.0}), vec({0.5})), Box(vec({0.0}), vec({1.0}))));
}

TEST_CASE("zono_from_box") {
  const Zonotope z = zono_from_box(Box(vec({0.0, -1.0}), vec({2.0, 1.0})));
  CHECK(z.center() == vec({1.0, 0.0}));
  CHECK(z.generators() == Matrix::Identity(2, 2));

  const Zonotope p = zono_from_box(Box::point(vec({3.0})));
  CHECK(p.center()[0] == 3.0);
  CHECK(p.generators().cwiseAbs().sum() == 0.0);

  const Box fpa(vec({0.45, 0.72, 0.47, 0.19, -0.64}), vec({0.55, 0.88, 0.58, 0.24, -0.53}));
  const Vector expected = vec({0.5, 0.8, 0.525, 0.215, -0.585});
  CHECK((zono_from_box(fpa).center() - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(same_box(interval_hull(zono_from_box(fpa)), fpa, 1e-15));
}

TEST_CASE("linear_map") {
  oracle::Sampler rng(11);
  const Zonotope z = rng.random_zonotope(5, 7, 1.0);
  const Zonotope id = linear_map(Matrix::Identity(5, 5), z);
  CHECK(id.center() == z.center());
  CHECK(id.generators() == z.generators());

  const Zonotope unit = zono_from_box(Box::cube(3, 1.0));
  CHECK(interval_hull(linear_map(-Matrix::Identity(3, 3), unit)) == Box::cube(3, 1.0));

  const std::array<std::size_t, 2> dims{0, 1};
  Matrix sel = Matrix::Zero(2, 5);
  sel(0, 0) = sel(1, 1) = 1.0;
  const Box projected = interval_hull(linear_map(sel, z));
  const Box brute = oracle::vertex_hull(z);
  CHECK(same_box(projected, project(brute, dims), 1e-12));
  CHECK(same_box(interval_hull(project(z, dims)), projected, 0.0));

  CHECK_THROWS_AS(linear_map(Matrix::Identity(4, 4), z), DimensionError);
}

TEST_CASE("minkowski_sum") {
  oracle::Sampler rng(12);
  const Zonotope z = rng.random_zonotope(3, 4, 1.0);
  const Zonotope zero(Vector::Zero(3));
  CHECK(same_box(interval_hull(minkowski_sum(z, zero)), interval_hull(z), 0.0));

  const Zonotope u = zono_from_box(Box::cube(1, 1.0));
  CHECK(interval_hull(minkowski_sum(u, u)) == Box::cube(1, 2.0));

  for (int k = 0; k < 50; ++k) {
    const Box a = rng.random_box(4, 2.0, 1.0);
    const Box b = rng.random_box(4, 2.0, 1.0);
    const Box sum(Box(a.intervals() + b.intervals()));
    CHECK(same_box(interval_hull(minkowski_sum(zono_from_box(a), zono_from_box(b))), sum, 1e-14));
  }
  CHECK_THROWS_AS(minkowski_sum(z, zono_from_box(Box::cube(2, 1.0))), DimensionError);
}

TEST_CASE("minkowski_sum is commutative and associative on hulls") {
  oracle::Sampler rng(13);
  for (int k = 0; k < 100; ++k) {
    const Zonotope a = rng.random_zonotope(3, 3, 1.0);
    const Zonotope b = rng.random_zonotope(3, 2, 1.0);
    const Zonotope c = rng.random_zonotope(3, 4, 1.0);
    CHECK(same_box(interval_hull(minkowski_sum(a, b)), interval_hull(minkowski_sum(b, a)), 1e-14));
    CHECK(same_box(interval_hull(minkowski_sum(minkowski_sum(a, b), c)),
                   interval_hull(minkowski_sum(a, minkowski_sum(b, c))), 1e-14));
  }
}

TEST_CASE("negate") {
  const Zonotope p(vec({1.0, -2.0}));
  CHECK(negate(p).center() == vec({-1.0, 2.0}));

  const Zonotope sym = zono_from_box(Box::cube(2, 0.5));
  CHECK(interval_hull(negate(sym)) == interval_hull(sym));

  oracle::Sampler rng(14);
  for (int k = 0; k < 100; ++k) {
    const Zonotope z = rng.random_zonotope(4, 5, 1.0);
    const Box h = interval_hull(z);
    CHECK(interval_hull(negate(z)) == Box(-h.hi(), -h.lo()));
    CHECK(interval_hull(negate(negate(z))) == h);
  }
  CHECK(negate(Box(vec({0.5}), vec({1.36}))) == Box(vec({-1.36}), vec({-0.5})));
}

TEST_CASE("interval_hull") {
  CHECK(interval_hull(Zonotope(vec({1.0, 2.0}))) == Box::point(vec({1.0, 2.0})));
  Matrix g(2, 2);
  g << 1, 1, 1, -1;
  CHECK(interval_hull(Zonotope(Vector::Zero(2), g)) == Box::cube(2, 2.0));
}

TEST_CASE("interval_hull matches vertex enumeration") {
  oracle::Sampler rng(15);
  for (std::size_t gens = 0; gens <= 12; ++gens) {
    for (int k = 0; k < 5; ++k) {
      const Zonotope z = rng.random_zonotope(4, gens, 1.0);
      CHECK(same_box(interval_hull(z), oracle::vertex_hull(z), 1e-12));
    }
  }
}

TEST_CASE("reduce_order") {
  oracle::Sampler rng(16);
  const Zonotope small = rng.random_zonotope(3, 4, 1.0);
  const Zonotope same = reduce_order(small, 6);
  CHECK(same.generators() == small.generators());

  const Zonotope big = rng.random_zonotope(3, 20, 1.0);
  const Zonotope boxed = reduce_order(big, 3);
  CHECK(boxed.num_generators() == 3);
  CHECK(same_box(interval_hull(boxed), interval_hull(big), 1e-13));
  CHECK(same_box(interval_hull(boxed), interval_hull(zono_from_box(interval_hull(big))), 1e-13));

  for (int k = 0; k < 100; ++k) {
    const Zonotope z = rng.random_zonotope(4, 30, 1.0);
    const Zonotope r = reduce_order(z, 10);
    CHECK(r.num_generators() <= 10);
    CHECK(contains_box(inflate(interval_hull(r), 1e-14, 1e-14), interval_hull(z)));
  }
  CHECK_THROWS_AS(reduce_order(big, 2), std::invalid_argument);
  CHECK(default_max_gens(5) == 50);
}

TEST_CASE("set operations are sound under sampling") {
  oracle::Sampler rng(17);
  const Zonotope z = rng.random_zonotope(4, 9, 1.0);
  const Zonotope w = rng.random_zonotope(4, 3, 1.0);
  const Matrix m = rng.random_matrix(3, 4, 2.0);
  const Box mapped = interval_hull(linear_map(m, z));
  const Box summed = interval_hull(minkowski_sum(z, w));
  const Box negated = interval_hull(negate(z));
  const Box reduced = interval_hull(reduce_order(z, 5));
  for (int k = 0; k < 10000; ++k) {
    const Vector x = rng.in_zonotope(z);
    const Vector y = rng.in_zonotope(w);
    REQUIRE(oracle::excess(mapped, m * x) <= 1e-12);
    REQUIRE(oracle::excess(summed, x + y) <= 1e-12);
    REQUIRE(oracle::excess(negated, -x) <= 1e-12);
    REQUIRE(oracle::excess(reduced, x) <= 1e-12);
  }
}

TEST_CASE("box and zonotope JSON round trip") {
  oracle::Sampler rng(18);
  const Zonotope z = rng.random_zonotope(3, 2, 1.0);
  nlohmann::json j = z;
  CHECK(j["generators"].size() == 3);
  const Zonotope back = zonotope_from_json(j);
  CHECK(back.center() == z.center());
  CHECK(back.generators() == z.generators());

  const Box b = rng.random_box(3, 1.0, 1.0);
  nlohmann::json jb = b;
  CHECK(box_from_json(jb) == b);
  CHECK_THROWS_AS(box_from_json(nlohmann::json{{"lo", {1.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(box_from_json(nlohmann::json{{"lo", {1.0}}, {"hi", {0.0}}}), std::invalid_argument);
}
