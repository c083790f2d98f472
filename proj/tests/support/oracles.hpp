// Independent reference computations for the tests. Nothing here calls the
// library routine it is used to check.
#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "proxyreach/netmodel.hpp"
#include "proxyreach/setcore.hpp"

namespace oracle {

using proxyreach::Box;
using proxyreach::Matrix;
using proxyreach::Vector;
using proxyreach::Zonotope;
using Field = std::function<Vector(const Vector&)>;

/// Interval hull by enumerating all 2^g generator sign patterns.
Box vertex_hull(const Zonotope& z);

/// Central differences of f.
Matrix fd_jacobian(const Field& f, const Vector& x, double h = 1e-5);
/// d/ds f'(x + s v) from second differences of f alone.
Matrix fd_hessian_apply(const Field& f, const Vector& x, const Vector& v, double h = 1e-4);

/// The FPA weight matrix assembled from A and B by hand.
Matrix fpa_weight();
/// tau x + W tanh(x) written out directly.
Vector fpa_field(const Vector& x);
/// max row sum of |tau I + W|.
double fpa_weight_norm();

/// Classical RK4 with a fixed number of steps over [0, horizon].
Vector rk4(const Field& f, const Vector& u, double horizon, int steps);

/// Deterministic uniform samples, one per row.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi);
  Vector in_box(const Box& b);
  /// Point of z with coefficients in [-1, 1]; every fourth draw is a vertex.
  Vector in_zonotope(const Zonotope& z);
  Box random_box(std::size_t n, double centre_range, double max_radius);
  Zonotope random_zonotope(std::size_t n, std::size_t gens, double scale);
  Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, double scale);

 private:
  std::mt19937_64 rng_;
  std::size_t draws_ = 0;
};

// Model fixtures.
proxyreach::VectorField linear_field(const Matrix& m);
proxyreach::VectorField zero_field(std::size_t n);
/// s x + W2 tanh(W1 x + b1) + b2 with random weights of the given scale.
proxyreach::VectorField random_tanh_field(Sampler& rng, std::size_t n, std::size_t hidden, double scale);
Field as_field(const proxyreach::VectorField& f);

/// Largest distance by which x leaves b (negative when strictly inside).
double excess(const Box& b, const Vector& x);

}  // namespace oracle
