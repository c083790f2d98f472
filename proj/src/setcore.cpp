#include "proxyreach/setcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace proxyreach {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

Matrix selector(std::size_t n, std::span<const std::size_t> dims) {
  Matrix s = Matrix::Zero(static_cast<Eigen::Index>(dims.size()), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < dims.size(); ++r) {
    if (dims[r] >= n) throw DimensionError("project: index out of range");
    s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(dims[r])) = 1.0;
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Box

Box::Box(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() == 0) throw DimensionError("Box: dimension must be at least 1");
  require_same_dim(static_cast<std::size_t>(lo_.size()), static_cast<std::size_t>(hi_.size()),
                   "Box");
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (!(lo_[i] <= hi_[i])) {
      throw std::invalid_argument("Box: lo > hi (or NaN) in coordinate " + std::to_string(i));
    }
  }
}

Box::Box(const IntervalVector& iv)
    : Box(iv.unaryExpr([](const Interval& x) { return x.lo(); }).eval(),
          iv.unaryExpr([](const Interval& x) { return x.hi(); }).eval()) {}

Box Box::cube(std::size_t n, double r) {
  const auto m = static_cast<Eigen::Index>(n);
  return Box(Vector::Constant(m, -r), Vector::Constant(m, r));
}

IntervalVector Box::intervals() const {
  IntervalVector iv(lo_.size());
  for (Eigen::Index i = 0; i < lo_.size(); ++i) iv[i] = Interval(lo_[i], hi_[i]);
  return iv;
}

bool Box::contains(const Vector& x) const {
  require_same_dim(dim(), static_cast<std::size_t>(x.size()), "Box::contains");
  return (lo_.array() <= x.array()).all() && (x.array() <= hi_.array()).all();
}

double Box::inf_norm() const { return std::max(lo_.cwiseAbs().maxCoeff(), hi_.cwiseAbs().maxCoeff()); }

double Box::volume() const { return width().prod(); }

bool contains_box(const Box& outer, const Box& inner) {
  require_same_dim(outer.dim(), inner.dim(), "contains_box");
  return (outer.lo().array() <= inner.lo().array()).all() &&
         (inner.hi().array() <= outer.hi().array()).all();
}

Box box_union(const Box& a, const Box& b) {
  require_same_dim(a.dim(), b.dim(), "box_union");
  return Box(a.lo().cwiseMin(b.lo()), a.hi().cwiseMax(b.hi()));
}

Box box_intersection(const Box& a, const Box& b) {
  require_same_dim(a.dim(), b.dim(), "box_intersection");
  Vector lo = a.lo().cwiseMax(b.lo());
  Vector hi = a.hi().cwiseMin(b.hi());
  if ((lo.array() > hi.array()).any()) throw std::domain_error("box_intersection: disjoint boxes");
  return Box(std::move(lo), std::move(hi));
}

Box negate(const Box& b) { return Box(-b.hi(), -b.lo()); }

Box inflate(const Box& b, double rel, double abs) {
  return Box(b.lo() - rel * b.lo().cwiseAbs() - Vector::Constant(b.lo().size(), abs),
             b.hi() + rel * b.hi().cwiseAbs() + Vector::Constant(b.hi().size(), abs));
}

Box project(const Box& b, std::span<const std::size_t> dims) {
  const Matrix s = selector(b.dim(), dims);
  return Box(s * b.lo(), s * b.hi());
}

// ---------------------------------------------------------------------------
// Zonotope

Zonotope::Zonotope(Vector center, Matrix generators)
    : center_(std::move(center)), generators_(std::move(generators)) {
  if (center_.size() == 0) throw DimensionError("Zonotope: dimension must be at least 1");
  if (generators_.cols() == 0) generators_.resize(center_.size(), 0);
  require_same_dim(static_cast<std::size_t>(center_.size()),
                   static_cast<std::size_t>(generators_.rows()), "Zonotope");
}

Zonotope::Zonotope(const Vector& point) : Zonotope(point, Matrix(point.size(), 0)) {}

Zonotope zono_from_box(const Box& b) { return Zonotope(b.mid(), b.radius().asDiagonal()); }

Zonotope linear_map(const Matrix& m, const Zonotope& z) {
  require_same_dim(static_cast<std::size_t>(m.cols()), z.dim(), "linear_map");
  return Zonotope(m * z.center(), m * z.generators());
}

Zonotope translate(const Zonotope& z, const Vector& offset) {
  require_same_dim(z.dim(), static_cast<std::size_t>(offset.size()), "translate");
  return Zonotope(z.center() + offset, z.generators());
}

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b) {
  require_same_dim(a.dim(), b.dim(), "minkowski_sum");
  Matrix g(a.dim(), a.generators().cols() + b.generators().cols());
  g << a.generators(), b.generators();
  return Zonotope(a.center() + b.center(), std::move(g));
}

Zonotope negate(const Zonotope& z) { return Zonotope(-z.center(), -z.generators()); }

Box interval_hull(const Zonotope& z) {
  const Vector r = z.generators().cwiseAbs().rowwise().sum();
  return Box(z.center() - r, z.center() + r);
}

Zonotope project(const Zonotope& z, std::span<const std::size_t> dims) {
  return linear_map(selector(z.dim(), dims), z);
}

Zonotope interval_map(const IntervalMatrix& m, const Zonotope& z) {
  require_same_dim(static_cast<std::size_t>(m.cols()), z.dim(), "interval_map");
  const Zonotope image = linear_map(midpoint(m), z);
  const Box h = interval_hull(z);
  const Vector mag = h.lo().cwiseAbs().cwiseMax(h.hi().cwiseAbs());
  const Vector spread = radius(m) * mag;
  if ((spread.array() == 0.0).all()) return image;
  return minkowski_sum(image, Zonotope(Vector::Zero(spread.size()), spread.asDiagonal()));
}

Zonotope reduce_order(const Zonotope& z, std::size_t max_gens) {
  const std::size_t n = z.dim();
  if (max_gens < n) {
    throw std::invalid_argument("reduce_order: max_gens (" + std::to_string(max_gens) +
                                ") below dimension (" + std::to_string(n) + ")");
  }
  const std::size_t g = z.num_generators();
  if (g <= max_gens) return z;

  const Matrix& gens = z.generators();
  std::vector<std::size_t> order(g);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const Vector norms = gens.colwise().norm().transpose();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return norms[static_cast<Eigen::Index>(a)] > norms[static_cast<Eigen::Index>(b)];
  });

  const std::size_t keep = max_gens - n;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(max_gens));
  Vector boxed = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < g; ++k) {
    const auto col = gens.col(static_cast<Eigen::Index>(order[k]));
    if (k < keep) {
      out.col(static_cast<Eigen::Index>(k)) = col;
    } else {
      boxed += col.cwiseAbs();
    }
  }
  out.rightCols(static_cast<Eigen::Index>(n)) = boxed.asDiagonal();
  return Zonotope(z.center(), std::move(out));
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector vector_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw std::invalid_argument(std::string(what) + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

void to_json(nlohmann::json& j, const Box& b) {
  j = nlohmann::json{{"lo", to_std(b.lo())}, {"hi", to_std(b.hi())}};
}

void to_json(nlohmann::json& j, const Zonotope& z) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < z.generators().rows(); ++i) {
    rows.push_back(to_std(z.generators().row(i).transpose()));
  }
  j = nlohmann::json{{"center", to_std(z.center())}, {"generators", rows}};
}

Box box_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi")) {
    throw std::invalid_argument("box: expected an object with \"lo\" and \"hi\"");
  }
  return Box(vector_from_json(j.at("lo"), "box.lo"), vector_from_json(j.at("hi"), "box.hi"));
}

Zonotope zonotope_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("center") || !j.contains("generators")) {
    throw std::invalid_argument("zonotope: expected an object with \"center\" and \"generators\"");
  }
  Vector c = vector_from_json(j.at("center"), "zonotope.center");
  const auto& rows = j.at("generators");
  if (!rows.is_array() || rows.size() != static_cast<std::size_t>(c.size())) {
    throw DimensionError("zonotope.generators: expected one row per dimension");
  }
  const std::size_t g = rows.empty() ? 0 : rows[0].size();
  Matrix gens(c.size(), static_cast<Eigen::Index>(g));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Vector r = vector_from_json(rows[i], "zonotope.generators");
    if (static_cast<std::size_t>(r.size()) != g) throw DimensionError("zonotope.generators: ragged rows");
    gens.row(static_cast<Eigen::Index>(i)) = r.transpose();
  }
  return Zonotope(std::move(c), std::move(gens));
}

}  // namespace proxyreach
