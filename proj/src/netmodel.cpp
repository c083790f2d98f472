#include "proxyreach/netmodel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace proxyreach {

namespace {

template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// tanh and its derivatives, overloaded for points and intervals.
double act0(double x) { return std::tanh(x); }
double act1(double x) {
  const double t = std::tanh(x);
  return 1.0 - t * t;
}
double act2(double x) {
  const double t = std::tanh(x);
  return -2.0 * t * (1.0 - t * t);
}
Interval act0(const Interval& x) { return tanh(x); }
Interval act1(const Interval& x) { return dtanh(x); }
Interval act2(const Interval& x) { return d2tanh(x); }

enum class Want { Value, Jacobian, Hessian };

/// Value, Jacobian and directional Hessian carried through the layers in
/// forward mode.
template <class T>
struct Jet {
  VecT<T> value;
  MatT<T> jac;
  MatT<T> hdir;
};

template <class T>
void scale_rows(MatT<T>& m, const VecT<T>& s) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) *= s[i];
}

template <class T>
Jet<T> propagate(const std::vector<Layer>& layers, Jet<T> jet, const VecT<T>& dir, Want want) {
  const bool need_jac = want != Want::Value;
  const bool need_hess = want == Want::Hessian;
  for (const Layer& layer : layers) {
    std::visit(
        [&](const auto& l) {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, Linear>) {
            const MatT<T> w = l.weight.template cast<T>();
            jet.value = (w * jet.value + l.bias.template cast<T>()).eval();
            if (need_jac) jet.jac = (w * jet.jac).eval();
            if (need_hess) jet.hdir = (w * jet.hdir).eval();
          } else if constexpr (std::is_same_v<L, Scale>) {
            const T tau(l.tau);
            jet.value *= tau;
            if (need_jac) jet.jac *= tau;
            if (need_hess) jet.hdir *= tau;
          } else if constexpr (std::is_same_v<L, Tanh>) {
            const Eigen::Index m = jet.value.size();
            VecT<T> d1(m);
            for (Eigen::Index i = 0; i < m; ++i) d1[i] = act1(jet.value[i]);
            if (need_hess) {
              const VecT<T> slope = jet.jac * dir;
              VecT<T> d2(m);
              for (Eigen::Index i = 0; i < m; ++i) d2[i] = act2(jet.value[i]) * slope[i];
              MatT<T> curv = jet.jac;
              scale_rows(curv, d2);
              scale_rows(jet.hdir, d1);
              jet.hdir += curv;
            }
            if (need_jac) scale_rows(jet.jac, d1);
            for (Eigen::Index i = 0; i < m; ++i) jet.value[i] = act0(jet.value[i]);
          } else {
            Jet<T> a = propagate(l.left, jet, dir, want);
            const Jet<T> b = propagate(l.right, jet, dir, want);
            a.value += b.value;
            if (need_jac) a.jac += b.jac;
            if (need_hess) a.hdir += b.hdir;
            jet = std::move(a);
          }
        },
        layer.kind);
  }
  return jet;
}

template <class T>
Jet<T> run(const VectorField& f, const VecT<T>& x, const VecT<T>& dir, Want want) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  Jet<T> jet{x, MatT<T>(), MatT<T>()};
  if (want != Want::Value) jet.jac = MatT<T>::Identity(n, n);
  if (want == Want::Hessian) jet.hdir = MatT<T>::Zero(n, n);
  return propagate(f.layers(), std::move(jet), dir, want);
}

void check_dim(const VectorField& f, Eigen::Index size, const char* op) {
  if (static_cast<std::size_t>(size) != f.dim()) {
    throw DimensionError(std::string(op) + ": expected dimension " + std::to_string(f.dim()) +
                         ", got " + std::to_string(size));
  }
}

/// Output dimension of a layer sequence fed with `in`; throws on mismatch.
std::size_t composed_dim(const std::vector<Layer>& layers, std::size_t in) {
  std::size_t cur = in;
  for (const Layer& layer : layers) {
    std::visit(
        [&](const auto& l) {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, Linear>) {
            if (static_cast<std::size_t>(l.weight.cols()) != cur) {
              throw ModelError("linear layer expects input dimension " +
                               std::to_string(l.weight.cols()) + ", got " + std::to_string(cur));
            }
            if (l.bias.size() != l.weight.rows()) {
              throw ModelError("linear layer bias length does not match weight rows");
            }
            if (!l.weight.allFinite() || !l.bias.allFinite()) {
              throw ModelError("linear layer has non-finite parameters");
            }
            cur = static_cast<std::size_t>(l.weight.rows());
          } else if constexpr (std::is_same_v<L, Scale>) {
            if (!std::isfinite(l.tau)) throw ModelError("scale layer has non-finite tau");
          } else if constexpr (std::is_same_v<L, Sum>) {
            const std::size_t a = composed_dim(l.left, cur);
            const std::size_t b = composed_dim(l.right, cur);
            if (a != b) throw ModelError("sum layer branches produce different dimensions");
            cur = a;
          }
        },
        layer.kind);
  }
  return cur;
}

double sequence_norm_bound(const std::vector<Layer>& layers) {
  double bound = 1.0;
  for (const Layer& layer : layers) {
    std::visit(
        [&](const auto& l) {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, Linear>) {
            bound *= l.weight.cwiseAbs().rowwise().sum().maxCoeff();
          } else if constexpr (std::is_same_v<L, Scale>) {
            bound *= std::abs(l.tau);
          } else if constexpr (std::is_same_v<L, Sum>) {
            bound *= sequence_norm_bound(l.left) + sequence_norm_bound(l.right);
          }
        },
        layer.kind);
  }
  return bound;
}

}  // namespace

VectorField::VectorField(std::size_t dim, std::vector<Layer> layers)
    : dim_(dim), layers_(std::move(layers)) {
  if (dim_ == 0) throw ModelError("vector field dimension must be at least 1");
  const std::size_t out = composed_dim(layers_, dim_);
  if (out != dim_) {
    throw ModelError("vector field must be square (R^n -> R^n): input " + std::to_string(dim_) +
                     ", output " + std::to_string(out));
  }
}

Vector eval(const VectorField& f, const Vector& x) {
  check_dim(f, x.size(), "eval");
  return run<double>(f, x, Vector(), Want::Value).value;
}

Matrix jacobian(const VectorField& f, const Vector& x) {
  check_dim(f, x.size(), "jacobian");
  return run<double>(f, x, Vector(), Want::Jacobian).jac;
}

Matrix hessian_apply(const VectorField& f, const Vector& x, const Vector& v) {
  check_dim(f, x.size(), "hessian_apply");
  check_dim(f, v.size(), "hessian_apply");
  return run<double>(f, x, v, Want::Hessian).hdir;
}

Box interval_eval(const VectorField& f, const Box& b) {
  check_dim(f, static_cast<Eigen::Index>(b.dim()), "interval_eval");
  return Box(run<Interval>(f, b.intervals(), IntervalVector(), Want::Value).value);
}

IntervalMatrix interval_jacobian(const VectorField& f, const Box& b) {
  check_dim(f, static_cast<Eigen::Index>(b.dim()), "interval_jacobian");
  return run<Interval>(f, b.intervals(), IntervalVector(), Want::Jacobian).jac;
}

IntervalMatrix interval_hessian_apply(const VectorField& f, const Box& b, const IntervalVector& dir) {
  check_dim(f, static_cast<Eigen::Index>(b.dim()), "interval_hessian_apply");
  check_dim(f, dir.size(), "interval_hessian_apply");
  return run<Interval>(f, b.intervals(), dir, Want::Hessian).hdir;
}

Vector resnet_point(const VectorField& f, const Vector& u) { return u + eval(f, u); }

namespace {

Interval meet(const Interval& a, const Interval& b) {
  return (a.hi() < b.lo() || b.hi() < a.lo()) ? a : intersect(a, b);
}

/// 1/2 (x - p)^T f_i''(region) (x - p) for x in region, with the diagonal
/// terms evaluated as exact squares.
IntervalVector lagrange_remainder(const VectorField& f, const Box& region, const Vector& p) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  std::vector<IntervalMatrix> slices;  // slices[k](i, j) = d2 f_i / dx_j dx_k
  slices.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    slices.push_back(interval_hessian_apply(f, region, Vector::Unit(n, k).cast<Interval>()));
  }
  const IntervalVector delta = region.intervals() - p.cast<Interval>();
  IntervalVector square(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = delta[j].lo();
    const double b = delta[j].hi();
    const double top = std::max(a * a, b * b);
    square[j] = delta[j].contains(0.0) ? Interval(0.0, top) : Interval(std::min(a * a, b * b), top);
  }
  IntervalVector r = IntervalVector::Constant(n, Interval(0.0));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      r[i] += Interval(0.5) * slices[static_cast<std::size_t>(j)](i, j) * square[j];
      for (Eigen::Index k = j + 1; k < n; ++k) {
        const Interval cross = meet(slices[static_cast<std::size_t>(k)](i, j),
                                         slices[static_cast<std::size_t>(j)](i, k));
        r[i] += cross * (delta[j] * delta[k]);
      }
    }
  }
  return r;
}

}  // namespace

IntervalVector linearization_remainder(const VectorField& f, const Box& region, const Vector& p) {
  const Box r = box_union(region, Box::point(p));
  const Vector fp = eval(f, p);
  const IntervalMatrix jac = jacobian(f, p).cast<Interval>();
  const IntervalVector offset = r.intervals() - p.cast<Interval>();
  const IntervalVector mean_value = (interval_jacobian(f, r) - jac) * offset;
  const IntervalVector natural = interval_eval(f, r).intervals() - fp.cast<Interval>() - jac * offset;
  const IntervalVector lagrange = lagrange_remainder(f, r, p);
  IntervalVector out(offset.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = widen(meet(meet(lagrange[i], mean_value[i]), natural[i]), kRoundingSlack, 0.0);
  }
  return out;
}

Zonotope resnet_forward(const VectorField& f, const Zonotope& z) {
  check_dim(f, static_cast<Eigen::Index>(z.dim()), "resnet_forward");
  const Vector& c = z.center();
  // u + f(u) = c + f(c) + (I + f'(c))(u - c) + r(u), r bounded over the hull.
  const auto n = static_cast<Eigen::Index>(z.dim());
  const Matrix map = Matrix::Identity(n, n) + jacobian(f, c);
  const IntervalVector r = linearization_remainder(f, interval_hull(z), c);
  Vector mid(n);
  Matrix rad = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mid[i] = r[i].mid();
    rad(i, i) = r[i].rad();
  }
  Matrix gens(n, z.generators().cols() + n);
  gens << map * z.generators(), rad;
  return Zonotope(resnet_point(f, c) + mid, std::move(gens));
}

double lipschitz_bound(const VectorField& f, const Box& b) {
  return magnitude(interval_jacobian(f, b)).rowwise().sum().maxCoeff();
}

double weight_norm_bound(const VectorField& f) { return sequence_norm_bound(f.layers()); }

VectorField fpa_model() {
  Matrix a(2, 3);
  a << -1.20327, -0.07202, -0.93635,  //
      1.18810, -1.50015, 0.93519;
  Matrix b(3, 2);
  b << 1.21464, -0.10502,  //
      0.12023, 0.19387,    //
      -1.36695, 0.12201;
  Matrix w = Matrix::Zero(5, 5);
  w.block(0, 2, 2, 3) = a;
  w.block(2, 2, 3, 3) = b * a;
  constexpr double tau = -1e-6;

  Sum body;
  body.left.push_back(Layer{Scale{tau}});
  body.right.push_back(Layer{Tanh{}});
  body.right.push_back(Layer{Linear{w, Vector::Zero(5)}});
  return VectorField(5, {Layer{std::move(body)}});
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json layers_to_json(const std::vector<Layer>& layers) {
  nlohmann::json out = nlohmann::json::array();
  for (const Layer& layer : layers) {
    std::visit(
        [&](const auto& l) {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, Linear>) {
            nlohmann::json rows = nlohmann::json::array();
            for (Eigen::Index i = 0; i < l.weight.rows(); ++i) {
              std::vector<double> row(static_cast<std::size_t>(l.weight.cols()));
              for (Eigen::Index k = 0; k < l.weight.cols(); ++k) row[static_cast<std::size_t>(k)] = l.weight(i, k);
              rows.push_back(row);
            }
            out.push_back({{"type", "linear"},
                           {"weight", rows},
                           {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
          } else if constexpr (std::is_same_v<L, Tanh>) {
            out.push_back({{"type", "tanh"}});
          } else if constexpr (std::is_same_v<L, Scale>) {
            out.push_back({{"type", "scale"}, {"tau", l.tau}});
          } else {
            out.push_back({{"type", "sum"}, {"left", layers_to_json(l.left)}, {"right", layers_to_json(l.right)}});
          }
        },
        layer.kind);
  }
  return out;
}

Vector numbers(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw ModelError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ModelError(std::string(what) + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

std::vector<Layer> layers_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ModelError("\"layers\" must be an array");
  std::vector<Layer> layers;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("type") || !item["type"].is_string()) {
      throw ModelError("every layer needs a string \"type\"");
    }
    const auto type = item["type"].get<std::string>();
    if (type == "linear") {
      if (!item.contains("weight")) throw ModelError("linear layer without \"weight\"");
      const auto& rows = item["weight"];
      if (!rows.is_array() || rows.empty()) throw ModelError("linear weight must be a non-empty matrix");
      const std::size_t cols = rows[0].is_array() ? rows[0].size() : 0;
      Matrix w(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Vector r = numbers(rows[i], "linear weight row");
        if (static_cast<std::size_t>(r.size()) != cols) throw ModelError("linear weight rows are ragged");
        w.row(static_cast<Eigen::Index>(i)) = r.transpose();
      }
      Vector bias = item.contains("bias") ? numbers(item["bias"], "linear bias") : Vector::Zero(w.rows());
      layers.push_back(Layer{Linear{std::move(w), std::move(bias)}});
    } else if (type == "tanh") {
      layers.push_back(Layer{Tanh{}});
    } else if (type == "scale") {
      if (!item.contains("tau") || !item["tau"].is_number()) throw ModelError("scale layer needs numeric \"tau\"");
      layers.push_back(Layer{Scale{item["tau"].get<double>()}});
    } else if (type == "sum") {
      if (!item.contains("left") || !item.contains("right")) {
        throw ModelError("sum layer needs \"left\" and \"right\"");
      }
      layers.push_back(Layer{Sum{layers_from_json(item["left"]), layers_from_json(item["right"])}});
    } else if (type == "conv" || type == "batchnorm" || type == "relu") {
      throw ModelError("layer type \"" + type + "\" is not supported");
    } else {
      throw ModelError("unknown layer type \"" + type + "\"");
    }
  }
  return layers;
}

}  // namespace

void to_json(nlohmann::json& j, const VectorField& f) {
  j = nlohmann::json{{"dim", f.dim()}, {"layers", layers_to_json(f.layers())}};
}

VectorField model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ModelError("model: expected a JSON object");
  if (!j.contains("layers")) throw ModelError("model: missing \"layers\"");
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
    throw ModelError("model: \"dim\" must be a positive integer");
  }
  return VectorField(j["dim"].get<std::size_t>(), layers_from_json(j["layers"]));
}

VectorField load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError("malformed model JSON in " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

void save_model(const VectorField& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  out << nlohmann::json(f).dump(2) << '\n';
}

VectorField resolve_model(const std::string& name_or_path) {
  if (name_or_path == "fpa") return fpa_model();
  return load_model(name_or_path);
}

}  // namespace proxyreach
