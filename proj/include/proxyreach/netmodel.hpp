// Layered vector fields f : R^n -> R^n with exact derivatives and interval
// extensions, the single-block ResNet map u + f(u), and the FPA fixture.
#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "proxyreach/interval.hpp"
#include "proxyreach/setcore.hpp"

namespace proxyreach {

/// Malformed or inconsistent model description.
class ModelError : public std::invalid_argument {
 public:
  explicit ModelError(const std::string& what) : std::invalid_argument(what) {}
};

struct Layer;

/// y = W x + b
struct Linear {
  Matrix weight;
  Vector bias;
};

/// Element-wise tanh.
struct Tanh {};

/// y = tau · x
struct Scale {
  double tau = 1.0;
};

/// y = left(x) + right(x); both branches see the same input.
struct Sum {
  std::vector<Layer> left;
  std::vector<Layer> right;
};

struct Layer {
  std::variant<Linear, Tanh, Scale, Sum> kind;
};

/// A smooth square network. Immutable once constructed; the constructor
/// checks that the layer dimensions compose to R^n -> R^n.
class VectorField {
 public:
  VectorField(std::size_t dim, std::vector<Layer> layers);

  std::size_t dim() const { return dim_; }
  const std::vector<Layer>& layers() const { return layers_; }

 private:
  std::size_t dim_;
  std::vector<Layer> layers_;
};

// Point evaluators.
Vector eval(const VectorField& f, const Vector& x);
Matrix jacobian(const VectorField& f, const Vector& x);
/// d/ds f'(x + s v) at s = 0.
Matrix hessian_apply(const VectorField& f, const Vector& x, const Vector& v);

// Natural interval extensions over a box.
Box interval_eval(const VectorField& f, const Box& b);
IntervalMatrix interval_jacobian(const VectorField& f, const Box& b);
/// Encloses { d/ds f'(x + s v) : x in b, v in dir }.
IntervalMatrix interval_hessian_apply(const VectorField& f, const Box& b, const IntervalVector& dir);

/// Relative outward margin applied to every computed enclosure. Covers
/// floating-point rounding in place of directed rounding.
inline constexpr double kRoundingSlack = 1e-12;

/// Encloses f(x) - f(p) - J (x - p) over x in `region`, J = f'(p): the
/// intersection of the second-order Lagrange form, the mean-value form and
/// the natural interval extension.
IntervalVector linearization_remainder(const VectorField& f, const Box& region, const Vector& p);

/// Enclosure of { u + f(u) : u in z }, linearized at the centre of z.
Zonotope resnet_forward(const VectorField& f, const Zonotope& z);
Vector resnet_point(const VectorField& f, const Vector& u);

/// Upper bound on sup_{x in b} ||f'(x)||_inf.
double lipschitz_bound(const VectorField& f, const Box& b);
/// Region-free bound from layer norms (||W||_inf per linear layer, 1 per
/// tanh, |tau| per scale; branches of a sum add).
double weight_norm_bound(const VectorField& f);

/// 5-D fixed-point attractor f(x) = tau x + W tanh(x).
VectorField fpa_model();

void to_json(nlohmann::json& j, const VectorField& f);
VectorField model_from_json(const nlohmann::json& j);
VectorField load_model(const std::filesystem::path& path);
void save_model(const VectorField& f, const std::filesystem::path& path);
/// "fpa" selects the bundled benchmark, anything else is read as a file.
VectorField resolve_model(const std::string& name_or_path);

}  // namespace proxyreach
