// Set-valued bound on the gap between the flow x(1) and one Euler step
// u + f(u), and the scalar Lipschitz-style bound it is compared against.
//
// For every input u there is t* in [0, 1] with
//     x(1) - (u + f(u)) = 1/2 f'(x(t*)) f(x(t*)),
// so bounding g(x) = 1/2 f'(x) f(x) over the reachable tube bounds the gap.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "proxyreach/netmodel.hpp"
#include "proxyreach/odereach.hpp"
#include "proxyreach/setcore.hpp"

namespace proxyreach {

enum class ErrorMethod { IntervalExtension, MeanValue };

std::string to_string(ErrorMethod m);
/// Accepts "interval" / "meanvalue".
ErrorMethod error_method_from_string(const std::string& s);

struct ErrorBound {
  /// Interval hull of the union of per_segment.
  Box omega_eps;
  std::vector<Box> per_segment;
  ErrorMethod method;
};

struct BoundComparison {
  double set_inf_norm = 0.0;
  /// Lipschitz constant used for the scalar bound.
  double lipschitz_L = 0.0;
  /// Region-local constant over the tube hull, reported for reference.
  double lipschitz_local = 0.0;
  double sander_scalar = 0.0;
  /// sander_scalar / set_inf_norm = (e^L - 1) / L.
  double width_ratio = 1.0;
  /// (2 sander_scalar)^n / volume(omega_eps); unset when omega_eps is flat.
  double volume_ratio = 0.0;
  bool degenerate_volume = false;
};

enum class LipschitzSource {
  /// weight_norm_bound(f)
  Global,
  /// lipschitz_bound(f, tube hull)
  TubeLocal,
};

/// g(x) = 1/2 f'(x) f(x).
Vector error_map_eval(const VectorField& f, const Vector& x);
/// Natural extension 1/2 · f'(b) · f(b).
Box error_image_interval(const VectorField& f, const Box& b);
/// Mean-value form g(c) + G (z - c), G enclosing
/// g'(x) = 1/2 (f''(x)[f(x)] + f'(x) f'(x)) over hull(z) ∩ `enclosure`.
/// Covers g(x) for the points x of z that lie in `enclosure`.
Zonotope error_image_meanvalue(const VectorField& f, const Zonotope& z, const Box& enclosure);
/// Splits z along its longest generators into at most `pieces` zonotopes and
/// takes the union of their mean-value and natural images of g, each over
/// the piece's hull clipped to `enclosure`.
Box error_image_subdivided(const VectorField& f, const Zonotope& z, const Box& enclosure, std::size_t pieces);

/// Default cell budget per segment for the subdivided MeanValue image.
inline constexpr std::size_t kDefaultErrorPieces = 256;

/// Per segment: the natural image of the enclosure, and for MeanValue its
/// intersection with the mean-value and subdivided (`pieces` cells) images
/// of the segment sweep.
ErrorBound error_set(const VectorField& f, const Tube& tube, ErrorMethod method = ErrorMethod::MeanValue,
                     std::size_t pieces = kDefaultErrorPieces);
ErrorBound negate_error_set(const ErrorBound& e);

/// (e^L - 1)/L with its limit 1 at L = 0.
double growth_factor(double L);

BoundComparison sander_bound(const VectorField& f, const Tube& tube, const ErrorBound& bound,
                             LipschitzSource source = LipschitzSource::Global);

void to_json(nlohmann::json& j, const ErrorBound& e);
void to_json(nlohmann::json& j, const BoundComparison& c);

}  // namespace proxyreach
