// Validated reachability for x' = f(x): a priori enclosures, one-step
// conservative linearization and the segmented tube over [0, horizon].
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "proxyreach/netmodel.hpp"
#include "proxyreach/setcore.hpp"

namespace proxyreach {

/// The interval Picard operator could not be certified (step too large).
class NoEnclosure : public std::runtime_error {
 public:
  explicit NoEnclosure(const std::string& what, std::optional<std::size_t> segment = std::nullopt)
      : std::runtime_error(what), segment_(segment) {}
  std::optional<std::size_t> segment() const { return segment_; }

 private:
  std::optional<std::size_t> segment_;
};

struct ReachOptions {
  /// Generator budget; 0 selects default_max_gens(n).
  std::size_t max_gens = 0;
  /// Taylor order of the truncated matrix exponential.
  int exp_order = 10;
  int picard_max_iter = 50;
  double picard_bloat = 1.1;
  double picard_abs = 1e-6;
};

struct Segment {
  double t_lo;
  double t_hi;
  /// Contains every state reached over [t_lo, t_hi].
  Box enclosure;
  /// Reach set at t_lo.
  Zonotope reach_start;
  /// Zonotope containing every state reached over [t_lo, t_hi]; its hull
  /// intersected with the Picard box gives `enclosure`.
  Zonotope sweep;
};

struct Tube {
  std::vector<Segment> segments;
  /// Reach set at the horizon.
  Zonotope final;

  std::size_t n_segments() const { return segments.size(); }
  /// Interval hull of all segment enclosures.
  Box hull() const;
  /// Index of the segment whose time range covers t (clamped to the ends).
  std::size_t segment_at(double t) const;
};

/// Box E with x0 + [0, dt]·f(E) inside E, so every trajectory from x0 stays
/// in E over [0, dt]. Throws NoEnclosure after picard_max_iter inflations.
Box apriori_enclosure(const VectorField& f, const Box& x0, double dt, const ReachOptions& opts = {});

struct StepResult {
  /// Reach set at dt.
  Zonotope reach;
  /// Box around all states over [0, dt].
  Box enclosure;
  /// Zonotope around all states over [0, dt].
  Zonotope sweep;
};

/// Advances z by dt with the flow linearized at c + dt/2 f(c), c the centre
/// of z; the linearization error is bounded over the a priori enclosure.
StepResult reach_step(const VectorField& f, const Zonotope& z, double dt, const ReachOptions& opts = {});

Tube reach_tube(const VectorField& f, const Box& x_in, double horizon, std::size_t n_segments,
                const ReachOptions& opts = {});

/// Fixed-step classical RK4. Not validated; used for sample clouds and as a
/// test oracle.
Vector simulate(const VectorField& f, const Vector& u, double horizon, double h);

void to_json(nlohmann::json& j, const Tube& tube);

}  // namespace proxyreach
