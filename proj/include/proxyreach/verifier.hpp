// Verification proxy in both directions: the reachable set of one model,
// expanded by the error set, decides safety of the other model.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "proxyreach/errorbound.hpp"
#include "proxyreach/netmodel.hpp"
#include "proxyreach/odereach.hpp"
#include "proxyreach/setcore.hpp"

namespace proxyreach {

enum class Direction {
  /// Neural ODE verified from the ResNet output set plus the error set.
  NodeViaResnet,
  /// ResNet verified from the neural ODE output set plus the negated error set.
  ResnetViaNode,
};

std::string to_string(Direction d);
/// Accepts "node-via-resnet" / "resnet-via-node".
Direction direction_from_string(const std::string& s);

struct SafetyProblem {
  Box input_set;
  /// Lives in the projected coordinates.
  Box safe_set;
  /// 0-based coordinates kept by the output map; 1-based in JSON.
  std::vector<std::size_t> output_dims;
  Direction direction = Direction::NodeViaResnet;

  /// Throws std::invalid_argument unless the dims are distinct, in range and
  /// match the safe set.
  void validate() const;
};

/// Which expansion is added to the proxy output set.
enum class BoundMethod {
  /// The error set (negated for ResnetViaNode).
  Set,
  /// The symmetric hypercube of half-width (e^L - 1)/L · ||Omega_eps||_inf.
  Sander,
};

std::string to_string(BoundMethod m);
BoundMethod bound_method_from_string(const std::string& s);

struct VerifyConfig {
  std::size_t n_segments = 20;
  ErrorMethod error_method = ErrorMethod::MeanValue;
  BoundMethod bound_method = BoundMethod::Set;
  /// Cell budget per segment for the MeanValue error image.
  std::size_t error_pieces = kDefaultErrorPieces;
  ReachOptions reach;
};

enum class Result { Safe, Unknown };
std::string to_string(Result r);

struct TubeStats {
  std::size_t n_segments = 0;
  std::optional<Box> hull;
};

struct Verdict {
  Result result = Result::Unknown;
  Direction direction = Direction::NodeViaResnet;
  BoundMethod bound_method = BoundMethod::Set;
  std::vector<std::size_t> output_dims;
  std::optional<Zonotope> proxy_output_set;
  std::optional<Zonotope> expanded_set;
  std::optional<ErrorBound> error_bound;
  std::optional<BoundComparison> comparison;
  TubeStats tube_stats;
  /// Seconds per phase ("tube", "error_set", "proxy", "check").
  std::map<std::string, double> timings;
  /// Set when the pipeline stopped early (e.g. no a priori enclosure).
  std::optional<std::string> diagnostic;
  bool enclosure_failure = false;
};

/// contains_box(safe, hull(project(s, dims))).
bool check_safety(const Zonotope& s, const Box& safe, std::span<const std::size_t> dims);

Verdict verify_node_via_resnet(const VectorField& f, const SafetyProblem& p, const VerifyConfig& cfg = {});
Verdict verify_resnet_via_node(const VectorField& f, const SafetyProblem& p, const VerifyConfig& cfg = {});
/// Dispatches on p.direction.
Verdict verify(const VectorField& f, const SafetyProblem& p, const VerifyConfig& cfg = {});

enum class ModelKind { Node, Resnet };

struct SampleOptions {
  std::uint64_t seed = 42;
  /// RK4 step for neural ODE outputs.
  double sim_step = 1e-3;
};

/// Uniform inputs in x_in (row i of the result pairs with row i of the inputs).
Matrix sample_inputs(const Box& x_in, std::size_t m, std::uint64_t seed);
/// One output per row: x(1) for Node, u + f(u) for Resnet.
Matrix sample_outputs(const VectorField& f, const Box& x_in, std::size_t m, ModelKind which,
                      const SampleOptions& opts = {});

struct SoundnessReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// Largest distance outside the set over all samples (0 if none).
  double max_excess = 0.0;
};

/// Counts rows of `samples` outside `omega` by more than `slack`.
SoundnessReport soundness_report(const Matrix& samples, const Box& omega, double slack = 1e-9);
SoundnessReport soundness_report(const Matrix& samples, const Zonotope& omega, double slack = 1e-9);

/// Printed approximate FPA input and safe sets with dims (1, 2).
SafetyProblem fpa_problem(Direction d = Direction::NodeViaResnet);

void to_json(nlohmann::json& j, const SafetyProblem& p);
SafetyProblem problem_from_json(const nlohmann::json& j);
SafetyProblem load_problem(const std::string& path);
/// "fpa" selects fpa_problem(), anything else is read as a file.
SafetyProblem resolve_problem(const std::string& name_or_path);

/// Full report; timings are omitted when include_timings is false so two
/// runs can be compared byte for byte.
nlohmann::json verdict_to_json(const Verdict& v, bool include_timings = true);
void to_json(nlohmann::json& j, const SoundnessReport& r);

}  // namespace proxyreach
