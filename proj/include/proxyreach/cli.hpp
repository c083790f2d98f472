// Command-line front end: errorbound, verify, compare and sample.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "proxyreach/errorbound.hpp"
#include "proxyreach/verifier.hpp"

namespace proxyreach {

/// Process exit codes.
enum ExitCode : int {
  kExitSafe = 0,
  kExitUnknown = 1,
  kExitInputError = 2,
  kExitNoEnclosure = 3,
};

inline constexpr std::size_t kMaxSegments = 200;

struct RunConfig {
  std::string model = "fpa";
  std::string problem = "fpa";
  std::size_t n_segments = 20;
  /// 0 resolves to default_max_gens(n).
  std::size_t max_gens = 0;
  ErrorMethod error_method = ErrorMethod::MeanValue;
  BoundMethod bound_method = BoundMethod::Set;
  /// Overrides the problem's direction when set.
  std::optional<Direction> direction;
  std::size_t samples = 10000;
  std::uint64_t seed = 42;
  int exp_order = 10;
  std::size_t error_pieces = kDefaultErrorPieces;

  /// Throws std::invalid_argument on counts below 1, more than kMaxSegments
  /// segments, or exp_order below 2.
  void validate() const;
  VerifyConfig verify_config() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);

// Each command writes its files into `out` (created if missing) and returns
// an ExitCode. Input errors and enclosure failures surface as exceptions
// (std::invalid_argument, ModelError, DimensionError, NoEnclosure).

/// errorbound.json and segments.csv (plus tube.csv with the state boxes).
int cmd_errorbound(const RunConfig& cfg, const std::filesystem::path& out);
/// verdict.json; kExitSafe or kExitUnknown, kExitNoEnclosure when the tube
/// could not be built.
int cmd_verify(const RunConfig& cfg, const std::filesystem::path& out);
/// compare.json and compare.csv.
int cmd_compare(const RunConfig& cfg, const std::filesystem::path& out);
/// samples.csv and soundness.json.
int cmd_sample(const RunConfig& cfg, const std::filesystem::path& out);

/// Parses argv and dispatches; never throws.
int run_cli(int argc, const char* const* argv);

}  // namespace proxyreach
