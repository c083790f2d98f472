#include "proxyreach/verifier.hpp"

#include <chrono>
#include <fstream>
#include <random>
#include <set>

namespace proxyreach {

std::string to_string(Direction d) {
  return d == Direction::NodeViaResnet ? "node-via-resnet" : "resnet-via-node";
}

Direction direction_from_string(const std::string& s) {
  if (s == "node-via-resnet") return Direction::NodeViaResnet;
  if (s == "resnet-via-node") return Direction::ResnetViaNode;
  throw std::invalid_argument("unknown direction \"" + s + "\" (expected node-via-resnet|resnet-via-node)");
}

std::string to_string(BoundMethod m) { return m == BoundMethod::Set ? "set" : "sander"; }

BoundMethod bound_method_from_string(const std::string& s) {
  if (s == "set") return BoundMethod::Set;
  if (s == "sander") return BoundMethod::Sander;
  throw std::invalid_argument("unknown bound method \"" + s + "\" (expected set|sander)");
}

std::string to_string(Result r) { return r == Result::Safe ? "Safe" : "Unknown"; }

void SafetyProblem::validate() const {
  if (output_dims.empty()) throw std::invalid_argument("problem: output_dims is empty");
  std::set<std::size_t> seen;
  for (std::size_t d : output_dims) {
    if (d >= input_set.dim()) throw std::invalid_argument("problem: output dim out of range");
    if (!seen.insert(d).second) throw std::invalid_argument("problem: output dims must be distinct");
  }
  if (safe_set.dim() != output_dims.size()) {
    throw DimensionError("problem: safe_set dimension must equal the number of output dims");
  }
}

bool check_safety(const Zonotope& s, const Box& safe, std::span<const std::size_t> dims) {
  return contains_box(safe, interval_hull(project(s, dims)));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Verdict run_pipeline(const VectorField& f, const SafetyProblem& p, const VerifyConfig& cfg, Direction dir) {
  p.validate();
  if (p.input_set.dim() != f.dim()) throw DimensionError("problem input set does not match model dimension");

  Verdict v;
  v.direction = dir;
  v.bound_method = cfg.bound_method;
  v.output_dims = p.output_dims;

  auto t0 = Clock::now();
  std::optional<Tube> tube;
  try {
    tube = reach_tube(f, p.input_set, 1.0, cfg.n_segments, cfg.reach);
  } catch (const NoEnclosure& e) {
    v.timings["tube"] = seconds_since(t0);
    v.result = Result::Unknown;
    v.diagnostic = e.what();
    v.enclosure_failure = true;
    return v;
  }
  v.timings["tube"] = seconds_since(t0);
  v.tube_stats = TubeStats{tube->n_segments(), tube->hull()};

  t0 = Clock::now();
  ErrorBound eps = error_set(f, *tube, cfg.error_method, cfg.error_pieces);
  v.comparison = sander_bound(f, *tube, eps);
  if (dir == Direction::ResnetViaNode) eps = negate_error_set(eps);
  v.timings["error_set"] = seconds_since(t0);

  t0 = Clock::now();
  Zonotope proxy = dir == Direction::NodeViaResnet ? resnet_forward(f, zono_from_box(p.input_set))
                                                   : tube->final;
  // The error enters by set addition (never set difference); for the
  // reverse direction it is the negated error set.
  const Box expansion = cfg.bound_method == BoundMethod::Set
                            ? eps.omega_eps
                            : Box::cube(f.dim(), v.comparison->sander_scalar);
  v.expanded_set = minkowski_sum(proxy, zono_from_box(expansion));
  v.proxy_output_set = std::move(proxy);
  v.error_bound = std::move(eps);
  v.timings["proxy"] = seconds_since(t0);

  t0 = Clock::now();
  v.result = check_safety(*v.expanded_set, p.safe_set, p.output_dims) ? Result::Safe : Result::Unknown;
  v.timings["check"] = seconds_since(t0);
  return v;
}

}  // namespace

Verdict verify_node_via_resnet(const VectorField& f, const SafetyProblem& p, const VerifyConfig& cfg) {
  return run_pipeline(f, p, cfg, Direction::NodeViaResnet);
}

Verdict verify_resnet_via_node(const VectorField& f, const SafetyProblem& p, const VerifyConfig& cfg) {
  return run_pipeline(f, p, cfg, Direction::ResnetViaNode);
}

Verdict verify(const VectorField& f, const SafetyProblem& p, const VerifyConfig& cfg) {
  return p.direction == Direction::NodeViaResnet ? verify_node_via_resnet(f, p, cfg)
                                                 : verify_resnet_via_node(f, p, cfg);
}

Matrix sample_inputs(const Box& x_in, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample count must be at least 1");
  std::mt19937_64 rng(seed);
  const auto n = static_cast<Eigen::Index>(x_in.dim());
  Matrix u(static_cast<Eigen::Index>(m), n);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      // 53 random bits -> [0, 1); spelled out so the stream is portable.
      const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      u(i, k) = x_in.lo()[k] + r * (x_in.hi()[k] - x_in.lo()[k]);
    }
  }
  return u;
}

Matrix sample_outputs(const VectorField& f, const Box& x_in, std::size_t m, ModelKind which,
                      const SampleOptions& opts) {
  const Matrix u = sample_inputs(x_in, m, opts.seed);
  Matrix out(u.rows(), u.cols());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const Vector x = u.row(i).transpose();
    out.row(i) = (which == ModelKind::Node ? simulate(f, x, 1.0, opts.sim_step) : resnet_point(f, x)).transpose();
  }
  return out;
}

SoundnessReport soundness_report(const Matrix& samples, const Box& omega, double slack) {
  if (static_cast<std::size_t>(samples.cols()) != omega.dim()) {
    throw DimensionError("soundness_report: sample dimension does not match the set");
  }
  SoundnessReport r;
  r.samples = static_cast<std::size_t>(samples.rows());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const Vector x = samples.row(i).transpose();
    const double excess = std::max((omega.lo() - x).maxCoeff(), (x - omega.hi()).maxCoeff());
    if (excess > slack) ++r.violations;
    r.max_excess = std::max(r.max_excess, excess);
  }
  return r;
}

SoundnessReport soundness_report(const Matrix& samples, const Zonotope& omega, double slack) {
  return soundness_report(samples, interval_hull(omega), slack);
}

SafetyProblem fpa_problem(Direction d) {
  Vector lo(5), hi(5);
  lo << 0.45, 0.72, 0.47, 0.19, -0.64;
  hi << 0.55, 0.88, 0.58, 0.24, -0.53;
  Vector slo(2), shi(2);
  slo << 0.2, 0.3;
  shi << 0.6, 0.85;
  return SafetyProblem{Box(lo, hi), Box(slo, shi), {0, 1}, d};
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const SafetyProblem& p) {
  std::vector<std::size_t> dims;
  for (std::size_t d : p.output_dims) dims.push_back(d + 1);
  j = nlohmann::json{{"input_set", p.input_set},
                     {"safe_set", p.safe_set},
                     {"output_dims", dims},
                     {"direction", to_string(p.direction)}};
}

SafetyProblem problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("problem: expected a JSON object");
  for (const char* key : {"input_set", "safe_set", "output_dims"}) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("problem: missing \"") + key + "\"");
  }
  std::vector<std::size_t> dims;
  if (!j["output_dims"].is_array()) throw std::invalid_argument("problem: output_dims must be an array");
  for (const auto& d : j["output_dims"]) {
    if (!d.is_number_integer() || d.get<long long>() < 1) {
      throw std::invalid_argument("problem: output_dims are 1-based positive integers");
    }
    dims.push_back(d.get<std::size_t>() - 1);
  }
  const Direction dir = j.contains("direction") ? direction_from_string(j["direction"].get<std::string>())
                                                : Direction::NodeViaResnet;
  SafetyProblem p{box_from_json(j["input_set"]), box_from_json(j["safe_set"]), std::move(dims), dir};
  p.validate();
  return p;
}

SafetyProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open problem file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed problem JSON in " + path + ": " + e.what());
  }
  return problem_from_json(j);
}

SafetyProblem resolve_problem(const std::string& name_or_path) {
  if (name_or_path == "fpa") return fpa_problem();
  return load_problem(name_or_path);
}

namespace {

nlohmann::json set_report(const Zonotope& z, std::optional<std::vector<std::size_t>> dims = std::nullopt) {
  nlohmann::json j{{"hull", interval_hull(z)}, {"zonotope", z}};
  if (dims) j["projected_hull"] = interval_hull(project(z, *dims));
  return j;
}

}  // namespace

nlohmann::json verdict_to_json(const Verdict& v, bool include_timings) {
  nlohmann::json j{{"result", to_string(v.result)},
                   {"direction", to_string(v.direction)},
                   {"bound_method", to_string(v.bound_method)}};
  if (v.proxy_output_set) j["proxy_output_set"] = set_report(*v.proxy_output_set, v.output_dims);
  if (v.expanded_set) j["expanded_set"] = set_report(*v.expanded_set, v.output_dims);
  if (v.error_bound) j["error_bound"] = *v.error_bound;
  if (v.comparison) j["comparison"] = *v.comparison;
  j["tube_stats"] = {{"n_segments", v.tube_stats.n_segments}};
  if (v.tube_stats.hull) j["tube_stats"]["hull"] = *v.tube_stats.hull;
  if (v.diagnostic) j["diagnostic"] = *v.diagnostic;
  j["enclosure_failure"] = v.enclosure_failure;
  if (include_timings) j["timings"] = v.timings;
  return j;
}

void to_json(nlohmann::json& j, const SoundnessReport& r) {
  j = nlohmann::json{{"samples", r.samples}, {"violations", r.violations}, {"max_excess", r.max_excess}};
}

}  // namespace proxyreach
