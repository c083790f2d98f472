#include "proxyreach/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#include "CLI11.hpp"

namespace proxyreach {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (n_segments < 1) throw std::invalid_argument("--segments must be at least 1");
  if (n_segments > kMaxSegments) throw std::invalid_argument("--segments must be at most " + std::to_string(kMaxSegments));
  if (samples < 1) throw std::invalid_argument("--samples must be at least 1");
  if (error_pieces < 1) throw std::invalid_argument("--error-pieces must be at least 1");
  if (exp_order < 2) throw std::invalid_argument("--order must be at least 2");
}

VerifyConfig RunConfig::verify_config() const {
  VerifyConfig v;
  v.n_segments = n_segments;
  v.error_method = error_method;
  v.bound_method = bound_method;
  v.error_pieces = error_pieces;
  v.reach.max_gens = max_gens;
  v.reach.exp_order = exp_order;
  return v;
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"model", c.model},
                     {"problem", c.problem},
                     {"n_segments", c.n_segments},
                     {"max_gens", c.max_gens},
                     {"error_method", to_string(c.error_method)},
                     {"bound_method", to_string(c.bound_method)},
                     {"direction", c.direction ? nlohmann::json(to_string(*c.direction)) : nlohmann::json()},
                     {"samples", c.samples},
                     {"seed", c.seed},
                     {"exp_order", c.exp_order},
                     {"error_pieces", c.error_pieces}};
}

namespace {

struct Loaded {
  VectorField f;
  SafetyProblem problem;
  RunConfig cfg;
};

Loaded load(const RunConfig& cfg) {
  cfg.validate();
  Loaded l{resolve_model(cfg.model), resolve_problem(cfg.problem), cfg};
  if (cfg.direction) l.problem.direction = *cfg.direction;
  if (l.problem.input_set.dim() != l.f.dim()) {
    throw DimensionError("problem input set has dimension " + std::to_string(l.problem.input_set.dim()) +
                         ", model has " + std::to_string(l.f.dim()));
  }
  if (l.cfg.max_gens == 0) l.cfg.max_gens = default_max_gens(l.f.dim());
  return l;
}

nlohmann::json report_header(const Loaded& l) {
  nlohmann::json j{{"config", l.cfg}, {"problem", l.problem}};
  if (l.cfg.problem == "fpa") {
    j["notes"] = {"input set is the printed two-decimal approximation of the FPA benchmark box"};
  }
  return j;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

void write_bounds_header(std::ostream& out, std::size_t n) {
  for (std::size_t i = 1; i <= n; ++i) out << ",lo" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",hi" << i;
  out << '\n';
}

void write_bounds(std::ostream& out, const Box& b) {
  for (Eigen::Index i = 0; i < b.lo().size(); ++i) out << ',' << b.lo()[i];
  for (Eigen::Index i = 0; i < b.hi().size(); ++i) out << ',' << b.hi()[i];
  out << '\n';
}

Tube build_tube(const Loaded& l) {
  return reach_tube(l.f, l.problem.input_set, 1.0, l.cfg.n_segments, l.cfg.verify_config().reach);
}

fs::path prepare(const fs::path& out) {
  fs::create_directories(out);
  return out;
}

}  // namespace

int cmd_errorbound(const RunConfig& cfg, const fs::path& out) {
  const Loaded l = load(cfg);
  prepare(out);
  const Tube tube = build_tube(l);
  const ErrorBound eps = error_set(l.f, tube, l.cfg.error_method, l.cfg.error_pieces);
  const BoundComparison cmp = sander_bound(l.f, tube, eps);

  nlohmann::json j = report_header(l);
  j["error_bound"] = eps;
  j["comparison"] = cmp;
  j["tube"] = tube;
  write_json(out / "errorbound.json", j);

  const std::size_t n = l.f.dim();
  auto seg = open_csv(out / "segments.csv");
  seg << "segment,t_lo,t_hi";
  write_bounds_header(seg, n);
  for (std::size_t k = 0; k < eps.per_segment.size(); ++k) {
    seg << k << ',' << tube.segments[k].t_lo << ',' << tube.segments[k].t_hi;
    write_bounds(seg, eps.per_segment[k]);
  }
  auto states = open_csv(out / "tube.csv");
  states << "t_lo,t_hi";
  write_bounds_header(states, n);
  for (const Segment& s : tube.segments) {
    states << s.t_lo << ',' << s.t_hi;
    write_bounds(states, s.enclosure);
  }
  return kExitSafe;
}

int cmd_verify(const RunConfig& cfg, const fs::path& out) {
  const Loaded l = load(cfg);
  prepare(out);
  const Verdict v = verify(l.f, l.problem, l.cfg.verify_config());
  nlohmann::json j = report_header(l);
  j["verdict"] = verdict_to_json(v);
  write_json(out / "verdict.json", j);
  if (v.enclosure_failure) return kExitNoEnclosure;
  return v.result == Result::Safe ? kExitSafe : kExitUnknown;
}

int cmd_compare(const RunConfig& cfg, const fs::path& out) {
  const Loaded l = load(cfg);
  prepare(out);
  const Tube tube = build_tube(l);
  const ErrorBound eps = error_set(l.f, tube, l.cfg.error_method, l.cfg.error_pieces);
  const BoundComparison cmp = sander_bound(l.f, tube, eps);

  nlohmann::json j = report_header(l);
  j["comparison"] = cmp;
  j["omega_eps"] = eps.omega_eps;
  write_json(out / "compare.json", j);

  const std::size_t n = l.f.dim();
  const Box norm_cube = Box::cube(n, cmp.set_inf_norm);
  const Box sander_cube = Box::cube(n, cmp.sander_scalar);
  auto csv = open_csv(out / "compare.csv");
  csv << "dim_i,dim_j,set,lo_i,hi_i,lo_j,hi_j\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(k);
      for (const auto& [name, box] : {std::pair<const char*, const Box*>{"omega_eps", &eps.omega_eps},
                                      {"inf_norm_cube", &norm_cube},
                                      {"sander_cube", &sander_cube}}) {
        csv << i + 1 << ',' << k + 1 << ',' << name << ',' << box->lo()[a] << ',' << box->hi()[a] << ','
            << box->lo()[b] << ',' << box->hi()[b] << '\n';
      }
    }
  }
  return kExitSafe;
}

int cmd_sample(const RunConfig& cfg, const fs::path& out) {
  const Loaded l = load(cfg);
  prepare(out);
  const SampleOptions opts{l.cfg.seed, 1e-3};
  const Matrix node = sample_outputs(l.f, l.problem.input_set, l.cfg.samples, ModelKind::Node, opts);
  const Matrix resnet = sample_outputs(l.f, l.problem.input_set, l.cfg.samples, ModelKind::Resnet, opts);

  VerifyConfig vc = l.cfg.verify_config();
  vc.bound_method = BoundMethod::Set;
  const Verdict forward = verify_node_via_resnet(l.f, l.problem, vc);
  const Verdict backward = verify_resnet_via_node(l.f, l.problem, vc);
  if (forward.enclosure_failure || backward.enclosure_failure) {
    throw NoEnclosure(forward.diagnostic.value_or(backward.diagnostic.value_or("no a priori enclosure")));
  }

  const std::size_t n = l.f.dim();
  auto csv = open_csv(out / "samples.csv");
  csv << "model,index";
  for (std::size_t i = 1; i <= n; ++i) csv << ",x" << i;
  csv << '\n';
  for (const auto& [name, m] : {std::pair<const char*, const Matrix*>{"node", &node}, {"resnet", &resnet}}) {
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      csv << name << ',' << r;
      for (Eigen::Index c = 0; c < m->cols(); ++c) csv << ',' << (*m)(r, c);
      csv << '\n';
    }
  }

  const Matrix errors = node - resnet;
  auto outside_safe = [&](const Matrix& pts) {
    std::size_t count = 0;
    for (Eigen::Index r = 0; r < pts.rows(); ++r) {
      Vector y(static_cast<Eigen::Index>(l.problem.output_dims.size()));
      for (std::size_t d = 0; d < l.problem.output_dims.size(); ++d) {
        y[static_cast<Eigen::Index>(d)] = pts(r, static_cast<Eigen::Index>(l.problem.output_dims[d]));
      }
      if (!l.problem.safe_set.contains(y)) ++count;
    }
    return count;
  };

  nlohmann::json j = report_header(l);
  j["node_via_resnet"] = {{"result", to_string(forward.result)},
                          {"node_samples_vs_expanded_set", soundness_report(node, *forward.expanded_set)}};
  j["resnet_via_node"] = {{"result", to_string(backward.result)},
                          {"resnet_samples_vs_expanded_set", soundness_report(resnet, *backward.expanded_set)}};
  j["errors_vs_omega_eps"] = soundness_report(errors, forward.error_bound->omega_eps);
  j["negated_errors_vs_omega_neg_eps"] = soundness_report(Matrix(-errors), backward.error_bound->omega_eps);
  j["outside_safe_set"] = {{"node", outside_safe(node)}, {"resnet", outside_safe(resnet)}};
  write_json(out / "soundness.json", j);
  return kExitSafe;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Set-based error bounds between a neural ODE and its ResNet, and proxy verification"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string out_dir = ".";
  std::string error_method = "meanvalue";
  std::string bound_method = "set";
  std::string direction;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--model", cfg.model, "model JSON file or \"fpa\"")->capture_default_str();
    cmd->add_option("--problem", cfg.problem, "problem JSON file or \"fpa\"")->capture_default_str();
    cmd->add_option("--segments", cfg.n_segments, "tube segments over [0, 1]")->capture_default_str();
    cmd->add_option("--max-gens", cfg.max_gens, "zonotope generator budget (0: 10 n)")->capture_default_str();
    cmd->add_option("--order", cfg.exp_order, "Taylor order of the matrix exponential")->capture_default_str();
    cmd->add_option("--error-method", error_method, "interval|meanvalue")->capture_default_str();
    cmd->add_option("--error-pieces", cfg.error_pieces, "cells per segment for the meanvalue image")
        ->capture_default_str();
    cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
  };

  CLI::App* eb = app.add_subcommand("errorbound", "error set and per-segment boxes");
  common(eb);
  CLI::App* vf = app.add_subcommand("verify", "proxy verification");
  common(vf);
  vf->add_option("--method", bound_method, "set|sander")->capture_default_str();
  vf->add_option("--direction", direction, "node-via-resnet|resnet-via-node (default: from the problem)");
  CLI::App* cp = app.add_subcommand("compare", "set bound against the scalar bound");
  common(cp);
  CLI::App* sp = app.add_subcommand("sample", "sample clouds and soundness counts");
  common(sp);
  sp->add_option("--samples", cfg.samples, "number of sampled inputs")->capture_default_str();
  sp->add_option("--seed", cfg.seed, "random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    cfg.error_method = error_method_from_string(error_method);
    cfg.bound_method = bound_method_from_string(bound_method);
    if (!direction.empty()) cfg.direction = direction_from_string(direction);
    if (*eb) return cmd_errorbound(cfg, out_dir);
    if (*vf) return cmd_verify(cfg, out_dir);
    if (*cp) return cmd_compare(cfg, out_dir);
    return cmd_sample(cfg, out_dir);
  } catch (const NoEnclosure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoEnclosure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace proxyreach
