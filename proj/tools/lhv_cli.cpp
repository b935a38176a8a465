// Command-line front end: loads and emits model files, runs property
// suites and the decomposition / dynamics commands, and renders reports in
// a machine-readable JSON form and a human-readable table, with identical
// verdicts and numbers in both.

#include "lhv/behavior.hpp"
#include "lhv/dynamics.hpp"
#include "lhv/errors.hpp"
#include "lhv/feasibility.hpp"
#include "lhv/io.hpp"
#include "lhv/model.hpp"
#include "lhv/properties.hpp"
#include "lhv/scenarios.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr const char* kVersion = "0.1.0";

using lhv::json;

struct GlobalOptions {
  std::string format = "text";
  std::string out;
  double tol = 1e-9;
  std::uint64_t seed = 1;
};

json witness_to_json(const lhv::Witness& w) {
  json j;
  if (w.x) j["x"] = *w.x;
  if (w.x_alt) j["x_alt"] = *w.x_alt;
  if (w.y) j["y"] = *w.y;
  if (w.y_alt) j["y_alt"] = *w.y_alt;
  if (w.lambda) j["lambda"] = *w.lambda;
  if (w.a) j["a"] = *w.a;
  if (w.b) j["b"] = *w.b;
  return j;
}

json report_to_json(const lhv::PropertyReport& r) {
  json j;
  j["property"] = lhv::to_string(r.property);
  j["holds"] = r.holds;
  j["max_violation"] = r.max_violation;
  j["tolerance"] = r.tolerance_used;
  if (r.witness) j["witness"] = witness_to_json(*r.witness);
  return j;
}

std::string witness_to_text(const lhv::Witness& w) {
  std::ostringstream out;
  auto put = [&](const char* name, const std::optional<std::string>& v) {
    if (v) out << ' ' << name << '=' << *v;
  };
  put("x", w.x);
  put("x'", w.x_alt);
  put("y", w.y);
  put("y'", w.y_alt);
  put("lambda", w.lambda);
  put("a", w.a);
  put("b", w.b);
  return out.str();
}

/// Accumulates one command's report; renders to JSON or text on demand.
class Report {
 public:
  Report(std::string command_echo, const GlobalOptions& global)
      : command_(std::move(command_echo)), global_(global) {
    tolerances_.tau_prop = global.tol;
  }

  lhv::ToleranceConfig tolerances() const { return tolerances_; }

  void set_input(const std::string& path, const std::string& bytes) {
    input_path_ = path;
    input_digest_ = lhv::content_digest(bytes);
  }

  void add_parameter(const std::string& key, json value) { parameters_[key] = std::move(value); }
  void add_check(const lhv::PropertyReport& r) { checks_.push_back(r); }
  void set_result(json result) { result_ = std::move(result); }

  /// Exit code 1 when any recorded check fails, else 0; callers may force
  /// a failing verdict for non-check outcomes (infeasible, not found).
  void force_fail() { forced_fail_ = true; }

  int exit_code() const {
    if (forced_fail_) return 1;
    for (const auto& c : checks_) {
      if (!c.holds) return 1;
    }
    return 0;
  }

  json to_json() const {
    json j;
    j["tool"] = "lhv";
    j["version"] = kVersion;
    j["command"] = command_;
    if (!input_path_.empty()) {
      j["input"] = json{{"path", input_path_}, {"digest", input_digest_}};
    }
    j["tolerances"] = json{{"tau_norm", tolerances_.tau_norm},
                           {"tau_prop", tolerances_.tau_prop},
                           {"tau_support", tolerances_.tau_support}};
    if (!parameters_.empty()) j["parameters"] = parameters_;
    if (!checks_.empty()) {
      json arr = json::array();
      for (const auto& c : checks_) arr.push_back(report_to_json(c));
      j["checks"] = arr;
    }
    if (!result_.empty()) j["result"] = result_;
    j["overall"] = exit_code() == 0 ? "pass" : "fail";
    j["exit_code"] = exit_code();
    return j;
  }

  std::string to_text() const {
    std::ostringstream out;
    out << "lhv " << kVersion << " — " << command_ << '\n';
    if (!input_path_.empty()) {
      out << "input: " << input_path_ << " (" << input_digest_ << ")\n";
    }
    out << "tolerances: tau_norm=" << lhv::format_number(tolerances_.tau_norm)
        << " tau_prop=" << lhv::format_number(tolerances_.tau_prop)
        << " tau_support=" << lhv::format_number(tolerances_.tau_support) << '\n';
    if (!parameters_.empty()) out << "parameters: " << parameters_.dump() << '\n';
    if (!checks_.empty()) {
      out << "checks:\n";
      for (const auto& c : checks_) {
        out << "  " << lhv::to_string(c.property) << ": " << (c.holds ? "pass" : "FAIL")
            << " max_violation=" << lhv::format_number(c.max_violation)
            << " tolerance=" << lhv::format_number(c.tolerance_used);
        if (c.witness) out << " witness:" << witness_to_text(*c.witness);
        out << '\n';
      }
    }
    if (!result_.empty()) out << "result: " << result_.dump() << '\n';
    out << "overall: " << (exit_code() == 0 ? "pass" : "FAIL") << '\n';
    return out.str();
  }

  int emit() const {
    std::string rendered = global_.format == "json" ? to_json().dump(2) + "\n" : to_text();
    if (global_.out.empty()) {
      std::cout << rendered;
    } else {
      std::ofstream f(global_.out, std::ios::binary);
      if (!f) lhv::fail(lhv::ErrorCode::BadParams, "cannot write '" + global_.out + "'");
      f << rendered;
    }
    return exit_code();
  }

 private:
  std::string command_;
  GlobalOptions global_;
  lhv::ToleranceConfig tolerances_;
  std::string input_path_;
  std::string input_digest_;
  json parameters_ = json::object();
  std::vector<lhv::PropertyReport> checks_;
  json result_ = json::object();
  bool forced_fail_ = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) lhv::fail(lhv::ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string token;
  while (std::getline(in, token, ',')) out.push_back(token);
  return out;
}

lhv::RelabelMap parse_relabel(const lhv::ScenarioShape& shape, const std::string& spec) {
  if (spec == "identity") return lhv::RelabelMap::identity(shape);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const std::string& token : split_csv(spec)) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
      lhv::fail(lhv::ErrorCode::BadParams,
                "relabel entries are b:a pairs, got '" + token + "'");
    }
    pairs.emplace_back(token.substr(0, colon), token.substr(colon + 1));
  }
  return lhv::RelabelMap::from_pairs(shape, pairs);
}

// ---------------------------------------------------------------------------
// check

struct CheckOptions {
  std::string path;
  std::string properties;  // comma list, empty = all applicable
  std::string pc_pair;     // "x0,y0" enables the perfect-correlation check
  std::string relabel = "identity";
};

int run_check(const CheckOptions& opt, const GlobalOptions& global,
              const std::string& command_echo) {
  Report report(command_echo, global);
  const lhv::ToleranceConfig tol = report.tolerances();
  const std::string bytes = read_file(opt.path);
  report.set_input(opt.path, bytes);
  const lhv::LoadedModel loaded = lhv::parse_model_json(json::parse(bytes));
  const bool behavior_only = lhv::is_behavior(loaded);

  std::vector<std::string> selected;
  if (opt.properties.empty()) {
    selected = behavior_only
                   ? std::vector<std::string>{"consistency"}
                   : std::vector<std::string>{"consistency", "wl", "oi", "lc", "mi",
                                              "determinism"};
    if (!opt.pc_pair.empty()) selected.push_back("pc");
  } else {
    selected = split_csv(opt.properties);
  }
  report.add_parameter("properties", selected);
  if (!opt.pc_pair.empty()) {
    report.add_parameter("pc_pair", opt.pc_pair);
    report.add_parameter("relabel", opt.relabel);
  }

  auto behavior = [&]() -> lhv::Behavior {
    return behavior_only ? std::get<lhv::Behavior>(loaded)
                         : lhv::aggregate_behavior(std::get<lhv::HiddenVariableModel>(loaded),
                                                   tol);
  };

  for (const std::string& name : selected) {
    if (name == "consistency") {
      report.add_check(behavior_only
                           ? lhv::validate(std::get<lhv::Behavior>(loaded), tol)
                           : lhv::validate(std::get<lhv::HiddenVariableModel>(loaded), tol));
      continue;
    }
    if (name == "pc") {
      if (opt.pc_pair.empty()) {
        lhv::fail(lhv::ErrorCode::BadParams, "property 'pc' needs --pc x0,y0");
      }
      const auto pair = split_csv(opt.pc_pair);
      if (pair.size() != 2) {
        lhv::fail(lhv::ErrorCode::BadParams, "--pc expects two setting labels");
      }
      const lhv::Behavior b = behavior();
      report.add_check(lhv::check_perfect_correlation(
          b, pair[0], pair[1], parse_relabel(b.shape(), opt.relabel), tol));
      continue;
    }
    if (behavior_only) {
      lhv::fail(lhv::ErrorCode::UnknownProperty,
                "property '" + name + "' needs hidden-variable structure; the file is a "
                "behavior");
    }
    const lhv::HiddenVariableModel& model = std::get<lhv::HiddenVariableModel>(loaded);
    if (name == "wl") {
      report.add_check(lhv::check_weak_locality(model, tol));
    } else if (name == "oi") {
      report.add_check(lhv::check_outcome_independence(model, tol));
    } else if (name == "lc") {
      report.add_check(lhv::check_local_causality(model, tol));
    } else if (name == "mi") {
      report.add_check(lhv::check_measurement_independence(model, tol));
    } else if (name == "determinism") {
      report.add_check(lhv::check_determinism(model, tol));
    } else {
      lhv::fail(lhv::ErrorCode::UnknownProperty, "unknown property '" + name + "'");
    }
  }
  return report.emit();
}

// ---------------------------------------------------------------------------
// scenario

struct ScenarioOptions {
  std::string name;
  int n = 2;
  std::string dirs = "z,x";
  std::string dirs_a;
  std::string dirs_b;
};

int run_scenario(const ScenarioOptions& opt, const GlobalOptions& global) {
  const std::string dirs_a = opt.dirs_a.empty() ? opt.dirs : opt.dirs_a;
  const std::string dirs_b = opt.dirs_b.empty() ? opt.dirs : opt.dirs_b;
  lhv::LoadedModel out = [&]() -> lhv::LoadedModel {
    if (opt.name == "prop1") return lhv::make_prop1_counterexample(opt.n);
    if (opt.name == "singlet") {
      return lhv::make_singlet_behavior(lhv::DirectionSet::parse(dirs_a),
                                        lhv::DirectionSet::parse(dirs_b));
    }
    if (opt.name == "example1") {
      return lhv::make_example1_model(lhv::DirectionSet::parse(dirs_a),
                                      lhv::DirectionSet::parse(dirs_b));
    }
    if (opt.name == "example2") return lhv::make_example2_model(lhv::DirectionSet::parse(dirs_a));
    if (opt.name == "box") return lhv::make_einstein_box_model();
    lhv::fail(lhv::ErrorCode::UnknownScenario, "unknown scenario '" + opt.name + "'");
  }();
  if (global.out.empty()) {
    std::cout << lhv::to_json(out).dump(2) << '\n';
  } else {
    lhv::save_model_file(global.out, out);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// feasible / chsh

struct FeasibleOptions {
  std::string path;
  std::string form = "local";
  std::string chsh;  // "x,x',y,y'" switches to the functional evaluation
  int grid_steps = 101;
  double tol = 1e-8;
};

int run_feasible(const FeasibleOptions& opt, const GlobalOptions& global,
                 const std::string& command_echo) {
  Report report(command_echo, global);
  const std::string bytes = read_file(opt.path);
  report.set_input(opt.path, bytes);
  const lhv::LoadedModel loaded = lhv::parse_model_json(json::parse(bytes));
  const lhv::Behavior behavior =
      lhv::is_behavior(loaded)
          ? std::get<lhv::Behavior>(loaded)
          : lhv::aggregate_behavior(std::get<lhv::HiddenVariableModel>(loaded));

  if (!opt.chsh.empty()) {
    const auto s = split_csv(opt.chsh);
    if (s.size() != 4) {
      lhv::fail(lhv::ErrorCode::BadParams, "--chsh expects x,x',y,y'");
    }
    report.add_parameter("settings", s);
    const double value = lhv::chsh_value(behavior, s[0], s[1], s[2], s[3]);
    report.set_result(json{{"S", value}, {"abs_S", std::abs(value)}});
    return report.emit();
  }

  report.add_parameter("form", opt.form);
  report.add_parameter("tol", opt.tol);
  if (opt.form == "local") {
    const lhv::LocalDecompositionResult r = lhv::local_decomposition(behavior, opt.tol);
    json result;
    result["feasible"] = r.feasible;
    if (r.feasible) {
      result["residual"] = r.decomposition->residual;
      const auto strategies = lhv::enumerate_deterministic_strategies(behavior.shape());
      json weights = json::array();
      const lhv::ScenarioShape& sh = behavior.shape();
      for (std::size_t i = 0; i < strategies.size(); ++i) {
        if (r.decomposition->weights[i] <= 1e-12) continue;
        json entry;
        json fa, fb;
        for (Eigen::Index x = 0; x < sh.num_settings_a(); ++x) {
          fa[sh.settings_a().label(x)] =
              sh.outcomes_a().label(strategies[i].outcome_a[static_cast<std::size_t>(x)]);
        }
        for (Eigen::Index y = 0; y < sh.num_settings_b(); ++y) {
          fb[sh.settings_b().label(y)] =
              sh.outcomes_b().label(strategies[i].outcome_b[static_cast<std::size_t>(y)]);
        }
        entry["f_a"] = fa;
        entry["f_b"] = fb;
        entry["weight"] = r.decomposition->weights[i];
        weights.push_back(entry);
      }
      result["weights"] = weights;
    } else {
      const lhv::BellCertificate& cert = *r.certificate;
      json coeffs;
      const lhv::ScenarioShape& sh = behavior.shape();
      for (Eigen::Index x = 0; x < sh.num_settings_a(); ++x) {
        for (Eigen::Index y = 0; y < sh.num_settings_b(); ++y) {
          for (Eigen::Index a = 0; a < sh.num_outcomes_a(); ++a) {
            for (Eigen::Index b = 0; b < sh.num_outcomes_b(); ++b) {
              coeffs[sh.settings_a().label(x) + "|" + sh.settings_b().label(y) + "|" +
                     sh.outcomes_a().label(a) + "|" + sh.outcomes_b().label(b)] =
                  cert.coefficients(x, y, a, b);
            }
          }
        }
      }
      result["certificate"] = json{{"behavior_value", cert.behavior_value},
                                   {"local_bound", cert.local_bound},
                                   {"gap", cert.gap},
                                   {"coefficients", coeffs}};
      report.force_fail();
    }
    report.set_result(result);
    return report.emit();
  }
  if (opt.form == "oneway") {
    report.add_parameter("grid_steps", opt.grid_steps);
    report.add_parameter("seed", global.seed);
    const lhv::OneWaySearchResult r =
        lhv::search_oneway_single_lambda(behavior, opt.grid_steps, opt.tol, global.seed);
    json result;
    result["found"] = r.found;
    result["residual"] = r.residual;
    result["note"] = r.note;
    if (r.found) {
      const lhv::OneWayDecomposition& d = r.decomposition;
      const lhv::ScenarioShape& sh = d.shape;
      json factors;
      factors["w_ab"] = d.w_ab(0);
      factors["w_ba"] = 1.0 - d.w_ab(0);
      json pax, pbay, pabx, pby;
      for (Eigen::Index x = 0; x < sh.num_settings_a(); ++x) {
        for (Eigen::Index a = 0; a < sh.num_outcomes_a(); ++a) {
          pax[sh.settings_a().label(x) + "|" + sh.outcomes_a().label(a)] = d.p_a_x(0, x, a);
          for (Eigen::Index b = 0; b < sh.num_outcomes_b(); ++b) {
            pabx[sh.outcomes_b().label(b) + "|" + sh.settings_a().label(x) + "|" +
                 sh.outcomes_a().label(a)] = d.p_a_bx(0, x, b, a);
          }
        }
      }
      for (Eigen::Index y = 0; y < sh.num_settings_b(); ++y) {
        for (Eigen::Index b = 0; b < sh.num_outcomes_b(); ++b) {
          pby[sh.settings_b().label(y) + "|" + sh.outcomes_b().label(b)] = d.p_b_y(0, y, b);
          for (Eigen::Index a = 0; a < sh.num_outcomes_a(); ++a) {
            pbay[sh.outcomes_a().label(a) + "|" + sh.settings_b().label(y) + "|" +
                 sh.outcomes_b().label(b)] = d.p_b_ay(0, y, a, b);
          }
        }
      }
      factors["p_a_given_x"] = pax;
      factors["p_b_given_ay"] = pbay;
      factors["p_a_given_bx"] = pabx;
      factors["p_b_given_y"] = pby;
      result["decomposition"] = factors;
    } else {
      report.force_fail();
    }
    report.set_result(result);
    return report.emit();
  }
  lhv::fail(lhv::ErrorCode::BadParams, "--form must be local or oneway");
}

// ---------------------------------------------------------------------------
// dynamics

struct DynamicsOptions {
  double m = 1.0;
  double gamma = 1.0;
  double d = 1.0;
  std::string pause_times = "0";
  double detector = 1.0;
  double horizon = 10.0;
  double h = 1e-4;
  int grid_points = 10000;
  std::string out_prefix = "dynamics";
};

int run_dynamics(const DynamicsOptions& opt, const GlobalOptions& global,
                 const std::string& command_echo) {
  Report report(command_echo, global);
  const lhv::SystemParams params{opt.m, opt.gamma, opt.d};
  params.check();
  if (!(opt.detector > 0.5 * opt.d)) {
    lhv::fail(lhv::ErrorCode::BadParams, "detector distance must exceed d/2");
  }
  if (!(opt.h > 0.0) || !(opt.horizon > 0.0) || opt.grid_points < 2) {
    lhv::fail(lhv::ErrorCode::BadParams, "need positive h, horizon, and >= 2 grid points");
  }
  std::vector<lhv::TrajectoryFamily> families;
  for (const std::string& token : split_csv(opt.pause_times)) {
    families.emplace_back(params, std::stod(token));
  }
  report.add_parameter("m", opt.m);
  report.add_parameter("gamma", opt.gamma);
  report.add_parameter("d", opt.d);
  report.add_parameter("T", opt.pause_times);
  report.add_parameter("L", opt.detector);
  report.add_parameter("horizon", opt.horizon);
  report.add_parameter("h", opt.h);
  report.add_parameter("grid_points", opt.grid_points);
  report.add_parameter("out_prefix", opt.out_prefix);

  constexpr double kDriftTol = 1e-10;
  constexpr double kResidualTol = 1e-6;

  const std::vector<double> grid = lhv::linspace(0.0, opt.horizon, opt.grid_points);
  double max_drift = 0.0;
  double max_residual = 0.0;
  for (std::size_t i = 0; i < families.size(); ++i) {
    const lhv::TrajectoryFamily& fam = families[i];
    const double e0 = lhv::energy(fam, 0.0);
    std::vector<double> residual_grid;
    const double margin = 10.0 * opt.h;
    for (double t : grid) {
      max_drift = std::max(max_drift, std::abs(lhv::energy(fam, t) - e0));
      if (t - opt.h >= 0.0 && std::abs(t - fam.pause_time) >= margin &&
          std::abs(t - (fam.pause_time + fam.tau())) >= margin) {
        residual_grid.push_back(t);
      }
    }
    if (!residual_grid.empty()) {
      max_residual = std::max(max_residual, lhv::ode_residual(fam, residual_grid, opt.h));
    }
    std::ofstream traj(opt.out_prefix + "_family" + std::to_string(i) + ".csv",
                       std::ios::binary);
    if (!traj) lhv::fail(lhv::ErrorCode::BadParams, "cannot write trajectory CSV");
    lhv::write_trajectory_csv(traj, fam, grid);
  }
  const lhv::DetectorSummary summary =
      lhv::simulate_detectors(families, lhv::DetectorConfig{opt.detector}, opt.horizon);
  {
    std::ofstream sf(opt.out_prefix + "_summary.csv", std::ios::binary);
    if (!sf) lhv::fail(lhv::ErrorCode::BadParams, "cannot write summary CSV");
    lhv::write_summary_csv(sf, summary);
  }

  json result;
  result["max_energy_drift"] = max_drift;
  result["energy_drift_tol"] = kDriftTol;
  result["max_ode_residual"] = max_residual;
  result["ode_residual_tol"] = kResidualTol;
  json runs = json::array();
  for (const lhv::DetectionRecord& rec : summary.runs) {
    json r;
    r["T"] = rec.pause_time;
    r["tau"] = rec.tau;
    r["detected"] = rec.detected;
    if (rec.detected) r["t_detect"] = rec.t_right;
    runs.push_back(r);
  }
  result["runs"] = runs;
  result["within_run_agreement"] = summary.within_run_agreement;
  result["detection_time_spread"] = summary.detection_time_spread;
  if (summary.undetected_runs > 0) {
    result["warning"] = "no detection yet for " + std::to_string(summary.undetected_runs) +
                        " run(s) before the horizon";
  }
  report.set_result(result);
  if (max_drift > kDriftTol || max_residual > kResidualTol) report.force_fail();
  return report.emit();
}

std::string echo(int argc, char** argv) {
  std::string out;
  for (int i = 1; i < argc; ++i) {
    if (!out.empty()) out += ' ';
    out += argv[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bell-scenario behaviors and hidden-variable models: property checks, "
               "scenario constructors, local/one-way decompositions, and the classical "
               "indeterministic two-particle system"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--format", global.format, "Report format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--out", global.out, "Write the report (or scenario file) here");
  app.add_option("--tol", global.tol, "Property tolerance (tau_prop)");
  app.add_option("--seed", global.seed, "Seed for randomized searches");

  CheckOptions check_opt;
  CLI::App* check = app.add_subcommand("check", "Validate a model file and check properties");
  check->add_option("path", check_opt.path, "Model or behavior JSON file")->required();
  check->add_option("--properties", check_opt.properties,
                    "Comma list: consistency,wl,oi,lc,mi,determinism,pc (default: all "
                    "applicable)");
  check->add_option("--pc", check_opt.pc_pair, "Setting pair x0,y0 for perfect correlation");
  check->add_option("--relabel", check_opt.relabel,
                    "Outcome relabel for pc: 'identity' or b:a pairs, comma separated");

  ScenarioOptions scen_opt;
  CLI::App* scenario = app.add_subcommand("scenario", "Emit a built-in scenario as a model file");
  scenario->add_option("name", scen_opt.name, "prop1 | singlet | example1 | example2 | box")
      ->required();
  scenario->add_option("--n", scen_opt.n, "Outcome count for prop1");
  scenario->add_option("--dirs", scen_opt.dirs, "Directions for both sides (default z,x)");
  scenario->add_option("--dirs-a", scen_opt.dirs_a, "Directions for side A only");
  scenario->add_option("--dirs-b", scen_opt.dirs_b, "Directions for side B only");

  FeasibleOptions feas_opt;
  CLI::App* feasible = app.add_subcommand(
      "feasible", "Local-polytope membership or one-way decomposition search");
  feasible->add_option("path", feas_opt.path, "Model or behavior JSON file")->required();
  feasible->add_option("--form", feas_opt.form, "local or oneway");
  feasible->add_option("--chsh", feas_opt.chsh, "Evaluate the CHSH functional at x,x',y,y'");
  feasible->add_option("--grid-steps", feas_opt.grid_steps, "w-grid points for oneway");
  feasible->add_option("--tol", feas_opt.tol, "Acceptance residual");

  FeasibleOptions chsh_opt;
  CLI::App* chsh = app.add_subcommand("chsh", "Evaluate the CHSH functional (alias)");
  chsh->add_option("path", chsh_opt.path, "Model or behavior JSON file")->required();
  chsh->add_option("--settings", chsh_opt.chsh, "x,x',y,y'")->required();

  DynamicsOptions dyn_opt;
  CLI::App* dynamics = app.add_subcommand(
      "dynamics", "Simulate the classical indeterministic two-particle system");
  dynamics->add_option("--m", dyn_opt.m, "Particle mass");
  dynamics->add_option("--gamma", dyn_opt.gamma, "Coupling");
  dynamics->add_option("--d", dyn_opt.d, "Interaction cutoff separation");
  dynamics->add_option("--T", dyn_opt.pause_times, "Comma list of pause times");
  dynamics->add_option("--L", dyn_opt.detector, "Detector distance (> d/2)");
  dynamics->add_option("--horizon", dyn_opt.horizon, "Simulation horizon");
  dynamics->add_option("--h", dyn_opt.h, "Finite-difference step");
  dynamics->add_option("--grid-points", dyn_opt.grid_points, "Grid size for drift/CSV");
  dynamics->add_option("--out-prefix", dyn_opt.out_prefix, "Prefix for the CSV files");

  try {
    app.parse(argc, argv);
    const std::string command_echo = echo(argc, argv);
    if (check->parsed()) return run_check(check_opt, global, command_echo);
    if (scenario->parsed()) return run_scenario(scen_opt, global);
    if (feasible->parsed()) return run_feasible(feas_opt, global, command_echo);
    if (chsh->parsed()) {
      if (chsh_opt.chsh.empty()) {
        lhv::fail(lhv::ErrorCode::BadParams, "chsh needs --settings x,x',y,y'");
      }
      return run_feasible(chsh_opt, global, command_echo);
    }
    if (dynamics->parsed()) return run_dynamics(dyn_opt, global, command_echo);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // help/version exit cleanly
  } catch (const lhv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
