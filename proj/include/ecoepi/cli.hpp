#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ecoepi/experiments.hpp"
#include "ecoepi/json_format.hpp"
#include "ecoepi/model_io.hpp"
#include "ecoepi/svg.hpp"
#include "ecoepi/thresholds.hpp"
#include "ecoepi/validation.hpp"

namespace ecoepi::cli {

enum ExitCode : int { Ok = 0, ValidationFailed = 1, NumericFailure = 2, Usage = 64 };

/// Malformed command-line configuration (exit 64).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ModelOptions {
  std::string model_path;
  int example = 0;
  std::optional<double> beta0;
  std::string parameter_source = "prose";
};

struct NumericOptions {
  std::optional<double> rel_tol, abs_tol, max_step;
  std::optional<double> burn_in, match_tol, max_horizon;
  std::optional<double> lambda, tail_windows, L;
  std::optional<std::size_t> steps_per_window;
  std::size_t depth = 2;
  bool no_verify = false;
};

struct CliConfig {
  std::string subcommand;
  ModelOptions model;
  NumericOptions numeric;
  std::string out_dir;
  double horizon = 200.0;
  std::size_t jobs = 0;
  double csv_step = 0.1;
  std::vector<std::string> ics;
  std::string sweep_parameter;
  double sweep_from = 0.0, sweep_to = 0.0;
  std::size_t sweep_count = 0;
};

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

inline std::filesystem::path prepare_out(const std::string& dir) {
  std::filesystem::path p = dir.empty() ? "." : dir;
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec || !std::filesystem::is_directory(p)) throw ConfigError("output directory '" + p.string() + "' is not writable");
  return p;
}

inline json model_document(const ModelOptions& o) {
  if (o.model_path.empty() == (o.example == 0))
    throw ConfigError("give exactly one of --model <path> or --example <1..4>");
  if (!o.model_path.empty()) {
    std::ifstream in(o.model_path);
    if (!in) throw ConfigError("cannot open model file '" + o.model_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      return json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw ModelFormatError(std::string("model JSON: ") + e.what());
    }
  }
  const auto src = parse_parameter_source(o.parameter_source);
  return model_to_json(example_model(o.example, 0.1, src));
}

inline EcoEpiModel build_model(const ModelOptions& o, const json& doc) {
  EcoEpiModel m = model_from_json(doc);
  if (o.beta0) {
    if (!(*o.beta0 >= 0.0)) throw ConfigError("--beta0 must be >= 0");
    m.beta = m.beta.with_scale(*o.beta0);
  } else if (o.example != 0) {
    throw ConfigError("--example needs --beta0");
  }
  return m;
}

inline EcoEpiModel load(const ModelOptions& o) { return build_model(o, model_document(o)); }

inline ThresholdConfig threshold_config(const NumericOptions& n) {
  ThresholdConfig cfg;
  auto& ctl = cfg.convergence;
  if (n.rel_tol) ctl.integration.rel_tol = *n.rel_tol;
  if (n.abs_tol) ctl.integration.abs_tol = *n.abs_tol;
  if (n.max_step) ctl.integration.max_step = *n.max_step;
  if (n.burn_in) {
    ctl.burn_in = *n.burn_in;
    ctl.burn_in_periods = 0.0;
  }
  if (n.match_tol) ctl.match_tol = *n.match_tol;
  if (n.max_horizon) ctl.max_horizon = *n.max_horizon;
  cfg.lambda = n.lambda;
  if (n.tail_windows) cfg.tail_windows = *n.tail_windows;
  if (n.steps_per_window) cfg.steps_per_window = *n.steps_per_window;
  cfg.depth = n.depth;
  cfg.L = n.L;
  cfg.verify = !n.no_verify;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(ctl.integration.rel_tol > 0.0) || !(ctl.integration.abs_tol > 0.0) || !(ctl.integration.max_step > 0.0))
    throw ConfigError("tolerances and max step must be > 0");
  return cfg;
}

inline State<3> parse_ic(const std::string& s) {
  State<3> y{};
  std::stringstream ss(s);
  std::string part;
  std::size_t k = 0;
  while (std::getline(ss, part, ',')) {
    if (k >= 3) throw ConfigError("initial condition '" + s + "' needs exactly three values");
    try {
      std::size_t used = 0;
      y[k] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("initial condition '" + s + "' is not numeric");
    }
    if (!(y[k] >= 0.0)) throw ConfigError("initial condition components must be >= 0");
    ++k;
  }
  if (k != 3) throw ConfigError("initial condition '" + s + "' needs exactly three values");
  return y;
}

inline json campaign_json(const CampaignResult& c) {
  json j;
  j["model"] = c.model;
  j["empirical"] = empirical_name(c.empirical);
  j["agreement"] = c.agreement;
  j["runs"] = json::array();
  for (const auto& r : c.runs) {
    json e{{"ic", r.ic},
           {"ok", r.ok},
           {"tail_min_I", r.tail_min_I},
           {"tail_max_I", r.tail_max_I},
           {"tail_max_S_plus_I", r.tail_max_SI},
           {"tail_max_P", r.tail_max_P},
           {"final_state", r.final_state},
           {"empirical", empirical_name(r.empirical)}};
    if (!r.error.empty()) e["error"] = r.error;
    j["runs"].push_back(e);
  }
  j["thresholds"] = c.report ? c.report->to_json() : json(nullptr);
  return j;
}

inline void export_run(const IcOutcome& r, std::size_t index, double step, const std::filesystem::path& dir,
                       const std::string& title) {
  if (!r.trajectory) return;
  const auto& tr = *r.trajectory;
  static const std::vector<std::string> names{"S", "I", "P"};
  std::ostringstream csv;
  tr.write_csv(csv, names, step);
  write_file(dir / ("trajectory_" + std::to_string(index) + ".csv"), csv.str());
  PlotData d;
  d.title = title;
  const auto n = static_cast<std::size_t>(std::floor((tr.t_end() - tr.t_begin()) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) d.times.push_back(tr.t_begin() + step * static_cast<double>(i));
  for (std::size_t c = 0; c < 3; ++c) {
    PlotSeries s{names[c], {}};
    for (double t : d.times) s.values.push_back(tr.sample(std::min(t, tr.t_end()))[c]);
    d.series.push_back(std::move(s));
  }
  emit_plot(d, (dir / ("plot_" + std::to_string(index) + ".svg")).string());
}

inline int cmd_simulate(const CliConfig& c, std::ostream& out) {
  const auto m = load(c.model);
  const auto dir = prepare_out(c.out_dir);
  std::vector<State<3>> ics;
  for (const auto& s : c.ics) ics.push_back(parse_ic(s));
  if (ics.empty()) ics = default_initial_conditions();
  CampaignOptions opt;
  opt.horizon = c.horizon;
  opt.thresholds = false;
  opt.keep_trajectories = true;
  const auto cfg = threshold_config(c.numeric);
  opt.integration.rel_tol = c.numeric.rel_tol.value_or(opt.integration.rel_tol);
  opt.integration.abs_tol = c.numeric.abs_tol.value_or(opt.integration.abs_tol);
  opt.integration.max_step = c.numeric.max_step.value_or(opt.integration.max_step);
  const auto camp = run_campaign(m, ics, cfg, opt);
  bool failed = false;
  for (std::size_t k = 0; k < camp.runs.size(); ++k) {
    const auto& r = camp.runs[k];
    out << "ic " << k << " (" << r.ic[0] << ", " << r.ic[1] << ", " << r.ic[2] << "): ";
    if (!r.ok) {
      out << "error: " << r.error << '\n';
      failed = true;
      continue;
    }
    out << "tail I in [" << r.tail_min_I << ", " << r.tail_max_I << "] -> " << empirical_name(r.empirical) << '\n';
    export_run(r, k, c.csv_step, dir, m.name + " ic " + std::to_string(k));
  }
  write_file(dir / "simulation.json", dump_json(campaign_json(camp)) + "\n");
  return failed ? NumericFailure : Ok;
}

inline int cmd_thresholds(const CliConfig& c, std::ostream& out) {
  const auto m = load(c.model);
  const auto rep = classify(m, threshold_config(c.numeric));
  out << rep.to_text();
  if (!c.out_dir.empty()) write_file(prepare_out(c.out_dir) / "thresholds.json", dump_json(rep.to_json()) + "\n");
  for (const auto& g : rep.gates)
    if (!g.passed && (g.name.find("attractivity") != std::string::npos)) return NumericFailure;
  return Ok;
}

inline int cmd_classify(const CliConfig& c, std::ostream& out) {
  const auto m = load(c.model);
  CampaignOptions opt;
  opt.horizon = c.horizon;
  const auto camp = run_campaign(m, threshold_config(c.numeric), opt);
  out << camp.report->to_text();
  out << "simulation: " << empirical_name(camp.empirical) << "\n";
  for (const auto& r : camp.runs)
    out << "  ic (" << r.ic[0] << ", " << r.ic[1] << ", " << r.ic[2] << "): "
        << (r.ok ? empirical_name(r.empirical) : ("error: " + r.error).c_str()) << '\n';
  out << "agreement: " << (camp.agreement ? "yes" : "no") << '\n';
  if (!c.out_dir.empty()) write_file(prepare_out(c.out_dir) / "classify.json", dump_json(campaign_json(camp)) + "\n");
  return Ok;
}

inline int cmd_sweep(const CliConfig& c, std::ostream& out) {
  if (c.sweep_count < 2) throw ConfigError("--count must be >= 2");
  if (c.sweep_parameter.empty()) throw ConfigError("--parameter is required");
  json::json_pointer ptr;
  try {
    ptr = json::json_pointer(c.sweep_parameter);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("--parameter: ") + e.what());
  }
  json doc = model_document(c.model);
  // Apply the beta0 override first so a sweep over /beta/base starts from it.
  if (c.model.beta0) doc = model_to_json(build_model(c.model, doc));
  else if (c.model.example != 0) throw ConfigError("--example needs --beta0");
  if (!doc.contains(ptr) || !doc.at(ptr).is_number())
    throw ConfigError("--parameter '" + c.sweep_parameter + "' does not name a number in the model");
  const auto cfg = threshold_config(c.numeric);
  const auto dir = prepare_out(c.out_dir);

  struct Point {
    double value = 0.0;
    std::optional<ThresholdReport> report;
    std::string error;
    bool numeric_error = false;
  };
  std::vector<Point> pts(c.sweep_count);
  std::vector<EcoEpiModel> models;
  for (std::size_t i = 0; i < c.sweep_count; ++i) {
    pts[i].value = c.sweep_from + (c.sweep_to - c.sweep_from) * static_cast<double>(i) /
                                      static_cast<double>(c.sweep_count - 1);
    json d = doc;
    d[ptr] = pts[i].value;
    models.push_back(model_from_json(d));
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < pts.size();) {
      try {
        pts[i].report = classify(models[i], cfg);
      } catch (const std::exception& e) {
        pts[i].error = e.what();
        pts[i].numeric_error = true;
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(
      1, std::min(c.jobs ? c.jobs : std::max<std::size_t>(1, std::thread::hardware_concurrency()), pts.size()));
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "index," << c.sweep_parameter << ",R_upper,R_lower,classification\n";
  json j;
  j["parameter"] = c.sweep_parameter;
  j["points"] = json::array();
  bool any_error = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    auto f = [](const std::optional<double>& v) { return v ? Trajectory<1>::format_double(*v) : std::string(); };
    const std::string cls = p.report ? classification_name(p.report->classification) : "error";
    csv << i << ',' << Trajectory<1>::format_double(p.value) << ',' << (p.report ? f(p.report->R_upper) : "")
        << ',' << (p.report ? f(p.report->R_lower) : "") << ',' << cls << '\n';
    json e{{"index", i}, {"value", p.value}, {"classification", cls}};
    e["report"] = p.report ? p.report->to_json() : json(nullptr);
    if (!p.error.empty()) e["error"] = p.error;
    j["points"].push_back(e);
    write_file(dir / ("sweep_" + std::to_string(i) + ".json"), dump_json(e) + "\n");
    any_error = any_error || p.numeric_error;
    out << i << "  " << p.value << "  " << cls << '\n';
  }
  write_file(dir / "sweep.csv", csv.str());
  write_file(dir / "sweep.json", dump_json(j) + "\n");
  return any_error ? NumericFailure : Ok;
}

inline int cmd_reproduce(const CliConfig& c, std::ostream& out) {
  const auto dir = prepare_out(c.out_dir);
  CampaignOptions opt;
  opt.horizon = c.horizon;
  const auto rep = reproduce_paper(threshold_config(c.numeric), opt);
  const auto table = rep.to_table();
  out << table;
  write_file(dir / "reproduction_report.json", dump_json(rep.to_json()) + "\n");
  write_file(dir / "reproduction_table.txt", table);
  return Ok;
}

inline int cmd_validate(const CliConfig& c, std::ostream& out) {
  const auto m = load(c.model);
  const auto rep = validate_hypotheses(m);
  for (const auto& chk : rep.checks) {
    out << (chk.passed ? "  pass  " : "  FAIL  ") << chk.name;
    if (!chk.passed) out << "  (worst " << chk.worst << (chk.where.empty() ? "" : " at " + chk.where) << ")";
    out << '\n';
  }
  const bool ok = rep.standing_hypotheses_hold();
  out << (ok ? "standing hypotheses hold\n" : "standing hypotheses violated\n");
  return ok ? Ok : ValidationFailed;
}

}  // namespace detail

/// Parse and execute one command line. Never throws.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Threshold analysis for eco-epidemiological predator-prey models", "ecoepi"};
  app.require_subcommand(1, 1);
  CliConfig c;

  auto add_model = [&](CLI::App* s) {
    s->add_option("--model", c.model.model_path, "Model JSON file");
    s->add_option("--example", c.model.example, "Built-in example 1..4 (needs --beta0)")->check(CLI::Range(1, 4));
    s->add_option("--beta0", c.model.beta0, "Override the transmission scale");
    s->add_option("--parameter-source", c.model.parameter_source, "prose|displayed (examples 3, 4)")
        ->check(CLI::IsMember({"prose", "displayed"}));
  };
  auto add_numeric = [&](CLI::App* s) {
    auto& n = c.numeric;
    s->add_option("--lambda", n.lambda, "Window length (default: common period)");
    s->add_option("--depth", n.depth, "Refinement depth")->check(CLI::PositiveNumber);
    s->add_option("--tail-windows", n.tail_windows, "Tail length in windows (>= 10)");
    s->add_option("--steps-per-window", n.steps_per_window, "Quadrature steps per window (even)");
    s->add_option("--L", n.L, "Absorbing bound for the refined chain");
    s->add_option("--rel-tol", n.rel_tol, "Integrator relative tolerance");
    s->add_option("--abs-tol", n.abs_tol, "Integrator absolute tolerance");
    s->add_option("--max-step", n.max_step, "Integrator maximum step");
    s->add_option("--burn-in", n.burn_in, "Attractor burn-in time");
    s->add_option("--match-tol", n.match_tol, "Attractor match tolerance");
    s->add_option("--max-horizon", n.max_horizon, "Attractor search horizon");
    s->add_flag("--no-verify", n.no_verify, "Skip attractivity probes");
  };

  auto* sim = app.add_subcommand("simulate", "Integrate the full model and export CSV/SVG");
  add_model(sim);
  add_numeric(sim);
  sim->add_option("--horizon", c.horizon, "Final time")->check(CLI::PositiveNumber);
  sim->add_option("--out", c.out_dir, "Output directory");
  sim->add_option("--ic", c.ics, "Initial condition S,I,P (repeatable)");
  sim->add_option("--csv-step", c.csv_step, "CSV and plot sampling step")->check(CLI::PositiveNumber);

  auto* thr = app.add_subcommand("thresholds", "Compute threshold numbers and classify");
  add_model(thr);
  add_numeric(thr);
  thr->add_option("--out", c.out_dir, "Write thresholds.json here");

  auto* cls = app.add_subcommand("classify", "Thresholds plus simulation cross-check");
  add_model(cls);
  add_numeric(cls);
  cls->add_option("--horizon", c.horizon, "Simulation horizon")->check(CLI::PositiveNumber);
  cls->add_option("--out", c.out_dir, "Write classify.json here");

  auto* swp = app.add_subcommand("sweep", "Classify over a range of one model parameter");
  add_model(swp);
  add_numeric(swp);
  swp->add_option("--parameter", c.sweep_parameter, "JSON pointer into the model, e.g. /beta/base")->required();
  swp->add_option("--from", c.sweep_from, "First value")->required();
  swp->add_option("--to", c.sweep_to, "Last value")->required();
  swp->add_option("--count", c.sweep_count, "Number of points (>= 2)")->required();
  swp->add_option("--jobs", c.jobs, "Concurrent points (default: hardware threads)");
  swp->add_option("--out", c.out_dir, "Output directory");

  auto* rep = app.add_subcommand("reproduce-paper", "Run the four published examples");
  add_numeric(rep);
  rep->add_option("--horizon", c.horizon, "Simulation horizon")->check(CLI::PositiveNumber);
  rep->add_option("--out", c.out_dir, "Output directory");
  rep->add_option("--jobs", c.jobs, "Unused; scenarios always run concurrently");

  auto* val = app.add_subcommand("validate", "Check the standing hypotheses on a model");
  add_model(val);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return Usage;
  }

  c.subcommand = app.get_subcommands().front()->get_name();
  try {
    if (sim->parsed()) return detail::cmd_simulate(c, out);
    if (thr->parsed()) return detail::cmd_thresholds(c, out);
    if (cls->parsed()) return detail::cmd_classify(c, out);
    if (swp->parsed()) return detail::cmd_sweep(c, out);
    if (rep->parsed()) return detail::cmd_reproduce(c, out);
    if (val->parsed()) return detail::cmd_validate(c, out);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return NumericFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return Usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return NumericFailure;
  }
  return Usage;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args));
}

}  // namespace ecoepi::cli
