#include "cli.hpp"

#include "metricfreedom/error.hpp"
#include "metricfreedom/freedom.hpp"
#include "metricfreedom/io.hpp"
#include "metricfreedom/lift.hpp"
#include "metricfreedom/random.hpp"
#include "metricfreedom/records.hpp"
#include "metricfreedom/resample.hpp"
#include "metricfreedom/simlab.hpp"
#include "metricfreedom/svg.hpp"
#include "metricfreedom/theory.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace mf::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Globals {
  std::uint64_t seed = 42;
  std::string output_dir = ".";
  std::string format = "csv";
};

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

class Report {
 public:
  Report(std::string command, const Globals& g) : command_(std::move(command)), globals_(g) {
    doc_["header"] = {{"tool", kToolName},
                      {"version", kToolVersion},
                      {"command", command_},
                      {"seed", g.seed},
                      {"inputs", Json::array()},
                      {"parameters", Json::object()}};
  }

  void input(const std::string& path, std::string_view contents) {
    doc_["header"]["inputs"].push_back({{"path", path}, {"sha256", sha256_hex(contents)}});
  }
  Json& parameters() { return doc_["header"]["parameters"]; }
  Json& summary() { return doc_["summary"]; }

  /// Writes a data file under the output directory and lists it in the report.
  void emit(const std::string& name, std::string_view contents) {
    io::write_file_atomic(fs::path(globals_.output_dir) / name, contents);
    outputs_.push_back(name);
  }

  void finish() {
    doc_["outputs"] = outputs_;
    io::write_file_atomic(fs::path(globals_.output_dir) / (command_ + "_report.json"), doc_.dump(2) + "\n");
  }

 private:
  std::string command_;
  const Globals& globals_;
  Json doc_;
  std::vector<std::string> outputs_;
};

std::string table_text(const Globals& g, const Json& rows, const std::vector<std::string>& columns) {
  if (g.format == "json") return rows.dump(2) + "\n";
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ',';
      const Json& v = row.at(columns[c]);
      if (v.is_null()) continue;
      if (v.is_string()) {
        out << io::csv_field(v.get<std::string>());
      } else if (v.is_boolean()) {
        out << (v.get<bool>() ? "true" : "false");
      } else if (v.is_number_integer()) {
        out << v.dump();
      } else {
        out << io::format_double(v.get<double>());
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string data_name(const Globals& g, const std::string& stem) { return stem + (g.format == "json" ? ".json" : ".csv"); }

// ---- compute-freedom --------------------------------------------------------

struct FreedomArgs {
  std::string input;
  std::string distance = "indicator";
  std::string aggregation = "dataset";
  double alpha = 1.0;
  int bootstrap = 0;
};

Json estimate_row(const std::string& dataset, const FreedomEstimate& e, const DistanceSpec& spec) {
  return Json{{"dataset", dataset},
              {"aggregation", to_string(e.aggregation)},
              {"distance", to_string(spec.kind)},
              {"alpha", spec.alpha},
              {"F", e.F},
              {"r_M", e.r_M},
              {"n_runs", e.n_runs},
              {"n_pairs", e.n_pairs},
              {"questions_used", e.questions_used},
              {"questions_excluded", e.questions_excluded},
              {"sigma_F", optional_json(e.sigma_F)},
              {"ci_low", optional_json(e.ci_low)},
              {"ci_high", optional_json(e.ci_high)},
              {"resamples_used", e.resamples_used},
              {"resamples_skipped", e.resamples_skipped}};
}

int compute_freedom(const Globals& g, const FreedomArgs& a, std::ostream& out, std::ostream& err) {
  const std::string text = io::read_file(a.input);
  std::istringstream stream(text);
  RunSet set = parse_run_records(stream, a.input);
  validate(set);
  const DistanceSpec spec{parse_distance_kind(a.distance), a.alpha};
  const BootstrapConfig boot{a.bootstrap, g.seed};

  std::map<std::string, std::vector<RunRecord>> by_dataset;
  for (const auto& r : set.records) by_dataset[r.dataset_id].push_back(r);

  Report report("compute-freedom", g);
  report.input(a.input, text);
  report.parameters() = {{"distance", to_string(spec.kind)},
                         {"aggregation", a.aggregation},
                         {"alpha", a.alpha},
                         {"bootstrap", a.bootstrap},
                         {"format", g.format}};

  Json rows = Json::array();
  for (const auto& [dataset, runs] : by_dataset) {
    FreedomEstimate est;
    if (a.aggregation == "dataset") {
      est = a.bootstrap > 0 ? bootstrap_freedom(runs, spec, boot) : per_dataset_freedom(runs, spec);
    } else {
      RunSet subset;
      subset.records = runs;
      const auto groups = group_by_question(subset);
      est = a.bootstrap > 0 ? bootstrap_freedom(groups, spec, boot) : per_question_freedom(groups, spec);
      if (est.questions_excluded > 0) {
        err << "warning: dataset " << dataset << ": " << est.questions_excluded
            << " question(s) excluded (uniform scores or degenerate distances)\n";
      }
    }
    out << dataset << ": F = " << io::format_double(est.F);
    if (est.sigma_F) out << " (sigma " << io::format_double(*est.sigma_F) << ")";
    out << '\n';
    rows.push_back(estimate_row(dataset, est, spec));
  }
  if (set.unknown_fields > 0) err << "warning: ignored " << set.unknown_fields << " unknown field(s)\n";

  report.emit(data_name(g, "freedom"),
              table_text(g, rows,
                         {"dataset", "aggregation", "distance", "alpha", "F", "r_M", "n_runs", "n_pairs",
                          "questions_used", "questions_excluded", "sigma_F", "ci_low", "ci_high", "resamples_used",
                          "resamples_skipped"}));
  report.summary() = {{"datasets", rows.size()}};
  report.finish();
  return kOk;
}

// ---- sweep ------------------------------------------------------------------

struct SweepArgs {
  std::string input;
  std::string distance = "indicator";
  double alpha = 1.0;
  std::vector<int> M_list{2, 4, 6, 8, 10};
  std::vector<int> N_list{2, 3, 4, 6, 8, 10, 12};
  double cost_per_run = 0.17;
  int trials = 20;
  std::vector<int> operating_point{6, 6};
};

int sweep(const Globals& g, const SweepArgs& a, std::ostream& out) {
  const std::string text = io::read_file(a.input);
  std::istringstream stream(text);
  RunSet set = parse_run_records(stream, a.input);
  validate(set);
  const DistanceSpec spec{parse_distance_kind(a.distance), a.alpha};
  SweepConfig cfg;
  cfg.M_list = a.M_list;
  cfg.N_list = a.N_list;
  cfg.cost_per_run = a.cost_per_run;
  cfg.trials = a.trials;
  cfg.seed = g.seed;
  const auto cells = budget_sweep(set, spec, cfg);

  Report report("sweep", g);
  report.input(a.input, text);
  report.parameters() = {{"distance", to_string(spec.kind)}, {"alpha", a.alpha},         {"M_list", a.M_list},
                         {"N_list", a.N_list},               {"cost_per_run", a.cost_per_run}, {"trials", a.trials},
                         {"operating_point", a.operating_point}, {"format", g.format}};

  Json rows = Json::array();
  for (const auto& c : cells) {
    rows.push_back({{"M", c.M}, {"N", c.N}, {"F_hat", optional_json(c.F_hat)}, {"cost", c.cost},
                    {"status", to_string(c.status)}});
  }
  if (g.format == "json") {
    report.emit("sweep.json", rows.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    write_sweep_csv(csv, cells);
    report.emit("sweep.csv", csv.str());
  }
  svg::HeatmapOptions options;
  if (a.operating_point.size() == 2) {
    options.operating_point = std::pair{a.operating_point[0], a.operating_point[1]};
  } else {
    options.operating_point.reset();
  }
  report.emit("sweep_heatmap.svg", svg::sweep_heatmap(cells, options));

  Json& summary = report.summary();
  summary["cells"] = cells.size();
  if (options.operating_point) {
    for (const auto& c : cells) {
      if (c.M == options.operating_point->first && c.N == options.operating_point->second) {
        summary["operating_point"] = {{"M", c.M}, {"N", c.N}, {"F_hat", optional_json(c.F_hat)}, {"cost", c.cost}};
        out << "operating point M=" << c.M << " N=" << c.N << ": F_hat = " << io::format_optional(c.F_hat)
            << ", cost = " << io::format_double(c.cost) << '\n';
      }
    }
  }
  report.finish();
  out << cells.size() << " cells written\n";
  return kOk;
}

// ---- lift-correlate ---------------------------------------------------------

struct LiftArgs {
  std::string table;
  int permutations = 9999;
};

int lift_correlate(const Globals& g, const LiftArgs& a, std::ostream& out, std::ostream& err) {
  const std::string text = io::read_file(a.table);
  const LiftInputs inputs = parse_lift_inputs(text);
  const auto rows = build_lift_table(inputs.freedom, inputs.baseline, inputs.skilled);

  Report report("lift-correlate", g);
  report.input(a.table, text);
  report.parameters() = {{"permutations", a.permutations}, {"format", g.format}};

  if (g.format == "json") {
    report.emit("lift_table.json", lift_table_json(rows) + "\n");
  } else {
    std::ostringstream csv;
    write_lift_csv(csv, rows);
    report.emit("lift_table.csv", csv.str());
  }

  std::vector<double> xs, ys;
  std::vector<std::string> labels;
  for (const auto& r : rows) {
    xs.push_back(r.F);
    ys.push_back(r.lift_norm);
    labels.push_back(r.task + " / " + r.dataset + " / " + r.metric);
  }
  Json& summary = report.summary();
  summary["rows"] = rows.size();

  int status = kOk;
  std::optional<LinearFit> fit;
  try {
    const double r = pearson_r(xs, ys);
    const double p = permutation_p(xs, ys, a.permutations, g.seed);
    fit = least_squares_line(xs, ys);
    summary["pearson_r"] = r;
    summary["permutation_p"] = p;
    summary["fit"] = {{"slope", fit->slope}, {"intercept", fit->intercept}};
    out << "r = " << io::format_double(r) << ", p = " << io::format_double(p) << " (n = " << rows.size() << ")\n";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooFewPoints && e.code() != ErrorCode::ConstantSeries) throw;
    summary["pearson_r"] = nullptr;
    summary["error"] = to_string(e.code());
    err << "error: correlation refused: " << e.what() << '\n';
    status = kDegenerate;
  }
  report.emit("lift_scatter.svg", svg::scatter_with_line(xs, ys, labels, fit));
  report.finish();
  return status;
}

// ---- sim-landscape ----------------------------------------------------------

struct LandscapeArgs {
  std::vector<double> targets{0.0, 0.25, 0.5, 0.75};
  simlab::LandscapeConfig cfg;
  double calibration_tol = 0.02;
  bool enforce_k_rule = false;
  std::string support = "equal-width";
};

int sim_landscape(const Globals& g, LandscapeArgs a, std::ostream& out) {
  a.cfg.seed = g.seed;
  a.cfg.support =
      a.support == "proof-literal" ? simlab::SupportConvention::ProofLiteral : simlab::SupportConvention::EqualWidth;
  simlab::check(a.cfg);
  simlab::LandscapeGridOptions options;
  options.calibration_tol = a.calibration_tol;
  options.enforce_frequency_rule = a.enforce_k_rule;
  const auto cells = simlab::landscape_grid(a.targets, a.cfg, options);

  Report report("sim-landscape", g);
  report.parameters() = {{"target_F", a.targets},        {"L0", a.cfg.L0},
                         {"k", a.cfg.k},                 {"W", a.cfg.W},
                         {"n_runs", a.cfg.n_runs},       {"n_eval", a.cfg.n_eval},
                         {"calibration_tol", a.calibration_tol}, {"enforce_k_rule", a.enforce_k_rule},
                         {"support", a.support},         {"format", g.format}};
  bool all_within = true;
  if (g.format == "json") {
    Json rows = Json::array();
    for (const auto& c : cells) {
      const auto& r = c.result;
      rows.push_back({{"target_F", c.target_F}, {"beta", r.beta}, {"k", r.k},
                      {"F_calibrated", c.calibration.achieved_F}, {"F_hat", r.F_hat}, {"lift_hat", r.lift_hat},
                      {"W1_hat", r.W1_hat}, {"lower_bound", r.lower_bound},
                      {"upper_bound_appendix", r.upper_bound_appendix}, {"within_bounds", r.within_bounds}});
    }
    report.emit("landscape.json", rows.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    simlab::write_landscape_csv(csv, cells);
    report.emit("landscape.csv", csv.str());
  }
  for (const auto& c : cells) {
    all_within = all_within && c.result.within_bounds;
    out << "target F " << io::format_double(c.target_F) << ": beta = " << io::format_double(c.result.beta)
        << ", F_hat = " << io::format_double(c.result.F_hat) << ", lift = " << io::format_double(c.result.lift_hat)
        << (c.result.within_bounds ? "" : "  [outside bounds]") << '\n';
  }
  report.summary() = {{"cells", cells.size()}, {"all_within_bounds", all_within}};
  report.finish();
  return kOk;
}

// ---- sim-iterator -----------------------------------------------------------

struct IteratorArgs {
  simlab::IteratorConfig cfg;
  int seeds = 100;
  std::optional<double> p_min;
  double C = 1.0;
};

int sim_iterator(const Globals& g, IteratorArgs a, std::ostream& out) {
  simlab::check(a.cfg);
  if (a.seeds < 1) throw Error(ErrorCode::InvalidArgument, "--seeds must be >= 1");
  theory::PhaseParams phase;
  phase.p_min = a.p_min.value_or(1.0 / a.cfg.n_population);
  phase.gamma = a.cfg.gamma;
  phase.rho = a.cfg.rho;
  phase.D_max = a.cfg.D_max;
  phase.C = a.C;

  std::vector<simlab::Trajectory> trajectories;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, int> counts{{"CONVERGED", 0}, {"OSCILLATED", 0}, {"PLATEAU", 0}, {"BUDGET", 0}};
  for (int s = 0; s < a.seeds; ++s) {
    simlab::IteratorConfig cfg = a.cfg;
    cfg.seed = substream_seed(g.seed, static_cast<std::uint64_t>(s));
    seeds.push_back(cfg.seed);
    trajectories.push_back(simlab::simulate_iterator(cfg));
    ++counts[simlab::to_string(trajectories.back().classification)];
  }
  const bool condition = theory::convergence_condition(phase, a.cfg.lambda);
  const double f_star = theory::critical_freedom(phase);

  Report report("sim-iterator", g);
  report.parameters() = {{"lambda", a.cfg.lambda}, {"rho", a.cfg.rho},   {"gamma", a.cfg.gamma},
                         {"D_max", a.cfg.D_max},   {"n", a.cfg.n_population}, {"T", a.cfg.T},
                         {"seeds", a.seeds},       {"p_min", phase.p_min}, {"C", phase.C},
                         {"format", g.format}};
  if (g.format == "json") {
    Json rows = Json::array();
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
      const auto& tr = trajectories[i];
      rows.push_back({{"seed", seeds[i]},
                      {"classification", simlab::to_string(tr.classification)},
                      {"first_decrease", tr.first_decrease ? Json(*tr.first_decrease) : Json(nullptr)},
                      {"S", tr.S}});
    }
    report.emit("trajectories.json", rows.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    simlab::write_trajectories_csv(csv, trajectories, seeds);
    report.emit("trajectories.csv", csv.str());
  }
  Json count_json = Json::object();
  for (const auto& [name, n] : counts) count_json[name] = n;
  report.summary() = {{"classification_counts", count_json},
                      {"convergence_condition", condition},
                      {"critical_freedom", f_star}};
  report.finish();

  for (const auto& [name, n] : counts) out << name << ": " << n << '\n';
  out << "convergence condition: " << (condition ? "satisfied" : "violated") << '\n';
  out << "critical freedom F* = " << io::format_double(f_star) << '\n';
  return kOk;
}

int exit_code_for(ErrorCode code) {
  if (code == ErrorCode::NoMixedQuestions) return kNoMixedQuestions;
  if (code == ErrorCode::GridUnderfull) return kGridUnderfull;
  if (is_degenerate(code) || code == ErrorCode::ConstantSeries || code == ErrorCode::TooFewPoints ||
      code == ErrorCode::BootstrapCollapse || code == ErrorCode::CalibrationFailed) {
    return kDegenerate;
  }
  return kInputError;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metric freedom: agreement between behavioral and score geometry of repeated agent runs", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--output-dir", g.output_dir, "Directory for output files")->capture_default_str();
  app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  const auto distance_names = CLI::IsMember({"jaccard", "indicator", "token-jaccard", "cosine", "abs"});

  FreedomArgs fa;
  auto* cf = app.add_subcommand("compute-freedom", "Estimate F from a JSON Lines run file");
  cf->fallthrough();
  cf->add_option("--input", fa.input, "Run records (.jsonl)")->required();
  cf->add_option("--distance", fa.distance, "Behavioral distance")->check(distance_names)->capture_default_str();
  cf->add_option("--aggregation", fa.aggregation, "Aggregation mode")
      ->check(CLI::IsMember({"dataset", "question-median"}))
      ->capture_default_str();
  cf->add_option("--alpha", fa.alpha, "Distance exponent in (0, 1]")->capture_default_str();
  cf->add_option("--bootstrap", fa.bootstrap, "Bootstrap resamples (0 disables)")->capture_default_str();

  SweepArgs sa;
  auto* sw = app.add_subcommand("sweep", "F over an (M questions, N runs) budget grid");
  sw->fallthrough();
  sw->add_option("--input", sa.input, "Run records (.jsonl)")->required();
  sw->add_option("--distance", sa.distance, "Behavioral distance")->check(distance_names)->capture_default_str();
  sw->add_option("--alpha", sa.alpha, "Distance exponent in (0, 1]")->capture_default_str();
  sw->add_option("--M-list", sa.M_list, "Question counts")->delimiter(',')->capture_default_str();
  sw->add_option("--N-list", sa.N_list, "Runs per question")->delimiter(',')->capture_default_str();
  sw->add_option("--cost-per-run", sa.cost_per_run, "Cost of one run")->capture_default_str();
  sw->add_option("--trials", sa.trials, "Subsamples per cell")->capture_default_str();
  sw->add_option("--operating-point", sa.operating_point, "Cell to outline as M,N")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();

  LiftArgs la;
  auto* lc = app.add_subcommand("lift-correlate", "Join F with skill lift and correlate");
  lc->fallthrough();
  lc->add_option("--table", la.table, "Lift inputs (.json)")->required();
  lc->add_option("--permutations", la.permutations, "Permutations for the p-value")->capture_default_str();

  LandscapeArgs ls;
  auto* sl = app.add_subcommand("sim-landscape", "Lift on the calibrated extremal landscape");
  sl->fallthrough();
  sl->add_option("--target-F", ls.targets, "Target freedoms")->delimiter(',')->capture_default_str();
  sl->add_option("--L0", ls.cfg.L0, "Lipschitz constant")->capture_default_str();
  sl->add_option("--k", ls.cfg.k, "Scrambler frequency")->capture_default_str();
  sl->add_option("--W", ls.cfg.W, "Support shift")->capture_default_str();
  sl->add_option("--n-runs", ls.cfg.n_runs, "Runs used to estimate F")->capture_default_str();
  sl->add_option("--n-eval", ls.cfg.n_eval, "Samples per distribution")->capture_default_str();
  sl->add_option("--calibration-tol", ls.calibration_tol, "Calibration tolerance on F")->capture_default_str();
  sl->add_flag("--enforce-k-rule", ls.enforce_k_rule, "Raise k to 4 L0 / (beta W^2) after calibration");
  sl->add_option("--support", ls.support, "Support placement")
      ->check(CLI::IsMember({"equal-width", "proof-literal"}))
      ->capture_default_str();

  IteratorArgs ia;
  auto* si = app.add_subcommand("sim-iterator", "Greedy-fix refinement trajectories");
  si->fallthrough();
  si->add_option("--lambda", ia.cfg.lambda, "Collateral strength")->capture_default_str();
  si->add_option("--rho", ia.cfg.rho, "Displaced fraction")->capture_default_str();
  si->add_option("--gamma", ia.cfg.gamma, "Fix size")->capture_default_str();
  si->add_option("--Dmax", ia.cfg.D_max, "Maximum displacement")->capture_default_str();
  si->add_option("--n", ia.cfg.n_population, "Population size")->capture_default_str();
  si->add_option("--T", ia.cfg.T, "Steps")->capture_default_str();
  si->add_option("--seeds", ia.seeds, "Number of seeded trajectories")->capture_default_str();
  si->add_option("--p-min", ia.p_min, "Fix probability floor (default 1/n)");
  si->add_option("--C", ia.C, "Hoelder constant")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*cf) return compute_freedom(g, fa, out, err);
    if (*sw) return sweep(g, sa, out);
    if (*lc) return lift_correlate(g, la, out, err);
    if (*sl) return sim_landscape(g, ls, out);
    if (*si) return sim_iterator(g, ia, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.code() == ErrorCode::NoMixedQuestions) {
      err << "questions whose run scores are all equal (range <= 1e-9) carry no ranking signal and are excluded\n";
    }
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace mf::cli
