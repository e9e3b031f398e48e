// classthresh: per-class alarm thresholds under a global false-alarm budget.
//
// Subcommands:
//   thresholds  estimate score cutoffs and raw thresholds for a rule
//   optimal     LP-optimal alarm mass under a shift/scale alternative
//   evaluate    apply an estimated rule to a screening sample
//   bootstrap   resampling standard errors for the score cutoffs
//   simulate    smoothed-bootstrap screening simulation
//
// Exit codes: 0 success, 2 validation, 3 infeasible/inadmissible, 4 I/O.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "classthresh/csv.hpp"
#include "classthresh/empirical.hpp"
#include "classthresh/errors.hpp"
#include "classthresh/kernels.hpp"
#include "classthresh/report.hpp"
#include "classthresh/simplex.hpp"

namespace ct = classthresh;

namespace {

struct CommonOptions {
  std::vector<std::string> inputs;
  std::string x_col, z_col, y_col;
  std::vector<std::string> drop_nonpositive;
  double dichotomize_q = -1.0;  // < 0 = categorical z
  std::vector<std::string> labels;
  std::size_t cusum_window = 0;

  double alpha = 0.05;
  std::string mode = "conditional";
  double tau = std::numeric_limits<double>::infinity();

  std::string rule = "proportional";
  double gamma = 1.0;
  std::size_t k0 = 1;
  double p_min = 0.0;
  double p_max = -1.0;  // < 0 = derived
  std::vector<double> g;
  std::vector<double> delta, sigma;
  double beta = -1.0;  // < 0 = unset
  std::vector<double> beta_k;
  std::vector<double> c_star;

  std::string format = "json";
  std::string out;
  int threads = 1;
};

void add_ingest_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("-i,--input", opt.inputs, "input CSV file(s) with header")
      ->required();
  cmd->add_option("--x-col", opt.x_col, "measurement column")->required();
  cmd->add_option("--z-col", opt.z_col, "class (or continuous covariate) column")
      ->required();
  cmd->add_option("--y-col", opt.y_col, "binary outcome column");
  cmd->add_option("--drop-nonpositive", opt.drop_nonpositive,
                  "drop rows with a value <= 0 in these columns")
      ->delimiter(',');
  cmd->add_option("--dichotomize", opt.dichotomize_q,
                  "treat z as continuous and split at its top-q quantile");
  cmd->add_option("--labels", opt.labels, "declared class label set")
      ->delimiter(',');
  cmd->add_option("--cusum-window", opt.cusum_window,
                  "aggregate x over non-overlapping windows of this length");
}

void add_model_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("-a,--alpha", opt.alpha, "global false-alarm budget")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--mode", opt.mode, "standardization mode")
      ->check(CLI::IsMember({"marginal", "conditional"}));
  cmd->add_option("--tau", opt.tau, "moment truncation bound (inf = none)");
  cmd->add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("-o,--out", opt.out, "write the report here (default stdout)");
  cmd->add_option("--threads", opt.threads, "worker threads for resampling")
      ->check(CLI::PositiveNumber);
}

void add_rule_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option(
         "--rule", opt.rule,
         "proportional | gamma | modified | subprob | constant | optimal")
      ->check(CLI::IsMember({"proportional", "gamma", "modified", "subprob",
                             "constant", "optimal"}));
  cmd->add_option("--gamma", opt.gamma, "exponent for --rule gamma");
  cmd->add_option("--k0", opt.k0, "modified rule: split position (1-based)");
  cmd->add_option("--p-min", opt.p_min, "modified rule: weight of the k0 "
                                        "smallest classes");
  cmd->add_option("--p-max", opt.p_max, "modified rule: weight of the rest "
                                        "(derived when omitted)");
  cmd->add_option("--g", opt.g, "subprobability rule: per-class alarm mass")
      ->delimiter(',');
}

void add_alternative_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--delta", opt.delta, "alternative shift per class")
      ->delimiter(',');
  cmd->add_option("--sigma", opt.sigma, "alternative scale per class")
      ->delimiter(',');
  cmd->add_option("--beta", opt.beta, "shared miss budget");
  cmd->add_option("--beta-k", opt.beta_k, "per-class miss budgets")
      ->delimiter(',');
  cmd->add_option("--c-star", opt.c_star,
                  "explicit score-scale threshold envelope (overrides "
                  "delta/sigma/beta)")
      ->delimiter(',');
}

ct::IngestSpec ingest_spec(const CommonOptions& opt) {
  ct::IngestSpec spec;
  spec.inputs = opt.inputs;
  spec.x_col = opt.x_col;
  spec.z_col = opt.z_col;
  if (!opt.y_col.empty()) spec.y_col = opt.y_col;
  spec.drop_nonpositive = opt.drop_nonpositive;
  if (opt.dichotomize_q >= 0.0) spec.dichotomize_q = opt.dichotomize_q;
  if (!opt.labels.empty()) spec.labels = opt.labels;
  if (opt.cusum_window > 0) spec.cusum_window = opt.cusum_window;
  return spec;
}

ct::StandardizationMode mode_of(const CommonOptions& opt) {
  return opt.mode == "marginal" ? ct::StandardizationMode::kMarginal
                                : ct::StandardizationMode::kConditional;
}

std::optional<ct::AlternativeSpec> alternative_of(const CommonOptions& opt,
                                                  std::size_t K) {
  if (opt.delta.empty() && opt.sigma.empty() && opt.beta < 0.0 &&
      opt.beta_k.empty()) {
    return std::nullopt;
  }
  ct::AlternativeSpec alt;
  alt.delta = opt.delta;
  alt.sigma = opt.sigma.empty() ? std::vector<double>(K, 1.0) : opt.sigma;
  if (opt.beta >= 0.0) alt.beta = opt.beta;
  if (!opt.beta_k.empty()) alt.beta_k = opt.beta_k;
  return alt;
}

ct::RuleSpec rule_of(const CommonOptions& opt, std::size_t K) {
  if (opt.rule == "proportional") return ct::ProportionalRule{};
  if (opt.rule == "gamma") return ct::GammaProportionalRule{opt.gamma};
  if (opt.rule == "modified") {
    ct::ModifiedRuleParams params;
    params.k0 = opt.k0;
    params.p_min = opt.p_min;
    if (opt.p_max >= 0.0) params.p_max = opt.p_max;
    return ct::ModifiedRule{params};
  }
  if (opt.rule == "subprob") {
    if (opt.g.empty()) {
      throw ct::ValidationError("--rule subprob needs --g");
    }
    return ct::SubprobabilityRule{opt.g};
  }
  if (opt.rule == "constant") return ct::ConstantRule{};
  // optimal
  auto alt = alternative_of(opt, K);
  if (!alt.has_value() && opt.c_star.empty()) {
    throw ct::ValidationError(
        "--rule optimal needs --delta/--sigma with --beta or --beta-k, or an "
        "explicit --c-star");
  }
  ct::OptimalRule rule;
  if (alt.has_value()) {
    rule.alt = *alt;
  } else {
    rule.alt.delta.assign(K, 0.0);
    rule.alt.sigma.assign(K, 1.0);
  }
  if (!rule.alt.beta.has_value() && !rule.alt.beta_k.has_value()) {
    // c_star given without budgets: the envelope alone defines the LP.
    rule.alt.beta = 0.5;  // placeholder never used for the envelope
  }
  if (!opt.c_star.empty()) rule.c_star = opt.c_star;
  return rule;
}

ct::Json config_json(const CommonOptions& opt, std::uint64_t seed,
                     bool with_seed) {
  ct::Json j;
  j["inputs"] = opt.inputs;
  j["x_col"] = opt.x_col;
  j["z_col"] = opt.z_col;
  j["y_col"] = opt.y_col.empty() ? ct::Json() : ct::Json(opt.y_col);
  j["drop_nonpositive"] = opt.drop_nonpositive;
  j["dichotomize_q"] =
      opt.dichotomize_q >= 0.0 ? ct::j6(opt.dichotomize_q) : ct::Json();
  j["labels"] = opt.labels;
  j["cusum_window"] = opt.cusum_window;
  j["alpha"] = ct::j6(opt.alpha);
  j["mode"] = opt.mode;
  j["tau"] = ct::j6(opt.tau);
  j["rule"] = opt.rule;
  if (opt.rule == "gamma") j["gamma"] = ct::j6(opt.gamma);
  if (opt.rule == "modified") {
    j["k0"] = opt.k0;
    j["p_min"] = ct::j6(opt.p_min);
    j["p_max"] = opt.p_max >= 0.0 ? ct::j6(opt.p_max) : ct::Json();
  }
  if (!opt.g.empty()) j["g"] = ct::j6(opt.g);
  if (!opt.delta.empty()) j["delta"] = ct::j6(opt.delta);
  if (!opt.sigma.empty()) j["sigma"] = ct::j6(opt.sigma);
  if (opt.beta >= 0.0) j["beta"] = ct::j6(opt.beta);
  if (!opt.beta_k.empty()) j["beta_k"] = ct::j6(opt.beta_k);
  if (!opt.c_star.empty()) j["c_star"] = ct::j6(opt.c_star);
  j["format"] = opt.format;
  j["threads"] = opt.threads;
  if (with_seed) j["seed"] = seed;
  j["kernels"] = ct::kernels::active_ops().name;
  return j;
}

ct::Json data_json(const ct::IngestResult& ingest) {
  ct::Json j;
  j["n"] = ingest.sample.size();
  j["rows_read"] = ingest.rows_read;
  j["rows_dropped"] = ingest.rows_dropped;
  j["dichotomize_threshold"] = ingest.dichotomize_threshold.has_value()
                                   ? ct::j6(*ingest.dichotomize_threshold)
                                   : ct::Json();
  return j;
}

void emit(const std::string& text, const CommonOptions& opt) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.out, std::ios::binary);
  if (!out) throw ct::IoError("cannot open output file '" + opt.out + "'");
  out << text;
  if (!out) throw ct::IoError("write failure on '" + opt.out + "'");
}

void emit_report(ct::Json& report, const std::string& command,
                 const CommonOptions& opt, const std::string& csv_text) {
  report["schema_version"] = 1;
  report["command"] = command;
  if (opt.format == "csv") {
    emit(csv_text, opt);
  } else {
    emit(report.dump(2) + "\n", opt);
  }
}

// Rebuilds the pooled-residual score distribution of a fitted rule; the
// alternative-based reports need its cdf.
ct::EmpiricalDistribution score_distribution(const ct::LabeledSample& sample,
                                             const ct::EstimatedRule& rule) {
  return ct::EmpiricalDistribution(ct::residuals(sample, rule.model));
}

void attach_alternative_reports(ct::Json& results,
                                const ct::LabeledSample& sample,
                                const ct::EstimatedRule& rule,
                                const CommonOptions& opt) {
  auto alt = alternative_of(opt, rule.dist.size());
  if (!alt.has_value()) return;
  const ct::EmpiricalDistribution scores = score_distribution(sample, rule);
  const ct::Theorem1Report verdict = ct::verify_theorem1(
      rule.standardized, *alt, rule.dist, opt.alpha, scores);
  results["theorem1"] = ct::to_json(verdict);
  results["power"] =
      ct::to_json(ct::predicted_power(rule.standardized, *alt, rule.dist,
                                      scores));
}

int cmd_thresholds(const CommonOptions& opt) {
  const ct::IngestResult data = ct::ingest(ingest_spec(opt));
  const ct::RuleSpec spec = rule_of(opt, data.sample.labels.size());
  const ct::EstimatedRule rule =
      ct::estimate_rule(data.sample, spec, mode_of(opt), opt.tau, opt.alpha);

  ct::Json report;
  report["config"] = config_json(opt, 0, false);
  report["data"] = data_json(data);
  ct::Json results;
  results["rule"] = ct::to_json(rule);
  const ct::AdmissibilityReport adm = ct::check_admissibility(
      rule.dist, opt.alpha, opt.rule == "gamma" ? opt.gamma : 1.0);
  ct::Json admj;
  admj["admissible"] = adm.admissible;
  admj["margins"] = ct::j6(adm.margins);
  admj["gamma"] = ct::j6(adm.gamma);
  results["admissibility"] = admj;
  attach_alternative_reports(results, data.sample, rule, opt);
  report["results"] = results;
  emit_report(report, "thresholds", opt, ct::to_csv(rule));
  return 0;
}

int cmd_optimal(const CommonOptions& opt) {
  const ct::IngestResult data = ct::ingest(ingest_spec(opt));
  const std::size_t K = data.sample.labels.size();

  CommonOptions opt2 = opt;
  opt2.rule = "optimal";
  const ct::RuleSpec spec = rule_of(opt2, K);
  const ct::EstimatedRule rule =
      ct::estimate_rule(data.sample, spec, mode_of(opt), opt.tau, opt.alpha);

  // Cross-check the closed-form solution against the simplex route.
  const ct::EmpiricalDistribution scores =
      score_distribution(data.sample, rule);
  const ct::LpInstance lp =
      ct::build_lp(rule.dist, opt.alpha, rule.optimal->c_star, scores);
  const ct::SubProbabilityVector via_simplex =
      ct::solve_simplex_lp(lp, rule.dist);
  const double greedy_objective = rule.optimal->objective;
  const double simplex_objective = via_simplex.g[lp.minority];

  ct::Json report;
  report["config"] = config_json(opt2, 0, false);
  report["data"] = data_json(data);
  ct::Json results;
  results["rule"] = ct::to_json(rule);
  ct::Json lpj;
  lpj["cap"] = ct::j6(lp.cap);
  lpj["minority_class"] = rule.dist.labels[lp.minority];
  lpj["alpha"] = ct::j6(opt.alpha);
  lpj["greedy_objective"] = ct::j6(greedy_objective);
  lpj["simplex_objective"] = ct::j6(simplex_objective);
  lpj["solvers_agree"] =
      std::fabs(greedy_objective - simplex_objective) <= 1e-9;
  lpj["g_simplex"] = ct::j6(via_simplex.g);
  results["lp"] = lpj;
  attach_alternative_reports(results, data.sample, rule, opt2);
  report["results"] = results;
  emit_report(report, "optimal", opt, ct::to_csv(rule));
  return 0;
}

int cmd_evaluate(const CommonOptions& opt, const std::string& screen_path) {
  const ct::IngestResult learn = ct::ingest(ingest_spec(opt));
  const ct::RuleSpec spec = rule_of(opt, learn.sample.labels.size());
  const ct::EstimatedRule rule =
      ct::estimate_rule(learn.sample, spec, mode_of(opt), opt.tau, opt.alpha);

  ct::IngestResult screen = learn;
  if (!screen_path.empty()) {
    CommonOptions sopt = opt;
    sopt.inputs = {screen_path};
    ct::IngestSpec sspec = ingest_spec(sopt);
    // The rule's class universe carries over to the screening sample.
    if (!sspec.dichotomize_q.has_value()) {
      sspec.labels = rule.dist.labels;
    }
    screen = ct::ingest(sspec);
  }
  const ct::EvaluationReport eval = ct::evaluate_rule(screen.sample, rule);

  ct::Json report;
  report["config"] = config_json(opt, 0, false);
  report["data"] = data_json(learn);
  report["screen_data"] = data_json(screen);
  ct::Json results;
  results["rule"] = ct::to_json(rule);
  results["evaluation"] = ct::to_json(eval);
  report["results"] = results;
  emit_report(report, "evaluate", opt, ct::to_csv(eval));
  return 0;
}

int cmd_bootstrap(const CommonOptions& opt, const ct::BootstrapConfig& cfg) {
  const ct::IngestResult data = ct::ingest(ingest_spec(opt));
  const ct::RuleSpec spec = rule_of(opt, data.sample.labels.size());
  ct::BootstrapConfig config = cfg;
  config.threads = opt.threads;
  const ct::BootstrapReport boot = ct::bootstrap_thresholds(
      data.sample, spec, mode_of(opt), opt.tau, opt.alpha, config);
  const ct::EstimatedRule rule =
      ct::estimate_rule(data.sample, spec, mode_of(opt), opt.tau, opt.alpha);

  ct::Json report;
  report["config"] = config_json(opt, config.seed, true);
  report["config"]["B"] = config.B;
  report["config"]["ci_level"] = ct::j6(config.ci_level);
  report["data"] = data_json(data);
  ct::Json results;
  results["rule"] = ct::to_json(rule);
  results["bootstrap"] = ct::to_json(boot);
  report["results"] = results;
  emit_report(report, "bootstrap", opt, ct::to_csv(boot, rule.dist.labels));
  return 0;
}

int cmd_simulate(const CommonOptions& opt, const ct::ScreeningSimConfig& cfg) {
  const ct::IngestResult data = ct::ingest(ingest_spec(opt));
  const ct::RuleSpec spec = rule_of(opt, data.sample.labels.size());
  ct::ScreeningSimConfig config = cfg;
  config.threads = opt.threads;
  const ct::ScreeningSimReport sim = ct::smoothed_screening_sim(
      data.sample, spec, mode_of(opt), opt.tau, opt.alpha, config);
  const ct::EstimatedRule rule =
      ct::estimate_rule(data.sample, spec, mode_of(opt), opt.tau, opt.alpha);

  ct::Json report;
  report["config"] = config_json(opt, config.seed, true);
  report["config"]["B"] = config.B;
  report["config"]["N"] = config.N;
  report["config"]["bw_factor"] = ct::j6(config.bw_factor);
  report["config"]["marginal_bandwidth"] = config.marginal_bandwidth;
  report["data"] = data_json(data);
  ct::Json results;
  results["rule"] = ct::to_json(rule);
  results["simulation"] = ct::to_json(sim);
  report["results"] = results;
  emit_report(report, "simulate", opt, ct::to_csv(sim, rule.dist.labels));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"per-class alarm thresholds under a global false-alarm budget"};
  app.require_subcommand(1);

  CommonOptions opt;
  ct::BootstrapConfig boot_cfg;
  ct::ScreeningSimConfig sim_cfg;
  std::string screen_path;

  CLI::App* thresholds = app.add_subcommand(
      "thresholds", "estimate per-class alarm thresholds");
  add_ingest_options(thresholds, opt);
  add_model_options(thresholds, opt);
  add_rule_options(thresholds, opt);
  add_alternative_options(thresholds, opt);

  CLI::App* optimal = app.add_subcommand(
      "optimal", "LP-optimal design under a shift/scale alternative");
  add_ingest_options(optimal, opt);
  add_model_options(optimal, opt);
  add_alternative_options(optimal, opt);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "apply an estimated rule to a sample");
  add_ingest_options(evaluate, opt);
  add_model_options(evaluate, opt);
  add_rule_options(evaluate, opt);
  add_alternative_options(evaluate, opt);
  evaluate->add_option("--screen", screen_path,
                       "screening CSV (defaults to the learning input)");

  CLI::App* bootstrap = app.add_subcommand(
      "bootstrap", "bootstrap standard errors for the score cutoffs");
  add_ingest_options(bootstrap, opt);
  add_model_options(bootstrap, opt);
  add_rule_options(bootstrap, opt);
  add_alternative_options(bootstrap, opt);
  bootstrap->add_option("-B,--replicates", boot_cfg.B, "bootstrap replicates");
  bootstrap->add_option("--seed", boot_cfg.seed, "RNG seed");
  bootstrap->add_option("--ci", boot_cfg.ci_level, "percentile interval level")
      ->check(CLI::Range(0.0, 1.0));
  bootstrap->add_flag("--keep-replicates", boot_cfg.keep_replicates,
                      "include the full replicate matrix in the report");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "smoothed-bootstrap screening simulation");
  add_ingest_options(simulate, opt);
  add_model_options(simulate, opt);
  add_rule_options(simulate, opt);
  add_alternative_options(simulate, opt);
  simulate->add_option("-B,--replicates", sim_cfg.B, "simulation replicates");
  simulate->add_option("-N,--screen-size", sim_cfg.N,
                       "smoothed sample size per replicate");
  simulate->add_option("--bw-factor", sim_cfg.bw_factor,
                       "smoothing bandwidth factor");
  simulate->add_option("--seed", sim_cfg.seed, "RNG seed");
  simulate->add_flag("--marginal-bandwidth", sim_cfg.marginal_bandwidth,
                     "use the marginal scale for the smoothing noise");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message
    return 2;
  }

  try {
    if (thresholds->parsed()) return cmd_thresholds(opt);
    if (optimal->parsed()) return cmd_optimal(opt);
    if (evaluate->parsed()) return cmd_evaluate(opt, screen_path);
    if (bootstrap->parsed()) return cmd_bootstrap(opt, boot_cfg);
    if (simulate->parsed()) return cmd_simulate(opt, sim_cfg);
  } catch (const ct::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ct::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ct::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ct::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
