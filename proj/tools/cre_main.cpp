// cre: causal rule ensemble analysis from the command line.
//
// Subcommands cover the full workflow: `pipeline` runs discovery, estimation
// and (optionally) sensitivity analysis in one go; `discover`, `estimate` and
// `sensitivity` run the stages individually from each other's artifacts;
// `simulate` runs the synthetic benchmark experiments. Every run writes a
// manifest.json with the resolved configuration, the artifact list, and a
// structured error record when a stage fails.

#include <CLI11.hpp>

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cre/dataset.hpp"
#include "cre/errors.hpp"
#include "cre/inference.hpp"
#include "cre/pipeline.hpp"
#include "cre/pseudo_outcome.hpp"
#include "cre/reports.hpp"
#include "cre/rules.hpp"
#include "cre/sensitivity.hpp"
#include "cre/simulation.hpp"

namespace {

using namespace cre;

std::string path_join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Modifiers parse_modifiers(const std::string& s) {
  if (s == "x123") return Modifiers::X123;
  if (s == "x8910") return Modifiers::X8910;
  throw usage_error("unknown --sim-modifiers '" + s + "' (expected x123 or x8910)");
}

Confounding parse_confounding(const std::string& s) {
  if (s == "linear") return Confounding::Linear;
  if (s == "nonlinear") return Confounding::Nonlinear;
  throw usage_error("unknown --sim-confounding '" + s + "' (expected linear or nonlinear)");
}

// Options shared by the commands that read a dataset.
struct DataOpts {
  std::string input;
  std::string outcome = "y";
  std::string treatment = "z";
  std::string out_dir = ".";
  double ratio = 0.25;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = all hardware threads
};

void add_data_flags(CLI::App* cmd, DataOpts& o) {
  cmd->add_option("--input", o.input, "input CSV with outcome, treatment and covariate columns")->required();
  cmd->add_option("--outcome", o.outcome, "outcome column name");
  cmd->add_option("--treatment", o.treatment, "binary treatment column name");
  cmd->add_option("--out", o.out_dir, "output directory for artifacts");
  cmd->add_option("--ratio", o.ratio, "discovery share of the sample split");
  cmd->add_option("--seed", o.seed, "seed for all stage randomness");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores); never changes results");
}

// Flags mapped onto EnsembleParams, shared by the discovery forest/boosting
// and the estimation outcome models.
void add_ensemble_flags(CLI::App* cmd, EnsembleParams& e) {
  cmd->add_option("--trees-forest", e.n_trees_forest, "random forest size for rule generation");
  cmd->add_option("--trees-boost", e.n_trees_boost, "gradient boosting stages");
  cmd->add_option("--depth", e.max_depth, "maximum tree depth (also caps rule length)");
  cmd->add_option("--min-leaf", e.min_leaf, "minimum samples per leaf");
  cmd->add_option("--learning-rate", e.learning_rate, "boosting shrinkage");
  cmd->add_option("--subsample-fraction", e.subsample_fraction, "boosting row subsample fraction");
  cmd->add_option("--feature-fraction", e.feature_fraction_forest, "forest feature fraction per split (0 = sqrt rule)");
}

void add_selection_flags(CLI::App* cmd, DiscoveryConfig& d) {
  cmd->add_option("--threshold", d.stability.threshold, "stability selection probability cut-off");
  cmd->add_option("--qmax", d.stability.q_max, "path entrants counted per subsample");
  cmd->add_option("--subsamples", d.stability.n_subsamples, "stability selection subsamples");
  cmd->add_option("--max-rule-length", d.max_rule_length, "maximum conditions per candidate rule");
  cmd->add_option("--min-support", d.min_support, "minimum (and 1-maximum) candidate rule support");
}

// Subsets a full-dataset pseudo-outcome file down to the given rows.
Eigen::VectorXd external_rows(const std::string& tau_file, const Dataset& full, const std::vector<int>& rows) {
  const PseudoOutcomes p = load_external_pseudo(tau_file, full);
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = p.tau_star(rows[i]);
  return out;
}

void require_tau_file(PseudoMethod m, const std::string& tau_file) {
  if (m == PseudoMethod::EXTERNAL && tau_file.empty())
    throw usage_error("--method external requires --tau-file");
}

// Runs `body`, then writes manifest.json; on a library error the manifest
// records the failure and the error's category decides the exit code.
int run_command(const std::string& name, const std::string& out_dir, const std::function<void(nlohmann::json&)>& body) {
  nlohmann::json manifest;
  manifest["command"] = name;
  manifest["artifacts"] = nlohmann::json::array();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "cre " << name << ": cannot create output directory '" << out_dir << "': " << ec.message() << "\n";
    return 3;
  }
  const auto finish = [&](int code) {
    write_json_file(path_join(out_dir, "manifest.json"), manifest);
    return code;
  };
  try {
    body(manifest);
    manifest["status"] = "ok";
    return finish(0);
  } catch (const Error& e) {
    manifest["status"] = "error";
    manifest["error"] = {{"kind", e.kind()}, {"message", e.what()}, {"exit_code", e.exit_code()}};
    std::cerr << "cre " << name << ": " << e.what() << "\n";
    return finish(e.exit_code());
  } catch (const std::exception& e) {
    manifest["status"] = "error";
    manifest["error"] = {{"kind", "internal error"}, {"message", e.what()}, {"exit_code", 1}};
    std::cerr << "cre " << name << ": " << e.what() << "\n";
    return finish(1);
  }
}

void add_artifact(nlohmann::json& manifest, const std::string& out_dir, const std::string& name,
                  const nlohmann::json& content) {
  write_json_file(path_join(out_dir, name), content);
  manifest["artifacts"].push_back(name);
}

void add_text_artifact(nlohmann::json& manifest, const std::string& out_dir, const std::string& name,
                       const std::string& content) {
  write_text_file(path_join(out_dir, name), content);
  manifest["artifacts"].push_back(name);
}

// Stage runners shared by `pipeline` and the standalone subcommands so that
// both paths emit byte-identical reports.

DiscoveryOutput discover_stage(const Dataset& full, const SplitIndices& split, DiscoveryConfig cfg,
                               const std::string& tau_file, std::uint64_t seed, const std::string& out_dir,
                               nlohmann::json& manifest) {
  if (cfg.method == PseudoMethod::EXTERNAL) cfg.external_tau = external_rows(tau_file, full, split.discovery);
  const Dataset d_disc = full.subset(split.discovery);
  DiscoveryOutput out = run_discovery(d_disc, cfg, seed);
  add_artifact(manifest, out_dir, "split_indices.json", split_indices_json(split, full.n()));
  add_artifact(manifest, out_dir, "candidate_rules.json", candidate_rules_json(out, full.column_names, cfg, seed));
  add_artifact(manifest, out_dir, "selection_report.json", selection_report_json(out, full.column_names, cfg, seed));
  manifest["discovery_config"] = discovery_config_json(cfg, seed);
  return out;
}

EstimationOutput estimate_stage(const Dataset& full, const SplitIndices& split, const std::vector<Rule>& rules,
                                EstimationConfig cfg, const std::string& tau_file, std::uint64_t seed,
                                const std::string& out_dir, nlohmann::json& manifest) {
  if (cfg.method == PseudoMethod::EXTERNAL) cfg.external_tau = external_rows(tau_file, full, split.inference);
  const Dataset d_inf = full.subset(split.inference);
  EstimationOutput out = run_estimation(d_inf, rules, cfg, seed);
  add_artifact(manifest, out_dir, "inference_report.json",
               inference_report_json(out, full.column_names, cfg, seed, d_inf.n()));
  add_text_artifact(manifest, out_dir, "inference_report.txt", inference_report_text(out.report));
  manifest["estimation_config"] = estimation_config_json(cfg, seed);
  return out;
}

void sensitivity_stage(const Dataset& full, const SplitIndices& split, const std::vector<Rule>& rules,
                       const SensitivityConfig& cfg, int threads, const std::string& out_dir,
                       nlohmann::json& manifest) {
  const Dataset d_inf = full.subset(split.inference);
  const SensitivityResult result = sensitivity_intervals(d_inf, rules, cfg, threads);
  add_artifact(manifest, out_dir, "sensitivity_report.json", sensitivity_report_json(result, cfg));
  add_text_artifact(manifest, out_dir, "sensitivity_report.txt", sensitivity_report_text(result));
  manifest["sensitivity_config"] = sensitivity_config_json(cfg);
}

void record_input(nlohmann::json& manifest, const DataOpts& d) {
  manifest["input"] = {{"path", d.input}, {"outcome", d.outcome}, {"treatment", d.treatment}};
  manifest["seed"] = d.seed;
}

SplitIndices load_or_make_split(const Dataset& full, const DataOpts& d, const std::string& split_file) {
  if (!split_file.empty()) return split_indices_from_json(read_json_file(split_file));
  return split_sample(full, d.ratio, d.seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cre: discover and estimate heterogeneous treatment effect rules"};
  app.require_subcommand(1);

  // --- pipeline ----------------------------------------------------------
  DataOpts pl_data;
  DiscoveryConfig pl_disc;
  EstimationConfig pl_est;
  std::string pl_disc_method = "impute_diff";
  std::string pl_est_method = "sipw";
  std::string pl_hc = "auto";
  std::string pl_tau_file;
  std::vector<double> pl_lambda;
  int pl_bootstraps = 1000;
  double pl_alpha = 0.05;
  double pl_clip = 0.01;
  auto* pl = app.add_subcommand("pipeline", "split, discover rules, estimate effects, optional sensitivity analysis");
  add_data_flags(pl, pl_data);
  add_ensemble_flags(pl, pl_disc.ensemble);
  add_selection_flags(pl, pl_disc);
  pl->add_option("--discovery-method", pl_disc_method, "pseudo-outcomes for rule discovery (ipw, sipw, or, impute_diff, external)");
  pl->add_option("--method", pl_est_method, "pseudo-outcomes for inference (ipw, sipw, or, impute_diff, external)");
  pl->add_option("--hc", pl_hc, "sandwich flavor: auto, HC0, HC3");
  pl->add_option("--alpha", pl_alpha, "two-sided interval / test level");
  pl->add_option("--clip", pl_clip, "propensity clipping bound");
  pl->add_option("--tau-file", pl_tau_file, "single-column CSV of external pseudo-outcomes, one row per input row");
  pl->add_option("--lambda-grid", pl_lambda, "sensitivity grid; when given, runs the sensitivity stage")
      ->delimiter(',');
  pl->add_option("--bootstraps", pl_bootstraps, "sensitivity bootstrap resamples");

  // --- discover ----------------------------------------------------------
  DataOpts dc_data;
  DiscoveryConfig dc_cfg;
  std::string dc_method = "impute_diff";
  std::string dc_tau_file;
  double dc_clip = 0.01;
  auto* dc = app.add_subcommand("discover", "generate candidate rules and select stable ones");
  add_data_flags(dc, dc_data);
  add_ensemble_flags(dc, dc_cfg.ensemble);
  add_selection_flags(dc, dc_cfg);
  dc->add_option("--method", dc_method, "pseudo-outcomes for rule discovery");
  dc->add_option("--clip", dc_clip, "propensity clipping bound");
  dc->add_option("--tau-file", dc_tau_file, "external pseudo-outcome CSV (full dataset alignment)");

  // --- estimate ----------------------------------------------------------
  DataOpts es_data;
  EstimationConfig es_cfg;
  std::string es_method = "sipw";
  std::string es_hc = "auto";
  std::string es_rules_file;
  std::string es_split_file;
  std::string es_tau_file;
  double es_alpha = 0.05;
  double es_clip = 0.01;
  auto* es = app.add_subcommand("estimate", "estimate rule coefficients with robust intervals on the inference split");
  add_data_flags(es, es_data);
  add_ensemble_flags(es, es_cfg.ensemble);
  es->add_option("--rules", es_rules_file, "selection report or rules JSON listing the rules to estimate")->required();
  es->add_option("--split", es_split_file, "split_indices.json from a discover run (default: recompute from --ratio/--seed)");
  es->add_option("--method", es_method, "pseudo-outcomes for inference");
  es->add_option("--hc", es_hc, "sandwich flavor: auto, HC0, HC3");
  es->add_option("--alpha", es_alpha, "two-sided interval / test level");
  es->add_option("--clip", es_clip, "propensity clipping bound");
  es->add_option("--tau-file", es_tau_file, "external pseudo-outcome CSV (full dataset alignment)");

  // --- sensitivity -------------------------------------------------------
  DataOpts sn_data;
  std::string sn_report_file;
  std::string sn_split_file;
  std::vector<double> sn_lambda = {1.01, 1.02, 1.03, 1.04, 1.05};
  int sn_bootstraps = 1000;
  double sn_alpha = 0.05;
  double sn_clip = 0.01;
  auto* sn = app.add_subcommand("sensitivity", "bootstrap bounds on rule effects under marginal unmeasured confounding");
  add_data_flags(sn, sn_data);
  sn->add_option("--report", sn_report_file, "inference_report.json whose rules to analyze")->required();
  sn->add_option("--split", sn_split_file, "split_indices.json (default: recompute from --ratio/--seed)");
  sn->add_option("--lambda-grid", sn_lambda, "odds-ratio bounds, each >= 1")->delimiter(',');
  sn->add_option("--bootstraps", sn_bootstraps, "bootstrap resamples");
  sn->add_option("--alpha", sn_alpha, "two-sided interval level");
  sn->add_option("--clip", sn_clip, "clip for the per-bootstrap propensity refit");

  // --- simulate ----------------------------------------------------------
  std::string sm_experiment = "discovery";
  std::string sm_out = ".";
  std::string sm_modifiers = "x123";
  std::string sm_confounding = "linear";
  std::string sm_disc_method = "impute_diff";
  std::string sm_est_method = "sipw";
  DiscoveryConfig sm_disc;
  EstimationConfig sm_est;
  DgpSpec sm_spec;
  int sm_replicates = 10;
  int sm_threads = 0;
  double sm_ratio = 0.25;
  std::vector<double> sm_k_grid;
  std::vector<double> sm_ratios = {0.25};
  bool sm_oracle = false;
  bool sm_dump = false;
  std::uint64_t sm_seed = 0;
  auto* sm = app.add_subcommand("simulate", "run synthetic discovery/estimation experiments");
  sm->add_option("--experiment", sm_experiment, "discovery or estimation");
  sm->add_option("--sim-n", sm_spec.n, "sample size per replicate");
  sm->add_option("--sim-k", sm_spec.k_effect, "effect size (ignored when --k-grid is given)");
  sm->add_option("--sim-rules", sm_spec.n_rules, "number of true causal rules (2 or 4)");
  sm->add_option("--sim-modifiers", sm_modifiers, "effect modifier set: x123 or x8910");
  sm->add_option("--sim-correlation", sm_spec.correlation, "pairwise covariate correlation target");
  sm->add_option("--sim-confounding", sm_confounding, "baseline surface: linear or nonlinear");
  sm->add_option("--replicates", sm_replicates, "replicates per grid point");
  sm->add_option("--k-grid", sm_k_grid, "effect sizes for the discovery experiment")->delimiter(',');
  sm->add_option("--ratios", sm_ratios, "discovery shares for the estimation experiment")->delimiter(',');
  sm->add_option("--ratio", sm_ratio, "discovery share for the discovery experiment");
  sm->add_flag("--oracle-rules", sm_oracle, "estimation experiment: use the true rules, skip discovery");
  sm->add_flag("--dump-data", sm_dump, "also write one generated draw (sim_data.csv, sim_truth.json)");
  sm->add_option("--seed", sm_seed, "experiment seed")->required();
  sm->add_option("--out", sm_out, "output directory");
  sm->add_option("--threads", sm_threads, "worker threads (0 = all cores)");
  sm->add_option("--discovery-method", sm_disc_method, "pseudo-outcomes for rule discovery");
  sm->add_option("--method", sm_est_method, "pseudo-outcomes for inference (estimation experiment)");
  add_ensemble_flags(sm, sm_disc.ensemble);
  add_selection_flags(sm, sm_disc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (pl->parsed()) {
      pl_disc.method = pseudo_method_from_name(pl_disc_method);
      pl_disc.clip = pl_clip;
      pl_disc.n_threads = pl_data.threads;
      pl_est.method = pseudo_method_from_name(pl_est_method);
      pl_est.ensemble = pl_disc.ensemble;
      pl_est.clip = pl_clip;
      pl_est.inference.alpha = pl_alpha;
      pl_est.inference.flavor = hc_flavor_from_name(pl_hc);
      require_tau_file(pl_disc.method, pl_tau_file);
      require_tau_file(pl_est.method, pl_tau_file);
      return run_command("pipeline", pl_data.out_dir, [&](nlohmann::json& manifest) {
        record_input(manifest, pl_data);
        const Dataset full = load_dataset(pl_data.input, pl_data.outcome, pl_data.treatment);
        const SplitIndices split = split_sample(full, pl_data.ratio, pl_data.seed);
        const DiscoveryOutput disc =
            discover_stage(full, split, pl_disc, pl_tau_file, pl_data.seed, pl_data.out_dir, manifest);
        const EstimationOutput est = estimate_stage(full, split, disc.selected_rules, pl_est, pl_tau_file,
                                                    pl_data.seed, pl_data.out_dir, manifest);
        if (!pl_lambda.empty()) {
          SensitivityConfig scfg;
          scfg.lambda_values = pl_lambda;
          scfg.n_bootstrap = pl_bootstraps;
          scfg.alpha = pl_alpha;
          scfg.seed = pl_data.seed;
          scfg.clip = pl_clip;
          sensitivity_stage(full, split, est.report.rules, scfg, pl_data.threads, pl_data.out_dir, manifest);
        }
      });
    }

    if (dc->parsed()) {
      dc_cfg.method = pseudo_method_from_name(dc_method);
      dc_cfg.clip = dc_clip;
      dc_cfg.n_threads = dc_data.threads;
      require_tau_file(dc_cfg.method, dc_tau_file);
      return run_command("discover", dc_data.out_dir, [&](nlohmann::json& manifest) {
        record_input(manifest, dc_data);
        const Dataset full = load_dataset(dc_data.input, dc_data.outcome, dc_data.treatment);
        const SplitIndices split = split_sample(full, dc_data.ratio, dc_data.seed);
        discover_stage(full, split, dc_cfg, dc_tau_file, dc_data.seed, dc_data.out_dir, manifest);
      });
    }

    if (es->parsed()) {
      es_cfg.method = pseudo_method_from_name(es_method);
      es_cfg.clip = es_clip;
      es_cfg.inference.alpha = es_alpha;
      es_cfg.inference.flavor = hc_flavor_from_name(es_hc);
      require_tau_file(es_cfg.method, es_tau_file);
      return run_command("estimate", es_data.out_dir, [&](nlohmann::json& manifest) {
        record_input(manifest, es_data);
        const Dataset full = load_dataset(es_data.input, es_data.outcome, es_data.treatment);
        const SplitIndices split = load_or_make_split(full, es_data, es_split_file);
        const std::vector<Rule> rules = rules_from_report_json(read_json_file(es_rules_file), full.column_names);
        estimate_stage(full, split, rules, es_cfg, es_tau_file, es_data.seed, es_data.out_dir, manifest);
      });
    }

    if (sn->parsed()) {
      if (sn_lambda.empty()) throw usage_error("--lambda-grid must contain at least one value");
      SensitivityConfig scfg;
      scfg.lambda_values = sn_lambda;
      scfg.n_bootstrap = sn_bootstraps;
      scfg.alpha = sn_alpha;
      scfg.seed = sn_data.seed;
      scfg.clip = sn_clip;
      return run_command("sensitivity", sn_data.out_dir, [&](nlohmann::json& manifest) {
        record_input(manifest, sn_data);
        const Dataset full = load_dataset(sn_data.input, sn_data.outcome, sn_data.treatment);
        const SplitIndices split = load_or_make_split(full, sn_data, sn_split_file);
        const std::vector<Rule> rules = rules_from_report_json(read_json_file(sn_report_file), full.column_names);
        sensitivity_stage(full, split, rules, scfg, sn_data.threads, sn_data.out_dir, manifest);
      });
    }

    // simulate
    sm_spec.effect_modifiers = parse_modifiers(sm_modifiers);
    sm_spec.confounding = parse_confounding(sm_confounding);
    sm_spec.seed = sm_seed;
    sm_disc.method = pseudo_method_from_name(sm_disc_method);
    sm_disc.n_threads = 1;  // replicates parallelize; stages stay serial inside
    sm_est.method = pseudo_method_from_name(sm_est_method);
    sm_est.ensemble = sm_disc.ensemble;
    if (sm_experiment != "discovery" && sm_experiment != "estimation")
      throw usage_error("unknown --experiment '" + sm_experiment + "' (expected discovery or estimation)");
    return run_command("simulate", sm_out, [&](nlohmann::json& manifest) {
      manifest["seed"] = sm_seed;
      manifest["experiment"] = sm_experiment;
      if (sm_dump) {
        const auto [data, truth] = generate(sm_spec);
        save_dataset(data, path_join(sm_out, "sim_data.csv"));
        manifest["artifacts"].push_back("sim_data.csv");
        nlohmann::json truth_json;
        truth_json["spec"] = dgp_spec_json(sm_spec);
        nlohmann::json labels = nlohmann::json::array();
        for (const auto& r : truth.true_rules) labels.push_back(r.label);
        truth_json["true_rules"] = labels;
        std::vector<double> tau(truth.tau_true.data(), truth.tau_true.data() + truth.tau_true.size());
        truth_json["tau_true"] = tau;
        add_artifact(manifest, sm_out, "sim_truth.json", truth_json);
      }
      if (sm_experiment == "discovery") {
        DiscoveryExperimentConfig cfg;
        cfg.split_ratio = sm_ratio;
        cfg.discovery = sm_disc;
        cfg.n_threads = sm_threads;
        std::vector<double> ks = sm_k_grid.empty() ? std::vector<double>{sm_spec.k_effect} : sm_k_grid;
        std::vector<std::pair<std::string, DiscoveryMetrics>> rows;
        nlohmann::json grid = nlohmann::json::array();
        for (double k : ks) {
          DgpSpec spec = sm_spec;
          spec.k_effect = k;
          const DiscoveryMetrics m = run_discovery_experiment(spec, sm_replicates, cfg);
          rows.emplace_back("k=" + format_threshold(k), m);
          grid.push_back(discovery_metrics_json(m, spec));
        }
        add_artifact(manifest, sm_out, "discovery_metrics.json",
                     nlohmann::json{{"replicates", sm_replicates}, {"split_ratio", sm_ratio}, {"grid", grid}});
        add_text_artifact(manifest, sm_out, "discovery_metrics.csv", metrics_csv(rows));
      } else {
        EstimationExperimentConfig cfg;
        cfg.discovery = sm_disc;
        cfg.estimation = sm_est;
        cfg.oracle_rules = sm_oracle;
        cfg.n_threads = sm_threads;
        const std::vector<EstimationMetrics> ms = run_estimation_experiment(sm_spec, sm_ratios, sm_replicates, cfg);
        add_artifact(manifest, sm_out, "estimation_metrics.json", estimation_metrics_json(ms, sm_spec));
        add_text_artifact(manifest, sm_out, "estimation_metrics.csv", estimation_metrics_csv(ms));
      }
    });
  } catch (const Error& e) {
    std::cerr << "cre: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "cre: " << e.what() << "\n";
    return 1;
  }
}
