#include "msnar/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

#include "msnar/common.hpp"
#include "msnar/nw.hpp"
#include "msnar/trajectory.hpp"

namespace msnar {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

bool log_enabled() {
  static const bool enabled = [] {
    const char* env = std::getenv("MSNAR_LOG");
    return env != nullptr && std::string(env) != "quiet" && std::string(env) != "0";
  }();
  return enabled;
}

void log_line(const std::string& message) {
  if (log_enabled()) std::fprintf(stderr, "[msnar] %s\n", message.c_str());
}

const std::set<std::string>& known_modes() {
  static const std::set<std::string> modes{"simulate",        "estimate-complete",
                                           "estimate-rm",     "stability-check",
                                           "consistency-sweep", "reproduce-figures"};
  return modes;
}

// Kernel config for one trajectory: default bandwidth rule unless overridden,
// default grid widened to cover the evaluation region.
KernelConfig kernel_for(const ExperimentConfig& config, const Trajectory& traj) {
  KernelConfig kcfg;
  kcfg.family = config.kernel_family;
  kcfg.bandwidth = config.bandwidth.value_or(default_bandwidth(traj.steps()));
  if (config.grid_range) {
    kcfg.grid = make_default_grid(traj.y, kcfg.bandwidth, config.grid_points,
                                  config.grid_range->first, config.grid_range->second);
  } else {
    kcfg.grid = make_default_grid(traj.y, kcfg.bandwidth, config.grid_points,
                                  config.eval_region.first, config.eval_region.second);
  }
  kcfg.validate();
  return kcfg;
}

struct ArtifactSink {
  fs::path dir;
  std::vector<std::string> names;

  void emit(const std::string& name, const std::string& contents) {
    write_file((dir / name).string(), contents);
    names.push_back(name);
  }
};

Trajectory source_trajectory(const ExperimentConfig& config, const ModelSpec& model,
                             std::uint64_t seed) {
  if (config.data_csv) return trajectory_from_csv(read_file(*config.data_csv));
  return simulate(model, config.n, config.y0, seed, config.burn_in);
}

RmConfig rm_config_for(const ExperimentConfig& config, const ModelSpec& model,
                       const KernelConfig& kcfg, std::uint64_t seed) {
  RmConfig rmcfg;
  rmcfg.m = model.regime_count();
  rmcfg.kernel_family = kcfg.family;
  rmcfg.bandwidth = kcfg.bandwidth;
  rmcfg.grid = kcfg.grid;
  rmcfg.schedule = config.schedule;
  rmcfg.saem.m = rmcfg.m;
  rmcfg.saem.iterations = config.saem_iterations;
  rmcfg.saem.warmup = config.saem_warmup;
  rmcfg.saem.seed = seed;
  rmcfg.frozen_psi = config.frozen_psi;
  rmcfg.theta_init =
      config.theta_init.value_or(config.frozen_psi ? ThetaInit::kZero : ThetaInit::kStep0);
  rmcfg.reestimate_sigma = config.reestimate_sigma;
  rmcfg.record_history = config.record_history;
  rmcfg.seed = seed;
  return rmcfg;
}

json run_simulate(const ExperimentConfig& config, const ModelSpec& model, ArtifactSink& sink) {
  json per_seed = json::array();
  const std::uint64_t model_hash = model.hash();
  for (std::uint64_t seed : config.seeds) {
    const Trajectory traj = source_trajectory(config, model, seed);
    sink.emit("trajectory_seed" + std::to_string(seed) + ".csv",
              trajectory_to_csv(traj, model_hash));
    double mean = 0.0;
    for (double v : traj.y) mean += v;
    mean /= traj.y.size();
    double variance = 0.0;
    for (double v : traj.y) variance += (v - mean) * (v - mean);
    variance /= (traj.y.size() - 1);
    std::set<int> visited(traj.x.begin(), traj.x.end());
    const double rho = sample_autocorrelation(traj.y, config.autocorr_lag);
    const double threshold = 2.0 / std::sqrt(static_cast<double>(traj.steps()));
    per_seed.push_back({{"seed", seed},
                        {"mean", mean},
                        {"variance", variance},
                        {"regimes_visited", visited.size()},
                        {"autocorr",
                         {{"lag", config.autocorr_lag},
                          {"value", rho},
                          {"threshold", threshold},
                          {"below_threshold", std::fabs(rho) < threshold}}}});
  }
  return {{"per_seed", per_seed}};
}

json run_stability(const ExperimentConfig& config, const ModelSpec& model) {
  const StabilityReport report = check_stability(model, config.moment_order_s);
  return {{"stability", report.to_json()}};
}

json run_estimate_complete(const ExperimentConfig& config, const ModelSpec& model,
                           ArtifactSink& sink) {
  json per_seed = json::array();
  const std::uint64_t model_hash = model.hash();
  for (std::uint64_t seed : config.seeds) {
    const Trajectory traj = source_trajectory(config, model, seed);
    if (!traj.x_observed())
      throw ConfigError("estimate-complete requires a trajectory with observed regimes");
    sink.emit("trajectory_seed" + std::to_string(seed) + ".csv",
              trajectory_to_csv(traj, model_hash));
    const KernelConfig kcfg = kernel_for(config, traj);
    const ThetaField field = nw_estimate(traj, kcfg, model.regime_count());
    sink.emit("theta_complete_seed" + std::to_string(seed) + ".csv", theta_field_to_csv(field));
    const SupErrorReport sup =
        sup_error(field, model, config.eval_region.first, config.eval_region.second);
    per_seed.push_back({{"seed", seed},
                        {"bandwidth", kcfg.bandwidth},
                        {"sup_error", sup.sup},
                        {"skipped_fraction", sup.skipped_fraction}});
    if (config.data_csv) break;
  }
  return {{"per_seed", per_seed}};
}

json run_estimate_rm(const ExperimentConfig& config, const ModelSpec& model, ArtifactSink& sink) {
  json per_seed = json::array();
  const std::uint64_t model_hash = model.hash();
  const double lo = config.eval_region.first;
  const double hi = config.eval_region.second;
  const int m = model.regime_count();
  std::vector<std::vector<double>> ratio_samples(m), diag_samples(m);

  for (std::uint64_t seed : config.seeds) {
    const std::string tag = std::to_string(seed);
    const Trajectory traj = source_trajectory(config, model, seed);
    sink.emit("trajectory_seed" + tag + ".csv", trajectory_to_csv(traj, model_hash));
    const KernelConfig kcfg = kernel_for(config, traj);
    const RmConfig rmcfg = rm_config_for(config, model, kcfg, seed);
    const RmTrace trace = run_restoration_estimation(traj.without_regimes(), rmcfg);
    log_line("estimate-rm seed " + tag + " done");

    sink.emit("rm_iterations_seed" + tag + ".csv", rm_iterations_to_csv(trace));
    sink.emit("theta_rm_bar_seed" + tag + ".csv", theta_field_to_csv(trace.theta_bar_final));
    sink.emit("theta_rm_final_seed" + tag + ".csv", theta_field_to_csv(trace.theta_final));

    const std::vector<int> perm = best_alignment(trace.theta_bar_final, model, lo, hi);
    const SupErrorReport sup_rm =
        sup_error(trace.theta_bar_final.permuted_rows(perm), model, lo, hi);
    const TransitionMatrix a_aligned = trace.a_final.relabeled(perm);
    std::vector<double> diag(m);
    for (int i = 0; i < m; ++i) {
      diag[i] = a_aligned(i, i);
      diag_samples[i].push_back(diag[i]);
    }

    json entry = {{"seed", seed},
                  {"bandwidth", kcfg.bandwidth},
                  {"alignment", perm},
                  {"rm_sup_error", sup_rm.sup},
                  {"a_hat_diag", diag},
                  {"saem_reseed_events", trace.saem_reseed_events},
                  {"saem_init",
                   {{"slope", trace.saem_params.slope},
                    {"intercept", trace.saem_params.intercept},
                    {"sigma", trace.saem_params.sigma},
                    {"a_hat", trace.saem_params.a_hat.rows()}}},
                  {"grad_u_norm_initial", trace.iterations.front().grad_u_norm},
                  {"grad_u_norm_final", trace.iterations.back().grad_u_norm}};

    if (traj.x_observed()) {
      const ThetaField complete = nw_estimate(traj, kcfg, m);
      sink.emit("theta_complete_seed" + tag + ".csv", theta_field_to_csv(complete));
      const SupErrorReport sup_c = sup_error(complete, model, lo, hi);
      entry["complete_sup_error"] = sup_c.sup;
      for (int i = 0; i < m; ++i)
        ratio_samples[i].push_back(sup_c.sup[i] > 0.0 ? sup_rm.sup[i] / sup_c.sup[i]
                                                      : std::numeric_limits<double>::infinity());
    }
    if (config.frozen_psi) {
      sink.emit("theta_star_seed" + tag + ".csv", theta_field_to_csv(trace.theta_star));
      std::vector<double> gaps;
      for (int i = 0; i < m; ++i)
        for (int g = 0; g < trace.theta_star.points(); ++g)
          if (trace.theta_star.f_hat[i][g] > 1e-6)
            gaps.push_back(
                std::fabs(trace.theta_bar_final.theta[i][g] - trace.theta_star.theta[i][g]));
      entry["median_gap_theta_star"] = median(gaps);
    }
    per_seed.push_back(std::move(entry));
    if (config.data_csv) break;
  }

  json results = {{"per_seed", per_seed},
                  {"schedule",
                   {{"warmup", config.schedule.warmup},
                    {"iterations", config.schedule.total}}}};
  if (!ratio_samples[0].empty()) {
    std::vector<double> med_ratio(m), med_diag(m);
    for (int i = 0; i < m; ++i) {
      med_ratio[i] = median(ratio_samples[i]);
      med_diag[i] = median(diag_samples[i]);
    }
    results["median_sup_ratio"] = med_ratio;
    results["median_a_hat_diag"] = med_diag;
  }
  return results;
}

json run_sweep(const ExperimentConfig& config, const ModelSpec& model, ArtifactSink& sink) {
  struct Cell {
    int n;
    std::uint64_t seed;
    double bandwidth = 0.0;
    std::vector<double> sup, skipped;
  };
  std::vector<Cell> cells;
  for (int n : config.sweep_n)
    for (std::uint64_t seed : config.seeds) cells.push_back({n, seed, 0.0, {}, {}});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      Cell& cell = cells[idx];
      ExperimentConfig local = config;
      local.n = cell.n;
      const Trajectory traj = simulate(model, cell.n, config.y0, cell.seed, config.burn_in);
      const KernelConfig kcfg = kernel_for(local, traj);
      const ThetaField field = nw_estimate(traj, kcfg, model.regime_count());
      const SupErrorReport sup =
          sup_error(field, model, config.eval_region.first, config.eval_region.second);
      cell.bandwidth = kcfg.bandwidth;
      cell.sup = sup.sup;
      cell.skipped = sup.skipped_fraction;
    }
  };
  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const int m = model.regime_count();
  std::ostringstream csv;
  csv << "n,seed,bandwidth";
  for (int i = 0; i < m; ++i) csv << ",sup_" << i + 1 << ",skipped_" << i + 1;
  csv << '\n';
  for (const Cell& cell : cells) {
    csv << cell.n << ',' << cell.seed << ',' << format_double(cell.bandwidth);
    for (int i = 0; i < m; ++i)
      csv << ',' << format_double(cell.sup[i]) << ',' << format_double(cell.skipped[i]);
    csv << '\n';
  }
  sink.emit("sweep_results.csv", csv.str());

  json table = json::array();
  std::vector<std::vector<double>> medians(m);
  for (int n : config.sweep_n) {
    std::vector<std::vector<double>> by_regime(m);
    double bandwidth = 0.0;
    for (const Cell& cell : cells)
      if (cell.n == n) {
        bandwidth = cell.bandwidth;
        for (int i = 0; i < m; ++i) by_regime[i].push_back(cell.sup[i]);
      }
    std::vector<double> med(m);
    for (int i = 0; i < m; ++i) {
      med[i] = median(by_regime[i]);
      medians[i].push_back(med[i]);
    }
    table.push_back({{"n", n}, {"bandwidth", bandwidth}, {"median_sup", med}});
  }
  std::vector<bool> monotone(m, true);
  std::vector<double> ratio(m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (std::size_t j = 1; j < medians[i].size(); ++j)
      if (medians[i][j] > medians[i][j - 1]) monotone[i] = false;
    ratio[i] = medians[i].front() > 0.0 ? medians[i].back() / medians[i].front()
                                        : std::numeric_limits<double>::infinity();
  }
  return {{"table", table},
          {"monotone_nonincreasing", monotone},
          {"ratio_last_over_first", ratio},
          {"seeds_per_n", config.seeds.size()}};
}

json run_figures(const ExperimentConfig& config, const ModelSpec& model, ArtifactSink& sink) {
  const std::uint64_t seed = config.seeds.front();
  const Trajectory traj = source_trajectory(config, model, seed);
  sink.emit("trajectory_seed" + std::to_string(seed) + ".csv",
            trajectory_to_csv(traj, model.hash()));
  const KernelConfig kcfg = kernel_for(config, traj);
  const int m = model.regime_count();

  const ThetaField complete = nw_estimate(traj, kcfg, m);
  const RmConfig rmcfg = rm_config_for(config, model, kcfg, seed);
  const RmTrace trace = run_restoration_estimation(traj.without_regimes(), rmcfg);
  const std::vector<int> perm = best_alignment(trace.theta_bar_final, model,
                                               config.eval_region.first, config.eval_region.second);
  const ThetaField rm_aligned = trace.theta_bar_final.permuted_rows(perm);

  std::ostringstream curves;
  curves << "y";
  for (int i = 0; i < m; ++i) curves << ",truth_" << i + 1;
  for (int i = 0; i < m; ++i) curves << ",complete_" << i + 1;
  for (int i = 0; i < m; ++i) curves << ",rm_" << i + 1;
  curves << '\n';
  for (int g = 0; g < complete.points(); ++g) {
    const double y = complete.grid[g];
    curves << format_double(y);
    for (int i = 0; i < m; ++i) curves << ',' << format_double(eval_regression(model.regimes[i], y));
    for (int i = 0; i < m; ++i) curves << ',' << format_double(complete.theta[i][g]);
    for (int i = 0; i < m; ++i) curves << ',' << format_double(rm_aligned.theta[i][g]);
    curves << '\n';
  }
  sink.emit("figure_curves.csv", curves.str());

  std::ostringstream scatter;
  scatter << "y_prev,y_next,x\n";
  for (int k = 0; k < traj.steps(); ++k) {
    scatter << format_double(traj.y[k]) << ',' << format_double(traj.y[k + 1]) << ','
            << (traj.x_observed() ? std::to_string(traj.x[k] + 1) : std::string()) << '\n';
  }
  sink.emit("figure_scatter.csv", scatter.str());

  std::vector<double> truth_at_zero(m);
  for (int i = 0; i < m; ++i) truth_at_zero[i] = eval_regression(model.regimes[i], 0.0);
  return {{"truth_at_zero", truth_at_zero},
          {"alignment", perm},
          {"seed", seed},
          {"bandwidth", kcfg.bandwidth}};
}

void require_key(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("report is missing '" + key + "' in " + where);
}

}  // namespace

ModelSpec section4_preset() {
  TransitionMatrix a({{0.98, 0.02}, {0.02, 0.98}});
  std::vector<RegressionFunction> regimes;
  regimes.emplace_back(BumpForm{0.7, 2.0, 10.0}, SublinearEnvelope{0.7, 2.0});
  regimes.emplace_back(LogisticForm{2.0, 10.0, -1.0}, SublinearEnvelope{0.0, 1.0});
  const double sigma = std::sqrt(0.4);
  ModelSpec model{std::move(a), std::move(regimes), {sigma, sigma}, {0.5, 0.5}};
  model.validate();
  return model;
}

ModelSpec ExperimentConfig::resolve_model() const {
  if (preset) {
    if (*preset != "paper_section4") throw ConfigError("unknown preset '" + *preset + "'");
    return section4_preset();
  }
  if (!model) throw ConfigError("config needs either a model or a preset");
  return *model;
}

void ExperimentConfig::validate() const {
  if (!known_modes().count(mode)) throw ConfigError("unknown mode '" + mode + "'");
  resolve_model();
  if (n < 1) throw ConfigError("n must be at least 1");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (grid_points < 2) throw ConfigError("grid_points must be at least 2");
  if (bandwidth && !(*bandwidth > 0.0)) throw ConfigError("bandwidth override must be positive");
  if (eval_region.first > eval_region.second) throw ConfigError("eval_region must be ordered");
  if (mode == "consistency-sweep" && sweep_n.empty())
    throw ConfigError("consistency-sweep requires sweep.n_values");
  for (int sn : sweep_n)
    if (sn < 2) throw ConfigError("sweep n values must be at least 2");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (burn_in < 0) throw ConfigError("burn_in must be nonnegative");
  schedule.validate();
  if (saem_iterations < 1) throw ConfigError("saem.iterations must be at least 1");
  if (saem_warmup < 0) throw ConfigError("saem.warmup must be nonnegative");
}

ExperimentConfig parse_config(const json& doc, const std::string& mode) {
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  ExperimentConfig config;
  config.mode = mode;
  if (doc.contains("mode") && doc["mode"].get<std::string>() != mode)
    throw ConfigError("config mode '" + doc["mode"].get<std::string>() +
                      "' conflicts with the subcommand '" + mode + "'");

  if (doc.contains("preset")) config.preset = doc["preset"].get<std::string>();
  if (doc.contains("model")) config.model = ModelSpec::from_json(doc["model"]);
  if (doc.contains("data_csv")) config.data_csv = doc["data_csv"].get<std::string>();
  if (doc.contains("n")) config.n = doc["n"].get<int>();
  if (doc.contains("seeds")) {
    config.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
  }
  if (doc.contains("y0")) {
    if (doc["y0"].is_string()) {
      if (doc["y0"].get<std::string>() != "stationary")
        throw ConfigError("y0 must be a number or \"stationary\"");
      config.y0 = StationaryStart{};
    } else {
      config.y0 = doc["y0"].get<double>();
    }
  }
  if (doc.contains("burn_in")) config.burn_in = doc["burn_in"].get<int>();

  if (doc.contains("kernel")) {
    const json& k = doc["kernel"];
    if (k.contains("family")) {
      const std::string family = k["family"].get<std::string>();
      if (family == "gaussian")
        config.kernel_family = KernelFamily::kGaussian;
      else if (family == "epanechnikov")
        config.kernel_family = KernelFamily::kEpanechnikov;
      else
        throw ConfigError("unknown kernel family '" + family + "'");
    }
    if (k.contains("bandwidth") && !k["bandwidth"].is_null())
      config.bandwidth = k["bandwidth"].get<double>();
    if (k.contains("grid_points")) config.grid_points = k["grid_points"].get<int>();
    if (k.contains("grid_range")) {
      const auto range = k["grid_range"].get<std::vector<double>>();
      if (range.size() != 2 || !(range[0] < range[1]))
        throw ConfigError("grid_range must be [lo, hi] with lo < hi");
      config.grid_range = {range[0], range[1]};
    }
  }
  if (doc.contains("schedule")) {
    const json& s = doc["schedule"];
    if (s.contains("warmup")) config.schedule.warmup = s["warmup"].get<int>();
    if (s.contains("iterations")) config.schedule.total = s["iterations"].get<int>();
  }
  if (doc.contains("saem")) {
    const json& s = doc["saem"];
    if (s.contains("iterations")) config.saem_iterations = s["iterations"].get<int>();
    if (s.contains("warmup")) config.saem_warmup = s["warmup"].get<int>();
  }
  if (doc.contains("rm")) {
    const json& r = doc["rm"];
    if (r.contains("frozen_psi")) config.frozen_psi = r["frozen_psi"].get<bool>();
    if (r.contains("theta_init")) {
      const std::string init = r["theta_init"].get<std::string>();
      if (init == "zero")
        config.theta_init = ThetaInit::kZero;
      else if (init == "step0")
        config.theta_init = ThetaInit::kStep0;
      else
        throw ConfigError("rm.theta_init must be \"zero\" or \"step0\"");
    }
    if (r.contains("reestimate_sigma"))
      config.reestimate_sigma = r["reestimate_sigma"].get<bool>();
  }
  if (doc.contains("sweep")) {
    config.sweep_n = doc["sweep"].at("n_values").get<std::vector<int>>();
  }
  if (doc.contains("eval_region")) {
    const auto region = doc["eval_region"].get<std::vector<double>>();
    if (region.size() != 2) throw ConfigError("eval_region must be [lo, hi]");
    config.eval_region = {region[0], region[1]};
  }
  if (doc.contains("moment_order_s")) config.moment_order_s = doc["moment_order_s"].get<double>();
  if (doc.contains("autocorr_lag")) config.autocorr_lag = doc["autocorr_lag"].get<int>();
  if (doc.contains("output_dir")) config.output_dir = doc["output_dir"].get<std::string>();
  if (doc.contains("threads")) config.threads = doc["threads"].get<int>();

  config.validate();
  return config;
}

json run(const ExperimentConfig& config) {
  config.validate();
  const ModelSpec model = config.resolve_model();
  const auto started = std::chrono::steady_clock::now();

  ArtifactSink sink;
  sink.dir = config.output_dir;
  fs::create_directories(sink.dir);

  json results;
  if (config.mode == "simulate") {
    results = run_simulate(config, model, sink);
  } else if (config.mode == "stability-check") {
    results = run_stability(config, model);
  } else if (config.mode == "estimate-complete") {
    results = run_estimate_complete(config, model, sink);
  } else if (config.mode == "estimate-rm") {
    results = run_estimate_rm(config, model, sink);
  } else if (config.mode == "consistency-sweep") {
    results = run_sweep(config, model, sink);
  } else {
    results = run_figures(config, model, sink);
  }

  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  json report = {{"schema_version", kReportSchemaVersion},
                 {"mode", config.mode},
                 {"preset", config.preset ? json(*config.preset) : json(nullptr)},
                 {"n", config.n},
                 {"seeds", config.seeds},
                 {"kernel",
                  {{"family",
                    config.kernel_family == KernelFamily::kGaussian ? "gaussian" : "epanechnikov"},
                   {"bandwidth_override", config.bandwidth ? json(*config.bandwidth) : json(nullptr)},
                   {"grid_points", config.grid_points}}},
                 {"results", results},
                 {"artifacts", sink.names},
                 {"timings_ms", {{"total", elapsed}}}};
  validate_report(report);
  write_file((sink.dir / "report.json").string(), report.dump(2) + "\n");
  log_line(config.mode + " finished in " + std::to_string(elapsed) + " ms");
  return report;
}

void validate_report(const json& report) {
  for (const char* key : {"schema_version", "mode", "preset", "n", "seeds", "kernel", "results",
                          "artifacts", "timings_ms"})
    require_key(report, key, "top level");
  if (report["schema_version"].get<int>() != kReportSchemaVersion)
    throw ConfigError("unsupported report schema version");
  const std::string mode = report["mode"].get<std::string>();
  if (!known_modes().count(mode)) throw ConfigError("report carries unknown mode '" + mode + "'");
  if (!report["seeds"].is_array()) throw ConfigError("report seeds must be an array");
  if (!report["artifacts"].is_array()) throw ConfigError("report artifacts must be an array");
  if (!report["results"].is_object()) throw ConfigError("report results must be an object");
  if (!report["timings_ms"].is_object()) throw ConfigError("report timings_ms must be an object");
  const json& results = report["results"];

  if (mode == "simulate" || mode == "estimate-complete" || mode == "estimate-rm") {
    require_key(results, "per_seed", "results");
    for (const json& entry : results["per_seed"]) {
      require_key(entry, "seed", "per_seed entry");
      if (mode == "simulate")
        for (const char* key : {"mean", "variance", "regimes_visited", "autocorr"})
          require_key(entry, key, "simulate per_seed entry");
      if (mode == "estimate-complete")
        for (const char* key : {"bandwidth", "sup_error", "skipped_fraction"})
          require_key(entry, key, "estimate-complete per_seed entry");
      if (mode == "estimate-rm")
        for (const char* key : {"alignment", "rm_sup_error", "a_hat_diag", "grad_u_norm_initial",
                                "grad_u_norm_final"})
          require_key(entry, key, "estimate-rm per_seed entry");
    }
  } else if (mode == "stability-check") {
    require_key(results, "stability", "results");
    for (const char* key : {"stationary_distribution", "log_condition_value", "spectral_radius_qs",
                            "moment_order_s", "e4_holds", "moment_condition_holds", "stable"})
      require_key(results["stability"], key, "stability");
  } else if (mode == "consistency-sweep") {
    for (const char* key : {"table", "monotone_nonincreasing", "ratio_last_over_first"})
      require_key(results, key, "results");
    for (const json& row : results["table"])
      for (const char* key : {"n", "bandwidth", "median_sup"}) require_key(row, key, "sweep table row");
  } else if (mode == "reproduce-figures") {
    for (const char* key : {"truth_at_zero", "alignment"}) require_key(results, key, "results");
  }
}

}  // namespace msnar
