#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "msnar/model.hpp"
#include "msnar/rm.hpp"
#include "msnar/simulate.hpp"

namespace msnar {

inline constexpr int kReportSchemaVersion = 1;

// Batch-run description; the CLI subcommand selects the mode, everything else
// comes from a JSON config document.
struct ExperimentConfig {
  std::string mode;
  std::optional<std::string> preset;
  std::optional<ModelSpec> model;
  std::optional<std::string> data_csv;  // estimate modes may ingest a trajectory
  int n = 1000;
  std::vector<std::uint64_t> seeds{1};
  InitialValue y0 = StationaryStart{};
  int burn_in = kDefaultBurnIn;

  KernelFamily kernel_family = KernelFamily::kGaussian;
  std::optional<double> bandwidth;  // default rule when absent
  int grid_points = 201;
  std::optional<std::pair<double, double>> grid_range;

  StepSchedule schedule;
  int saem_iterations = 100;
  int saem_warmup = 20;
  bool frozen_psi = false;
  std::optional<ThetaInit> theta_init;  // frozen runs default to zero init
  bool reestimate_sigma = false;
  bool record_history = false;

  std::vector<int> sweep_n;
  std::pair<double, double> eval_region{-1.5, 1.5};
  double moment_order_s = 1.0;
  int autocorr_lag = 50;

  std::string output_dir = ".";
  int threads = 1;

  ModelSpec resolve_model() const;
  void validate() const;
};

// The paper's two-regime example: bump and decreasing logistic regimes,
// noise variance 0.4, 0.98-diagonal transition matrix.
ModelSpec section4_preset();

ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& mode);

// Executes the mode, writes CSV artifacts plus report.json under output_dir,
// and returns the report.
nlohmann::json run(const ExperimentConfig& config);

// Guards the versioned report schema; throws ConfigError on any violation.
void validate_report(const nlohmann::json& report);

}  // namespace msnar
