#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qchaos/config.hpp"
#include "qchaos/lyapunov.hpp"
#include "qchaos/qct.hpp"

namespace qchaos {

/// Command-line overrides applied on top of a loaded config.
struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool dump_noise = false;  // write noise-*.ndjson next to the trajectories
};

void apply_overrides(ExperimentConfig& cfg, const RunOptions& opts);

struct ExperimentResult {
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;  // also written to summary.json
  std::optional<QctReport> qct;
};

/// Conditioned quantum trajectories with the strong-QCT report evaluated
/// along them.
ExperimentResult run_strong_qct(const ExperimentConfig& cfg, bool dump_noise = false);

/// Lindblad and Fokker-Planck evolution from matched initial data for every
/// configured D, with slice and full-field distances, t* and its margins.
ExperimentResult run_weak_qct(const ExperimentConfig& cfg);

/// Fixed-noise Lyapunov estimate for every configured k.
ExperimentResult run_lyapunov_sweep(const ExperimentConfig& cfg);

/// Stroboscopic samples of conditioned centroids against the classical map.
ExperimentResult run_strobe_map(const ExperimentConfig& cfg, bool dump_noise = false);

/// Finite-time exponent of the unobserved system and its log-log decay slope.
ExperimentResult run_isolated_decay(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Lyapunov settings derived from an experiment config at strength k.
LyapunovConfig lyapunov_config(const ExperimentConfig& cfg, double k);

/// Finite-time exponent of two noiseless classical ensembles sampled from the
/// initial Gaussian, offset by delta0 in x: the ensemble-averaged position
/// of an unobserved classical system.
struct EnsembleDivergence {
  std::vector<double> t;       // drive periods
  std::vector<double> lambda;  // ln(|<x>_2 - <x>_1| / delta0) / t
};
EnsembleDivergence classical_ensemble_divergence(const ModelSpec& model, double x0, double p0,
                                                 double sigma_x, double sigma_p, double delta0,
                                                 std::size_t walkers, std::size_t periods,
                                                 std::size_t steps_per_period, std::uint64_t seed);

}  // namespace qchaos
