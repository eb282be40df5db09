#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qchaos/lyapunov.hpp"
#include "qchaos/model.hpp"

namespace qchaos {

enum class ExperimentKind { StrongQct, WeakQct, LyapunovSweep, StrobeMap, IsolatedDecay };

std::string to_string(ExperimentKind kind);
/// Throws ConfigError for an unknown name.
ExperimentKind parse_experiment_kind(const std::string& name);

/// Flat INI contents: section -> key -> raw value.
using IniSections = std::map<std::string, std::map<std::string, std::string>>;

/// Parse "[section]" / "key = value" lines; '#' and ';' start comments.
/// Duplicate sections or keys are errors.
IniSections parse_ini(std::istream& in, const std::string& source = "<config>");

struct GridSpec {
  double x_min = -6.0;
  double x_max = 6.0;
  std::size_t n = 512;
  // Phase-space momentum axis; n_p = 0 derives it from the position grid.
  double p_min = 0.0;
  double p_max = 0.0;
  std::size_t n_p = 0;

  SpatialGrid spatial() const { return SpatialGrid(x_min, x_max, n); }
  /// Explicit momentum axis if given, else the Wigner dual of the position grid.
  PhaseSpaceGrid phase_space(double hbar) const;
};

struct InitialState {
  double x0 = 2.0;
  double p0 = 0.0;
  double sigma_x = 0.0;  // 0: sqrt(hbar/2)
};

struct Numerics {
  std::size_t steps_per_period = 1000;
  double t_total = 100.0;  // drive periods
  std::size_t ensemble_n = 1;
  std::uint64_t base_seed = 1;
  double tau_r = 1.0;
  double delta0 = 1e-6;
  std::size_t check_every = 100;
  std::size_t record_every = 10;  // steps between trajectory rows
  std::size_t workers = 1;
};

struct StrongQctParams {
  double window = 0.01;     // record averaging time
  double tolerance = 0.01;  // allowed position noise of the record
  /// "orbit": s = (time-averaged action per drive period of the classical
  /// orbit) / hbar. "fixed": use `action_s` as given.
  std::string action_convention = "orbit";
  double action_s = 0.0;
  double sqrt_vx_bound = 0.0;  // 0 disables the localization assertion
  std::size_t orbit_periods = 200;
};

struct WeakQctParams {
  std::vector<double> d_values{1e-5, 1e-3, 1e-2};
  double area = 0.0;  // 0: bounding box of the classical orbit
  double u0 = 0.0;    // 0: sqrt(2 pi sqrt(Cxx Cpp)) of the initial state
  std::size_t orbit_periods = 2000;
  std::size_t snapshot_every = 0;  // periods; 0 writes the final fields only
};

struct SweepParams {
  std::vector<double> k_values;
  LyapunovSystem system = LyapunovSystem::Quantum;
  Renormalization renormalization = Renormalization::Redisplace;
  double p_scale = 1.0;
  double direction = 0.0;
};

struct StrobeParams {
  double bandwidth = 0.0;  // 0: Scott's rule per axis
  std::vector<double> levels{0.05, 0.15, 0.25, 0.35, 0.45, 0.55};
  std::size_t classical_periods = 2000;
  std::size_t kde_n = 128;
};

struct DecayParams {
  double fit_t_min = 10.0;
  double fit_t_max = 500.0;
  Renormalization renormalization = Renormalization::Tangent;
  std::size_t classical_walkers = 2000;  // ensemble for the classical control
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::StrongQct;
  std::string out_dir = "results";
  ModelSpec model = duffing_spec();
  GridSpec grid;
  InitialState initial;
  Numerics numerics;
  StrongQctParams strong;
  WeakQctParams weak;
  SweepParams sweep;
  StrobeParams strobe;
  DecayParams decay;

  /// Every effective setting, defaults included, in config-file form.
  IniSections resolved() const;
};

/// Build a typed configuration. Unknown sections or keys, malformed values and
/// sections that do not belong to the chosen experiment raise ConfigError.
ExperimentConfig config_from_sections(const IniSections& sections);
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");

std::string to_string(Renormalization r);
std::string to_string(LyapunovSystem s);

}  // namespace qchaos
