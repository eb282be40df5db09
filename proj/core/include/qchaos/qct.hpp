#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qchaos/model.hpp"

namespace qchaos {

/// One inequality: satisfied when margin = lhs/rhs reaches the threshold.
struct QctEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double threshold = 1.0;
  bool satisfied = false;
  std::string relation;  // ">>", ">~" or ">"
};

struct EvalPoint {
  double x = 0.0;
  double p = 0.0;
  double t = 0.0;
};

struct QctReport {
  EvalPoint point;
  bool orbit_average = false;  // entries are medians over orbit samples
  std::vector<QctEntry> entries;

  bool all_satisfied() const;
  const QctEntry* find(const std::string& name) const;
};

struct QctThresholds {
  double much_greater = 10.0;  // ">>"
  double greater_approx = 1.0;  // ">~"
  double singular_force = 1e-8;
};

/// 8k against the localization bound: classical sqrt(F''^2 |F'| / (2 m F^2)),
/// quantum F''^2 hbar / (4 m F^2). Throws SingularPoint where |F| is tiny.
QctEntry check_localization(const ModelSpec& model, const EvalPoint& at, bool quantum,
                            const QctThresholds& th = {});

/// Classical: k >> 2|F'|/S with S = s hbar (one entry).
/// Quantum: 2|F'|/s << hbar k << |F'| s / 4 (two entries, "left" and "right").
std::vector<QctEntry> check_low_noise(const ModelSpec& model, const EvalPoint& at,
                                      double action_s, bool quantum, const QctThresholds& th = {});

/// 8k > 1 / (dt_window dx^2); margin 8k dt dx^2, strict inequality.
QctEntry check_record_fidelity(double k, double window, double tolerance);

/// Solution of (A/u0) exp(-lambda t) = sqrt(D t / (m lambda)).
struct TStar {
  double t_star = 0.0;
  double fold_spacing = 0.0;  // l(t*)
  bool no_root = false;       // structure is smoothed from the start
};

/// lambda_bar in inverse model-time units; t* in model time.
TStar compute_t_star(double lambda_bar, double D, double mass, double area, double u0);

enum class WeakQctVerdict { Satisfied, MildlyViolated, StronglyViolated };

struct WeakQctEntry {
  QctEntry entry;               // margin = D t* / (lambda m hbar)
  double fold_ratio = 0.0;      // l(t*)^2 / hbar
  WeakQctVerdict verdict = WeakQctVerdict::StronglyViolated;
};

/// margin >= 1: satisfied; 0.1 <= margin < 1: mildly violated; below: strongly.
WeakQctEntry check_weak_qct(double D, const TStar& ts, double lambda_bar, double mass,
                            double hbar);

std::string to_string(WeakQctVerdict v);

/// Geometry of a noiseless classical orbit used for the t* prefactor and the
/// action scale.
struct OrbitSummary {
  double x_lo = 0.0, x_hi = 0.0, p_lo = 0.0, p_hi = 0.0;
  double area = 0.0;              // (x extent) * (p extent)
  double action_per_period = 0.0;  // time average of p dq/dt over one drive period
  std::vector<EvalPoint> strobe;   // one sample per drive period
};

OrbitSummary classical_orbit_summary(const ModelSpec& model, double x0, double p0,
                                     std::size_t periods, std::size_t steps_per_period);

/// Full strong-QCT report (localization, low noise, record fidelity) at a point.
QctReport strong_qct_report(const ModelSpec& model, const EvalPoint& at, double action_s,
                            double window, double tolerance, const QctThresholds& th = {});

/// Same criteria evaluated on every orbit sample; each entry carries the median
/// lhs, rhs and margin over samples where the force is not singular.
QctReport strong_qct_orbit_report(const ModelSpec& model, const std::vector<EvalPoint>& samples,
                                  double action_s, double window, double tolerance,
                                  const QctThresholds& th = {});

}  // namespace qchaos
