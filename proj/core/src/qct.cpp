#include "qchaos/qct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qchaos/classical.hpp"
#include "qchaos/errors.hpp"

namespace qchaos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

QctEntry make_entry(std::string name, double lhs, double rhs, double threshold, std::string rel) {
  QctEntry e;
  e.name = std::move(name);
  e.lhs = lhs;
  e.rhs = rhs;
  e.threshold = threshold;
  e.relation = std::move(rel);
  e.margin = rhs == 0.0 ? (lhs > 0.0 ? kInf : 0.0) : lhs / rhs;
  e.satisfied = e.relation == ">" ? e.margin > threshold : e.margin >= threshold;
  return e;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

bool QctReport::all_satisfied() const {
  return std::all_of(entries.begin(), entries.end(), [](const QctEntry& e) { return e.satisfied; });
}

const QctEntry* QctReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

QctEntry check_localization(const ModelSpec& model, const EvalPoint& at, bool quantum,
                            const QctThresholds& th) {
  const auto d = force_and_derivatives(model.potential, at.x, at.t);
  const double lhs = 8.0 * model.k;
  const std::string name = quantum ? "localization_quantum" : "localization_classical";
  if (d.d2_force == 0.0) return make_entry(name, lhs, 0.0, th.much_greater, ">>");
  if (std::abs(d.force) < th.singular_force) {
    throw SingularPoint(name + ": force vanishes at x=" + std::to_string(at.x));
  }
  const double f2 = d.force * d.force;
  const double rhs = quantum
                         ? d.d2_force * d.d2_force * model.hbar / (4.0 * model.mass * f2)
                         : std::sqrt(d.d2_force * d.d2_force * std::abs(d.d_force) / (2.0 * model.mass * f2));
  return make_entry(name, lhs, rhs, th.much_greater, ">>");
}

std::vector<QctEntry> check_low_noise(const ModelSpec& model, const EvalPoint& at,
                                      double action_s, bool quantum, const QctThresholds& th) {
  if (!(action_s > 0.0)) throw std::invalid_argument("check_low_noise: action must be > 0");
  const auto d = force_and_derivatives(model.potential, at.x, at.t);
  const double g = std::abs(d.d_force);
  if (!quantum) {
    const double big_s = action_s * model.hbar;
    if (!(big_s > 0.0)) throw std::invalid_argument("check_low_noise: classical mode needs S = s hbar > 0");
    return {make_entry("low_noise_classical", model.k, 2.0 * g / big_s, th.much_greater, ">>")};
  }
  const double hk = model.hbar * model.k;
  return {make_entry("low_noise_quantum_left", hk, 2.0 * g / action_s, th.much_greater, ">>"),
          make_entry("low_noise_quantum_right", g * action_s / 4.0, hk, th.much_greater, ">>")};
}

QctEntry check_record_fidelity(double k, double window, double tolerance) {
  if (!(window > 0.0) || !(tolerance > 0.0)) {
    throw std::invalid_argument("check_record_fidelity: window and tolerance must be > 0");
  }
  return make_entry("record_fidelity", 8.0 * k, 1.0 / (window * tolerance * tolerance), 1.0, ">");
}

TStar compute_t_star(double lambda_bar, double D, double mass, double area, double u0) {
  if (!(lambda_bar > 0.0) || !(D > 0.0) || !(mass > 0.0) || !(area > 0.0) || !(u0 > 0.0)) {
    throw std::invalid_argument("compute_t_star: all inputs must be > 0");
  }
  auto fold = [&](double t) { return area / u0 * std::exp(-lambda_bar * t); };
  auto width = [&](double t) { return std::sqrt(D * t / (mass * lambda_bar)); };
  auto gap = [&](double t) { return fold(t) - width(t); };
  TStar out;
  if (gap(0.0) <= 0.0) {
    out.no_root = true;
    out.fold_spacing = fold(0.0);
    return out;
  }
  double lo = 0.0, hi = 1.0 / lambda_bar;
  while (gap(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  out.t_star = 0.5 * (lo + hi);
  out.fold_spacing = fold(out.t_star);
  return out;
}

WeakQctEntry check_weak_qct(double D, const TStar& ts, double lambda_bar, double mass,
                            double hbar) {
  if (!(hbar > 0.0) || !(lambda_bar > 0.0) || !(mass > 0.0)) {
    throw std::invalid_argument("check_weak_qct: hbar, lambda and mass must be > 0");
  }
  WeakQctEntry out;
  out.entry = make_entry("weak_qct", D * ts.t_star, lambda_bar * mass * hbar, 1.0, ">~");
  out.fold_ratio = ts.fold_spacing * ts.fold_spacing / hbar;
  const double m = out.entry.margin;
  out.verdict = m >= 1.0 ? WeakQctVerdict::Satisfied
                         : (m >= 0.1 ? WeakQctVerdict::MildlyViolated : WeakQctVerdict::StronglyViolated);
  return out;
}

std::string to_string(WeakQctVerdict v) {
  switch (v) {
    case WeakQctVerdict::Satisfied: return "satisfied";
    case WeakQctVerdict::MildlyViolated: return "mildly violated";
    case WeakQctVerdict::StronglyViolated: return "strongly violated";
  }
  return "unknown";
}

OrbitSummary classical_orbit_summary(const ModelSpec& model, double x0, double p0,
                                     std::size_t periods, std::size_t steps_per_period) {
  if (periods == 0 || steps_per_period == 0) throw std::invalid_argument("classical_orbit_summary: empty run");
  const double period = model.drive_period();
  const double dt = period / static_cast<double>(steps_per_period);
  OrbitSummary out;
  PhasePoint s{x0, p0};
  out.x_lo = out.x_hi = x0;
  out.p_lo = out.p_hi = p0;
  double action = 0.0;
  out.strobe.push_back({x0, p0, 0.0});
  for (std::size_t k = 0; k < periods; ++k) {
    for (std::size_t j = 0; j < steps_per_period; ++j) {
      const double t = static_cast<double>(k) * period + static_cast<double>(j) * dt;
      const PhasePoint next = heun_step(s, model.potential, model.mass, t, dt);
      // p dq along the step by the trapezoid rule.
      action += 0.5 * (s.p + next.p) * (next.q - s.q);
      s = next;
      out.x_lo = std::min(out.x_lo, s.q);
      out.x_hi = std::max(out.x_hi, s.q);
      out.p_lo = std::min(out.p_lo, s.p);
      out.p_hi = std::max(out.p_hi, s.p);
    }
    out.strobe.push_back({s.q, s.p, static_cast<double>(k + 1) * period});
  }
  out.area = (out.x_hi - out.x_lo) * (out.p_hi - out.p_lo);
  out.action_per_period = action / static_cast<double>(periods);
  return out;
}

QctReport strong_qct_report(const ModelSpec& model, const EvalPoint& at, double action_s,
                            double window, double tolerance, const QctThresholds& th) {
  QctReport r;
  r.point = at;
  const bool quantum = model.hbar > 0.0;
  r.entries.push_back(check_localization(model, at, false, th));
  if (quantum) r.entries.push_back(check_localization(model, at, true, th));
  for (auto& e : check_low_noise(model, at, action_s, quantum, th)) r.entries.push_back(std::move(e));
  r.entries.push_back(check_record_fidelity(model.k, window, tolerance));
  return r;
}

QctReport strong_qct_orbit_report(const ModelSpec& model, const std::vector<EvalPoint>& samples,
                                  double action_s, double window, double tolerance,
                                  const QctThresholds& th) {
  std::vector<QctReport> reports;
  for (const auto& s : samples) {
    try {
      reports.push_back(strong_qct_report(model, s, action_s, window, tolerance, th));
    } catch (const SingularPoint&) {
      // Points where the force vanishes carry no information about these bounds.
    }
  }
  if (reports.empty()) throw SingularPoint("strong_qct_orbit_report: every sample is singular");
  QctReport out;
  out.orbit_average = true;
  out.point = samples.front();
  for (std::size_t e = 0; e < reports.front().entries.size(); ++e) {
    std::vector<double> lhs, rhs, margin;
    for (const auto& r : reports) {
      lhs.push_back(r.entries[e].lhs);
      rhs.push_back(r.entries[e].rhs);
      margin.push_back(r.entries[e].margin);
    }
    QctEntry entry = reports.front().entries[e];
    entry.lhs = median(lhs);
    entry.rhs = median(rhs);
    entry.margin = median(margin);
    entry.satisfied = entry.relation == ">" ? entry.margin > entry.threshold : entry.margin >= entry.threshold;
    out.entries.push_back(entry);
  }
  return out;
}

}  // namespace qchaos
